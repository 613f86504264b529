"""Monte-Carlo campaigns: many seeded missions, detection statistics, CSV.

A campaign runs one scenario across a block of seeds and aggregates per-tag
outcomes. Detection rate comes with a Wilson score interval so small
campaigns report honest uncertainty instead of a bare point estimate.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Optional, Sequence

from .scenario import ScenarioConfig
from .simloop import MissionResult, run_scenario


@dataclass(frozen=True)
class TagOutcome:
    """One tag in one run — a single row of campaign output."""

    run_id: str
    scenario: str
    seed: int
    tag_epc: str
    detected: bool
    time_to_read_s: Optional[float]
    sensor_channel: str           # "" for bare identification reads
    sensor_value: Optional[float]
    readings_json: str            # every channel, for multi-channel tags


@dataclass(frozen=True)
class CampaignSummary:
    scenario: str
    n_runs: int
    n_tag_trials: int
    n_detected: int
    detection_rate: float
    wilson_low: float
    wilson_high: float
    mean_mission_s: float
    per_run_detected: tuple[int, ...]

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "n_runs": self.n_runs,
            "n_tag_trials": self.n_tag_trials,
            "n_detected": self.n_detected,
            "detection_rate": self.detection_rate,
            "wilson_low": self.wilson_low,
            "wilson_high": self.wilson_high,
            "mean_mission_s": self.mean_mission_s,
            "per_run_detected": list(self.per_run_detected),
        }


def wilson_interval(successes: int, trials: int, z: float = 1.96) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials <= 0:
        raise ValueError("trials must be positive")
    if not 0 <= successes <= trials:
        raise ValueError("successes must be within [0, trials]")
    p = successes / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    center = (p + z2 / (2.0 * trials)) / denom
    half = (z / denom) * math.sqrt(p * (1.0 - p) / trials + z2 / (4.0 * trials * trials))
    return max(0.0, center - half), min(1.0, center + half)


def outcomes_from_result(result: MissionResult) -> list[TagOutcome]:
    rows = []
    for epc_hex, ok in result.detected.items():
        readings = result.sensor_values.get(epc_hex, {})
        first = next(iter(readings.items()), ("", None))
        rows.append(TagOutcome(
            run_id=result.mission_id,
            scenario=result.scenario,
            seed=result.seed,
            tag_epc=epc_hex,
            detected=ok,
            time_to_read_s=result.time_to_read_s.get(epc_hex),
            sensor_channel=first[0],
            sensor_value=first[1],
            readings_json=json.dumps(readings, sort_keys=True),
        ))
    return rows


def run_campaign(cfg: ScenarioConfig, seeds: Sequence[int],
                 log_dir: Optional[Path] = None,
                 progress: Optional[Callable[[int, MissionResult], None]] = None,
                 ) -> tuple[CampaignSummary, list[TagOutcome]]:
    if not seeds:
        raise ValueError("need at least one seed")
    rows: list[TagOutcome] = []
    per_run: list[int] = []
    durations: list[float] = []
    for seed in seeds:
        result = run_scenario(cfg, seed, log_dir=log_dir)
        rows.extend(outcomes_from_result(result))
        per_run.append(result.n_detected)
        durations.append(result.sim_time_s)
        if progress is not None:
            progress(seed, result)
    n_detected = sum(1 for r in rows if r.detected)
    trials = len(rows)
    low, high = wilson_interval(n_detected, trials) if trials else (0.0, 1.0)
    summary = CampaignSummary(
        scenario=cfg.name, n_runs=len(seeds), n_tag_trials=trials,
        n_detected=n_detected,
        detection_rate=n_detected / trials if trials else 1.0,
        wilson_low=low, wilson_high=high,
        mean_mission_s=sum(durations) / len(durations),
        per_run_detected=tuple(per_run))
    return summary, rows


CSV_FIELDS = ("run_id", "scenario", "seed", "tag_epc", "detected",
              "time_to_read_s", "sensor_channel", "sensor_value", "readings_json")


def write_csv(rows: Iterable[TagOutcome], path: Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_FIELDS)
        writer.writeheader()
        for row in rows:
            d = {k: getattr(row, k) for k in CSV_FIELDS}
            d["detected"] = int(row.detected)
            if row.time_to_read_s is not None:
                d["time_to_read_s"] = f"{row.time_to_read_s:.1f}"
            writer.writerow(d)
