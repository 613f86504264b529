#!/usr/bin/env python3
"""Scan seeds of the flying ID-search preset for the committed trial pair.

The repository pins two seeds-of-record whose detection counts (5/5 and 4/5)
stand in for the two documented field flights. This script shows how those
seeds were picked: it sweeps a seed range, prints the detection count per
seed, and reports the first seed that finds all five tags and the first that
finds exactly four. It ends by re-running the committed pair and checking
the frozen expectations still hold.

Usage:
    python3 scripts/find_trial_seeds.py [--max-seed N]
"""
from __future__ import annotations

import argparse

from tagbot.scenario import TRIAL_EXPECTED_DETECTIONS, TRIAL_SEEDS, preset
from tagbot.simloop import run_scenario


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-seed", type=int, default=30, help="sweep seeds 0..N-1")
    args = ap.parse_args()

    cfg = preset("uav_id_field")
    first_full = first_four = None
    for seed in range(args.max_seed):
        r = run_scenario(cfg, seed=seed)
        marks = []
        if r.n_detected == 5 and first_full is None:
            first_full, marks = seed, ["<- first 5/5"]
        if r.n_detected == 4 and first_four is None:
            first_four, marks = seed, ["<- first 4/5"]
        print(f"seed {seed:>3}: {r.n_detected}/{r.n_tags} detected "
              f"in {r.sim_time_s:.0f} s {' '.join(marks)}")
        if first_full is not None and first_four is not None:
            break

    print(f"\ncommitted seeds of record: {TRIAL_SEEDS} "
          f"-> expected detections {TRIAL_EXPECTED_DETECTIONS}")
    ok = True
    for seed, expected in zip(TRIAL_SEEDS, TRIAL_EXPECTED_DETECTIONS):
        got = run_scenario(cfg, seed=seed).n_detected
        status = "ok" if got == expected else "MISMATCH"
        ok &= got == expected
        print(f"  seed {seed}: detected {got}, expected {expected} [{status}]")
    return 0 if ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
