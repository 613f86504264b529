"""Monte Carlo campaign driver: aggregation, intervals, CSV export."""
from __future__ import annotations

import csv
import math

from tagbot.campaign import (
    CSV_FIELDS,
    outcomes_from_result,
    run_campaign,
    wilson_interval,
    write_csv,
)
from tagbot.scenario import preset
from tagbot.simloop import run_scenario


class TestWilsonInterval:
    def test_known_values(self):
        # Hand-computed 95% Wilson score values (z = 1.96): for 8/10,
        # center = (0.8 + z^2/20) / (1 + z^2/10) = 0.71674,
        # half-width = 0.22657.
        lo, hi = wilson_interval(8, 10)
        assert math.isclose(lo, 0.49017, abs_tol=5e-5)
        assert math.isclose(hi, 0.94331, abs_tol=5e-5)
        lo, hi = wilson_interval(0, 10)
        assert lo == 0.0
        assert math.isclose(hi, 0.2775, abs_tol=5e-4)
        lo, hi = wilson_interval(10, 10)
        assert math.isclose(lo, 0.7225, abs_tol=5e-4)
        assert hi == 1.0

    def test_degenerate_inputs_rejected(self):
        import pytest

        with pytest.raises(ValueError):
            wilson_interval(0, 0)
        with pytest.raises(ValueError):
            wilson_interval(5, 4)

    def test_interval_brackets_point_estimate(self):
        for k, n in [(1, 7), (5, 9), (120, 200)]:
            lo, hi = wilson_interval(k, n)
            assert lo <= k / n <= hi
            assert 0.0 <= lo <= hi <= 1.0


class TestCampaign:
    def test_aggregates_over_seeds(self):
        cfg = preset("ugv_sensor_manual")
        summary, outcomes = run_campaign(cfg, seeds=range(3))
        assert summary.scenario == "ugv_sensor_manual"
        assert summary.n_runs == 3
        assert summary.n_tag_trials == 9  # 3 tags x 3 seeds
        assert summary.n_detected == sum(1 for o in outcomes if o.detected)
        assert math.isclose(summary.detection_rate,
                            summary.n_detected / summary.n_tag_trials)
        assert summary.wilson_low <= summary.detection_rate <= summary.wilson_high
        assert len(summary.per_run_detected) == 3
        assert len(outcomes) == 9

    def test_outcomes_from_result_fields(self):
        cfg = preset("ugv_sensor_manual")
        result = run_scenario(cfg, seed=3)
        rows = outcomes_from_result(result)
        assert len(rows) == 3
        for row in rows:
            assert row.run_id == result.mission_id
            assert row.seed == 3
            assert row.scenario == "ugv_sensor_manual"
            if row.detected:
                assert row.time_to_read_s is not None
                assert row.sensor_channel == "moisture_ohm"
                assert row.sensor_value is not None

    def test_csv_round_trip(self, tmp_path):
        cfg = preset("ugv_sensor_manual")
        _, outcomes = run_campaign(cfg, seeds=range(2))
        path = tmp_path / "outcomes.csv"
        write_csv(outcomes, path)
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == len(outcomes)
        assert set(rows[0]) == set(CSV_FIELDS)
        assert rows[0]["scenario"] == "ugv_sensor_manual"

    def test_progress_callback(self):
        seen = []
        cfg = preset("ugv_sensor_manual")
        run_campaign(cfg, seeds=[0, 1], progress=lambda i, r: seen.append((i, r.seed)))
        assert seen == [(0, 0), (1, 1)]
