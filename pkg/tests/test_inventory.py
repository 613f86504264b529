"""Slotted anti-collision rounds and the post-singulation sensor transaction."""
from __future__ import annotations

import math
from itertools import product
from random import Random

import pytest

from tagbot.inventory import (
    NotWhitelisted,
    TagNotReady,
    TagOutOfRange,
    UnknownTag,
    adjust_q,
    kind_threshold_dbm,
    read_sensor,
    run_inventory_round,
)
from tagbot.rflink import AntennaPose, default_link_config
from tagbot.tags import Environment, Epc, SensorCalibration, Tag, TagKind
from tagbot.world import EnuPose


def close_tags(n: int, kind=TagKind.ID_ONLY) -> list[Tag]:
    """Tags directly under the reader, well inside the read zone."""
    return [
        Tag(epc=Epc.make(i), kind=kind,
            pose=AntennaPose(EnuPose(0.02 * i, 0.0, 0.0), boresight=(1.0, 0.0, 0.0)))
        for i in range(n)
    ]


READER = AntennaPose(EnuPose(0.0, 0.0, 1.0), boresight=(0.0, 0.0, -1.0))


def brute_force_expected_singulations(n: int, q: int) -> float:
    """Exact expected singulations per round by enumerating all slot
    assignments of n tags over 2^q slots (uniform, independent)."""
    n_slots = 1 << q
    total = 0
    count = 0
    for assignment in product(range(n_slots), repeat=n):
        singles = sum(1 for s in range(n_slots) if assignment.count(s) == 1)
        total += singles
        count += 1
    return total / count


class TestSlottedRounds:
    def test_expected_singulations_n4_q2(self):
        # Frozen analytic oracle: E[singles] = n * (1 - 1/2^q)^(n-1)
        # = 4 * (3/4)^3 = 27/16 = 1.6875, confirmed by brute force over
        # all 4^4 assignments.
        oracle = brute_force_expected_singulations(4, 2)
        assert math.isclose(oracle, 1.6875, abs_tol=1e-12)
        assert math.isclose(oracle, 4 * (3 / 4) ** 3, abs_tol=1e-12)

        rng = Random(123)
        tags = close_tags(4)
        cfg = default_link_config()
        total = 0
        rounds = 20_000
        for _ in range(rounds):
            total += len(run_inventory_round(tags, READER, cfg, q=2, rng=rng).singles)
        assert abs(total / rounds - 1.6875) < 0.05

    def test_outcome_count_matches_slots(self):
        rng = Random(0)
        r = run_inventory_round(close_tags(3), READER, default_link_config(),
                                q=3, rng=rng)
        assert len(r.outcomes) == 8
        assert set(r.outcomes) <= {"idle", "single", "collision"}

    def test_q_zero_single_slot(self):
        # One slot and two strong tags: every participating pair collides.
        rng = Random(1)
        r = run_inventory_round(close_tags(2), READER, default_link_config(),
                                q=0, rng=rng)
        assert len(r.outcomes) == 1
        assert r.outcomes[0] in {"idle", "single", "collision"}

    def test_invalid_q_rejected(self):
        rng = Random(0)
        with pytest.raises(ValueError):
            run_inventory_round(close_tags(1), READER, default_link_config(),
                                q=16, rng=rng)
        with pytest.raises(ValueError):
            run_inventory_round(close_tags(1), READER, default_link_config(),
                                q=-1, rng=rng)

    def test_unlisted_tag_singulates_but_is_not_read(self):
        tags = close_tags(1)
        tags[0].whitelisted = False
        cfg = default_link_config()
        singles = reads = 0
        rng = Random(5)
        for _ in range(50):
            r = run_inventory_round(tags, READER, cfg, q=0, rng=rng)
            singles += len(r.singles)
            reads += len(r.reads)
        assert singles > 0
        assert reads == 0

    def test_distant_tag_never_participates(self):
        tag = Tag(epc=Epc.make(9), kind=TagKind.ID_ONLY,
                  pose=AntennaPose(EnuPose(500.0, 0.0, 0.0), boresight=(0.0, 1.0, 0.0)))
        rng = Random(2)
        cfg = default_link_config()
        for _ in range(200):
            r = run_inventory_round([tag], READER, cfg, q=0, rng=rng)
            assert not r.singles

    def test_sensor_tag_participation_uses_sensor_threshold(self):
        # At 2.5 m boresight an ID tag is comfortably inside its -12 dBm
        # zone but a sensor tag is far below its -5 dBm activation level,
        # so only the ID tag shows up in inventory.
        reader = AntennaPose(EnuPose(0.0, 0.0, 2.5), boresight=(0.0, 0.0, -1.0))
        cfg = default_link_config()
        id_tag = [Tag(epc=Epc.make(1), kind=TagKind.ID_ONLY,
                      pose=AntennaPose(EnuPose(0.0, 0.0, 0.0), boresight=(1.0, 0.0, 0.0)))]
        hydro = [Tag(epc=Epc.make(2), kind=TagKind.HYDRO_MOISTURE,
                     pose=AntennaPose(EnuPose(0.0, 0.0, 0.0), boresight=(1.0, 0.0, 0.0)))]
        rng = Random(3)
        id_singles = sum(
            len(run_inventory_round(id_tag, reader, cfg, q=0, rng=rng).singles)
            for _ in range(100))
        hydro_singles = sum(
            len(run_inventory_round(hydro, reader, cfg, q=0, rng=rng).singles)
            for _ in range(100))
        # ~93% participation for the ID tag vs ~1% for the hydro tag.
        assert id_singles > 80
        assert hydro_singles <= 5

    def test_all_inventoried_within_10n_rounds(self):
        # With adaptive Q, all 4 strong tags are found well within 40 rounds
        # in virtually every trial.
        cfg = default_link_config()
        tags = close_tags(4)
        ok = 0
        trials = 200
        for seed in range(trials):
            rng = Random(seed)
            q = 2
            seen: set = set()
            for _ in range(40):
                r = run_inventory_round(tags, READER, cfg, q=q, rng=rng)
                seen.update(epc for epc, _ in r.singles)
                n_coll = sum(1 for o in r.outcomes if o == "collision")
                n_idle = sum(1 for o in r.outcomes if o == "idle")
                q = adjust_q(q, n_coll, n_idle)
                if len(seen) == 4:
                    ok += 1
                    break
        assert ok / trials >= 0.99


class TestAdjustQ:
    def test_more_collisions_grows(self):
        assert adjust_q(4, n_collisions=3, n_idles=1) == 5

    def test_more_idles_shrinks(self):
        assert adjust_q(4, n_collisions=1, n_idles=3) == 3

    def test_balanced_holds(self):
        assert adjust_q(4, n_collisions=2, n_idles=2) == 4

    def test_clamped_to_legal_range(self):
        assert adjust_q(0, n_collisions=0, n_idles=5) == 0
        assert adjust_q(15, n_collisions=5, n_idles=0) == 15


class TestKindThreshold:
    def test_id_uses_deep_threshold(self):
        cfg = default_link_config()
        assert kind_threshold_dbm(TagKind.ID_ONLY, cfg) == cfg.id_threshold_dbm

    def test_sensor_kinds_use_activation_threshold(self):
        cfg = default_link_config()
        for kind in (TagKind.HYDRO_MOISTURE, TagKind.CONDUCTIVITY,
                     TagKind.LIGHT, TagKind.TEMPERATURE):
            assert kind_threshold_dbm(kind, cfg) == cfg.sensor_threshold_dbm


class TestReadSensor:
    def setup_method(self):
        self.cfg = default_link_config()
        self.env = Environment()
        self.cal = SensorCalibration()

    def _read(self, tags, epc, rng=None):
        return read_sensor(epc, tags, READER, self.cfg, self.env, self.cal,
                           rng or Random(0), timestamp_ms=1000)

    def test_unknown_tag(self):
        with pytest.raises(UnknownTag):
            self._read(close_tags(1), Epc.make(99))

    def test_not_whitelisted(self):
        tags = close_tags(1, kind=TagKind.HYDRO_MOISTURE)
        tags[0].whitelisted = False
        with pytest.raises(NotWhitelisted):
            self._read(tags, tags[0].epc)

    def test_uncharged_sensor_tag_fails_instantly(self):
        tags = close_tags(1, kind=TagKind.HYDRO_MOISTURE)
        assert tags[0].charge_s == 0.0
        with pytest.raises(TagNotReady):
            self._read(tags, tags[0].epc)

    def test_charged_sensor_tag_reads(self):
        tags = close_tags(1, kind=TagKind.HYDRO_MOISTURE)
        tags[0].charge_s = tags[0].charge_required_s
        rec = self._read(tags, tags[0].epc)
        assert rec.epc == tags[0].epc
        assert rec.timestamp_ms == 1000
        assert len(rec.readings) == 2

    def test_id_only_needs_no_charge(self):
        tags = close_tags(1, kind=TagKind.ID_ONLY)
        rec = self._read(tags, tags[0].epc)
        assert rec.readings == ()

    def test_out_of_range_draw(self):
        tags = close_tags(1, kind=TagKind.HYDRO_MOISTURE)
        tags[0].charge_s = tags[0].charge_required_s
        # Move the tag to the fringe where the transaction draw can fail.
        tags[0].pose = AntennaPose(EnuPose(0.0, 0.0, -0.8), boresight=(1.0, 0.0, 0.0))
        failures = 0
        for seed in range(100):
            try:
                self._read(tags, tags[0].epc, Random(seed))
            except TagOutOfRange:
                failures += 1
        assert failures > 0
