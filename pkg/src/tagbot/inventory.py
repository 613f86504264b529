"""Reader-side inventory: framed slotted-ALOHA singulation and sensor reads.

Each round opens 2^q slots. Every tag that powers up (a Bernoulli draw on its
logistic read probability) picks a slot uniformly; a slot with exactly one
occupant singulates that tag. The reader nudges q up when collisions dominate
idles and down in the opposite case.

A sensor transaction is a separate memory access against one singulated tag.
It takes SENSOR_TRANSACTION_S of reader time and only succeeds if the tag has
finished charging.
"""

from __future__ import annotations

from dataclasses import dataclass
from random import Random

from .rflink import AntennaPose, LinkConfig, read_probability, received_power_dbm
from .tags import Environment, Epc, SensorCalibration, SensorReading, Tag, TagKind, sense, sensor_ready

Q_MIN = 0
Q_MAX = 15
DEFAULT_Q = 2
INVENTORY_RATE_HZ = 5.0     # rounds per second in the simulation loop
SENSOR_TRANSACTION_S = 0.5  # reader time consumed by one sensor memory access


class ReadError(Exception):
    """Base for sensor-transaction failures."""


class UnknownTag(ReadError):
    pass


class NotWhitelisted(ReadError):
    pass


class TagNotReady(ReadError):
    """Tag charge incomplete; caller should keep illuminating and retry."""


class TagOutOfRange(ReadError):
    """The transaction draw failed at the current link margin."""


@dataclass(frozen=True)
class TagReadRecord:
    """One successful read: identity, link quality, and any sensor channels."""

    epc: Epc
    rssi_dbm: float
    readings: tuple[SensorReading, ...]  # empty for ID-only tags
    timestamp_ms: int = 0


@dataclass(frozen=True)
class InventoryRound:
    q: int
    outcomes: tuple[str, ...]                    # per-slot: "idle" | "single" | "collision"
    singles: tuple[tuple[Epc, float], ...]       # singulated (epc, rssi) in slot order, pre-whitelist
    reads: tuple[tuple[Epc, float], ...]         # singulations that survive the whitelist

    @property
    def n_idle(self) -> int:
        return sum(1 for o in self.outcomes if o == "idle")

    @property
    def n_single(self) -> int:
        return sum(1 for o in self.outcomes if o == "single")

    @property
    def n_collision(self) -> int:
        return sum(1 for o in self.outcomes if o == "collision")


def kind_threshold_dbm(kind: TagKind, cfg: LinkConfig) -> float:
    """Power a tag of this kind needs before it participates at all."""
    if kind is TagKind.ID_ONLY:
        return cfg.id_threshold_dbm
    return cfg.sensor_threshold_dbm


def run_inventory_round(tags: list[Tag], reader: AntennaPose, cfg: LinkConfig,
                        q: int, rng: Random, shadow_db: float = 0.0) -> InventoryRound:
    """One slotted round over the given tag population."""
    if not (Q_MIN <= q <= Q_MAX):
        raise ValueError(f"q={q} outside [{Q_MIN}, {Q_MAX}]")
    n_slots = 1 << q
    slots: list[list[tuple[Epc, float, bool]]] = [[] for _ in range(n_slots)]
    for tag in tags:
        rx = received_power_dbm(reader, tag.pose, cfg, shadow_db)
        p = read_probability(rx, kind_threshold_dbm(tag.kind, cfg), cfg.logistic_slope_db)
        if rng.random() < p:
            slots[rng.randrange(n_slots)].append((tag.epc, rx, tag.whitelisted))
    outcomes = []
    singles = []
    reads = []
    for occupants in slots:
        if not occupants:
            outcomes.append("idle")
        elif len(occupants) == 1:
            outcomes.append("single")
            epc, rx, listed = occupants[0]
            singles.append((epc, rx))
            if listed:
                reads.append((epc, rx))
        else:
            outcomes.append("collision")
    return InventoryRound(q=q, outcomes=tuple(outcomes),
                          singles=tuple(singles), reads=tuple(reads))


def adjust_q(q: int, n_collisions: int, n_idles: int) -> int:
    """Step the slot-count exponent toward balance, clamped to its legal range."""
    if n_collisions > n_idles:
        q += 1
    elif n_collisions < n_idles:
        q -= 1
    return min(max(q, Q_MIN), Q_MAX)


def read_sensor(epc: Epc, tags: list[Tag], reader: AntennaPose, cfg: LinkConfig,
                env: Environment, cal: SensorCalibration, rng: Random,
                timestamp_ms: int = 0, shadow_db: float = 0.0) -> TagReadRecord:
    """Run the post-singulation transaction against one tag.

    The caller is expected to have singulated `epc` in the current or the
    immediately preceding round. ID-only tags yield a record with no sensor
    channels; sensor tags must be fully charged and must survive one more
    read-probability draw for the longer memory transaction.
    """
    tag = next((t for t in tags if t.epc == epc), None)
    if tag is None:
        raise UnknownTag(f"no tag with EPC {epc}")
    if not tag.whitelisted:
        raise NotWhitelisted(f"tag {epc} is not on the mission whitelist")
    rx = received_power_dbm(reader, tag.pose, cfg, shadow_db)
    if tag.kind is TagKind.ID_ONLY:
        return TagReadRecord(epc=epc, rssi_dbm=rx, readings=(), timestamp_ms=timestamp_ms)
    if not sensor_ready(tag):
        raise TagNotReady(f"tag {epc} charge {tag.charge_s:.2f}s of {tag.charge_required_s:.2f}s")
    p = read_probability(rx, cfg.sensor_threshold_dbm, cfg.logistic_slope_db)
    if rng.random() >= p:
        raise TagOutOfRange(f"transaction draw failed at {rx:.1f} dBm")
    return TagReadRecord(epc=epc, rssi_dbm=rx, readings=sense(tag, env, cal),
                         timestamp_ms=timestamp_ms)
