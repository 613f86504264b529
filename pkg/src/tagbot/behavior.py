"""Search behaviors as explicit state machines over measured position and reads.

The UAV visits each waypoint at cruise altitude, descends to search altitude,
hovers, then sweeps a partial circle about the waypoint before giving up and
climbing back out; any successful tag read short-circuits straight to the
climb. The UGV drives to the waypoint, dwells, then repeatedly backs off
along a random heading and re-approaches until its retry budget runs out.

Steps are driven by measured (GPS/baro) state, so the machines inherit the
position error the search patterns exist to fight. All timing accumulates in
fixed ticks, which makes phase durations exact under noise-free models.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import IntEnum
from random import Random
from typing import Optional, Sequence

from .tags import Epc
from .vehicle import CircleAbout, GoTo, Hold, Setpoint


@dataclass
class BehaviorParams:
    cruise_alt_m: float = 3.5
    search_alt_m: float = 1.5
    hover_s: float = 15.0
    circle_radius_m: float = 2.0
    circle_arc_deg: float = 270.0
    circle_speed_ms: float = 0.5
    arrival_tol_m: float = 1.0      # measured-GPS gate on waypoint arrival
    alt_tol_m: float = 0.02         # measured-altitude gate on climb/descent completion
    ugv_dwell_s: float = 15.0
    ugv_retry_budget_s: float = 60.0
    ugv_backoff_m: float = 3.0
    ugv_retry_pause_s: float = 5.0  # stop-and-interrogate time per re-approach
    ugv_standoff_m: float = 0.5     # how far short of the spot the rover parks
    # Stop distances for successive re-approaches (cycled); 0 drives all the
    # way onto the surveyed point, keeping the antenna aimed at it for the
    # whole inbound leg.
    ugv_probe_radii_m: tuple = (0.0,)
    # A plain inventory report (EPC sighting) at or above this signal level
    # means the tag is close enough to power from where the rover is now, so
    # it parks instead of driving on to the surveyed point.
    ugv_park_rssi_dbm: float = -4.5
    # The sighting fires on the rim of the powered zone; rolling forward a
    # little before stopping parks the antenna inside it, so position jitter
    # while parked does not keep dropping the tag below its power threshold.
    ugv_park_advance_m: float = 0.6
    nav_timeout_s: float = 180.0    # safety valve: treat an overlong transit as arrival

    def circle_time_s(self) -> float:
        """Time to sweep the configured arc at the configured tangential speed."""
        return math.radians(self.circle_arc_deg) * self.circle_radius_m / self.circle_speed_ms


def behavior_params_from_dict(d: dict) -> BehaviorParams:
    """Rebuild params from a JSON dict (lists come back as tuples)."""
    d = dict(d)
    if "ugv_probe_radii_m" in d:
        d["ugv_probe_radii_m"] = tuple(d["ugv_probe_radii_m"])
    return BehaviorParams(**d)


@dataclass(frozen=True)
class SearchPoint:
    east: float
    north: float
    expected_epc: Optional[Epc] = None
    # True when a mere EPC sighting does not satisfy this waypoint — the
    # vehicle must come away with a delivered sensor value.
    needs_sensor: bool = False


@dataclass(frozen=True)
class StepObs:
    """What the machine sees each tick: measured position plus fresh reads.

    `reads` are satisfied waypoint goals (an ID tag singulated, or a sensor
    value delivered). `sightings` are plain inventory reports — EPC plus
    signal strength — for tags whose waypoint still needs a sensor value.
    """

    east: float
    north: float
    alt: float
    reads: tuple[Epc, ...] = ()
    sightings: tuple[tuple[Epc, float], ...] = ()


class UavPhase(IntEnum):
    TAKEOFF = 0
    CRUISE = 1
    DESCEND = 2
    HOVER = 3
    CIRCLE = 4
    ASCEND = 5
    DONE = 6


@dataclass
class UavFsm:
    waypoints: tuple[SearchPoint, ...]
    params: BehaviorParams
    phase: UavPhase = UavPhase.TAKEOFF
    wp_index: int = 0
    phase_elapsed_s: float = 0.0
    anchor_e: Optional[float] = None
    anchor_n: Optional[float] = None
    found: set = field(default_factory=set)

    def __post_init__(self) -> None:
        if not self.waypoints:
            raise ValueError("need at least one waypoint")

    @property
    def waypoint(self) -> SearchPoint:
        return self.waypoints[min(self.wp_index, len(self.waypoints) - 1)]


def _enter_uav(fsm: UavFsm, phase: UavPhase, obs: StepObs) -> None:
    fsm.phase = phase
    fsm.phase_elapsed_s = 0.0
    if phase in (UavPhase.DESCEND, UavPhase.HOVER, UavPhase.ASCEND, UavPhase.DONE):
        fsm.anchor_e, fsm.anchor_n = obs.east, obs.north


def _advance_uav(fsm: UavFsm, obs: StepObs, events: list) -> None:
    fsm.wp_index += 1
    if fsm.wp_index < len(fsm.waypoints):
        _enter_uav(fsm, UavPhase.CRUISE, obs)
    else:
        _enter_uav(fsm, UavPhase.DONE, obs)
        events.append(("mission_done",))


def uav_search_step(fsm: UavFsm, obs: StepObs, dt: float):
    """One tick of the UAV search machine.

    Returns (fsm, setpoint, events); the fsm is mutated in place.
    """
    events: list = []
    p = fsm.params
    fsm.phase_elapsed_s += dt
    if fsm.anchor_e is None:
        fsm.anchor_e, fsm.anchor_n = obs.east, obs.north

    new_reads = [e for e in obs.reads if e not in fsm.found]
    fsm.found.update(new_reads)
    positive = bool(new_reads)
    if positive and fsm.phase in (UavPhase.CRUISE, UavPhase.DESCEND, UavPhase.HOVER, UavPhase.CIRCLE):
        events.append(("tag_found", new_reads[0].hex, fsm.wp_index))

    wp = fsm.waypoint
    ph = fsm.phase
    if ph is UavPhase.TAKEOFF:
        if obs.alt >= p.cruise_alt_m - p.alt_tol_m:
            _enter_uav(fsm, UavPhase.CRUISE, obs)
    elif ph is UavPhase.CRUISE:
        if positive:
            _advance_uav(fsm, obs, events)
        elif math.hypot(obs.east - wp.east, obs.north - wp.north) <= p.arrival_tol_m:
            events.append(("waypoint_reached", fsm.wp_index))
            _enter_uav(fsm, UavPhase.DESCEND, obs)
        elif fsm.phase_elapsed_s > p.nav_timeout_s:
            events.append(("nav_timeout", fsm.wp_index))
            _enter_uav(fsm, UavPhase.DESCEND, obs)
    elif ph is UavPhase.DESCEND:
        if positive:
            _enter_uav(fsm, UavPhase.ASCEND, obs)
        elif obs.alt <= p.search_alt_m + p.alt_tol_m:
            _enter_uav(fsm, UavPhase.HOVER, obs)
    elif ph is UavPhase.HOVER:
        if positive:
            _enter_uav(fsm, UavPhase.ASCEND, obs)
        elif fsm.phase_elapsed_s >= p.hover_s:
            fsm.phase = UavPhase.CIRCLE
            fsm.phase_elapsed_s = 0.0
    elif ph is UavPhase.CIRCLE:
        if positive:
            _enter_uav(fsm, UavPhase.ASCEND, obs)
        elif fsm.phase_elapsed_s >= p.circle_time_s():
            events.append(("search_abandoned", fsm.wp_index))
            _enter_uav(fsm, UavPhase.ASCEND, obs)
    elif ph is UavPhase.ASCEND:
        if obs.alt >= p.cruise_alt_m - p.alt_tol_m:
            _advance_uav(fsm, obs, events)
    return fsm, _uav_setpoint(fsm), events


def _uav_setpoint(fsm: UavFsm) -> Setpoint:
    p = fsm.params
    wp = fsm.waypoint
    ph = fsm.phase
    if ph is UavPhase.TAKEOFF:
        return GoTo(fsm.anchor_e, fsm.anchor_n, p.cruise_alt_m)
    if ph is UavPhase.CRUISE:
        return GoTo(wp.east, wp.north, p.cruise_alt_m)
    if ph in (UavPhase.DESCEND, UavPhase.HOVER):
        return GoTo(fsm.anchor_e, fsm.anchor_n, p.search_alt_m)
    if ph is UavPhase.CIRCLE:
        return CircleAbout(wp.east, wp.north, p.circle_radius_m, p.search_alt_m, p.circle_speed_ms)
    if ph is UavPhase.ASCEND:
        return GoTo(fsm.anchor_e, fsm.anchor_n, p.cruise_alt_m)
    return GoTo(fsm.anchor_e, fsm.anchor_n, 0.0)  # DONE: land where we are


class UgvPhase(IntEnum):
    DRIVE = 0
    DWELL = 1
    RETRY_OUT = 2
    RETRY_BACK = 3
    RETRY_DWELL = 4
    DONE = 5


@dataclass
class UgvFsm:
    waypoints: tuple[SearchPoint, ...]
    params: BehaviorParams
    phase: UgvPhase = UgvPhase.DRIVE
    wp_index: int = 0
    phase_elapsed_s: float = 0.0
    retry_elapsed_s: float = 0.0
    retry_count: int = 0
    retry_target: Optional[tuple[float, float]] = None
    dwell_target: Optional[tuple[float, float]] = None
    found: set = field(default_factory=set)

    def __post_init__(self) -> None:
        if not self.waypoints:
            raise ValueError("need at least one waypoint")

    @property
    def waypoint(self) -> SearchPoint:
        return self.waypoints[min(self.wp_index, len(self.waypoints) - 1)]


def _advance_ugv(fsm: UgvFsm, events: list) -> None:
    fsm.wp_index += 1
    fsm.phase_elapsed_s = 0.0
    fsm.retry_elapsed_s = 0.0
    fsm.retry_target = None
    if fsm.wp_index < len(fsm.waypoints):
        fsm.phase = UgvPhase.DRIVE
    else:
        fsm.phase = UgvPhase.DONE
        events.append(("mission_done",))


def _new_retry(fsm: UgvFsm, rng: Random) -> None:
    angle = rng.uniform(0.0, 2.0 * math.pi)
    wp = fsm.waypoint
    fsm.retry_target = (wp.east + fsm.params.ugv_backoff_m * math.cos(angle),
                        wp.north + fsm.params.ugv_backoff_m * math.sin(angle))
    fsm.dwell_target = None
    fsm.retry_count += 1
    fsm.phase = UgvPhase.RETRY_OUT
    fsm.phase_elapsed_s = 0.0


def _park_short(fsm: UgvFsm, from_e: float, from_n: float, standoff_m: float) -> None:
    """Aim the dwell at a stand-off point short of the waypoint along the
    current approach direction, so each re-approach interrogates from a
    different side and distance."""
    wp = fsm.waypoint
    de, dn = wp.east - from_e, wp.north - from_n
    norm = math.hypot(de, dn)
    if norm < 1e-9:
        de, dn, norm = 1.0, 0.0, 1.0
    s = standoff_m / norm
    fsm.dwell_target = (wp.east - de * s, wp.north - dn * s)


def _probe_radius(fsm: UgvFsm) -> float:
    """Stop distance for the current re-approach, cycling the configured
    progression (retry_count has already been advanced for this retry)."""
    radii = fsm.params.ugv_probe_radii_m
    if not radii:
        return fsm.params.ugv_standoff_m
    return radii[(fsm.retry_count - 1) % len(radii)]


def ugv_search_step(fsm: UgvFsm, obs: StepObs, dt: float, rng: Random):
    """One tick of the UGV search machine. Retry headings come from `rng`."""
    events: list = []
    p = fsm.params
    fsm.phase_elapsed_s += dt
    if fsm.phase in (UgvPhase.RETRY_OUT, UgvPhase.RETRY_BACK, UgvPhase.RETRY_DWELL):
        fsm.retry_elapsed_s += dt

    new_reads = [e for e in obs.reads if e not in fsm.found]
    fsm.found.update(new_reads)
    if new_reads and fsm.phase is not UgvPhase.DONE:
        events.append(("tag_found", new_reads[0].hex, fsm.wp_index))
        _advance_ugv(fsm, events)
        return fsm, _ugv_setpoint(fsm), events

    wp = fsm.waypoint
    ph = fsm.phase
    # A strong sighting while closing in means the tag can be powered from
    # right here: park on the spot and interrogate, rather than driving on
    # to a surveyed point that GPS error may have put in the wrong place.
    if ph in (UgvPhase.DRIVE, UgvPhase.RETRY_BACK):
        for epc, rssi in obs.sightings:
            if rssi < p.ugv_park_rssi_dbm or epc in fsm.found:
                continue
            if wp.expected_epc is not None and epc != wp.expected_epc:
                continue
            events.append(("tag_spotted", epc.hex, fsm.wp_index))
            if ph is UgvPhase.RETRY_BACK and fsm.dwell_target is not None:
                te, tn = fsm.dwell_target
            else:
                te, tn = wp.east, wp.north
            de, dn = te - obs.east, tn - obs.north
            norm = math.hypot(de, dn)
            adv = min(norm, p.ugv_park_advance_m) / norm if norm > 1e-9 else 0.0
            fsm.dwell_target = (obs.east + de * adv, obs.north + dn * adv)
            fsm.phase = UgvPhase.DWELL if ph is UgvPhase.DRIVE else UgvPhase.RETRY_DWELL
            fsm.phase_elapsed_s = 0.0
            return fsm, _ugv_setpoint(fsm), events
    if ph is UgvPhase.DRIVE:
        if math.hypot(obs.east - wp.east, obs.north - wp.north) <= p.arrival_tol_m:
            events.append(("waypoint_reached", fsm.wp_index))
            _park_short(fsm, obs.east, obs.north, p.ugv_standoff_m)
            fsm.phase = UgvPhase.DWELL
            fsm.phase_elapsed_s = 0.0
        elif fsm.phase_elapsed_s > p.nav_timeout_s:
            events.append(("nav_timeout", fsm.wp_index))
            _park_short(fsm, obs.east, obs.north, p.ugv_standoff_m)
            fsm.phase = UgvPhase.DWELL
            fsm.phase_elapsed_s = 0.0
    elif ph is UgvPhase.DWELL:
        if fsm.phase_elapsed_s >= p.ugv_dwell_s:
            fsm.retry_elapsed_s = 0.0
            _new_retry(fsm, rng)
            events.append(("retry", fsm.retry_count, fsm.wp_index))
    elif ph is UgvPhase.RETRY_OUT:
        if fsm.retry_elapsed_s >= p.ugv_retry_budget_s:
            events.append(("search_abandoned", fsm.wp_index))
            _advance_ugv(fsm, events)
        elif (math.hypot(obs.east - fsm.retry_target[0], obs.north - fsm.retry_target[1])
              <= p.arrival_tol_m or fsm.phase_elapsed_s > 20.0):
            # Fix the park point now, so the whole inbound leg drives toward
            # it and the rover stops facing the waypoint rather than
            # overshooting and having to back up.
            _park_short(fsm, fsm.retry_target[0], fsm.retry_target[1],
                        _probe_radius(fsm))
            fsm.phase = UgvPhase.RETRY_BACK
            fsm.phase_elapsed_s = 0.0
    elif ph is UgvPhase.RETRY_BACK:
        park = fsm.dwell_target if fsm.dwell_target is not None else (wp.east, wp.north)
        if fsm.retry_elapsed_s >= p.ugv_retry_budget_s:
            events.append(("search_abandoned", fsm.wp_index))
            _advance_ugv(fsm, events)
        elif math.hypot(obs.east - park[0], obs.north - park[1]) <= p.arrival_tol_m:
            fsm.phase = UgvPhase.RETRY_DWELL
            fsm.phase_elapsed_s = 0.0
    elif ph is UgvPhase.RETRY_DWELL:
        if fsm.retry_elapsed_s >= p.ugv_retry_budget_s:
            events.append(("search_abandoned", fsm.wp_index))
            _advance_ugv(fsm, events)
        elif fsm.phase_elapsed_s >= p.ugv_retry_pause_s:
            _new_retry(fsm, rng)
            events.append(("retry", fsm.retry_count, fsm.wp_index))
    return fsm, _ugv_setpoint(fsm), events


def _ugv_setpoint(fsm: UgvFsm) -> Setpoint:
    wp = fsm.waypoint
    ph = fsm.phase
    if ph is UgvPhase.DRIVE:
        return GoTo(wp.east, wp.north, 0.0)
    if ph is UgvPhase.RETRY_OUT:
        return GoTo(fsm.retry_target[0], fsm.retry_target[1], 0.0)
    if (ph in (UgvPhase.RETRY_BACK, UgvPhase.DWELL, UgvPhase.RETRY_DWELL)
            and fsm.dwell_target is not None):
        return GoTo(fsm.dwell_target[0], fsm.dwell_target[1], 0.0)
    if ph is UgvPhase.RETRY_BACK:
        return GoTo(wp.east, wp.north, 0.0)
    return Hold()  # DONE, or a dwell with no park point


def command_key(fsm) -> tuple:
    """Identity of the machine's current leg; a change means a new vehicle command."""
    if isinstance(fsm, UavFsm):
        return ("uav", fsm.phase, fsm.wp_index)
    return ("ugv", fsm.phase, fsm.wp_index, fsm.retry_count)


def waypoints_from_area(polygon: Sequence[tuple[float, float]], spacing_m: float) -> list[tuple[float, float]]:
    """Boustrophedon coverage grid over a polygon, serpentine row order.

    The grid is laid over the bounding box and filtered to the polygon
    (boundary included). A polygon smaller than one grid cell collapses to a
    single waypoint at its centroid.
    """
    from shapely.geometry import Point, Polygon

    if spacing_m <= 0:
        raise ValueError("spacing must be positive")
    poly = Polygon(polygon)
    if not poly.is_valid or poly.area <= 0:
        raise ValueError("polygon must be non-degenerate with positive area")

    minx, miny, maxx, maxy = poly.bounds
    eps = 1e-9
    xs = []
    x = minx
    while x <= maxx + eps:
        xs.append(x)
        x += spacing_m
    ys = []
    y = miny
    while y <= maxy + eps:
        ys.append(y)
        y += spacing_m
    if len(xs) <= 1 and len(ys) <= 1:
        c = poly.centroid
        return [(c.x, c.y)]

    rows: list[list[tuple[float, float]]] = []
    for yy in ys:
        row = [(xx, yy) for xx in xs if poly.covers(Point(xx, yy))]
        if row:
            rows.append(row)
    out: list[tuple[float, float]] = []
    for i, row in enumerate(rows):
        out.extend(row if i % 2 == 0 else list(reversed(row)))
    if not out:
        c = poly.centroid
        return [(c.x, c.y)]
    return out
