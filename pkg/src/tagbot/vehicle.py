"""Kinematic vehicle models stepped at a fixed tick.

The UAV moves toward a target with independent horizontal and vertical speed
limits and yaws into its horizontal velocity. A circle setpoint is flown by
chasing a carrot that sweeps the circle at a fixed tangential speed, so arc
progress is a pure function of elapsed time. The UGV is a unicycle with a
turn-rate bound derived from its minimum turning radius.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Union

from .world import EnuPose

TICK_S = 0.1


@dataclass(frozen=True)
class GoTo:
    east: float
    north: float
    up: float = 0.0


@dataclass(frozen=True)
class CircleAbout:
    center_east: float
    center_north: float
    radius_m: float
    up: float
    speed_ms: float = 0.5  # tangential carrot speed


@dataclass(frozen=True)
class Hold:
    duration_s: float = 0.0  # informational; the caller owns hold timing


Setpoint = Union[GoTo, CircleAbout, Hold]


@dataclass
class UavLimits:
    cruise_speed_ms: float = 1.5
    descend_speed_ms: float = 0.25
    ascend_speed_ms: float = 2.5


@dataclass
class UgvLimits:
    speed_ms: float = 1.0
    min_turn_radius_m: float = 1.0
    arrival_tol_m: float = 0.3


@dataclass
class UavState:
    pose: EnuPose
    limits: UavLimits
    circle_phase: Optional[float] = None  # carrot angle, radians; None outside circle setpoints


@dataclass
class UgvState:
    pose: EnuPose
    limits: UgvLimits


def _wrap_angle(a: float) -> float:
    while a > math.pi:
        a -= 2.0 * math.pi
    while a < -math.pi:
        a += 2.0 * math.pi
    return a


def step_uav(state: UavState, setpoint: Setpoint, dt: float) -> UavState:
    """Advance the UAV one tick toward the setpoint."""
    if setpoint is None or isinstance(setpoint, Hold):
        state.circle_phase = None
        return state

    pose = state.pose
    if isinstance(setpoint, CircleAbout):
        if state.circle_phase is None:
            re = pose.east - setpoint.center_east
            rn = pose.north - setpoint.center_north
            state.circle_phase = math.atan2(rn, re) if math.hypot(re, rn) > 1e-6 else 0.0
        state.circle_phase += (setpoint.speed_ms / setpoint.radius_m) * dt
        tx = setpoint.center_east + setpoint.radius_m * math.cos(state.circle_phase)
        ty = setpoint.center_north + setpoint.radius_m * math.sin(state.circle_phase)
        tz = setpoint.up
    else:
        state.circle_phase = None
        tx, ty, tz = setpoint.east, setpoint.north, setpoint.up

    lim = state.limits
    de = tx - pose.east
    dn = ty - pose.north
    horiz = math.hypot(de, dn)
    if horiz > 1e-9:
        step = min(lim.cruise_speed_ms * dt, horiz)
        e = pose.east + de / horiz * step
        n = pose.north + dn / horiz * step
        yaw = math.atan2(dn, de)
    else:
        e, n, yaw = pose.east, pose.north, pose.yaw

    dz = tz - pose.up
    rate = lim.ascend_speed_ms if dz > 0 else lim.descend_speed_ms
    dz_step = max(min(dz, rate * dt), -rate * dt)
    state.pose = EnuPose(east=e, north=n, up=pose.up + dz_step, yaw=yaw)
    return state


def step_ugv(state: UgvState, setpoint: Setpoint, dt: float) -> UgvState:
    """Advance the UGV one tick. Circle setpoints degrade to driving at the center."""
    if setpoint is None or isinstance(setpoint, Hold):
        return state
    if isinstance(setpoint, CircleAbout):
        tx, ty = setpoint.center_east, setpoint.center_north
    else:
        tx, ty = setpoint.east, setpoint.north

    pose = state.pose
    lim = state.limits
    de = tx - pose.east
    dn = ty - pose.north
    dist = math.hypot(de, dn)
    if dist <= lim.arrival_tol_m:
        return state

    bearing = math.atan2(dn, de)
    err = _wrap_angle(bearing - pose.yaw)
    max_turn = (lim.speed_ms / lim.min_turn_radius_m) * dt
    yaw = pose.yaw + max(min(err, max_turn), -max_turn)
    # big heading error: crawl while the nose comes around, keeps the path tight
    v = lim.speed_ms if abs(err) < math.pi / 3.0 else 0.2 * lim.speed_ms
    advance = min(v * dt, dist)
    state.pose = EnuPose(east=pose.east + advance * math.cos(yaw),
                         north=pose.north + advance * math.sin(yaw),
                         up=pose.up, yaw=yaw)
    return state


def offset_pose(pose: EnuPose, de: float = 0.0, dn: float = 0.0, dup: float = 0.0) -> EnuPose:
    return replace(pose, east=pose.east + de, north=pose.north + dn, up=pose.up + dup)
