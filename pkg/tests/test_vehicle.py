"""Kinematic vehicle models: point-mass quadcopter, unicycle rover."""
from __future__ import annotations

import math

from tagbot.vehicle import (
    CircleAbout,
    GoTo,
    Hold,
    UavLimits,
    UavState,
    UgvLimits,
    UgvState,
    offset_pose,
    step_uav,
    step_ugv,
)
from tagbot.world import EnuPose

DT = 0.1


def fly(state, setpoint, seconds):
    for _ in range(int(round(seconds / DT))):
        step_uav(state, setpoint, DT)
    return state


def drive(state, setpoint, seconds):
    for _ in range(int(round(seconds / DT))):
        step_ugv(state, setpoint, DT)
    return state


class TestUav:
    def make(self, east=0.0, north=0.0, up=0.0):
        return UavState(pose=EnuPose(east, north, up), limits=UavLimits())

    def test_default_speed_limits(self):
        lim = UavLimits()
        assert lim.cruise_speed_ms == 1.5
        assert lim.descend_speed_ms == 0.25
        assert lim.ascend_speed_ms == 2.5

    def test_hold_freezes(self):
        s = self.make(1.0, 2.0, 3.0)
        fly(s, Hold(), 1.0)
        assert (s.pose.east, s.pose.north, s.pose.up) == (1.0, 2.0, 3.0)

    def test_cruise_speed_toward_goal(self):
        s = self.make()
        fly(s, GoTo(east=100.0, north=0.0, up=0.0), 10.0)
        assert math.isclose(s.pose.east, 15.0, abs_tol=1e-6)

    def test_no_overshoot(self):
        s = self.make()
        fly(s, GoTo(east=1.0, north=0.0, up=0.0), 5.0)
        assert math.isclose(s.pose.east, 1.0, abs_tol=1e-9)

    def test_ascent_faster_than_descent(self):
        up = fly(self.make(), GoTo(0.0, 0.0, up=50.0), 2.0).pose.up
        down_state = self.make(up=50.0)
        down = fly(down_state, GoTo(0.0, 0.0, up=0.0), 2.0).pose.up
        assert math.isclose(up, 5.0, abs_tol=1e-6)       # 2.5 m/s up
        assert math.isclose(down, 49.5, abs_tol=1e-6)    # 0.25 m/s down

    def test_descend_two_meters_takes_eight_seconds(self):
        # The search descent from 3.5 m cruise to 1.5 m read altitude at
        # 0.25 m/s costs exactly 8 s of the waypoint budget.
        s = self.make(up=3.5)
        fly(s, GoTo(0.0, 0.0, up=1.5), 8.0)
        assert math.isclose(s.pose.up, 1.5, abs_tol=1e-9)

    def test_circle_maintains_radius(self):
        s = self.make(east=2.0, north=0.0, up=1.5)
        sp = CircleAbout(center_east=0.0, center_north=0.0, radius_m=2.0,
                         up=1.5, speed_ms=0.5)
        for _ in range(100):
            step_uav(s, sp, DT)
            r = math.hypot(s.pose.east, s.pose.north)
            assert abs(r - 2.0) < 0.1

    def test_circle_angular_rate(self):
        # 0.5 m/s on a 2 m radius = 0.25 rad/s; a 270 degree arc takes
        # 3*pi/2 / 0.25 = 18.85 s.
        s = self.make(east=2.0, north=0.0, up=1.5)
        sp = CircleAbout(0.0, 0.0, radius_m=2.0, up=1.5, speed_ms=0.5)
        step_uav(s, sp, DT)
        phase0 = s.circle_phase
        fly(s, sp, 18.849 - DT)
        swept = s.circle_phase - phase0
        assert math.isclose(swept, 1.5 * math.pi, rel_tol=0.01)

    def test_hold_resets_circle_phase(self):
        s = self.make(east=2.0)
        step_uav(s, CircleAbout(0.0, 0.0, 2.0, up=0.0), DT)
        assert s.circle_phase is not None
        step_uav(s, Hold(), DT)
        assert s.circle_phase is None

    def test_yaw_tracks_motion(self):
        s = self.make()
        step_uav(s, GoTo(east=0.0, north=5.0, up=0.0), DT)
        assert math.isclose(s.pose.yaw, math.pi / 2, abs_tol=1e-9)


class TestUgv:
    def make(self, east=0.0, north=0.0, yaw=0.0):
        return UgvState(pose=EnuPose(east, north, 0.0, yaw=yaw), limits=UgvLimits())

    def test_default_limits(self):
        lim = UgvLimits()
        assert lim.speed_ms == 1.0
        assert lim.min_turn_radius_m == 1.0
        assert lim.arrival_tol_m == 0.3

    def test_hold_freezes(self):
        s = self.make(1.0, 1.0)
        drive(s, Hold(), 1.0)
        assert (s.pose.east, s.pose.north) == (1.0, 1.0)

    def test_straight_line_speed(self):
        s = self.make()
        drive(s, GoTo(east=100.0, north=0.0), 10.0)
        assert math.isclose(s.pose.east, 10.0, rel_tol=1e-6)
        assert s.pose.up == 0.0

    def test_stops_inside_arrival_tolerance(self):
        s = self.make()
        drive(s, GoTo(east=5.0, north=0.0), 30.0)
        assert math.hypot(s.pose.east - 5.0, s.pose.north) <= s.limits.arrival_tol_m

    def test_turns_with_bounded_rate(self):
        # Goal is straight behind: the rover must come about by steering,
        # not by snapping its heading.
        s = self.make(yaw=0.0)
        step_ugv(s, GoTo(east=-10.0, north=0.1), DT)
        max_turn = (s.limits.speed_ms / s.limits.min_turn_radius_m) * DT
        assert abs(s.pose.yaw) <= max_turn + 1e-9

    def test_slows_while_nose_comes_around(self):
        s = self.make(yaw=0.0)
        p0 = (s.pose.east, s.pose.north)
        step_ugv(s, GoTo(east=-10.0, north=0.0), DT)
        moved = math.hypot(s.pose.east - p0[0], s.pose.north - p0[1])
        assert moved < s.limits.speed_ms * DT * 0.5

    def test_circle_setpoint_degrades_to_goto_center(self):
        s = self.make()
        drive(s, CircleAbout(center_east=6.0, center_north=0.0, radius_m=2.0, up=0.0), 20.0)
        assert math.hypot(s.pose.east - 6.0, s.pose.north) <= s.limits.arrival_tol_m

    def test_altitude_stays_zero(self):
        s = self.make()
        drive(s, GoTo(east=3.0, north=4.0, up=7.0), 20.0)
        assert s.pose.up == 0.0


class TestOffsetPose:
    def test_offsets_each_axis(self):
        p = offset_pose(EnuPose(1.0, 2.0, 3.0, yaw=0.5), de=0.1, dn=-0.2, dup=0.3)
        assert math.isclose(p.east, 1.1)
        assert math.isclose(p.north, 1.8)
        assert math.isclose(p.up, 3.3)
        assert p.yaw == 0.5
