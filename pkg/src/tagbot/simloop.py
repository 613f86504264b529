"""Closed-loop mission simulation: vehicle, radio link, reader, ground control.

Each 100 ms tick the loop:

1. delivers due ground→vehicle command frames (one-tick transport delay,
   optional i.i.d. frame loss) and has the vehicle acknowledge them,
2. refreshes the vehicle's position estimate — GPS fixes at 5 Hz with the
   fix error frozen between fixes, barometric altitude every tick,
3. lets the pilot script (manual missions) issue its next command,
4. emits telemetry — heartbeats at 1 Hz, position at 5 Hz, tag reads as
   they complete — through the lossy vehicle→ground channel into ground
   control, collecting whatever commands that triggers,
5. runs the reader: continuous tag charging, a slotted inventory round
   every other tick, and 0.5 s sensor transactions gated on tag charge,
6. steps the vehicle toward its current directive.

Physics (propagation, charging, read draws) runs on true geometry; control
(arrival checks, commanded targets) runs on measured state. The autopilot
knows its own estimate error, so it steers until the *estimate* sits on the
commanded point — how a satnav-guided vehicle parks itself on a biased
coordinate. A manually piloted vehicle is flown by eye instead: true frame,
with a jittery hover.

All randomness comes from named per-seed streams, so a (scenario, seed)
pair replays bit-identically regardless of what else ran in the process.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from enum import IntEnum
from pathlib import Path
from random import Random
from typing import Optional

from .inventory import DEFAULT_Q, ReadError, adjust_q, read_sensor, run_inventory_round
from .mission import (
    MODE_MANUAL,
    GroundControl,
    MissionPlan,
    MissionView,
    build_command,
)
from .rflink import AntennaPose, received_power_dbm, sample_shadowing_db
from .scenario import ScenarioConfig, ScriptStep, TagSpec
from .tags import Epc, SensorChannel, Tag, TagKind, powered_state_update, sensor_ready
from .telemetry import (
    Ack,
    AckResult,
    Command,
    CommandType,
    GpsPosition,
    Heartbeat,
    TagRead,
    VehicleType,
    decode,
    encode,
)
from .vehicle import (
    TICK_S,
    CircleAbout,
    GoTo,
    Hold,
    Setpoint,
    UavLimits,
    UavState,
    UgvLimits,
    UgvState,
    step_uav,
    step_ugv,
)
from .world import BaroSampler, EnuPose, GeoPoint, GpsSampler, enu_from_geodetic, geodetic_from_enu

UGV_ANTENNA_HEIGHT_M = 0.3
SENSOR_TRANSACTION_MS = 500
GPS_PERIOD_TICKS = 2          # 5 Hz position fixes and telemetry
HEARTBEAT_PERIOD_TICKS = 10   # 1 Hz
INVENTORY_PERIOD_TICKS = 2
MANUAL_HOVER_JITTER_M = 0.15
PLACE_TOLERANCE_M = 0.5
LANDED_ALT_M = 0.02


class ExecState(IntEnum):
    """Vehicle-side status reported in heartbeats."""

    IDLE = 0
    TRANSIT = 1
    CIRCLE = 2
    HOLD = 3
    PLACING = 4
    LANDED = 5


def tag_from_spec(spec: TagSpec) -> Tag:
    pose = AntennaPose(position=EnuPose(spec.east, spec.north, spec.height_m),
                       boresight=spec.axis)
    return Tag(epc=spec.epc, kind=spec.kind, pose=pose,
               mount_height_m=spec.height_m, whitelisted=spec.whitelisted)


def reader_pose(vehicle: VehicleType, pose: EnuPose) -> AntennaPose:
    """Reader antenna mount: belly-down under the aircraft, nose-forward at
    bumper height on the rover."""
    if vehicle == VehicleType.UAV:
        return AntennaPose(position=EnuPose(pose.east, pose.north, pose.up),
                           boresight=(0.0, 0.0, -1.0))
    return AntennaPose(position=EnuPose(pose.east, pose.north, UGV_ANTENNA_HEIGHT_M),
                       boresight=(math.cos(pose.yaw), math.sin(pose.yaw), 0.0))


class CommandExecutor:
    """Vehicle-side autopilot: holds the active directive, applies the
    estimate-error correction, and releases carried tags at the drop point."""

    def __init__(self, vehicle: VehicleType, origin: GeoPoint, manual: bool,
                 pending: tuple[TagSpec, ...], jitter_rng: Random) -> None:
        self.vehicle = vehicle
        self.origin = origin
        self.manual = manual
        self.pending: list[TagSpec] = list(pending)
        self.jitter_rng = jitter_rng
        self.directive: Setpoint = Hold()
        self.state = ExecState.IDLE
        self.place_spec: Optional[TagSpec] = None
        self.place_target: Optional[tuple[float, float, float]] = None
        self.landing = False
        self.landed = False
        self.placed: list[Tag] = []

    def on_command(self, cmd: Command) -> AckResult:
        enu = enu_from_geodetic(self.origin, GeoPoint(cmd.lat, cmd.lon, cmd.alt_m))
        ct = CommandType(cmd.command)
        if ct in (CommandType.NAV_TO, CommandType.TAKEOFF,
                  CommandType.CHANGE_ALT, CommandType.HOVER_AT):
            self.directive = GoTo(enu.east, enu.north, cmd.alt_m)
            self.state = ExecState.HOLD if ct is CommandType.HOVER_AT else ExecState.TRANSIT
            self.landing = False
            self.landed = False
        elif ct is CommandType.CIRCLE:
            self.directive = CircleAbout(enu.east, enu.north, cmd.param_m, cmd.alt_m)
            self.state = ExecState.CIRCLE
            self.landing = False
        elif ct is CommandType.LAND:
            if self.vehicle == VehicleType.UGV:
                # a rover "lands" by stopping where it is
                self.directive = Hold()
                self.state = ExecState.LANDED
                self.landing = True
                self.landed = True
            else:
                self.directive = GoTo(enu.east, enu.north, 0.0)
                self.state = ExecState.TRANSIT
                self.landing = True
        elif ct is CommandType.PLACE_TAG:
            if not self.pending:
                return AckResult.REJECTED
            self.place_spec = self.pending.pop(0)
            self.place_target = (enu.east, enu.north, cmd.alt_m)
            self.directive = GoTo(enu.east, enu.north, cmd.alt_m)
            self.state = ExecState.PLACING
            self.landing = False
        return AckResult.ACCEPTED

    def setpoint(self, err_e: float, err_n: float, err_alt: float) -> Setpoint:
        """The directive translated into the frame the vehicle actually flies.

        Autonomous: subtract the current estimate error so the *estimate*
        converges on the commanded point. Landing descends on true altitude
        (touchdown is sensed, not inferred from pressure). Manual: commanded
        point as-is, plus pilot hover jitter.
        """
        d = self.directive
        if isinstance(d, Hold):
            return d
        if self.manual:
            je = self.jitter_rng.gauss(0.0, MANUAL_HOVER_JITTER_M)
            jn = self.jitter_rng.gauss(0.0, MANUAL_HOVER_JITTER_M)
            if isinstance(d, GoTo):
                return GoTo(d.east + je, d.north + jn, d.up)
            return d
        if isinstance(d, GoTo):
            up = 0.0 if self.landing else max(0.0, d.up - err_alt)
            return GoTo(d.east - err_e, d.north - err_n, up)
        if isinstance(d, CircleAbout):
            return CircleAbout(d.center_east - err_e, d.center_north - err_n,
                               d.radius_m, max(0.0, d.up - err_alt), d.speed_ms)
        return d

    def check_place(self, true_pose: EnuPose) -> Optional[Tag]:
        """Release the carried tag once the vehicle is at the drop point.

        The tag sticks at the commanded position (the mount), not at the
        vehicle's own position."""
        if self.place_spec is None or self.place_target is None:
            return None
        dx = true_pose.east - self.place_target[0]
        dy = true_pose.north - self.place_target[1]
        dz = true_pose.up - self.place_target[2]
        if math.sqrt(dx * dx + dy * dy + dz * dz) > PLACE_TOLERANCE_M:
            return None
        tag = tag_from_spec(self.place_spec)
        self.placed.append(tag)
        self.place_spec = None
        self.state = ExecState.HOLD
        return tag

    def update_landed(self, true_pose: EnuPose) -> None:
        if not self.landing or self.landed:
            return
        if self.vehicle == VehicleType.UAV:
            if true_pose.up <= LANDED_ALT_M:
                self.landed = True
                self.state = ExecState.LANDED
        else:
            d = self.directive
            if isinstance(d, GoTo) and math.hypot(
                    true_pose.east - d.east, true_pose.north - d.north) <= 0.35:
                self.landed = True
                self.state = ExecState.LANDED


class ScriptDriver:
    """Ground-side pilot for manual missions: walks the script, sending each
    step's command and watching the vehicle by eye (true state) plus the
    mission view for reads and acknowledgements."""

    NAV_TOL_M = 0.35
    ALT_TOL_M = 0.2
    REISSUE_S = 2.0
    MAX_REISSUES = 10
    STEP_TIMEOUT_S = 120.0

    def __init__(self, cfg: ScenarioConfig, mission_id: str, gcs: GroundControl) -> None:
        self.cfg = cfg
        self.mission_id = mission_id
        self.gcs = gcs
        self.steps = list(cfg.script)
        self.idx = 0
        self.issued = False
        self.issue_t = 0.0
        self.issue_seq: Optional[int] = None
        self.reissues = 0
        self.step_start = 0.0
        self.placed_before = 0
        self.obs_before = 0
        self.timeouts = 0
        self.done = not self.steps
        # per-step outcome: (index, action, epc hex | None, start_s, end_s, status)
        self.step_log: list[tuple[int, str, Optional[str], float, float, str]] = []
        self._kind_by_epc = {t.epc: t.kind
                             for t in list(cfg.tags) + list(cfg.pending_tags)}

    def tick(self, t_s: float, t_ms: int, true_pose: EnuPose,
             exec_: CommandExecutor, view: MissionView) -> list[bytes]:
        if self.done:
            return []
        step = self.steps[self.idx]
        if not self.issued:
            self.step_start = t_s
            self.placed_before = len(exec_.placed)
            self.obs_before = len(view.observations)
            return [self._issue(step, t_ms, true_pose)]
        if self._complete(step, t_s, true_pose, exec_, view):
            self._finish(step, t_s, "done")
            self._advance()
            return []
        if (step.action == "hover_read" and step.duration_s > 0
                and t_s - self.step_start >= step.duration_s):
            self.timeouts += 1
            self._finish(step, t_s, "gave_up")
            self._advance()
            return []
        if t_s - self.step_start > self.STEP_TIMEOUT_S:
            self.timeouts += 1
            self._finish(step, t_s, "timeout")
            self._advance()
            return []
        if (t_s - self.issue_t >= self.REISSUE_S and self.reissues < self.MAX_REISSUES
                and not self._acked(view)):
            return [self._issue(step, t_ms, true_pose, reissue=True)]
        return []

    def _finish(self, step: ScriptStep, t_s: float, status: str) -> None:
        self.step_log.append((self.idx, step.action,
                              step.epc.hex if step.epc else None,
                              self.step_start, t_s, status))

    def _advance(self) -> None:
        self.idx += 1
        self.issued = False
        self.reissues = 0
        if self.idx >= len(self.steps):
            self.done = True

    def _acked(self, view: MissionView) -> bool:
        return any(a.seq_acked == self.issue_seq for a in view.acks)

    def _issue(self, step: ScriptStep, t_ms: int, true_pose: EnuPose,
               reissue: bool = False) -> bytes:
        cmd = self._command_for(step, true_pose)
        raw = self.gcs.send_command(self.mission_id, cmd, t_ms,
                                    note="manual-retry" if reissue else "manual")
        self.issue_seq = decode(raw).seq
        self.issue_t = t_ms / 1000.0
        self.issued = True
        if reissue:
            self.reissues += 1
        return raw

    def _geo(self, east: float, north: float, alt: float) -> GeoPoint:
        return geodetic_from_enu(self.cfg.origin, EnuPose(east, north, alt))

    def _command_for(self, step: ScriptStep, true_pose: EnuPose) -> Command:
        a = step.action
        if a == "takeoff":
            return build_command(CommandType.TAKEOFF,
                                 self._geo(true_pose.east, true_pose.north, step.alt))
        if a == "nav":
            return build_command(CommandType.NAV_TO,
                                 self._geo(step.east, step.north, step.alt))
        if a in ("hover", "hover_read"):
            return build_command(CommandType.HOVER_AT,
                                 self._geo(step.east, step.north, step.alt))
        if a == "place_tag":
            return build_command(CommandType.PLACE_TAG,
                                 self._geo(step.east, step.north, step.alt))
        return build_command(CommandType.LAND,
                             self._geo(true_pose.east, true_pose.north, 0.0))

    def _complete(self, step: ScriptStep, t_s: float, true_pose: EnuPose,
                  exec_: CommandExecutor, view: MissionView) -> bool:
        a = step.action
        if a == "takeoff":
            return abs(true_pose.up - step.alt) <= self.ALT_TOL_M
        if a == "nav":
            ok = math.hypot(true_pose.east - step.east,
                            true_pose.north - step.north) <= self.NAV_TOL_M
            if self.cfg.vehicle == VehicleType.UAV:
                ok = ok and abs(true_pose.up - step.alt) <= self.ALT_TOL_M
            return ok
        if a == "hover":
            return t_s - self.step_start >= step.duration_s
        if a == "hover_read":
            if step.epc is None:
                return len(view.observations) > self.obs_before
            obs = view.observation_for(step.epc.hex)
            if obs is None:
                return False
            kind = self._kind_by_epc.get(step.epc, TagKind.ID_ONLY)
            return bool(obs.readings) or kind is TagKind.ID_ONLY
        if a == "place_tag":
            return len(exec_.placed) > self.placed_before
        return exec_.landed  # land


@dataclass
class MissionResult:
    mission_id: str
    scenario: str
    seed: int
    sim_time_s: float
    landed: bool
    completed: bool
    view: MissionView
    detected: dict[str, bool]
    time_to_read_s: dict[str, Optional[float]]
    sensor_values: dict[str, dict[str, float]]
    n_tags: int
    n_detected: int
    placed: int
    true_path: list[tuple[float, float, float, float]] = field(default_factory=list)
    # manual missions: (step index, action, epc hex, start_s, end_s, status)
    script_log: list[tuple[int, str, Optional[str], float, float, str]] = field(default_factory=list)

    @property
    def detection_rate(self) -> float:
        return self.n_detected / self.n_tags if self.n_tags else 1.0


def run_scenario(cfg: ScenarioConfig, seed: int,
                 log_dir: Optional[Path] = None,
                 gcs: Optional[GroundControl] = None,
                 tick_sleep_s: float = 0.0,
                 operator_queue: Optional[list] = None) -> MissionResult:
    """Run one mission to completion (or the scenario time limit).

    `tick_sleep_s` paces the loop against the wall clock (live viewing);
    `operator_queue` is drained each tick — raw command frames appended to it
    from outside (an operator console) are delivered over the downlink like
    any other command.
    """

    def stream(name: str) -> Random:
        return Random(f"{seed}:{name}")

    gps_sampler = GpsSampler(cfg.gps, stream("gps-bias"))
    gps_noise = stream("gps-noise")
    baro_sampler = BaroSampler(cfg.baro, stream("baro-bias"))
    baro_noise = stream("baro-noise")
    inv_rng = stream("inventory")
    jitter_rng = stream("jitter")
    up_rng = stream("chan-up")
    down_rng = stream("chan-down")
    shadow_rng = stream("shadow")

    mission_id = f"{cfg.name}-{seed}"
    own_gcs = gcs is None
    if own_gcs:
        gcs = GroundControl(log_dir)
    plan = MissionPlan(mission_id=mission_id, vehicle=cfg.vehicle, origin=cfg.origin,
                       waypoints=cfg.waypoints, params=cfg.behavior, mode=cfg.mode)
    mstate = gcs.create_mission(plan, seed)

    world_tags: list[Tag] = [tag_from_spec(s) for s in cfg.tags]
    by_epc: dict[Epc, Tag] = {t.epc: t for t in world_tags}
    manual = cfg.mode == MODE_MANUAL
    executor = CommandExecutor(cfg.vehicle, cfg.origin, manual, cfg.pending_tags, jitter_rng)
    driver = ScriptDriver(cfg, mission_id, gcs) if manual else None

    start = EnuPose(cfg.start_east, cfg.start_north, 0.0, yaw=0.0)
    if cfg.vehicle == VehicleType.UAV:
        state = UavState(pose=start, limits=UavLimits())
    else:
        state = UgvState(pose=start, limits=UgvLimits())

    up_seq = 0
    downlink: list[tuple[int, bytes]] = []     # (deliver_tick, frame)
    pending_delivery: list[tuple[int, list[TagRead]]] = []  # (deliver_ms, messages)
    busy_until_ms = -1
    sensor_done: set[Epc] = set()
    q = DEFAULT_Q
    err_e = err_n = 0.0
    meas_e = meas_n = 0.0
    true_path: list[tuple[float, float, float, float]] = []
    sim_time_s = 0.0

    n_ticks = int(round(cfg.duration_s / TICK_S)) + 1
    for k in range(n_ticks):
        t_ms = k * 100
        sim_time_s = t_ms / 1000.0
        true_pose = state.pose
        uplink: list[bytes] = []

        def send(msg) -> None:
            nonlocal up_seq
            uplink.append(encode(msg, up_seq))
            up_seq += 1

        # 1. command delivery + acknowledgement
        due = [f for f in downlink if f[0] <= k]
        downlink = [f for f in downlink if f[0] > k]
        for _, raw in due:
            frame = decode(raw)
            if isinstance(frame.msg, Command):
                result = executor.on_command(frame.msg)
                send(Ack(seq_acked=frame.seq, result=int(result)))

        # 2. state estimate
        if k % GPS_PERIOD_TICKS == 0:
            fix = gps_sampler.sample(true_pose, gps_noise)
            meas_e, meas_n = fix.east, fix.north
            err_e = meas_e - true_pose.east
            err_n = meas_n - true_pose.north
        meas_alt = baro_sampler.sample(true_pose.up, baro_noise)
        err_alt = meas_alt - true_pose.up

        def enqueue_down(raw: bytes) -> None:
            if down_rng.random() >= cfg.downlink_drop:
                downlink.append((k + 1, raw))

        # 3. pilot script and operator console
        if driver is not None:
            for raw in driver.tick(sim_time_s, t_ms, true_pose, executor,
                                   gcs.view(mission_id)):
                enqueue_down(raw)
        if operator_queue:
            while operator_queue:
                enqueue_down(operator_queue.pop(0))

        # 4. telemetry
        if k % HEARTBEAT_PERIOD_TICKS == 0:
            send(Heartbeat(vehicle_type=int(cfg.vehicle), fsm_state=int(executor.state)))
        if k % GPS_PERIOD_TICKS == 0:
            geo = geodetic_from_enu(cfg.origin, EnuPose(meas_e, meas_n, meas_alt))
            send(GpsPosition.from_degrees(geo.lat, geo.lon, meas_alt, t_ms))

        # 5. reader
        rpose = reader_pose(cfg.vehicle, true_pose)
        shadow = sample_shadowing_db(cfg.link, shadow_rng)
        for tag in world_tags:
            rx = received_power_dbm(rpose, tag.pose, cfg.link, shadow)
            powered_state_update(tag, rx, TICK_S, cfg.link)
        ready = [d for d in pending_delivery if d[0] <= t_ms]
        pending_delivery = [d for d in pending_delivery if d[0] > t_ms]
        for _, msgs in ready:
            for msg in msgs:
                send(msg)
        if t_ms >= busy_until_ms and k % INVENTORY_PERIOD_TICKS == 0 and world_tags:
            rnd = run_inventory_round(world_tags, rpose, cfg.link, q, inv_rng, shadow)
            q = adjust_q(rnd.q, rnd.n_collision, rnd.n_idle)
            for epc, rssi in rnd.reads:
                tag = by_epc[epc]
                # every singulation goes out as a plain EPC report with its
                # signal strength; for ID-only tags this IS the read
                send(TagRead(epc.data, round(rssi * 10),
                             int(SensorChannel.NONE), 0, t_ms))
                if (tag.kind is not TagKind.ID_ONLY and epc not in sensor_done
                        and sensor_ready(tag)):
                    # A sensor session only starts once the tag reports
                    # itself charged; an uncharged tag just fails the op
                    # instantly and costs the reader nothing. The real
                    # transaction monopolizes the reader.
                    busy_until_ms = t_ms + SENSOR_TRANSACTION_MS
                    deliver_ms = t_ms + SENSOR_TRANSACTION_MS
                    try:
                        rec = read_sensor(epc, world_tags, rpose, cfg.link, cfg.env,
                                          cfg.cal, inv_rng, timestamp_ms=deliver_ms,
                                          shadow_db=shadow)
                    except ReadError:
                        pass
                    else:
                        sensor_done.add(epc)
                        msgs = [TagRead(epc.data, round(rec.rssi_dbm * 10),
                                        int(r.channel), r.value_milli, deliver_ms)
                                for r in rec.readings]
                        pending_delivery.append((deliver_ms, msgs))
                    break

        # 6. uplink through the lossy channel into ground control
        for raw in uplink:
            if up_rng.random() < cfg.uplink_drop:
                continue
            for cmd_raw in gcs.handle_frame(mission_id, raw, t_ms):
                enqueue_down(cmd_raw)

        # 7. tag placement
        placed = executor.check_place(true_pose)
        if placed is not None:
            world_tags.append(placed)
            by_epc[placed.epc] = placed

        # 8. vehicle dynamics
        sp = executor.setpoint(err_e, err_n, err_alt)
        if cfg.vehicle == VehicleType.UAV:
            state = step_uav(state, sp, TICK_S)
        else:
            state = step_ugv(state, sp, TICK_S)
        executor.update_landed(state.pose)

        if k % 5 == 0:
            true_path.append((sim_time_s, state.pose.east, state.pose.north, state.pose.up))
        if tick_sleep_s > 0.0:
            time.sleep(tick_sleep_s)

        if manual:
            if driver.done and (executor.landed or cfg.vehicle == VehicleType.UGV):
                break
        elif mstate.done and executor.landed:
            break

    view = gcs.view(mission_id)
    specs = list(cfg.tags) + list(cfg.pending_tags)
    detected: dict[str, bool] = {}
    ttr: dict[str, Optional[float]] = {}
    values: dict[str, dict[str, float]] = {}
    for s in specs:
        obs = view.observation_for(s.epc.hex)
        ok = obs is not None and (s.kind is TagKind.ID_ONLY or bool(obs.readings))
        detected[s.epc.hex] = ok
        if ok:
            first = obs.first_time_ms if obs.first_time_ms is not None else obs.time_ms
            ttr[s.epc.hex] = first / 1000.0
        else:
            ttr[s.epc.hex] = None
        values[s.epc.hex] = dict(obs.readings) if ok else {}
    completed = driver.done if manual else mstate.done
    result = MissionResult(
        mission_id=mission_id, scenario=cfg.name, seed=seed,
        sim_time_s=sim_time_s, landed=executor.landed, completed=completed,
        view=view, detected=detected, time_to_read_s=ttr, sensor_values=values,
        n_tags=len(specs), n_detected=sum(detected.values()),
        placed=len(executor.placed), true_path=true_path,
        script_log=list(driver.step_log) if driver is not None else [])
    if own_gcs:
        gcs.close()
    return result
