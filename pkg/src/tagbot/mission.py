"""Ground control: event-sourced mission log, live command loop, and replay.

Every wire frame a mission exchanges is appended to its log — an 8-byte
little-endian receive timestamp (ms) followed by the raw frame — before the
ground station acts on it (write-ahead). The mission view shown to callers is
a pure fold over those records, so replaying a log file reconstructs exactly
the state the live system showed, and the log is the single source of truth.

In autonomous mode the ground station hosts the search state machine,
clocked purely by telemetry: position fixes and tag reads advance it,
heartbeats never do. Whenever the machine changes leg, the matching vehicle
command is encoded, logged, and handed back to the caller for delivery.
Every inbound frame produces an audit entry saying what it triggered.
"""

from __future__ import annotations

import dataclasses
import json
import struct
from dataclasses import dataclass, field
from pathlib import Path
from random import Random
from typing import Iterator, Optional

from .behavior import (
    BehaviorParams,
    SearchPoint,
    StepObs,
    UavFsm,
    UavPhase,
    UgvFsm,
    UgvPhase,
    behavior_params_from_dict,
    command_key,
    uav_search_step,
    ugv_search_step,
)
from .tags import Epc, SensorChannel
from .telemetry import (
    Ack,
    Command,
    CommandType,
    DecodedFrame,
    GpsPosition,
    Heartbeat,
    TagRead,
    TelemetryError,
    VehicleType,
    decode,
    encode,
)
from .world import EnuPose, GeoPoint, enu_from_geodetic, geodetic_from_enu

MODE_AUTONOMOUS = "autonomous"
MODE_MANUAL = "manual"

COMMAND_RETRY_MS = 2000   # resend an unacknowledged command after this long

_TS_STRUCT = struct.Struct("<Q")


def build_command(ctype: CommandType, p: GeoPoint, param_m: float = 0.0) -> Command:
    """Pack a target position (and optional radius/size parameter) into the
    scaled-integer command wire form."""
    return Command(int(ctype), round(p.lat * 1e7), round(p.lon * 1e7),
                   round(p.alt * 1000.0), round(param_m * 100.0))


@dataclass(frozen=True)
class MissionPlan:
    mission_id: str
    vehicle: VehicleType
    origin: GeoPoint
    waypoints: tuple[SearchPoint, ...]
    params: BehaviorParams
    mode: str = MODE_AUTONOMOUS

    def __post_init__(self) -> None:
        if self.mode not in (MODE_AUTONOMOUS, MODE_MANUAL):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == MODE_AUTONOMOUS and not self.waypoints:
            raise ValueError("autonomous mission needs waypoints")

    def to_dict(self) -> dict:
        return {
            "mission_id": self.mission_id,
            "vehicle": self.vehicle.name,
            "mode": self.mode,
            "origin": {"lat": self.origin.lat, "lon": self.origin.lon, "alt": self.origin.alt},
            "waypoints": [
                {"east": w.east, "north": w.north,
                 "epc": w.expected_epc.hex if w.expected_epc else None,
                 "needs_sensor": w.needs_sensor}
                for w in self.waypoints
            ],
            "params": dataclasses.asdict(self.params),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MissionPlan":
        return cls(
            mission_id=d["mission_id"],
            vehicle=VehicleType[d["vehicle"]],
            origin=GeoPoint(d["origin"]["lat"], d["origin"]["lon"], d["origin"].get("alt", 0.0)),
            waypoints=tuple(
                SearchPoint(w["east"], w["north"],
                            Epc.from_hex(w["epc"]) if w.get("epc") else None,
                            w.get("needs_sensor", False))
                for w in d["waypoints"]
            ),
            params=behavior_params_from_dict(d["params"]),
            mode=d.get("mode", MODE_AUTONOMOUS),
        )


class EventLog:
    """Append-only store of (receive-timestamp, frame) records.

    With a path, records go to disk immediately (flushed per append); without
    one they stay in memory. Either way `records()` yields them in order.
    """

    def __init__(self, path: Optional[Path] = None) -> None:
        self.path = Path(path) if path is not None else None
        self._mem: list[tuple[int, bytes]] = []
        self._fh = open(self.path, "ab") if self.path is not None else None

    def append(self, ts_ms: int, frame: bytes) -> None:
        if self._fh is not None:
            self._fh.write(_TS_STRUCT.pack(ts_ms) + frame)
            self._fh.flush()
        else:
            self._mem.append((ts_ms, bytes(frame)))

    def close(self) -> None:
        if self._fh is not None:
            self._fh.close()
            self._fh = None

    def records(self) -> Iterator[tuple[int, DecodedFrame]]:
        if self.path is not None:
            yield from iter_log(self.path)
        else:
            for ts, raw in self._mem:
                yield ts, decode(raw)


def iter_log(path: Path) -> Iterator[tuple[int, DecodedFrame]]:
    """Walk a log file record by record. Corruption raises: this is our own
    storage, not the radio link, so errors mean real damage."""
    data = Path(path).read_bytes()
    off = 0
    while off < len(data):
        if len(data) - off < _TS_STRUCT.size:
            raise ValueError(f"truncated log record at byte {off}")
        (ts,) = _TS_STRUCT.unpack_from(data, off)
        frame = decode(data[off + _TS_STRUCT.size:])
        yield ts, frame
        off += _TS_STRUCT.size + len(frame.raw)


@dataclass(frozen=True)
class PathFix:
    time_ms: int
    lat: float
    lon: float
    alt_m: float
    east: float
    north: float

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


@dataclass
class TagObservation:
    epc_hex: str
    time_ms: int                      # latest report folded into this row
    rssi_dbm: float
    readings: dict[str, float] = field(default_factory=dict)
    east: Optional[float] = None
    north: Optional[float] = None
    alt_m: Optional[float] = None
    first_time_ms: Optional[int] = None   # when this tag first produced the row

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


@dataclass(frozen=True)
class CommandRecord:
    ts_ms: int
    seq: int
    command: str
    lat: float
    lon: float
    alt_m: float
    param_m: float

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


@dataclass(frozen=True)
class AckRecord:
    ts_ms: int
    seq_acked: int
    result: int

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


STATUS_ACTIVE = "active"
STATUS_DONE = "done"


@dataclass
class MissionView:
    """Everything a consumer can know about a mission: a fold over its log."""

    mission_id: str
    path: list[PathFix] = field(default_factory=list)
    observations: list[TagObservation] = field(default_factory=list)
    commands: list[CommandRecord] = field(default_factory=list)
    acks: list[AckRecord] = field(default_factory=list)
    heartbeats: int = 0
    last_fsm_state: Optional[int] = None
    frames: int = 0
    status: str = STATUS_ACTIVE

    def observation_for(self, epc_hex: str) -> Optional[TagObservation]:
        """Best observation of a tag: the latest one carrying delivered
        sensor values, else the latest bare sighting."""
        best: Optional[TagObservation] = None
        for obs in self.observations:
            if obs.epc_hex != epc_hex:
                continue
            if obs.readings or best is None or not best.readings:
                best = obs
        return best

    def to_dict(self) -> dict:
        return {
            "mission_id": self.mission_id,
            "status": self.status,
            "frames": self.frames,
            "heartbeats": self.heartbeats,
            "last_fsm_state": self.last_fsm_state,
            "path": [p.to_dict() for p in self.path],
            "observations": [o.to_dict() for o in self.observations],
            "commands": [c.to_dict() for c in self.commands],
            "acks": [a.to_dict() for a in self.acks],
        }


def apply_frame(view: MissionView, ts_ms: int, frame: DecodedFrame, origin: GeoPoint) -> None:
    """Fold one logged frame into the view. Shared verbatim by the live path
    and replay, which is what makes replay-equals-live hold by construction."""
    view.frames += 1
    msg = frame.msg
    if isinstance(msg, Heartbeat):
        view.heartbeats += 1
        view.last_fsm_state = msg.fsm_state
    elif isinstance(msg, GpsPosition):
        enu = enu_from_geodetic(origin, GeoPoint(msg.lat, msg.lon, msg.alt_m))
        view.path.append(PathFix(msg.time_ms, msg.lat, msg.lon, msg.alt_m, enu.east, enu.north))
    elif isinstance(msg, TagRead):
        target: Optional[TagObservation] = None
        if msg.sensor_kind == SensorChannel.NONE:
            # Bare sightings repeat while a tag stays in range; fold them
            # into the latest value-less observation of the same tag.
            for obs in reversed(view.observations):
                if obs.epc_hex == msg.epc_hex and not obs.readings:
                    target = obs
                    break
        else:
            key = (msg.epc_hex, msg.time_ms)
            for obs in reversed(view.observations):
                if (obs.epc_hex, obs.time_ms) == key:
                    target = obs
                    break
        if target is None:
            target = TagObservation(epc_hex=msg.epc_hex, time_ms=msg.time_ms,
                                    rssi_dbm=msg.rssi_dbm, first_time_ms=msg.time_ms)
            view.observations.append(target)
        target.time_ms = max(target.time_ms, msg.time_ms)
        target.rssi_dbm = msg.rssi_dbm
        if view.path:
            last = view.path[-1]
            target.east, target.north, target.alt_m = last.east, last.north, last.alt_m
        if msg.sensor_kind != SensorChannel.NONE:
            name = SensorChannel(msg.sensor_kind).name.lower()
            target.readings[name] = msg.sensor_value_milli / 1000.0
    elif isinstance(msg, Command):
        view.commands.append(CommandRecord(
            ts_ms, frame.seq, CommandType(msg.command).name,
            msg.lat, msg.lon, msg.alt_m, msg.param_m))
        if msg.command == CommandType.LAND:
            view.status = STATUS_DONE
    elif isinstance(msg, Ack):
        view.acks.append(AckRecord(ts_ms, msg.seq_acked, msg.result))


def replay_log(log_path: Path, meta_path: Optional[Path] = None) -> MissionView:
    """Rebuild a mission view purely from its log file and plan sidecar."""
    log_path = Path(log_path)
    if meta_path is None:
        meta_path = log_path.with_suffix(".meta.json")
    plan = MissionPlan.from_dict(json.loads(Path(meta_path).read_text()))
    view = MissionView(mission_id=plan.mission_id)
    for ts, frame in iter_log(log_path):
        apply_frame(view, ts, frame, plan.origin)
    return view


@dataclass
class AuditEntry:
    ts_ms: int
    trigger: str            # "seq=<n> <TYPE>" for frames, "manual" for UI commands
    decision: str           # human-readable account of what the trigger caused
    cmd_seqs: tuple[int, ...] = ()

    def to_dict(self) -> dict:
        return {"ts_ms": self.ts_ms, "trigger": self.trigger,
                "decision": self.decision, "cmd_seqs": list(self.cmd_seqs)}


@dataclass
class MissionState:
    plan: MissionPlan
    log: EventLog
    view: MissionView
    fsm: object = None                      # UavFsm | UgvFsm | None (manual)
    rng: Optional[Random] = None            # retry-heading stream (UGV)
    next_cmd_seq: int = 0
    last_key: Optional[tuple] = None
    fsm_time_ms: Optional[int] = None
    last_enu: Optional[tuple[float, float, float]] = None
    pending_reads: list = field(default_factory=list)
    pending_sightings: list = field(default_factory=list)
    # EPCs whose waypoint demands a delivered sensor value; a bare inventory
    # report of one of these is a sighting, not a satisfied goal.
    sensor_epcs: frozenset = frozenset()
    audit: list[AuditEntry] = field(default_factory=list)
    outstanding: dict[int, tuple[Command, int]] = field(default_factory=dict)
    done: bool = False

    @property
    def phase_name(self) -> Optional[str]:
        if self.fsm is None:
            return None
        return self.fsm.phase.name


class UnknownMission(KeyError):
    pass


class GroundControl:
    """Hosts missions: logs every frame, folds views, runs the search loop.

    `handle_frame` is the single entry point for vehicle telemetry; it
    returns the encoded command frames the caller must deliver back to the
    vehicle. UI/script commands enter through `send_command`.
    """

    def __init__(self, log_dir: Optional[Path] = None) -> None:
        self.log_dir = Path(log_dir) if log_dir is not None else None
        if self.log_dir is not None:
            self.log_dir.mkdir(parents=True, exist_ok=True)
        self._missions: dict[str, MissionState] = {}
        self.orphan_audit: list[AuditEntry] = []

    # -- lifecycle ---------------------------------------------------------

    def create_mission(self, plan: MissionPlan, seed: int = 0) -> MissionState:
        if plan.mission_id in self._missions:
            raise ValueError(f"mission {plan.mission_id!r} already exists")
        log_path = None
        if self.log_dir is not None:
            log_path = self.log_dir / f"{plan.mission_id}.log"
            meta_path = self.log_dir / f"{plan.mission_id}.meta.json"
            meta_path.write_text(json.dumps(plan.to_dict(), indent=2))
        fsm = None
        rng = None
        if plan.mode == MODE_AUTONOMOUS:
            if plan.vehicle == VehicleType.UAV:
                fsm = UavFsm(waypoints=plan.waypoints, params=plan.params)
            else:
                fsm = UgvFsm(waypoints=plan.waypoints, params=plan.params)
                rng = Random(f"{seed}:ugv-retry:{plan.mission_id}")
        sensor_epcs = frozenset(w.expected_epc for w in plan.waypoints
                                if w.needs_sensor and w.expected_epc is not None)
        state = MissionState(plan=plan, log=EventLog(log_path),
                             view=MissionView(mission_id=plan.mission_id),
                             fsm=fsm, rng=rng, sensor_epcs=sensor_epcs)
        self._missions[plan.mission_id] = state
        return state

    def close(self) -> None:
        for m in self._missions.values():
            m.log.close()

    def mission_ids(self) -> list[str]:
        return list(self._missions)

    def mission(self, mission_id: str) -> MissionState:
        try:
            return self._missions[mission_id]
        except KeyError:
            raise UnknownMission(mission_id) from None

    def view(self, mission_id: str) -> MissionView:
        return self.mission(mission_id).view

    def summary(self, mission_id: str) -> dict:
        m = self.mission(mission_id)
        return {
            "mission_id": mission_id,
            "vehicle": m.plan.vehicle.name,
            "mode": m.plan.mode,
            "status": m.view.status,
            "phase": m.phase_name,
            "fixes": len(m.view.path),
            "observations": len(m.view.observations),
            "commands": len(m.view.commands),
        }

    # -- inbound telemetry -------------------------------------------------

    def handle_frame(self, mission_id: str, raw: bytes, recv_ts_ms: int) -> list[bytes]:
        if mission_id not in self._missions:
            self.orphan_audit.append(AuditEntry(
                recv_ts_ms, f"mission={mission_id!r}",
                "unknown mission → frame ignored"))
            return []
        m = self._missions[mission_id]
        try:
            frame = decode(raw)
        except TelemetryError as exc:
            m.audit.append(AuditEntry(recv_ts_ms, "frame",
                                      f"undecodable frame dropped ({exc})"))
            return []
        m.log.append(recv_ts_ms, frame.raw)          # write-ahead: log, then act
        apply_frame(m.view, recv_ts_ms, frame, m.plan.origin)
        msg = frame.msg
        trigger = f"seq={frame.seq} {type(msg).__name__.upper()}"
        if isinstance(msg, Heartbeat):
            m.audit.append(AuditEntry(recv_ts_ms, trigger, "HEARTBEAT → no command"))
            return []
        if isinstance(msg, Ack):
            m.outstanding.pop(msg.seq_acked, None)
            m.audit.append(AuditEntry(
                recv_ts_ms, trigger,
                f"ack for command seq={msg.seq_acked} → no command"))
            return []
        if m.plan.mode != MODE_AUTONOMOUS:
            m.audit.append(AuditEntry(recv_ts_ms, trigger, "manual mode → no command"))
            return []
        if m.done:
            out = []
            if isinstance(msg, GpsPosition):
                out = self._resend_stale(m, msg.time_ms, recv_ts_ms)
            if not out:
                m.audit.append(AuditEntry(recv_ts_ms, trigger, "mission done → no command"))
            return out
        return self._step_autonomous(m, msg, trigger, recv_ts_ms)

    # -- outbound commands -------------------------------------------------

    def send_command(self, mission_id: str, command: Command, ts_ms: int,
                     note: str = "manual") -> bytes:
        """Queue an operator command: logged and audited like any decision."""
        m = self.mission(mission_id)
        raw = encode(command, m.next_cmd_seq)
        m.log.append(ts_ms, raw)
        apply_frame(m.view, ts_ms, decode(raw), m.plan.origin)
        m.audit.append(AuditEntry(
            ts_ms, note,
            f"{CommandType(command.command).name} seq={m.next_cmd_seq}",
            (m.next_cmd_seq,)))
        m.next_cmd_seq += 1
        if command.command == CommandType.LAND:
            m.done = True
        return raw

    # -- the autonomous loop ----------------------------------------------

    def _step_autonomous(self, m: MissionState, msg, trigger: str,
                         recv_ts_ms: int) -> list[bytes]:
        if isinstance(msg, GpsPosition):
            enu = enu_from_geodetic(m.plan.origin, GeoPoint(msg.lat, msg.lon, msg.alt_m))
            m.last_enu = (enu.east, enu.north, msg.alt_m)
            t_ms = msg.time_ms
        elif isinstance(msg, TagRead):
            epc = Epc(msg.epc)
            if msg.sensor_kind == SensorChannel.NONE and epc in m.sensor_epcs:
                # bare inventory report of a sensor tag: a clue, not a goal
                m.pending_sightings.append((epc, msg.rssi_dbm))
            else:
                m.pending_reads.append(epc)
            if m.last_enu is None:
                m.audit.append(AuditEntry(
                    recv_ts_ms, trigger, "tag read before first fix → buffered"))
                return []
            t_ms = msg.time_ms
        else:
            return []

        out: list[bytes] = []
        if isinstance(msg, GpsPosition):
            out.extend(self._resend_stale(m, t_ms, recv_ts_ms))

        if m.fsm_time_ms is None:
            dt = 0.0
        else:
            dt = max(0.0, (t_ms - m.fsm_time_ms) / 1000.0)
        m.fsm_time_ms = t_ms
        reads = tuple(m.pending_reads)
        m.pending_reads.clear()
        sightings = tuple(m.pending_sightings)
        m.pending_sightings.clear()
        obs = StepObs(east=m.last_enu[0], north=m.last_enu[1], alt=m.last_enu[2],
                      reads=reads, sightings=sightings)
        if isinstance(m.fsm, UavFsm):
            _, _, events = uav_search_step(m.fsm, obs, dt)
        else:
            _, _, events = ugv_search_step(m.fsm, obs, dt, m.rng)
        for ev in events:
            m.audit.append(AuditEntry(recv_ts_ms, trigger, "event: " + " ".join(map(str, ev))))

        key = command_key(m.fsm)
        if key == m.last_key:
            m.audit.append(AuditEntry(recv_ts_ms, trigger,
                                      f"phase {m.fsm.phase.name} unchanged → no command"))
            return out
        m.last_key = key
        cmds = self._commands_for(m)
        seqs: list[int] = []
        for cmd in cmds:
            raw = encode(cmd, m.next_cmd_seq)
            m.log.append(recv_ts_ms, raw)            # write-ahead before handing out
            apply_frame(m.view, recv_ts_ms, decode(raw), m.plan.origin)
            m.outstanding[m.next_cmd_seq] = (cmd, t_ms)
            seqs.append(m.next_cmd_seq)
            m.next_cmd_seq += 1
            out.append(raw)
            if cmd.command == CommandType.LAND:
                m.done = True
        if cmds:
            names = ", ".join(CommandType(c.command).name for c in cmds)
            m.audit.append(AuditEntry(
                recv_ts_ms, trigger,
                f"phase {m.fsm.phase.name} → {names}", tuple(seqs)))
        else:
            m.audit.append(AuditEntry(
                recv_ts_ms, trigger,
                f"phase {m.fsm.phase.name} → no command"))
        return out

    def _resend_stale(self, m: MissionState, t_ms: int, recv_ts_ms: int) -> list[bytes]:
        """Re-issue commands the vehicle never acknowledged (lost either way)."""
        out: list[bytes] = []
        for seq0 in list(m.outstanding):
            cmd0, issued_ms = m.outstanding[seq0]
            if t_ms - issued_ms < COMMAND_RETRY_MS:
                continue
            del m.outstanding[seq0]
            raw = encode(cmd0, m.next_cmd_seq)
            m.log.append(recv_ts_ms, raw)
            apply_frame(m.view, recv_ts_ms, decode(raw), m.plan.origin)
            m.outstanding[m.next_cmd_seq] = (cmd0, t_ms)
            m.audit.append(AuditEntry(
                recv_ts_ms, f"unacked seq={seq0}",
                f"resent {CommandType(cmd0.command).name} as seq={m.next_cmd_seq}",
                (m.next_cmd_seq,)))
            m.next_cmd_seq += 1
            out.append(raw)
        return out

    def _geo(self, m: MissionState, east: float, north: float, alt: float) -> GeoPoint:
        return geodetic_from_enu(m.plan.origin, EnuPose(east, north, alt))

    def _cmd(self, ctype: CommandType, p: GeoPoint, param_m: float = 0.0) -> Command:
        return build_command(ctype, p, param_m)

    def _commands_for(self, m: MissionState) -> list[Command]:
        fsm = m.fsm
        p = m.plan.params
        here_e, here_n = m.last_enu[0], m.last_enu[1]
        wp = fsm.waypoint
        if isinstance(fsm, UavFsm):
            ph = fsm.phase
            if ph is UavPhase.TAKEOFF:
                return [self._cmd(CommandType.TAKEOFF, self._geo(m, here_e, here_n, p.cruise_alt_m))]
            if ph is UavPhase.CRUISE:
                return [self._cmd(CommandType.NAV_TO, self._geo(m, wp.east, wp.north, p.cruise_alt_m))]
            if ph is UavPhase.DESCEND:
                return [self._cmd(CommandType.CHANGE_ALT, self._geo(m, here_e, here_n, p.search_alt_m))]
            if ph is UavPhase.HOVER:
                return []
            if ph is UavPhase.CIRCLE:
                return [self._cmd(CommandType.CIRCLE,
                                  self._geo(m, wp.east, wp.north, p.search_alt_m),
                                  param_m=p.circle_radius_m)]
            if ph is UavPhase.ASCEND:
                return [self._cmd(CommandType.CHANGE_ALT, self._geo(m, here_e, here_n, p.cruise_alt_m))]
            return [self._cmd(CommandType.LAND, self._geo(m, here_e, here_n, 0.0))]
        ph = fsm.phase
        if ph is UgvPhase.DRIVE:
            return [self._cmd(CommandType.NAV_TO, self._geo(m, wp.east, wp.north, 0.0))]
        if ph is UgvPhase.DWELL or ph is UgvPhase.RETRY_DWELL:
            if fsm.dwell_target is not None:
                de, dn = fsm.dwell_target
            else:
                de, dn = here_e, here_n
            return [self._cmd(CommandType.HOVER_AT, self._geo(m, de, dn, 0.0))]
        if ph is UgvPhase.RETRY_OUT:
            te, tn = fsm.retry_target
            return [self._cmd(CommandType.NAV_TO, self._geo(m, te, tn, 0.0))]
        if ph is UgvPhase.RETRY_BACK:
            if fsm.dwell_target is not None:
                de, dn = fsm.dwell_target
            else:
                de, dn = wp.east, wp.north
            return [self._cmd(CommandType.NAV_TO, self._geo(m, de, dn, 0.0))]
        return [self._cmd(CommandType.LAND, self._geo(m, here_e, here_n, 0.0))]

    # -- export ------------------------------------------------------------

    def events_ndjson(self, mission_id: str) -> Iterator[str]:
        """One JSON line per logged frame, oldest first."""
        m = self.mission(mission_id)
        for ts, frame in m.log.records():
            yield json.dumps(_event_dict(ts, frame), separators=(",", ":"))

    def audit_dicts(self, mission_id: str) -> list[dict]:
        return [a.to_dict() for a in self.mission(mission_id).audit]


def _event_dict(ts_ms: int, frame: DecodedFrame) -> dict:
    msg = frame.msg
    d = {
        "ts_ms": ts_ms,
        "seq": frame.seq,
        "dir": "tx" if isinstance(msg, Command) else "rx",
        "type": type(msg).__name__,
    }
    d.update({f: getattr(msg, f) for f in msg.__dataclass_fields__})
    if isinstance(msg, TagRead):
        d["epc"] = msg.epc_hex
    return d


def events_ndjson_from_log(log_path: Path) -> Iterator[str]:
    for ts, frame in iter_log(log_path):
        yield json.dumps(_event_dict(ts, frame), separators=(",", ":"))
