"""HTTP face of ground control for consoles and dashboards.

Read endpoints expose mission plans, folded views, audit trails, and the
raw event stream as NDJSON. The mission-creation endpoint turns a console
plan (clicked waypoints, or a survey polygon plus row spacing) into a run
and returns the resulting waypoint set. The command endpoint lets an
operator inject a vehicle command; when a live simulation is attached its
downlink picks the frame up, otherwise the command is logged as queued.
"""

from __future__ import annotations

from typing import Optional

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import StreamingResponse
from pydantic import BaseModel, Field

from . import __version__
from .behavior import SearchPoint, waypoints_from_area
from .mission import GroundControl, MODE_AUTONOMOUS, UnknownMission, build_command
from .scenario import ScenarioConfig
from .simloop import run_scenario
from .tags import Epc
from .telemetry import CommandType, VehicleType
from .world import EnuPose, geodetic_from_enu


class CommandRequest(BaseModel):
    command: str = Field(description="NAV_TO, CIRCLE, CHANGE_ALT, TAKEOFF, "
                                     "LAND, PLACE_TAG, or HOVER_AT")
    east: float = 0.0
    north: float = 0.0
    alt: float = 0.0
    param_m: float = 0.0


class WaypointRequest(BaseModel):
    east: float
    north: float
    epc: Optional[str] = None
    needs_sensor: bool = False


class CreateMissionRequest(BaseModel):
    """A console plan: explicit waypoints, or a survey area plus spacing.

    The mission id becomes ``{name}-{seed}``; the name is restricted to
    filename-safe characters because it may become a log file name.
    """

    name: str = Field("planned", pattern=r"^[A-Za-z0-9._-]{1,64}$")
    vehicle: str = Field("UAV", description="UAV or UGV")
    seed: int = 0
    waypoints: list[WaypointRequest] = []
    area: Optional[list[tuple[float, float]]] = None
    spacing_m: float = 10.0
    duration_s: float = Field(600.0, gt=0.0, le=3600.0)


def build_app(gcs: GroundControl,
              operator_queues: Optional[dict[str, list]] = None) -> FastAPI:
    app = FastAPI(title="tagbot ground control", version=__version__)
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"])
    queues = operator_queues or {}

    def _mission(mission_id: str):
        try:
            return gcs.mission(mission_id)
        except UnknownMission:
            raise HTTPException(status_code=404, detail=f"no mission {mission_id!r}")

    @app.get("/api/health")
    def health() -> dict:
        return {"status": "ok", "version": __version__,
                "missions": len(gcs.mission_ids())}

    @app.get("/api/missions")
    def missions() -> list[dict]:
        return [gcs.summary(mid) for mid in gcs.mission_ids()]

    @app.post("/api/missions", status_code=201)
    def create_mission(req: CreateMissionRequest) -> dict:
        try:
            vehicle = VehicleType[req.vehicle]
        except KeyError:
            raise HTTPException(status_code=422,
                                detail=f"unknown vehicle {req.vehicle!r}")
        if req.area is not None and req.waypoints:
            raise HTTPException(status_code=422,
                                detail="provide waypoints or an area, not both")
        try:
            if req.area is not None:
                waypoints = tuple(SearchPoint(e, n)
                                  for e, n in waypoints_from_area(req.area, req.spacing_m))
            else:
                waypoints = tuple(
                    SearchPoint(w.east, w.north,
                                Epc.from_hex(w.epc) if w.epc else None,
                                w.needs_sensor)
                    for w in req.waypoints)
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        if not waypoints:
            raise HTTPException(status_code=422,
                                detail="empty plan: provide waypoints or an area")
        mission_id = f"{req.name}-{req.seed}"
        if mission_id in gcs.mission_ids():
            raise HTTPException(
                status_code=409,
                detail=f"mission {mission_id!r} already exists; "
                       "choose another name or seed")
        cfg = ScenarioConfig(name=req.name, vehicle=vehicle, mode=MODE_AUTONOMOUS,
                             waypoints=waypoints, duration_s=req.duration_s,
                             description="planned from the console")
        run_scenario(cfg, req.seed, gcs=gcs)
        m = gcs.mission(mission_id)
        return {"mission_id": mission_id, "plan": m.plan.to_dict(),
                "summary": gcs.summary(mission_id)}

    @app.get("/api/missions/{mission_id}")
    def mission_detail(mission_id: str) -> dict:
        m = _mission(mission_id)
        return {"plan": m.plan.to_dict(), "view": m.view.to_dict(),
                "summary": gcs.summary(mission_id)}

    @app.get("/api/missions/{mission_id}/audit")
    def mission_audit(mission_id: str) -> dict:
        _mission(mission_id)
        return {"mission_id": mission_id, "audit": gcs.audit_dicts(mission_id)}

    @app.get("/api/missions/{mission_id}/events")
    def mission_events(mission_id: str) -> StreamingResponse:
        _mission(mission_id)

        def lines():
            for line in gcs.events_ndjson(mission_id):
                yield line + "\n"

        return StreamingResponse(lines(), media_type="application/x-ndjson")

    @app.post("/api/missions/{mission_id}/command")
    def post_command(mission_id: str, req: CommandRequest) -> dict:
        m = _mission(mission_id)
        try:
            ctype = CommandType[req.command]
        except KeyError:
            raise HTTPException(status_code=422, detail=f"unknown command {req.command!r}")
        target = geodetic_from_enu(m.plan.origin, EnuPose(req.east, req.north, req.alt))
        cmd = build_command(ctype, target, req.param_m)
        ts_ms = m.view.path[-1].time_ms if m.view.path else 0
        raw = gcs.send_command(mission_id, cmd, ts_ms, note="operator")
        live = mission_id in queues
        if live:
            queues[mission_id].append(raw)
        return {"mission_id": mission_id, "command": ctype.name,
                "seq": m.next_cmd_seq - 1, "delivering": live}

    return app
