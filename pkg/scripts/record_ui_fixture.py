#!/usr/bin/env python3
"""Record a ground-control API exchange for the web UI's contract test.

Runs three missions against an in-process ground control — an autonomous
rover sweep (which has a waypoint plan, a flown path, and sensor reads),
a scripted manual flight (which exercises the click-to-hover command
round trip), and a mission created through the plan-submission endpoint —
then captures every endpoint the web UI consumes into a JSON fixture.
The frontend test suite replays this fixture instead of talking to a
live server, so it pins the exact payload shapes this package emits.

Usage:
    python3 scripts/record_ui_fixture.py [--out PATH]
"""
from __future__ import annotations

import argparse
import json
from pathlib import Path

from fastapi.testclient import TestClient

from tagbot.mission import GroundControl
from tagbot.scenario import preset
from tagbot.server import build_app
from tagbot.simloop import run_scenario

DEFAULT_OUT = Path(__file__).resolve().parents[1] / "frontend" / "tests" / "fixtures" / "api_fixture.json"


def capture_mission(client: TestClient, mid: str) -> dict:
    return {
        "mission_id": mid,
        "detail": client.get(f"/api/missions/{mid}").json(),
        "audit": client.get(f"/api/missions/{mid}/audit").json(),
        "events_ndjson": client.get(f"/api/missions/{mid}/events").text,
    }


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=DEFAULT_OUT)
    args = ap.parse_args()

    gcs = GroundControl()
    auto = run_scenario(preset("ugv_sensor_field"), seed=3, gcs=gcs)
    manual = run_scenario(preset("uav_sensor_field"), seed=3, gcs=gcs)
    client = TestClient(build_app(gcs, operator_queues={manual.mission_id: []}))

    # Create a mission through the plan-submission endpoint before any
    # captures, so the listing, health count, and the planned mission's own
    # record stay mutually consistent.
    plan_request = {
        "name": "planned", "vehicle": "UAV", "seed": 0,
        "waypoints": [{"east": 10.0, "north": 20.0, "epc": None, "needs_sensor": False},
                      {"east": 20.0, "north": 20.0, "epc": None, "needs_sensor": False}],
    }
    plan_post = client.post("/api/missions", json=plan_request)
    assert plan_post.status_code == 201, plan_post.text
    planned_id = plan_post.json()["mission_id"]

    command_request = {"command": "HOVER_AT", "east": 10.0, "north": 10.0,
                       "alt": 0.5, "param_m": 0.5}
    change_alt_request = {"command": "CHANGE_ALT", "east": 10.0, "north": 10.0,
                          "alt": 3.5, "param_m": 0.0}
    fixture = {
        "health": client.get("/api/health").json(),
        "missions": client.get("/api/missions").json(),
        "autonomous": capture_mission(client, auto.mission_id),
        "planned": {
            **capture_mission(client, planned_id),
            "create_request": plan_request,
            "create_response": plan_post.json(),
            "create_status": plan_post.status_code,
            "bad_create_request": {"name": "empty-plan"},
            "bad_create_status": 422,
        },
        "manual": {
            **capture_mission(client, manual.mission_id),
            "command_request": command_request,
            "command_response": client.post(
                f"/api/missions/{manual.mission_id}/command",
                json=command_request).json(),
            "change_alt_request": change_alt_request,
            "change_alt_response": client.post(
                f"/api/missions/{manual.mission_id}/command",
                json=change_alt_request).json(),
            "bad_command_request": {"command": "WARP", "east": 0.0,
                                    "north": 0.0, "alt": 0.0, "param_m": 0.0},
            "bad_command_status": 422,
        },
    }

    args.out.parent.mkdir(parents=True, exist_ok=True)
    args.out.write_text(json.dumps(fixture, indent=2, sort_keys=True) + "\n")
    counts = {
        key: sum(1 for line in fixture[key]["events_ndjson"].splitlines() if line)
        for key in ("autonomous", "planned", "manual")
    }
    print(f"wrote {args.out} ({args.out.stat().st_size} bytes; "
          + ", ".join(f"{fixture[k]['mission_id']}: {n} events"
                      for k, n in counts.items()))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
