/** Contract test against the recorded API exchange: the client parses the
 * exact payloads the ground-control server emits, issues only documented
 * calls, and the hover command round-trips with the recorded shapes.
 */

import { describe, expect, it } from "vitest";
import { ApiClient, ApiError, EventPoller } from "../src/api.js";
import { applyNdjson, initialState, observationFor } from "../src/state.js";
import type { CommandRequest } from "../src/types.js";
import { fakeServer, loadFixture } from "./helpers.js";

const fx = loadFixture();

function clientFor(server = fakeServer(fx)) {
  return { server, client: new ApiClient("", server.fetch) };
}

describe("documented endpoints parse the recorded payloads", () => {
  it("health", async () => {
    const { server, client } = clientFor();
    expect(await client.health()).toEqual(fx.health);
    expect(server.violations).toEqual([]);
  });

  it("mission list", async () => {
    const { client } = clientFor();
    const missions = await client.missions();
    expect(missions).toEqual(fx.missions);
    expect(missions.map((m) => m.mission_id)).toContain(fx.autonomous.mission_id);
  });

  it("mission detail carries plan, view, and summary", async () => {
    const { client } = clientFor();
    const detail = await client.missionDetail(fx.autonomous.mission_id);
    expect(detail).toEqual(fx.autonomous.detail);
    expect(detail.plan.waypoints.length).toBeGreaterThan(0);
    expect(detail.view.observations.length).toBeGreaterThan(0);
  });

  it("audit", async () => {
    const { client } = clientFor();
    expect(await client.audit(fx.manual.mission_id)).toEqual(fx.manual.audit);
  });

  it("events come back as the recorded NDJSON stream", async () => {
    const { client } = clientFor();
    const text = await client.events(fx.autonomous.mission_id);
    expect(text).toBe(fx.autonomous.events_ndjson);
  });

  it("an unknown mission id is a clean 404 error", async () => {
    const { client } = clientFor();
    await expect(client.missionDetail("no-such-mission")).rejects.toThrowError(ApiError);
    await expect(client.missionDetail("no-such-mission")).rejects.toMatchObject({
      status: 404,
    });
  });
});

describe("plan submission round trip", () => {
  it("posts the recorded plan and parses the returned waypoint set", async () => {
    const { server, client } = clientFor();
    const req = fx.planned.create_request as never;
    const res = await client.createMission(req);
    expect(res).toEqual(fx.planned.create_response);
    expect(res.mission_id).toBe(fx.planned.mission_id);
    // The server echoes the full executed plan back for rendering.
    expect(res.plan.waypoints.length).toBeGreaterThan(0);
    expect(server.log).toContain("POST /api/missions");
    expect(server.violations).toEqual([]);
  });

  it("the created mission is immediately listable and streamable", async () => {
    const { server, client } = clientFor();
    const res = await client.createMission(fx.planned.create_request as never);
    const detail = await client.missionDetail(res.mission_id);
    expect(detail).toEqual(fx.planned.detail);
    const state = initialState(detail.plan);
    applyNdjson(state, await client.events(res.mission_id));
    expect(state.view.status).toBe("done");
    expect(state.view.path.length).toBeGreaterThan(0);
    expect(server.violations).toEqual([]);
  });

  it("an empty plan is rejected with an inline-renderable detail", async () => {
    const { client } = clientFor();
    try {
      await client.createMission(fx.planned.bad_create_request as never);
      expect.unreachable("empty plan must reject");
    } catch (err) {
      expect(err).toBeInstanceOf(ApiError);
      expect((err as ApiError).status).toBe(fx.planned.bad_create_status);
      expect((err as ApiError).detail).toContain("empty plan");
    }
  });
});

describe("click-to-hover command round trip", () => {
  it("posts the recorded request shape and parses the recorded response", async () => {
    const { server, client } = clientFor();
    const req = fx.manual.command_request as unknown as CommandRequest;
    expect(req.command).toBe("HOVER_AT");
    expect(req.alt).toBe(0.5); // the low-hover read altitude
    const res = await client.sendCommand(fx.manual.mission_id, req);
    expect(res).toEqual(fx.manual.command_response);
    expect(server.log).toContain(
      `POST /api/missions/${fx.manual.mission_id}/command`,
    );
    expect(server.violations).toEqual([]);
  });

  it("an altitude change round-trips with the recorded shapes", async () => {
    const { server, client } = clientFor();
    const req = fx.manual.change_alt_request as unknown as CommandRequest;
    expect(req.command).toBe("CHANGE_ALT");
    const res = await client.sendCommand(fx.manual.mission_id, req);
    expect(res).toEqual(fx.manual.change_alt_response);
    expect(server.violations).toEqual([]);
  });

  it("a command the API does not document is rejected and surfaced", async () => {
    const { client } = clientFor();
    const bad = fx.manual.bad_command_request as unknown as CommandRequest;
    try {
      await client.sendCommand(fx.manual.mission_id, bad);
      expect.unreachable("unknown command must reject");
    } catch (err) {
      expect(err).toBeInstanceOf(ApiError);
      expect((err as ApiError).status).toBe(fx.manual.bad_command_status);
    }
  });

  it("hovering low over a sensor tag surfaces its delivered value", async () => {
    // The recorded manual mission scripted exactly that flight: fold its
    // stream and look up the tag nearest the hover click.
    const { client } = clientFor();
    const detail = await client.missionDetail(fx.manual.mission_id);
    const state = initialState(detail.plan);
    applyNdjson(state, await client.events(fx.manual.mission_id));
    const valued = state.view.observations.filter(
      (o) => Object.keys(o.readings).length > 0,
    );
    expect(valued.length).toBeGreaterThanOrEqual(3);
    const best = observationFor(state.view, valued[0]!.epc_hex);
    expect(best?.readings).toHaveProperty("moisture_ohm");
  });
});

describe("the client stays inside the documented surface", () => {
  it("a full console session issues no undocumented request", async () => {
    const { server, client } = clientFor();
    await client.health();
    const missions = await client.missions();
    for (const m of missions) {
      await client.missionDetail(m.mission_id);
      await client.audit(m.mission_id);
      await client.events(m.mission_id);
    }
    await client.createMission(fx.planned.create_request as never);
    await client.sendCommand(
      fx.manual.mission_id,
      fx.manual.command_request as unknown as CommandRequest,
    );
    expect(server.violations).toEqual([]);
    expect(server.log.length).toBeGreaterThanOrEqual(2 + 3 * missions.length + 2);
  });

  it("the harness itself flags anything off-contract", async () => {
    const { server } = clientFor();
    const res = await server.fetch("/api/secret-backdoor");
    expect(res.status).toBe(599);
    expect(server.violations).toEqual(["GET /api/secret-backdoor"]);
  });
});

describe("event polling survives disconnects", () => {
  it("resumes from the cursor after a failed poll, no loss, no duplicates", async () => {
    const server = fakeServer(fx);
    const client = new ApiClient("", server.fetch);
    const state = initialState(fx.autonomous.detail.plan);
    const errors: unknown[] = [];
    const poller = new EventPoller(
      client,
      fx.autonomous.mission_id,
      (ndjson) => applyNdjson(state, ndjson),
      (err) => errors.push(err),
    );

    await poller.pollOnce(); // healthy
    const framesAfterFirst = state.view.frames;
    expect(framesAfterFirst).toBeGreaterThan(0);

    server.offline = true;
    await poller.pollOnce(); // dropped: reported, state untouched
    expect(errors).toHaveLength(1);
    expect(state.view.frames).toBe(framesAfterFirst);

    server.offline = false;
    await poller.pollOnce(); // reconnected: idempotent re-fold
    expect(state.view.frames).toBe(framesAfterFirst);

    const reference = initialState(fx.autonomous.detail.plan);
    applyNdjson(reference, fx.autonomous.events_ndjson);
    expect(JSON.stringify(state.view)).toBe(JSON.stringify(reference.view));
  });
});
