/** The fold is a pure function of the event stream: replaying a recorded
 * stream must reproduce, field for field, the folded view the server
 * itself serves for that mission.
 */

import { describe, expect, it } from "vitest";
import {
  applyEvent,
  applyNdjson,
  initialState,
  observationFor,
  parseNdjson,
  vehicleHeading,
  type MapViewState,
} from "../src/state.js";
import type { EventRow } from "../src/types.js";
import { loadFixture } from "./helpers.js";

const fx = loadFixture();

/** Recursive equality with a tiny tolerance on floats (projection math may
 * differ from the server's in the last bit). */
function expectDeepClose(got: unknown, want: unknown, path = "root"): void {
  if (typeof want === "number" && typeof got === "number") {
    if (Number.isInteger(want) && Number.isInteger(got)) {
      expect(got, path).toBe(want);
    } else {
      expect(Math.abs(got - want), `${path}: ${got} vs ${want}`).toBeLessThanOrEqual(
        1e-9 * Math.max(1, Math.abs(want)),
      );
    }
    return;
  }
  if (Array.isArray(want)) {
    expect(Array.isArray(got), path).toBe(true);
    const g = got as unknown[];
    expect(g.length, `${path}.length`).toBe(want.length);
    want.forEach((w, i) => expectDeepClose(g[i], w, `${path}[${i}]`));
    return;
  }
  if (want !== null && typeof want === "object") {
    const w = want as Record<string, unknown>;
    const g = got as Record<string, unknown>;
    expect(Object.keys(g).sort(), `${path} keys`).toEqual(Object.keys(w).sort());
    for (const k of Object.keys(w)) expectDeepClose(g[k], w[k], `${path}.${k}`);
    return;
  }
  expect(got, path).toEqual(want);
}

function foldRecorded(mission: { detail: { plan: never }; events_ndjson: string }): MapViewState {
  const state = initialState(mission.detail.plan);
  applyNdjson(state, mission.events_ndjson);
  return state;
}

describe("replaying a recorded stream reproduces the server's view", () => {
  it("autonomous mission folds to the exact served view", () => {
    const state = foldRecorded(fx.autonomous as never);
    expectDeepClose(state.view, fx.autonomous.detail.view);
  });

  it("manual mission folds to the exact served view", () => {
    const state = foldRecorded(fx.manual as never);
    expectDeepClose(state.view, fx.manual.detail.view);
  });

  it("the recorded mission ended landed, so the folded status is done", () => {
    const state = foldRecorded(fx.autonomous as never);
    expect(state.view.status).toBe("done");
  });
});

describe("incremental folding", () => {
  it("a GPS row extends the flown path", () => {
    const state = initialState(fx.autonomous.detail.plan);
    const row: EventRow = {
      ts_ms: 100,
      seq: 1,
      dir: "rx",
      type: "GpsPosition",
      lat_1e7: 400000000,
      lon_1e7: -1050000000,
      alt_mm: 1500,
      time_ms: 100,
    };
    applyEvent(state, row);
    expect(state.view.path).toHaveLength(1);
    const fix = state.view.path[0]!;
    expect(fix.alt_m).toBeCloseTo(1.5, 9);
    expect(fix.east).toBeCloseTo(0, 9);
    expect(fix.north).toBeCloseTo(0, 9);
  });

  it("repeated bare sightings fold into one observation; a valued read is its own row", () => {
    const state = initialState(fx.autonomous.detail.plan);
    const gps: EventRow = {
      ts_ms: 0, seq: 0, dir: "rx", type: "GpsPosition",
      lat_1e7: 400000000, lon_1e7: -1050000000, alt_mm: 0, time_ms: 0,
    };
    applyEvent(state, gps);
    const sighting = (t: number): EventRow => ({
      ts_ms: t, seq: t, dir: "rx", type: "TagRead",
      epc: "aa".repeat(12), rssi_dbm_x10: -45, sensor_kind: 0,
      sensor_value_milli: 0, time_ms: t,
    });
    applyEvent(state, sighting(1000));
    applyEvent(state, sighting(1400));
    expect(state.view.observations).toHaveLength(1);
    expect(state.view.observations[0]!.first_time_ms).toBe(1000);
    expect(state.view.observations[0]!.time_ms).toBe(1400);

    const valued: EventRow = {
      ts_ms: 2000, seq: 3, dir: "rx", type: "TagRead",
      epc: "aa".repeat(12), rssi_dbm_x10: -30, sensor_kind: 1,
      sensor_value_milli: 3871318, time_ms: 2000,
    };
    applyEvent(state, valued);
    expect(state.view.observations).toHaveLength(2);
    expect(state.view.observations[1]!.readings).toEqual({ moisture_ohm: 3871.318 });
  });

  it("a LAND command marks the mission done", () => {
    const state = initialState(fx.autonomous.detail.plan);
    expect(state.view.status).toBe("active");
    applyEvent(state, {
      ts_ms: 5, seq: 2, dir: "tx", type: "Command",
      command: 4, lat_1e7: 400000000, lon_1e7: -1050000000, alt_mm: 0, param_cm: 0,
    });
    expect(state.view.status).toBe("done");
    expect(state.view.commands[0]!.command).toBe("LAND");
  });
});

describe("reconnect resume", () => {
  it("re-applying the full stream is a no-op (idempotent re-render)", () => {
    const state = foldRecorded(fx.autonomous as never);
    const snapshot = JSON.stringify(state.view);
    applyNdjson(state, fx.autonomous.events_ndjson);
    expect(JSON.stringify(state.view)).toBe(snapshot);
  });

  it("a stream cut mid-way resumes from the cursor without loss or duplication", () => {
    const rows = parseNdjson(fx.autonomous.events_ndjson);
    const lines = fx.autonomous.events_ndjson.split("\n").filter((l) => l.trim().length > 0);
    const cut = Math.floor(lines.length / 3);
    const firstChunk = lines.slice(0, cut).join("\n");

    const state = initialState(fx.autonomous.detail.plan);
    applyNdjson(state, firstChunk);
    expect(state.applied).toBe(cut);
    // Reconnect: the endpoint serves the whole log again.
    applyNdjson(state, fx.autonomous.events_ndjson);
    expect(state.applied).toBe(rows.length);

    const reference = foldRecorded(fx.autonomous as never);
    expect(JSON.stringify(state.view)).toBe(JSON.stringify(reference.view));
  });
});

describe("derived views", () => {
  it("observationFor prefers the row that carries delivered values", () => {
    const state = foldRecorded(fx.autonomous as never);
    const epcs = new Set(state.view.observations.map((o) => o.epc_hex));
    expect(epcs.size).toBeGreaterThan(0);
    for (const epc of epcs) {
      const best = observationFor(state.view, epc);
      expect(best).toBeDefined();
      const anyValued = state.view.observations.some(
        (o) => o.epc_hex === epc && Object.keys(o.readings).length > 0,
      );
      if (anyValued) {
        expect(Object.keys(best!.readings).length).toBeGreaterThan(0);
      }
    }
  });

  it("the recorded sensor mission delivered soil readings for every staked tag", () => {
    const state = foldRecorded(fx.autonomous as never);
    const valued = state.view.observations.filter(
      (o) => Object.keys(o.readings).length > 0,
    );
    expect(valued.length).toBeGreaterThanOrEqual(3);
    for (const obs of valued) {
      expect(obs.readings).toHaveProperty("moisture_ohm");
      expect(obs.readings).toHaveProperty("temperature_c");
    }
  });

  it("vehicle heading follows the direction of travel", () => {
    const state = initialState(fx.autonomous.detail.plan);
    expect(vehicleHeading(state.view)).toBeNull();
    const fix = (e7lon: number): EventRow => ({
      ts_ms: 0, seq: 0, dir: "rx", type: "GpsPosition",
      lat_1e7: 400000000, lon_1e7: e7lon, alt_mm: 0, time_ms: 0,
    });
    applyEvent(state, fix(-1050000000));
    applyEvent(state, fix(-1049999000)); // moved east
    const heading = vehicleHeading(state.view);
    expect(heading).not.toBeNull();
    expect(Math.abs(heading!)).toBeLessThan(1e-6); // 0 rad = east
  });
});
