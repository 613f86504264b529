/** Shared test helpers: the recorded API fixture and a fake fetch that
 * serves it while rejecting any request outside the documented API.
 */

import { readFileSync } from "node:fs";
import type { FetchLike } from "../src/api.js";
import type {
  AuditResponse,
  CommandResponse,
  CreateMissionResponse,
  Health,
  MissionDetail,
  MissionSummary,
} from "../src/types.js";
import { COMMAND_NAMES } from "../src/types.js";

export interface RecordedMission {
  mission_id: string;
  detail: MissionDetail;
  audit: AuditResponse;
  events_ndjson: string;
}

export interface RecordedManualMission extends RecordedMission {
  command_request: Record<string, unknown>;
  command_response: CommandResponse;
  change_alt_request: Record<string, unknown>;
  change_alt_response: CommandResponse;
  bad_command_request: Record<string, unknown>;
  bad_command_status: number;
}

export interface RecordedPlannedMission extends RecordedMission {
  create_request: Record<string, unknown>;
  create_response: CreateMissionResponse;
  create_status: number;
  bad_create_request: Record<string, unknown>;
  bad_create_status: number;
}

export interface ApiFixture {
  health: Health;
  missions: MissionSummary[];
  autonomous: RecordedMission;
  planned: RecordedPlannedMission;
  manual: RecordedManualMission;
}

export function loadFixture(): ApiFixture {
  const url = new URL("./fixtures/api_fixture.json", import.meta.url);
  return JSON.parse(readFileSync(url, "utf-8")) as ApiFixture;
}

/** The documented API surface. GET unless marked POST. */
const DOCUMENTED: Array<{ re: RegExp; method: string }> = [
  { re: /^\/api\/health$/, method: "GET" },
  { re: /^\/api\/missions$/, method: "GET" },
  { re: /^\/api\/missions$/, method: "POST" },
  { re: /^\/api\/missions\/[^/]+$/, method: "GET" },
  { re: /^\/api\/missions\/[^/]+\/audit$/, method: "GET" },
  { re: /^\/api\/missions\/[^/]+\/events$/, method: "GET" },
  { re: /^\/api\/missions\/[^/]+\/command$/, method: "POST" },
];

export interface FakeServer {
  fetch: FetchLike;
  /** Requests that matched no documented endpoint+method. */
  violations: string[];
  /** Every request served, as "METHOD path". */
  log: string[];
  /** When set, all requests fail as if the network dropped. */
  offline: boolean;
}

function response(status: number, body: string) {
  return Promise.resolve({
    ok: status >= 200 && status < 300,
    status,
    text: () => Promise.resolve(body),
  });
}

/** Serve the recorded exchange; any undocumented request is recorded as a
 * violation and answered 599 so the calling test fails loudly. */
export function fakeServer(fx: ApiFixture): FakeServer {
  const byId: Record<string, RecordedMission> = {
    [fx.autonomous.mission_id]: fx.autonomous,
    [fx.planned.mission_id]: fx.planned,
    [fx.manual.mission_id]: fx.manual,
  };
  const server: FakeServer = {
    violations: [],
    log: [],
    offline: false,
    fetch: (url, init) => {
      const method = init?.method ?? "GET";
      const path = url.replace(/^https?:\/\/[^/]+/, "");
      server.log.push(`${method} ${path}`);
      if (server.offline) {
        return Promise.reject(new Error("network down"));
      }
      if (!DOCUMENTED.some((d) => d.re.test(path) && d.method === method)) {
        server.violations.push(`${method} ${path}`);
        return response(599, "undocumented API call");
      }
      if (path === "/api/health") return response(200, JSON.stringify(fx.health));
      if (path === "/api/missions" && method === "GET") {
        return response(200, JSON.stringify(fx.missions));
      }
      if (path === "/api/missions") {
        // Plan submission: mirror the server's validation rule — a plan
        // needs waypoints or a polygon — then answer with the recorded run.
        const body = JSON.parse(init?.body ?? "{}") as {
          waypoints?: unknown[];
          area?: unknown[];
        };
        const hasWaypoints = Array.isArray(body.waypoints) && body.waypoints.length > 0;
        const hasArea = Array.isArray(body.area) && body.area.length >= 3;
        if (hasWaypoints && hasArea) {
          return response(422, JSON.stringify({ detail: "provide waypoints or an area, not both" }));
        }
        if (!hasWaypoints && !hasArea) {
          return response(422, JSON.stringify({ detail: "empty plan: provide waypoints or an area" }));
        }
        return response(201, JSON.stringify(fx.planned.create_response));
      }
      const m = /^\/api\/missions\/([^/]+)(?:\/(audit|events|command))?$/.exec(path);
      if (m === null) return response(404, "unroutable");
      const mission = byId[decodeURIComponent(m[1]!)];
      if (mission === undefined) {
        return response(404, JSON.stringify({ detail: `no mission ${m[1]}` }));
      }
      if (m[2] === undefined) return response(200, JSON.stringify(mission.detail));
      if (m[2] === "audit") return response(200, JSON.stringify(mission.audit));
      if (m[2] === "events") return response(200, mission.events_ndjson);
      // command
      const body = JSON.parse(init?.body ?? "{}") as { command?: string };
      if (!COMMAND_NAMES.includes(body.command as never)) {
        return response(422, JSON.stringify({ detail: `unknown command ${body.command}` }));
      }
      const manual = mission as RecordedManualMission;
      const recorded =
        body.command === "CHANGE_ALT" ? manual.change_alt_response : manual.command_response;
      return response(
        200,
        JSON.stringify(
          recorded ?? {
            mission_id: mission.mission_id,
            command: body.command,
            seq: 0,
            delivering: false,
          },
        ),
      );
    },
  };
  return server;
}
