/** Pure mission-view state, folded from the API event stream.
 *
 * The reducer applies one event row at a time and nothing else: the map is
 * a pure function of (plan, ordered event rows), so replaying a stored
 * stream reproduces exactly the folded view ground control serves — the
 * contract test asserts that equality against a recorded exchange. No
 * simulation happens here; the only arithmetic is unit scaling and the
 * shared display projection.
 */

import { enuFromGeodetic } from "./geo.js";
import type {
  AckRecord,
  CommandRecord,
  EventRow,
  MissionPlan,
  MissionViewDto,
  PathFix,
  TagObservation,
} from "./types.js";
import { COMMAND_NAMES, SENSOR_CHANNEL_NAMES } from "./types.js";

export interface MapViewState {
  plan: MissionPlan;
  view: MissionViewDto;
  /** Number of stream rows already folded in — the reconnect cursor. */
  applied: number;
}

export function initialState(plan: MissionPlan): MapViewState {
  return {
    plan,
    view: {
      mission_id: plan.mission_id,
      status: "active",
      frames: 0,
      heartbeats: 0,
      last_fsm_state: null,
      path: [],
      observations: [],
      commands: [],
      acks: [],
    },
    applied: 0,
  };
}

function lastValuelessObservation(
  view: MissionViewDto,
  epcHex: string,
): TagObservation | undefined {
  for (let i = view.observations.length - 1; i >= 0; i--) {
    const obs = view.observations[i]!;
    if (obs.epc_hex === epcHex && Object.keys(obs.readings).length === 0) {
      return obs;
    }
  }
  return undefined;
}

function observationAt(
  view: MissionViewDto,
  epcHex: string,
  timeMs: number,
): TagObservation | undefined {
  for (let i = view.observations.length - 1; i >= 0; i--) {
    const obs = view.observations[i]!;
    if (obs.epc_hex === epcHex && obs.time_ms === timeMs) {
      return obs;
    }
  }
  return undefined;
}

/** Fold one event row into the state (mutating), mirroring the fold the
 * server applies to the same stream. */
export function applyEvent(state: MapViewState, row: EventRow): MapViewState {
  const view = state.view;
  view.frames += 1;
  state.applied += 1;
  switch (row.type) {
    case "Heartbeat": {
      view.heartbeats += 1;
      view.last_fsm_state = row.fsm_state ?? null;
      break;
    }
    case "GpsPosition": {
      const lat = (row.lat_1e7 ?? 0) / 1e7;
      const lon = (row.lon_1e7 ?? 0) / 1e7;
      const { east, north } = enuFromGeodetic(state.plan.origin, lat, lon);
      const fix: PathFix = {
        time_ms: row.time_ms ?? 0,
        lat,
        lon,
        alt_m: (row.alt_mm ?? 0) / 1000.0,
        east,
        north,
      };
      view.path.push(fix);
      break;
    }
    case "TagRead": {
      const epcHex = row.epc ?? "";
      const timeMs = row.time_ms ?? 0;
      const sensorKind = row.sensor_kind ?? 0;
      // Bare sightings repeat while a tag stays in range; they fold into
      // the latest value-less observation of the same tag. Valued reads
      // key by (epc, report time) so one interrogation's channels merge.
      let target =
        sensorKind === 0
          ? lastValuelessObservation(view, epcHex)
          : observationAt(view, epcHex, timeMs);
      if (target === undefined) {
        target = {
          epc_hex: epcHex,
          time_ms: timeMs,
          rssi_dbm: (row.rssi_dbm_x10 ?? 0) / 10.0,
          readings: {},
          east: null,
          north: null,
          alt_m: null,
          first_time_ms: timeMs,
        };
        view.observations.push(target);
      }
      target.time_ms = Math.max(target.time_ms, timeMs);
      target.rssi_dbm = (row.rssi_dbm_x10 ?? 0) / 10.0;
      const last = view.path[view.path.length - 1];
      if (last !== undefined) {
        target.east = last.east;
        target.north = last.north;
        target.alt_m = last.alt_m;
      }
      if (sensorKind !== 0) {
        const channel = SENSOR_CHANNEL_NAMES[sensorKind] ?? `channel_${sensorKind}`;
        target.readings[channel] = (row.sensor_value_milli ?? 0) / 1000.0;
      }
      break;
    }
    case "Command": {
      const code = row.command ?? 0;
      const record: CommandRecord = {
        ts_ms: row.ts_ms,
        seq: row.seq,
        command: COMMAND_NAMES[code] ?? `COMMAND_${code}`,
        lat: (row.lat_1e7 ?? 0) / 1e7,
        lon: (row.lon_1e7 ?? 0) / 1e7,
        alt_m: (row.alt_mm ?? 0) / 1000.0,
        param_m: (row.param_cm ?? 0) / 100.0,
      };
      view.commands.push(record);
      if (record.command === "LAND") {
        view.status = "done";
      }
      break;
    }
    case "Ack": {
      const record: AckRecord = {
        ts_ms: row.ts_ms,
        seq_acked: row.seq_acked ?? 0,
        result: row.result ?? 0,
      };
      view.acks.push(record);
      break;
    }
  }
  return state;
}

/** Apply every row of an NDJSON chunk, skipping rows already folded in.
 *
 * The event endpoint serves the append-only log from the start, so after a
 * disconnect the client refetches and resumes at its cursor: previously
 * applied rows are skipped by position, new rows fold in order. Applying
 * the same full stream twice is therefore a no-op the second time.
 */
export function applyNdjson(state: MapViewState, ndjson: string): MapViewState {
  const rows = parseNdjson(ndjson);
  for (let i = state.applied; i < rows.length; i++) {
    applyEvent(state, rows[i]!);
  }
  return state;
}

export function parseNdjson(text: string): EventRow[] {
  const rows: EventRow[] = [];
  for (const line of text.split("\n")) {
    const trimmed = line.trim();
    if (trimmed.length === 0) continue;
    rows.push(JSON.parse(trimmed) as EventRow);
  }
  return rows;
}

/** The observation to surface for a tag: the latest one carrying delivered
 * sensor values, else the latest bare sighting. */
export function observationFor(
  view: MissionViewDto,
  epcHex: string,
): TagObservation | undefined {
  let best: TagObservation | undefined;
  for (const obs of view.observations) {
    if (obs.epc_hex !== epcHex) continue;
    if (Object.keys(obs.readings).length > 0 || best === undefined ||
        Object.keys(best.readings).length === 0) {
      best = obs;
    }
  }
  return best;
}

/** Heading of the vehicle marker, radians (0 = east, counterclockwise),
 * from the last two distinct path fixes; null until the track shows one. */
export function vehicleHeading(view: MissionViewDto): number | null {
  const n = view.path.length;
  if (n < 2) return null;
  const last = view.path[n - 1]!;
  for (let i = n - 2; i >= 0; i--) {
    const prev = view.path[i]!;
    const de = last.east - prev.east;
    const dn = last.north - prev.north;
    if (Math.hypot(de, dn) > 1e-6) {
      return Math.atan2(dn, de);
    }
  }
  return null;
}
