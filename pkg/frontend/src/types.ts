/** Wire types for the ground-control HTTP API.
 *
 * These mirror the server's JSON payloads field for field; the contract
 * test checks them against a recorded API exchange.
 */

export interface Health {
  status: string;
  version: string;
  missions: number;
}

export interface MissionSummary {
  mission_id: string;
  vehicle: string; // "UAV" | "UGV"
  mode: string; // "autonomous" | "manual"
  status: string; // "active" | "done"
  phase: string | null;
  fixes: number;
  observations: number;
  commands: number;
}

export interface GeoOrigin {
  lat: number;
  lon: number;
  alt: number;
}

export interface PlanWaypoint {
  east: number;
  north: number;
  epc: string | null;
  needs_sensor: boolean;
}

export interface MissionPlan {
  mission_id: string;
  vehicle: string;
  mode: string;
  origin: GeoOrigin;
  waypoints: PlanWaypoint[];
  params: Record<string, unknown>;
}

export interface PathFix {
  time_ms: number;
  lat: number;
  lon: number;
  alt_m: number;
  east: number;
  north: number;
}

export interface TagObservation {
  epc_hex: string;
  time_ms: number;
  rssi_dbm: number;
  readings: Record<string, number>;
  east: number | null;
  north: number | null;
  alt_m: number | null;
  first_time_ms: number | null;
}

export interface CommandRecord {
  ts_ms: number;
  seq: number;
  command: string;
  lat: number;
  lon: number;
  alt_m: number;
  param_m: number;
}

export interface AckRecord {
  ts_ms: number;
  seq_acked: number;
  result: number; // 0 accepted, 1 rejected
}

export interface MissionViewDto {
  mission_id: string;
  status: string;
  frames: number;
  heartbeats: number;
  last_fsm_state: number | null;
  path: PathFix[];
  observations: TagObservation[];
  commands: CommandRecord[];
  acks: AckRecord[];
}

export interface MissionDetail {
  plan: MissionPlan;
  view: MissionViewDto;
  summary: MissionSummary;
}

export interface AuditEntry {
  ts_ms: number;
  trigger: string;
  decision: string;
  cmd_seqs: number[];
}

export interface AuditResponse {
  mission_id: string;
  audit: AuditEntry[];
}

export interface CommandRequest {
  command: string; // NAV_TO | CIRCLE | CHANGE_ALT | TAKEOFF | LAND | PLACE_TAG | HOVER_AT
  east: number;
  north: number;
  alt: number;
  param_m: number;
}

/** Plan submission: explicit waypoints, or a survey polygon plus row
 * spacing (the server expands it to a serpentine grid). */
export interface CreateMissionRequest {
  name: string;
  vehicle: string; // "UAV" | "UGV"
  seed: number;
  waypoints?: PlanWaypoint[];
  area?: Array<[number, number]>;
  spacing_m?: number;
}

export interface CreateMissionResponse {
  mission_id: string;
  plan: MissionPlan;
  summary: MissionSummary;
}

export interface CommandResponse {
  mission_id: string;
  command: string;
  seq: number;
  delivering: boolean;
}

/** One NDJSON row of the event stream: the shared envelope plus the raw
 * message fields for its type. */
export interface EventRow {
  ts_ms: number;
  seq: number;
  dir: "tx" | "rx";
  type: "Heartbeat" | "GpsPosition" | "TagRead" | "Command" | "Ack";
  // Heartbeat
  vehicle_type?: number;
  fsm_state?: number;
  // GpsPosition
  lat_1e7?: number;
  lon_1e7?: number;
  alt_mm?: number;
  time_ms?: number;
  // TagRead
  epc?: string;
  rssi_dbm_x10?: number;
  sensor_kind?: number;
  sensor_value_milli?: number;
  // Command
  command?: number;
  param_cm?: number;
  // Ack
  seq_acked?: number;
  result?: number;
}

export const COMMAND_NAMES = [
  "NAV_TO",
  "CIRCLE",
  "CHANGE_ALT",
  "TAKEOFF",
  "LAND",
  "PLACE_TAG",
  "HOVER_AT",
] as const;

export const SENSOR_CHANNEL_NAMES: Record<number, string> = {
  0: "none",
  1: "moisture_ohm",
  2: "temperature_c",
  3: "conductivity_us_cm",
  4: "light_lux",
};

export const SENSOR_UNITS: Record<string, string> = {
  moisture_ohm: "Ω",
  temperature_c: "°C",
  conductivity_us_cm: "µS/cm",
  light_lux: "lx",
};
