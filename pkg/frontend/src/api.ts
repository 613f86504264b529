/** Typed client for the ground-control HTTP API.
 *
 * Every request this module can issue is one of the documented endpoints:
 *
 *   GET  /api/health
 *   GET  /api/missions
 *   POST /api/missions                    (plan submission)
 *   GET  /api/missions/{id}
 *   GET  /api/missions/{id}/audit
 *   GET  /api/missions/{id}/events        (NDJSON)
 *   POST /api/missions/{id}/command
 *
 * The contract test runs this client against a recorded API exchange and
 * rejects any request outside that list.
 */

import type {
  AuditResponse,
  CommandRequest,
  CommandResponse,
  CreateMissionRequest,
  CreateMissionResponse,
  Health,
  MissionDetail,
  MissionSummary,
} from "./types.js";

export type FetchLike = (
  url: string,
  init?: { method?: string; headers?: Record<string, string>; body?: string },
) => Promise<{ ok: boolean; status: number; text(): Promise<string> }>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

/** Error bodies are usually {"detail": "..."}; fall back to the raw text. */
function errorDetail(text: string): string {
  try {
    const parsed = JSON.parse(text) as { detail?: unknown };
    if (typeof parsed.detail === "string") return parsed.detail;
  } catch {
    // not JSON — use the body as-is
  }
  return text;
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (url, init) =>
      (globalThis.fetch as unknown as FetchLike)(url, init),
  ) {}

  private async getJson<T>(path: string): Promise<T> {
    const res = await this.fetchFn(this.baseUrl + path);
    const text = await res.text();
    if (!res.ok) throw new ApiError(res.status, errorDetail(text));
    return JSON.parse(text) as T;
  }

  private async postJson<T>(path: string, body: unknown): Promise<T> {
    const res = await this.fetchFn(this.baseUrl + path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    const text = await res.text();
    if (!res.ok) throw new ApiError(res.status, errorDetail(text));
    return JSON.parse(text) as T;
  }

  health(): Promise<Health> {
    return this.getJson<Health>("/api/health");
  }

  missions(): Promise<MissionSummary[]> {
    return this.getJson<MissionSummary[]>("/api/missions");
  }

  /** Submit a plan; the server runs it and returns the mission with its
   * full (possibly server-expanded) waypoint set. */
  createMission(req: CreateMissionRequest): Promise<CreateMissionResponse> {
    return this.postJson<CreateMissionResponse>("/api/missions", req);
  }

  missionDetail(missionId: string): Promise<MissionDetail> {
    return this.getJson<MissionDetail>(`/api/missions/${encodeURIComponent(missionId)}`);
  }

  audit(missionId: string): Promise<AuditResponse> {
    return this.getJson<AuditResponse>(
      `/api/missions/${encodeURIComponent(missionId)}/audit`,
    );
  }

  /** The raw NDJSON event log, oldest first. The stream is append-only, so
   * reconnect-and-resume is: fetch again, fold only rows past the cursor
   * (see state.applyNdjson). */
  async events(missionId: string): Promise<string> {
    const res = await this.fetchFn(
      this.baseUrl + `/api/missions/${encodeURIComponent(missionId)}/events`,
    );
    const text = await res.text();
    if (!res.ok) throw new ApiError(res.status, errorDetail(text));
    return text;
  }

  sendCommand(missionId: string, req: CommandRequest): Promise<CommandResponse> {
    return this.postJson<CommandResponse>(
      `/api/missions/${encodeURIComponent(missionId)}/command`,
      req,
    );
  }
}

/** Poll the event endpoint, folding new rows into a state via callback.
 * A failed poll is retried on the next tick — the cursor makes resume
 * lossless and duplicate-free. */
export class EventPoller {
  private timer: ReturnType<typeof setInterval> | null = null;

  constructor(
    private readonly client: ApiClient,
    private readonly missionId: string,
    private readonly onChunk: (ndjson: string) => void,
    private readonly onError: (err: unknown) => void = () => undefined,
  ) {}

  async pollOnce(): Promise<void> {
    try {
      this.onChunk(await this.client.events(this.missionId));
    } catch (err) {
      this.onError(err);
    }
  }

  start(intervalMs: number): void {
    this.stop();
    void this.pollOnce();
    this.timer = setInterval(() => void this.pollOnce(), intervalMs);
  }

  stop(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }
}
