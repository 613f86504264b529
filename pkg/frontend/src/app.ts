/** Browser bootstrap: wires the API client, the pure fold, and the SVG
 * renderer into the console page. All mission knowledge comes from the
 * HTTP API; this module only routes data and DOM events.
 */

import { ApiClient, ApiError, EventPoller } from "./api.js";
import {
  applyNdjson,
  initialState,
  observationFor,
  type MapViewState,
} from "./state.js";
import { renderMap, viewportFor, DEFAULT_VIEWPORT } from "./render.js";
import type { CreateMissionRequest, MissionSummary, PlanWaypoint } from "./types.js";
import { SENSOR_UNITS } from "./types.js";

export const POLL_MS = 2000;

export interface Ui {
  missionList: HTMLElement;
  map: HTMLElement;
  status: HTMLElement;
  toast: HTMLElement;
  /** Manual-flight controls; disabled unless the open mission is manual and live. */
  controls: HTMLElement;
  altInput: HTMLInputElement;
  altButton: HTMLButtonElement;
  landButton: HTMLButtonElement;
  hoverHint: HTMLElement;
  /** Plan-builder controls; independent of the open mission's mode. */
  planButton: HTMLButtonElement;
  planSubmit: HTMLButtonElement;
  planName: HTMLInputElement;
  planSeed: HTMLInputElement;
  planVehicle: HTMLSelectElement;
  planArea: HTMLInputElement;
  planSpacing: HTMLInputElement;
  planExport: HTMLTextAreaElement;
}

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (node === null) throw new Error(`missing element #${id}`);
  return node as T;
}

export class Console {
  private readonly api: ApiClient;
  private state: MapViewState | null = null;
  private summary: MissionSummary | null = null;
  private poller: EventPoller | null = null;
  private knownValued = new Set<string>();
  private planClicks: PlanWaypoint[] = [];
  private planning = false;
  private wired = false;

  constructor(
    private readonly ui: Ui,
    api?: ApiClient,
  ) {
    this.api = api ?? new ApiClient("");
  }

  async start(): Promise<void> {
    if (!this.wired) {
      this.wired = true;
      this.ui.planButton.addEventListener("click", () => this.togglePlanning());
      this.ui.planSubmit.addEventListener("click", () => void this.submitPlan());
      this.ui.altButton.addEventListener("click", () => void this.sendChangeAlt());
      this.ui.landButton.addEventListener("click", () => void this.sendLand());
      this.ui.map.addEventListener("click", (ev) => void this.onMapClick(ev));
    }
    const missions = await this.refreshMissions();
    this.renderPlanDraft();
    if (this.summary === null && missions.length > 0) await this.open(missions[0]!);
  }

  private async refreshMissions(): Promise<MissionSummary[]> {
    const missions = await this.api.missions();
    this.ui.missionList.innerHTML = "";
    for (const m of missions) {
      const btn = document.createElement("button");
      btn.textContent = `${m.mission_id} [${m.vehicle} ${m.mode}] ${m.status}`;
      btn.addEventListener("click", () => void this.open(m));
      this.ui.missionList.appendChild(btn);
    }
    return missions;
  }

  /** Stop the event subscription (e.g. when tearing the console down). */
  stop(): void {
    this.poller?.stop();
    this.poller = null;
  }

  /** Poll the open mission's stream once, on demand. */
  async refresh(): Promise<void> {
    await this.poller?.pollOnce();
  }

  async open(summary: MissionSummary): Promise<void> {
    this.poller?.stop();
    this.planning = false;
    const detail = await this.api.missionDetail(summary.mission_id);
    this.summary = detail.summary;
    this.state = initialState(detail.plan);
    this.knownValued.clear();
    this.renderPlanDraft();
    this.poller = new EventPoller(
      this.api,
      summary.mission_id,
      (ndjson) => this.onChunk(ndjson),
      (err) => this.note(`stream error, will retry: ${String(err)}`),
    );
    this.poller.start(POLL_MS);
  }

  private onChunk(ndjson: string): void {
    if (this.state === null) return;
    applyNdjson(this.state, ndjson);
    for (const obs of this.state.view.observations) {
      const channels = Object.entries(obs.readings);
      if (channels.length === 0) continue;
      const key = `${obs.epc_hex}@${obs.time_ms}`;
      if (this.knownValued.has(key)) continue;
      this.knownValued.add(key);
      const text = channels
        .map(([name, value]) => `${name}=${value} ${SENSOR_UNITS[name] ?? ""}`.trim())
        .join(", ");
      this.toast(`tag ${obs.epc_hex.slice(-4)} read: ${text}`);
    }
    this.redraw();
  }

  private redraw(): void {
    if (this.state === null) return;
    if (!this.planning) this.ui.map.innerHTML = renderMap(this.state);
    const v = this.state.view;
    const done = v.status === "done";
    this.ui.status.textContent =
      `${v.mission_id} — ${v.status}; ${v.path.length} fixes, ` +
      `${v.observations.length} tag reads, ${v.commands.length} commands`;
    const manual = this.summary?.mode === "manual";
    for (const b of this.ui.controls.querySelectorAll("button, input")) {
      (b as HTMLButtonElement).disabled = done || !manual;
    }
    this.ui.hoverHint.textContent = this.planning
      ? this.ui.planArea.checked
        ? "planning: click the map to outline the survey polygon"
        : "planning: click the map to add waypoints"
      : manual && !done
        ? "click the map to command a hover at the altitude below"
        : "";
  }

  private async onMapClick(ev: MouseEvent): Promise<void> {
    if (this.state === null) return;
    const svg = this.ui.map.querySelector("svg");
    if (svg === null) return;
    const rect = svg.getBoundingClientRect();
    const vp = viewportFor(this.state, DEFAULT_VIEWPORT);
    const scaleX = DEFAULT_VIEWPORT.widthPx / rect.width;
    const scaleY = DEFAULT_VIEWPORT.heightPx / rect.height;
    const { east, north } = vp.screenToWorld(
      (ev.clientX - rect.left) * scaleX,
      (ev.clientY - rect.top) * scaleY,
    );
    if (this.planning) {
      this.planClicks.push({ east, north, epc: null, needs_sensor: false });
      this.renderPlanDraft();
      return;
    }
    if (this.summary?.mode !== "manual" || this.state.view.status === "done") return;
    const alt = Number(this.ui.altInput.value) || 0.5;
    try {
      const res = await this.api.sendCommand(this.state.view.mission_id, {
        command: "HOVER_AT",
        east,
        north,
        alt,
        param_m: alt,
      });
      this.toast(
        `HOVER_AT (${east.toFixed(1)}, ${north.toFixed(1)}) @ ${alt} m — ` +
          `seq ${res.seq}${res.delivering ? "" : " (mission not live)"}`,
      );
      const epcNear = this.nearestReadEpc(east, north);
      if (epcNear !== null) {
        const obs = observationFor(this.state.view, epcNear);
        if (obs !== undefined && Object.keys(obs.readings).length > 0) {
          this.toast(`latest from ${epcNear.slice(-4)}: ${JSON.stringify(obs.readings)}`);
        }
      }
    } catch (err) {
      if (err instanceof ApiError) this.note(`command rejected: ${err.detail}`);
      else this.note(String(err));
    }
  }

  private nearestReadEpc(east: number, north: number): string | null {
    if (this.state === null) return null;
    let best: string | null = null;
    let bestD = 3.0; // only surface a tag read within a few meters of the click
    for (const obs of this.state.view.observations) {
      if (obs.east === null || obs.north === null) continue;
      const d = Math.hypot(obs.east - east, obs.north - north);
      if (d < bestD) {
        bestD = d;
        best = obs.epc_hex;
      }
    }
    return best;
  }

  private async sendChangeAlt(): Promise<void> {
    if (this.state === null) return;
    const last = this.state.view.path[this.state.view.path.length - 1];
    const alt = Number(this.ui.altInput.value) || 0.5;
    try {
      const res = await this.api.sendCommand(this.state.view.mission_id, {
        command: "CHANGE_ALT",
        east: last?.east ?? 0,
        north: last?.north ?? 0,
        alt,
        param_m: 0,
      });
      this.toast(`CHANGE_ALT to ${alt} m — seq ${res.seq}`);
    } catch (err) {
      this.note(err instanceof ApiError ? `command rejected: ${err.detail}` : String(err));
    }
  }

  private async sendLand(): Promise<void> {
    if (this.state === null) return;
    const last = this.state.view.path[this.state.view.path.length - 1];
    try {
      await this.api.sendCommand(this.state.view.mission_id, {
        command: "LAND",
        east: last?.east ?? 0,
        north: last?.north ?? 0,
        alt: 0,
        param_m: 0,
      });
      this.toast("LAND sent");
    } catch (err) {
      this.note(err instanceof ApiError ? `command rejected: ${err.detail}` : String(err));
    }
  }

  /** Plan-builder mode: clicks collect waypoints (or polygon corners when
   * the survey box is ticked); submit posts the plan to the API, which
   * runs it and answers with the expanded waypoint set. The export box
   * mirrors the draft as scenario JSON for the offline tooling. */
  private togglePlanning(): void {
    this.planning = !this.planning;
    if (this.planning) this.planClicks = [];
    this.renderPlanDraft();
    this.redraw();
  }

  private planBody(): CreateMissionRequest {
    const seed = Number(this.ui.planSeed.value);
    const base: CreateMissionRequest = {
      name: this.ui.planName.value.trim() || "planned",
      vehicle: this.ui.planVehicle.value || "UAV",
      seed: Number.isFinite(seed) ? Math.trunc(seed) : 0,
    };
    if (this.ui.planArea.checked) {
      const spacing = Number(this.ui.planSpacing.value);
      base.area = this.planClicks.map((w) => [w.east, w.north]);
      base.spacing_m = Number.isFinite(spacing) && spacing > 0 ? spacing : 10;
    } else {
      base.waypoints = this.planClicks;
    }
    return base;
  }

  private planReady(): boolean {
    return this.planning
      ? this.ui.planArea.checked
        ? this.planClicks.length >= 3
        : this.planClicks.length >= 1
      : false;
  }

  private async submitPlan(): Promise<void> {
    if (!this.planReady()) return;
    try {
      const res = await this.api.createMission(this.planBody());
      this.toast(
        `mission ${res.mission_id} created (${res.plan.waypoints.length} waypoints)`,
      );
      this.planning = false;
      this.planClicks = [];
      this.renderPlanDraft();
      await this.refreshMissions();
      await this.open(res.summary);
    } catch (err) {
      // Leave planning mode on so the operator can fix the plan and retry.
      this.note(err instanceof ApiError ? `plan rejected: ${err.detail}` : String(err));
    }
  }

  private renderPlanDraft(): void {
    const area = this.ui.planArea.checked;
    this.ui.planExport.value =
      this.planClicks.length === 0
        ? ""
        : JSON.stringify(
            area
              ? { area: this.planClicks.map((w) => [w.east, w.north]),
                  spacing_m: Number(this.ui.planSpacing.value) || 10 }
              : { waypoints: this.planClicks },
            null,
            2,
          );
    this.ui.planButton.textContent = this.planning
      ? `finish planning (${this.planClicks.length} ${area ? "corners" : "waypoints"})`
      : "plan waypoints";
    this.ui.planSubmit.disabled = !this.planReady();
    if (this.planning && this.state !== null) {
      const draft: MapViewState = {
        ...this.state,
        plan: { ...this.state.plan, waypoints: this.planClicks },
      };
      this.ui.map.innerHTML = renderMap(draft);
    }
  }

  private toast(text: string): void {
    const div = document.createElement("div");
    div.className = "toast";
    div.textContent = text;
    this.ui.toast.prepend(div);
    setTimeout(() => div.remove(), 8000);
  }

  private note(text: string): void {
    this.ui.status.textContent = text;
  }
}

export function boot(): void {
  const ui: Ui = {
    missionList: el("mission-list"),
    map: el("map"),
    status: el("status"),
    toast: el("toast"),
    controls: el("controls"),
    altInput: el<HTMLInputElement>("alt-input"),
    altButton: el<HTMLButtonElement>("alt-button"),
    landButton: el<HTMLButtonElement>("land-button"),
    hoverHint: el("hover-hint"),
    planButton: el<HTMLButtonElement>("plan-button"),
    planSubmit: el<HTMLButtonElement>("plan-submit"),
    planName: el<HTMLInputElement>("plan-name"),
    planSeed: el<HTMLInputElement>("plan-seed"),
    planVehicle: el<HTMLSelectElement>("plan-vehicle"),
    planArea: el<HTMLInputElement>("plan-area"),
    planSpacing: el<HTMLInputElement>("plan-spacing"),
    planExport: el<HTMLTextAreaElement>("plan-export"),
  };
  void new Console(ui).start();
}

if (typeof document !== "undefined" && document.getElementById("map") !== null) {
  boot();
}
