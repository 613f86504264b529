/** SVG map rendering — a pure function of the folded mission state.
 *
 * The base layer is a self-contained grid (no tile server), so the page
 * and its tests run with no network beyond the mission API. Layer colors
 * follow the ground-station convention: green planned trajectory, grey
 * waypoint markers, red flown path, one blue flag per folded tag read,
 * and a heading-oriented vehicle marker.
 */

import type { MapViewState } from "./state.js";
import { vehicleHeading } from "./state.js";
import { SENSOR_UNITS } from "./types.js";

export interface ViewportOptions {
  widthPx: number;
  heightPx: number;
  marginM: number;
}

export const DEFAULT_VIEWPORT: ViewportOptions = {
  widthPx: 800,
  heightPx: 600,
  marginM: 4,
};

/** Affine world(east,north meters) ↔ screen(px) mapping that fits the
 * mission's extent, preserving aspect ratio, north up. */
export class Viewport {
  readonly minEast: number;
  readonly minNorth: number;
  readonly maxEast: number;
  readonly maxNorth: number;
  readonly scale: number; // px per meter
  readonly offsetX: number;
  readonly offsetY: number;

  constructor(
    points: Array<{ east: number; north: number }>,
    readonly opts: ViewportOptions = DEFAULT_VIEWPORT,
  ) {
    let minE = Infinity;
    let minN = Infinity;
    let maxE = -Infinity;
    let maxN = -Infinity;
    for (const p of points) {
      minE = Math.min(minE, p.east);
      minN = Math.min(minN, p.north);
      maxE = Math.max(maxE, p.east);
      maxN = Math.max(maxN, p.north);
    }
    if (!Number.isFinite(minE)) {
      minE = minN = 0;
      maxE = maxN = 10;
    }
    this.minEast = minE - opts.marginM;
    this.minNorth = minN - opts.marginM;
    this.maxEast = maxE + opts.marginM;
    this.maxNorth = maxN + opts.marginM;
    const spanE = Math.max(this.maxEast - this.minEast, 1e-6);
    const spanN = Math.max(this.maxNorth - this.minNorth, 1e-6);
    this.scale = Math.min(opts.widthPx / spanE, opts.heightPx / spanN);
    // Center the fitted extent in the canvas.
    this.offsetX = (opts.widthPx - spanE * this.scale) / 2;
    this.offsetY = (opts.heightPx - spanN * this.scale) / 2;
  }

  worldToScreen(east: number, north: number): { x: number; y: number } {
    return {
      x: this.offsetX + (east - this.minEast) * this.scale,
      y: this.opts.heightPx - this.offsetY - (north - this.minNorth) * this.scale,
    };
  }

  screenToWorld(x: number, y: number): { east: number; north: number } {
    return {
      east: this.minEast + (x - this.offsetX) / this.scale,
      north: this.minNorth + (this.opts.heightPx - this.offsetY - y) / this.scale,
    };
  }
}

function fmt(v: number): string {
  return Number.isInteger(v) ? String(v) : v.toFixed(1);
}

function esc(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function viewportFor(state: MapViewState, opts?: ViewportOptions): Viewport {
  const points: Array<{ east: number; north: number }> = [];
  for (const wp of state.plan.waypoints) points.push(wp);
  for (const fix of state.view.path) points.push(fix);
  for (const obs of state.view.observations) {
    if (obs.east !== null && obs.north !== null) {
      points.push({ east: obs.east, north: obs.north });
    }
  }
  return new Viewport(points, opts);
}

/** The offline base layer: a neutral background with a labeled grid line
 * every `stepM` meters. */
export function renderGrid(vp: Viewport, stepM = 5): string {
  const parts: string[] = [];
  parts.push(
    `<rect class="map-base" x="0" y="0" width="${vp.opts.widthPx}" ` +
      `height="${vp.opts.heightPx}" fill="#f4f2ec"/>`,
  );
  const e0 = Math.ceil(vp.minEast / stepM) * stepM;
  const n0 = Math.ceil(vp.minNorth / stepM) * stepM;
  for (let e = e0; e <= vp.maxEast; e += stepM) {
    const a = vp.worldToScreen(e, vp.minNorth);
    const b = vp.worldToScreen(e, vp.maxNorth);
    parts.push(
      `<line class="grid-line" x1="${fmt(a.x)}" y1="${fmt(a.y)}" ` +
        `x2="${fmt(b.x)}" y2="${fmt(b.y)}" stroke="#d8d4c8" stroke-width="1"/>`,
    );
  }
  for (let n = n0; n <= vp.maxNorth; n += stepM) {
    const a = vp.worldToScreen(vp.minEast, n);
    const b = vp.worldToScreen(vp.maxEast, n);
    parts.push(
      `<line class="grid-line" x1="${fmt(a.x)}" y1="${fmt(a.y)}" ` +
        `x2="${fmt(b.x)}" y2="${fmt(b.y)}" stroke="#d8d4c8" stroke-width="1"/>`,
    );
  }
  return parts.join("");
}

function polylinePoints(vp: Viewport, pts: Array<{ east: number; north: number }>): string {
  return pts
    .map((p) => {
      const s = vp.worldToScreen(p.east, p.north);
      return `${s.x.toFixed(1)},${s.y.toFixed(1)}`;
    })
    .join(" ");
}

/** Green polyline through the planned waypoints plus a grey marker per
 * waypoint. */
export function renderPlan(state: MapViewState, vp: Viewport): string {
  const wps = state.plan.waypoints;
  const parts: string[] = [];
  if (wps.length >= 2) {
    parts.push(
      `<polyline class="planned-trajectory" fill="none" stroke="green" ` +
        `stroke-width="2" stroke-dasharray="6 4" points="${polylinePoints(vp, wps)}"/>`,
    );
  }
  wps.forEach((wp, i) => {
    const s = vp.worldToScreen(wp.east, wp.north);
    const label = wp.epc === null ? `waypoint ${i}` : `waypoint ${i} (${wp.epc})`;
    parts.push(
      `<g class="waypoint" data-index="${i}"${wp.epc === null ? "" : ` data-epc="${esc(wp.epc)}"`}>` +
        `<circle cx="${s.x.toFixed(1)}" cy="${s.y.toFixed(1)}" r="6" ` +
        `fill="grey" stroke="#555" stroke-width="1"/>` +
        `<title>${esc(label)}${wp.needs_sensor ? " [needs sensor]" : ""}</title></g>`,
    );
  });
  return parts.join("");
}

/** Red polyline through every GPS fix received so far. */
export function renderFlownPath(state: MapViewState, vp: Viewport): string {
  const path = state.view.path;
  if (path.length < 2) return "";
  return (
    `<polyline class="flown-path" fill="none" stroke="red" stroke-width="2" ` +
    `points="${polylinePoints(vp, path)}"/>`
  );
}

function readingsLabel(readings: Record<string, number>): string {
  return Object.entries(readings)
    .map(([name, value]) => `${name}=${value} ${SENSOR_UNITS[name] ?? ""}`.trim())
    .join(", ");
}

/** One blue flag per folded tag read, planted where the vehicle was when
 * the read arrived; the tooltip carries any delivered sensor values. */
export function renderTagFlags(state: MapViewState, vp: Viewport): string {
  const parts: string[] = [];
  state.view.observations.forEach((obs, i) => {
    if (obs.east === null || obs.north === null) return;
    const s = vp.worldToScreen(obs.east, obs.north);
    const x = s.x;
    const y = s.y;
    const values = readingsLabel(obs.readings);
    const label =
      values.length > 0 ? `${obs.epc_hex}: ${values}` : `${obs.epc_hex} (sighted)`;
    parts.push(
      `<g class="tag-flag" data-epc="${esc(obs.epc_hex)}" data-index="${i}">` +
        `<line x1="${x.toFixed(1)}" y1="${y.toFixed(1)}" x2="${x.toFixed(1)}" ` +
        `y2="${(y - 16).toFixed(1)}" stroke="blue" stroke-width="2"/>` +
        `<polygon fill="blue" points="${x.toFixed(1)},${(y - 16).toFixed(1)} ` +
        `${(x + 11).toFixed(1)},${(y - 12.5).toFixed(1)} ${x.toFixed(1)},${(y - 9).toFixed(1)}"/>` +
        `<title>${esc(label)}</title></g>`,
    );
  });
  return parts.join("");
}

/** Triangle at the latest fix, rotated to the direction of travel. */
export function renderVehicle(state: MapViewState, vp: Viewport): string {
  const path = state.view.path;
  const last = path[path.length - 1];
  if (last === undefined) return "";
  const s = vp.worldToScreen(last.east, last.north);
  const heading = vehicleHeading(state.view) ?? Math.PI / 2;
  // Screen rotation: world heading is CCW from east; screen y grows down.
  const deg = (-heading * 180) / Math.PI;
  return (
    `<g class="vehicle-marker" transform="translate(${s.x.toFixed(1)} ${s.y.toFixed(1)}) ` +
    `rotate(${deg.toFixed(1)})" data-heading-rad="${heading.toFixed(4)}">` +
    `<polygon points="9,0 -6,5 -6,-5" fill="#222" stroke="white" stroke-width="1"/></g>`
  );
}

/** The full map as one SVG document string. */
export function renderMap(state: MapViewState, opts?: ViewportOptions): string {
  const vp = viewportFor(state, opts);
  const o = vp.opts;
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" class="mission-map" ` +
    `viewBox="0 0 ${o.widthPx} ${o.heightPx}" width="${o.widthPx}" height="${o.heightPx}">` +
    renderGrid(vp) +
    renderPlan(state, vp) +
    renderFlownPath(state, vp) +
    renderTagFlags(state, vp) +
    renderVehicle(state, vp) +
    `</svg>`
  );
}
