/** Display projection between geodetic coordinates and the mission's local
 * east/north frame.
 *
 * This mirrors the frame ground control itself uses (equirectangular on a
 * spherical earth about the mission origin) so that positions derived from
 * raw event rows land on exactly the same map coordinates the server
 * reports in its folded view. It is a drawing transform, not simulation.
 */

import type { GeoOrigin } from "./types.js";

export const EARTH_RADIUS_M = 6_371_000.0;

const DEG = Math.PI / 180.0;

export function enuFromGeodetic(
  origin: GeoOrigin,
  lat: number,
  lon: number,
): { east: number; north: number } {
  const east = (lon - origin.lon) * DEG * Math.cos(origin.lat * DEG) * EARTH_RADIUS_M;
  const north = (lat - origin.lat) * DEG * EARTH_RADIUS_M;
  return { east, north };
}

export function geodeticFromEnu(
  origin: GeoOrigin,
  east: number,
  north: number,
): { lat: number; lon: number } {
  const lat = origin.lat + north / EARTH_RADIUS_M / DEG;
  const lon = origin.lon + east / (EARTH_RADIUS_M * Math.cos(origin.lat * DEG)) / DEG;
  return { lat, lon };
}
