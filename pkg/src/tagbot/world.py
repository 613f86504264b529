"""Local-frame geometry and measurement noise models.

Mission coordinates are east/north/up meters about a geodetic origin, via an
equirectangular projection on a spherical earth. At field scale (tens of
meters, guarded to under 10 km) the projection round-trips to well under a
millimeter.

GPS error is a per-mission constant bias plus white noise per fix; barometric
altitude is modeled the same way. Both samplers are pure functions of their
inputs and RNG state so runs replay bit-exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from random import Random

EARTH_RADIUS_M = 6_371_000.0
MAX_FRAME_RANGE_M = 10_000.0  # flat-frame approximation is not defended past this


@dataclass(frozen=True)
class GeoPoint:
    """Latitude/longitude in degrees; altitude in meters above the mission origin."""

    lat: float
    lon: float
    alt: float = 0.0


@dataclass(frozen=True)
class EnuPose:
    east: float
    north: float
    up: float
    yaw: float = 0.0  # radians, 0 = east, counterclockwise positive


def _check_geo(p: GeoPoint) -> None:
    if not (-90.0 <= p.lat <= 90.0 and -180.0 <= p.lon <= 180.0):
        raise ValueError(f"latitude/longitude out of range: ({p.lat}, {p.lon})")


def enu_from_geodetic(origin: GeoPoint, p: GeoPoint) -> EnuPose:
    """Project a geodetic point into the east/north/up frame at `origin`."""
    _check_geo(origin)
    _check_geo(p)
    east = math.radians(p.lon - origin.lon) * math.cos(math.radians(origin.lat)) * EARTH_RADIUS_M
    north = math.radians(p.lat - origin.lat) * EARTH_RADIUS_M
    if math.hypot(east, north) >= MAX_FRAME_RANGE_M:
        raise ValueError("point is too far from the frame origin for a flat-frame projection")
    return EnuPose(east=east, north=north, up=p.alt - origin.alt)


def geodetic_from_enu(origin: GeoPoint, pose: EnuPose) -> GeoPoint:
    """Inverse of enu_from_geodetic for the same origin."""
    _check_geo(origin)
    lat = origin.lat + math.degrees(pose.north / EARTH_RADIUS_M)
    lon = origin.lon + math.degrees(pose.east / (EARTH_RADIUS_M * math.cos(math.radians(origin.lat))))
    return GeoPoint(lat=lat, lon=lon, alt=origin.alt + pose.up)


@dataclass
class GpsModel:
    bias_sigma_m: float = 1.5   # per-axis constant offset, drawn once per mission
    noise_sigma_m: float = 0.5  # fresh white noise per fix

    def __post_init__(self) -> None:
        if self.bias_sigma_m < 0 or self.noise_sigma_m < 0:
            raise ValueError("GPS sigmas must be non-negative")


def sample_gps(true_pos: EnuPose, model: GpsModel, rng: Random,
               bias_e: float = 0.0, bias_n: float = 0.0) -> EnuPose:
    """One horizontal GPS fix: truth plus mission bias plus white noise.

    Altitude passes through untouched; receivers here fly on barometric
    altitude, not GPS altitude.
    """
    e = true_pos.east + bias_e + rng.gauss(0.0, model.noise_sigma_m)
    n = true_pos.north + bias_n + rng.gauss(0.0, model.noise_sigma_m)
    return replace(true_pos, east=e, north=n)


class GpsSampler:
    """Draws the per-mission bias once so every fix in the mission shares it."""

    def __init__(self, model: GpsModel, rng: Random):
        self.model = model
        self.bias_e = rng.gauss(0.0, model.bias_sigma_m)
        self.bias_n = rng.gauss(0.0, model.bias_sigma_m)

    def sample(self, true_pos: EnuPose, rng: Random) -> EnuPose:
        return sample_gps(true_pos, self.model, rng, self.bias_e, self.bias_n)


@dataclass
class BaroModel:
    bias_sigma_m: float = 0.5    # constant per-mission altitude offset
    noise_sigma_m: float = 0.15  # per-sample noise

    def __post_init__(self) -> None:
        if self.bias_sigma_m < 0 or self.noise_sigma_m < 0:
            raise ValueError("baro sigmas must be non-negative")


def sample_baro_alt(true_alt_m: float, model: BaroModel, rng: Random,
                    bias_m: float = 0.0) -> float:
    """Indicated altitude: truth plus mission bias plus white noise.

    A vehicle holding a commanded altitude servoes the indicated value, so its
    true altitude settles at commanded minus bias. A +1 m bias and a 1.5 m
    hover command puts the vehicle 0.5 m off the true ground.
    """
    return true_alt_m + bias_m + rng.gauss(0.0, model.noise_sigma_m)


class BaroSampler:
    """Holds the per-mission barometer bias."""

    def __init__(self, model: BaroModel, rng: Random):
        self.model = model
        self.bias_m = rng.gauss(0.0, model.bias_sigma_m)

    def sample(self, true_alt_m: float, rng: Random) -> float:
        return sample_baro_alt(true_alt_m, self.model, rng, self.bias_m)
