"""Field tags: identity, sensing, and the charge state of battery-free tags.

A tag is a 12-byte ID plus a kind. Sensor kinds expose one or two measurement
channels read over the tag's memory interface; an ID-only tag has none.
Because the tags carry no battery, a sensor transaction is only possible
after the tag has soaked continuously above its power threshold long enough
to charge its front end; any dropout resets the charge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum, IntEnum

from .rflink import AntennaPose, LinkConfig

EPC_LENGTH = 12


class TagKind(str, Enum):
    ID_ONLY = "id_only"
    HYDRO_MOISTURE = "hydro_moisture"   # soil moisture via resistive probe, plus temperature
    CONDUCTIVITY = "conductivity"
    LIGHT = "light"
    TEMPERATURE = "temperature"


SENSOR_KINDS = frozenset(k for k in TagKind if k is not TagKind.ID_ONLY)


class SensorChannel(IntEnum):
    """Measurement channel codes as they appear on the wire."""

    NONE = 0
    MOISTURE_OHM = 1        # probe resistance, milliohm on the wire
    TEMPERATURE_C = 2       # milli-degC
    CONDUCTIVITY_US_CM = 3  # milli-uS/cm
    LIGHT_LUX = 4           # milli-lux


CHANNEL_UNITS = {
    SensorChannel.NONE: "",
    SensorChannel.MOISTURE_OHM: "ohm",
    SensorChannel.TEMPERATURE_C: "degC",
    SensorChannel.CONDUCTIVITY_US_CM: "uS/cm",
    SensorChannel.LIGHT_LUX: "lux",
}


@dataclass(frozen=True)
class Epc:
    """Opaque 12-byte tag identity."""

    data: bytes

    def __post_init__(self) -> None:
        if len(self.data) != EPC_LENGTH:
            raise ValueError(f"EPC must be exactly {EPC_LENGTH} bytes, got {len(self.data)}")

    @property
    def hex(self) -> str:
        return self.data.hex()

    @classmethod
    def from_hex(cls, text: str) -> "Epc":
        return cls(bytes.fromhex(text))

    @classmethod
    def make(cls, index: int) -> "Epc":
        """Deterministic EPC for generated scenarios."""
        return cls(b"\xe2\x80tb" + index.to_bytes(8, "big"))

    def __str__(self) -> str:
        return self.hex


@dataclass(frozen=True)
class SensorReading:
    channel: SensorChannel
    value_milli: int  # quantized to wire resolution
    unit: str

    @property
    def value(self) -> float:
        return self.value_milli / 1000.0


@dataclass
class SensorCalibration:
    """Moisture probe law: resistance decays geometrically from dry to saturated."""

    r_dry_ohm: float = 50_000.0
    r_sat_ohm: float = 500.0
    theta_sat: float = 0.45  # volumetric water content at saturation

    def __post_init__(self) -> None:
        if not (self.r_dry_ohm > self.r_sat_ohm > 0):
            raise ValueError("need r_dry > r_sat > 0")
        if self.theta_sat <= 0:
            raise ValueError("theta_sat must be positive")


@dataclass
class Environment:
    """Ambient quantities the sensor channels sample."""

    soil_moisture_base: float = 0.2          # volumetric water content at the origin
    soil_moisture_east_slope: float = 0.0    # per meter
    soil_moisture_north_slope: float = 0.0   # per meter
    ambient_temp_c: float = 22.0
    water_conductivity_us_cm: float = 1500.0
    light_lux: float = 80_000.0

    def soil_moisture(self, east: float, north: float, cal: SensorCalibration) -> float:
        theta = (self.soil_moisture_base
                 + self.soil_moisture_east_slope * east
                 + self.soil_moisture_north_slope * north)
        return min(max(theta, 0.0), cal.theta_sat)


@dataclass
class Tag:
    epc: Epc
    kind: TagKind
    pose: AntennaPose            # dipole element axis lives in pose.boresight
    mount_height_m: float = 0.0  # 0 on the ground, 0.4 on a survey stake
    whitelisted: bool = True
    charge_s: float = 0.0
    charge_required_s: float = 1.0

    def __post_init__(self) -> None:
        if self.charge_required_s <= 0:
            raise ValueError("charge_required_s must be positive")


def moisture_to_resistance(theta: float, cal: SensorCalibration) -> float:
    """Probe resistance in ohms for volumetric water content theta."""
    if not (0.0 <= theta <= cal.theta_sat):
        raise ValueError(f"moisture {theta} outside [0, {cal.theta_sat}]")
    return cal.r_dry_ohm * (cal.r_sat_ohm / cal.r_dry_ohm) ** (theta / cal.theta_sat)


def resistance_to_moisture(r_ohm: float, cal: SensorCalibration) -> float:
    """Inverse of moisture_to_resistance."""
    if not (cal.r_sat_ohm <= r_ohm <= cal.r_dry_ohm):
        raise ValueError(f"resistance {r_ohm} outside [{cal.r_sat_ohm}, {cal.r_dry_ohm}]")
    return cal.theta_sat * math.log(r_ohm / cal.r_dry_ohm) / math.log(cal.r_sat_ohm / cal.r_dry_ohm)


def _milli(value: float) -> int:
    return round(value * 1000.0)


def sense(tag: Tag, env: Environment, cal: SensorCalibration) -> tuple[SensorReading, ...]:
    """Sample the tag's measurement channels at its location.

    ID-only tags have nothing to sample and raise.
    """
    if tag.kind is TagKind.ID_ONLY:
        raise ValueError("ID-only tag carries no sensor")
    pos = tag.pose.position
    if tag.kind is TagKind.HYDRO_MOISTURE:
        theta = env.soil_moisture(pos.east, pos.north, cal)
        r = moisture_to_resistance(theta, cal)
        return (
            SensorReading(SensorChannel.MOISTURE_OHM, _milli(r), CHANNEL_UNITS[SensorChannel.MOISTURE_OHM]),
            SensorReading(SensorChannel.TEMPERATURE_C, _milli(env.ambient_temp_c),
                          CHANNEL_UNITS[SensorChannel.TEMPERATURE_C]),
        )
    if tag.kind is TagKind.CONDUCTIVITY:
        return (SensorReading(SensorChannel.CONDUCTIVITY_US_CM, _milli(env.water_conductivity_us_cm),
                              CHANNEL_UNITS[SensorChannel.CONDUCTIVITY_US_CM]),)
    if tag.kind is TagKind.LIGHT:
        return (SensorReading(SensorChannel.LIGHT_LUX, _milli(env.light_lux),
                              CHANNEL_UNITS[SensorChannel.LIGHT_LUX]),)
    # TagKind.TEMPERATURE
    return (SensorReading(SensorChannel.TEMPERATURE_C, _milli(env.ambient_temp_c),
                          CHANNEL_UNITS[SensorChannel.TEMPERATURE_C]),)


def powered_state_update(tag: Tag, received_dbm: float, dt_s: float, cfg: LinkConfig) -> Tag:
    """Advance the tag's charge state over one tick of illumination.

    Continuous power at or above the sensor threshold accumulates charge,
    clamped at the requirement; any tick below it drains the front end
    completely.
    """
    if received_dbm >= cfg.sensor_threshold_dbm:
        tag.charge_s = min(tag.charge_s + dt_s, tag.charge_required_s)
    else:
        tag.charge_s = 0.0
    return tag


def sensor_ready(tag: Tag) -> bool:
    return tag.charge_s >= tag.charge_required_s

