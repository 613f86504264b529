"""Binary telemetry link: framing, message codecs, CRC, and a resyncing parser.

Wire frame (all multi-byte fields little-endian):

    offset  size  field
    0       1     sync byte, always 0xFD
    1       1     payload length (bytes)
    2       1     message id
    3       4     sequence number (u32)
    7       n     payload
    7+n     2     CRC-16/CCITT-FALSE over bytes 1..7+n (length through payload)

Every message id has a fixed payload length, and the lengths are pairwise
distinct, so a corrupted length or id is caught by the length table before
the CRC is even consulted. Scaled integers keep the wire free of floats:
degrees*1e7, millimeters, milli-units, RSSI in tenths of a dBm.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from enum import IntEnum
from typing import Iterable, Iterator, Optional, Union

from .tags import EPC_LENGTH, SensorChannel

SYNC = 0xFD
HEADER_LEN = 7          # sync + len + msg_id + seq
CRC_LEN = 2
MAX_PAYLOAD = 255


def crc16_ccitt_false(data: bytes, crc: int = 0xFFFF) -> int:
    """CRC-16/CCITT-FALSE: poly 0x1021, init 0xFFFF, no reflection, no xorout.

    Check value: crc16_ccitt_false(b"123456789") == 0x29B1.
    """
    for byte in data:
        crc ^= byte << 8
        for _ in range(8):
            crc = ((crc << 1) ^ 0x1021) if crc & 0x8000 else (crc << 1)
            crc &= 0xFFFF
    return crc


class MsgId(IntEnum):
    HEARTBEAT = 0x00
    GPS_POSITION = 0x01
    TAG_READ = 0x02
    COMMAND = 0x03
    ACK = 0x04


class VehicleType(IntEnum):
    UAV = 0
    UGV = 1


class CommandType(IntEnum):
    NAV_TO = 0
    CIRCLE = 1
    CHANGE_ALT = 2
    TAKEOFF = 3
    LAND = 4
    PLACE_TAG = 5
    HOVER_AT = 6


class AckResult(IntEnum):
    ACCEPTED = 0
    REJECTED = 1


class TelemetryError(Exception):
    """Base class for frame decoding failures."""


class BadSync(TelemetryError):
    pass


class BadLength(TelemetryError):
    pass


class BadCrc(TelemetryError):
    pass


class UnknownMsgId(TelemetryError):
    pass


class Truncated(TelemetryError):
    pass


@dataclass(frozen=True)
class Heartbeat:
    vehicle_type: int
    fsm_state: int

    MSG_ID = MsgId.HEARTBEAT
    _FMT = "<BB"


@dataclass(frozen=True)
class GpsPosition:
    lat_1e7: int
    lon_1e7: int
    alt_mm: int
    time_ms: int

    MSG_ID = MsgId.GPS_POSITION
    _FMT = "<iiiI"

    @classmethod
    def from_degrees(cls, lat: float, lon: float, alt_m: float, time_ms: int) -> "GpsPosition":
        return cls(round(lat * 1e7), round(lon * 1e7), round(alt_m * 1000.0), time_ms)

    @property
    def lat(self) -> float:
        return self.lat_1e7 / 1e7

    @property
    def lon(self) -> float:
        return self.lon_1e7 / 1e7

    @property
    def alt_m(self) -> float:
        return self.alt_mm / 1000.0


@dataclass(frozen=True)
class TagRead:
    epc: bytes
    rssi_dbm_x10: int
    sensor_kind: int          # SensorChannel value; NONE for bare identification
    sensor_value_milli: int
    time_ms: int

    MSG_ID = MsgId.TAG_READ
    _FMT = f"<{EPC_LENGTH}shBiI"

    def __post_init__(self) -> None:
        if len(self.epc) != EPC_LENGTH:
            raise ValueError(f"epc must be {EPC_LENGTH} bytes")

    @property
    def rssi_dbm(self) -> float:
        return self.rssi_dbm_x10 / 10.0

    @property
    def epc_hex(self) -> str:
        return self.epc.hex()

    @property
    def channel(self) -> SensorChannel:
        return SensorChannel(self.sensor_kind)


@dataclass(frozen=True)
class Command:
    command: int              # CommandType value
    lat_1e7: int
    lon_1e7: int
    alt_mm: int
    param_cm: int             # command-specific radius/altitude parameter

    MSG_ID = MsgId.COMMAND
    _FMT = "<BiiiH"

    @property
    def lat(self) -> float:
        return self.lat_1e7 / 1e7

    @property
    def lon(self) -> float:
        return self.lon_1e7 / 1e7

    @property
    def alt_m(self) -> float:
        return self.alt_mm / 1000.0

    @property
    def param_m(self) -> float:
        return self.param_cm / 100.0


@dataclass(frozen=True)
class Ack:
    seq_acked: int
    result: int

    MSG_ID = MsgId.ACK
    _FMT = "<IB"


Message = Union[Heartbeat, GpsPosition, TagRead, Command, Ack]

_TYPES = (Heartbeat, GpsPosition, TagRead, Command, Ack)
_BY_ID = {t.MSG_ID: t for t in _TYPES}
PAYLOAD_LENGTHS = {t.MSG_ID: struct.calcsize(t._FMT) for t in _TYPES}
assert len(set(PAYLOAD_LENGTHS.values())) == len(PAYLOAD_LENGTHS), (
    "payload lengths must be pairwise distinct for the length table to "
    "catch id/length corruption before the CRC")


def _fields(msg: Message) -> tuple:
    # dataclass field order matches each _FMT
    return tuple(getattr(msg, f) for f in msg.__dataclass_fields__)


def encode(msg: Message, seq: int) -> bytes:
    """Serialize one message into a framed wire packet."""
    if not 0 <= seq <= 0xFFFFFFFF:
        raise ValueError("seq out of u32 range")
    payload = struct.pack(msg._FMT, *_fields(msg))
    body = struct.pack("<BBI", len(payload), int(msg.MSG_ID), seq) + payload
    crc = crc16_ccitt_false(body)
    return bytes([SYNC]) + body + struct.pack("<H", crc)


@dataclass(frozen=True)
class DecodedFrame:
    msg: Message
    seq: int
    raw: bytes


def decode(buf: bytes) -> DecodedFrame:
    """Decode a single frame from the start of `buf`.

    Raises BadSync / Truncated / UnknownMsgId / BadLength / BadCrc. The frame
    length is trusted only after the message id's fixed length confirms it.
    """
    if len(buf) < 1:
        raise Truncated("empty buffer")
    if buf[0] != SYNC:
        raise BadSync(f"expected 0x{SYNC:02X}, got 0x{buf[0]:02X}")
    if len(buf) < HEADER_LEN:
        raise Truncated("incomplete header")
    length = buf[1]
    msg_id = buf[2]
    if msg_id not in _BY_ID:
        raise UnknownMsgId(f"message id 0x{msg_id:02X}")
    expected = PAYLOAD_LENGTHS[MsgId(msg_id)]
    if length != expected:
        raise BadLength(f"message 0x{msg_id:02X} payload must be {expected} bytes, header says {length}")
    total = HEADER_LEN + length + CRC_LEN
    if len(buf) < total:
        raise Truncated(f"need {total} bytes, have {len(buf)}")
    body = buf[1:HEADER_LEN + length]
    (crc_wire,) = struct.unpack_from("<H", buf, HEADER_LEN + length)
    crc_calc = crc16_ccitt_false(bytes(body))
    if crc_wire != crc_calc:
        raise BadCrc(f"crc mismatch: wire 0x{crc_wire:04X}, computed 0x{crc_calc:04X}")
    (seq,) = struct.unpack_from("<I", buf, 3)
    cls = _BY_ID[MsgId(msg_id)]
    values = struct.unpack_from(cls._FMT, buf, HEADER_LEN)
    return DecodedFrame(msg=cls(*values), seq=seq, raw=bytes(buf[:total]))


def frame_length(buf: bytes) -> Optional[int]:
    """Total frame length implied by a header, or None if not yet readable."""
    if len(buf) < 2:
        return None
    return HEADER_LEN + buf[1] + CRC_LEN


class FrameStream:
    """Incremental parser that resynchronizes on corruption.

    Feed arbitrary byte chunks; completed frames come out in order. Garbage
    (bad sync, bad CRC, bad length) consumes one byte and rescans, so a
    corrupted frame costs at most its own bytes plus the scan. Unknown but
    well-formed message ids are skipped whole.
    """

    def __init__(self) -> None:
        self._buf = bytearray()
        self.frames_ok = 0
        self.errors: list[str] = []

    def feed(self, chunk: bytes) -> list[DecodedFrame]:
        self._buf.extend(chunk)
        out: list[DecodedFrame] = []
        while self._buf:
            try:
                frame = decode(bytes(self._buf))
            except Truncated:
                break
            except UnknownMsgId as exc:
                total = frame_length(self._buf)
                if total is None or len(self._buf) < total:
                    break
                self.errors.append(str(exc))
                del self._buf[:total]
                continue
            except (BadSync, BadLength, BadCrc) as exc:
                self.errors.append(str(exc))
                del self._buf[:1]
                continue
            out.append(frame)
            self.frames_ok += 1
            del self._buf[:len(frame.raw)]
        return out

    @property
    def pending(self) -> int:
        return len(self._buf)


def lossy_channel(frames: Iterable[bytes], drop_probability: float, rng) -> Iterator[bytes]:
    """Drop whole frames i.i.d.; ordering of survivors is preserved."""
    if not 0.0 <= drop_probability <= 1.0:
        raise ValueError("drop probability must be in [0, 1]")
    for frame in frames:
        if rng.random() >= drop_probability:
            yield frame
