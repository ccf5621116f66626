"""Host-side acquisition of the attachable magnetic-encoder set.

The sensors are 12-bit absolute angle encoders read by a microcontroller
over an I2C multiplexer; the host sees fixed 6-byte binary frames:

    [0xA5][channel u8][raw u16 LE][seq u8][checksum u8]

checksum = XOR of bytes 0..4. The magic byte makes resynchronization after
a dropped byte trivial: scan forward to the next 0xA5 and retry.
"""

from __future__ import annotations

import csv
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

from .hand_model import Finger, JointId, JointKind, joint

MAGIC = 0xA5
FRAME_SIZE = 6
COUNTS_PER_REV = 4096
DEG_PER_COUNT = 360.0 / COUNTS_PER_REV

# Instrumented joints (index finger + thumb + index abduction), one
# multiplexer channel each.
DEFAULT_CHANNEL_MAP: dict[int, JointId] = {
    0: joint(Finger.INDEX, JointKind.ABDUCTION),
    1: joint(Finger.INDEX, JointKind.MCP),
    2: joint(Finger.INDEX, JointKind.PIP),
    3: joint(Finger.INDEX, JointKind.DIP),
    4: joint(Finger.THUMB, JointKind.CMC),
    5: joint(Finger.THUMB, JointKind.MCP),
    6: joint(Finger.THUMB, JointKind.IP),
}


class FramingError(ValueError):
    """Bad magic byte; caller should resynchronize."""


class ChecksumError(ValueError):
    """Frame failed its XOR checksum."""


class RangeError(ValueError):
    """Raw count outside the 12-bit range."""


@dataclass(frozen=True)
class EncoderFrame:
    channel: int
    raw: int
    seq: int
    timestamp_ms: float = 0.0

    def __post_init__(self):
        if not 0 <= self.channel < 8:
            raise RangeError(f"channel {self.channel} out of range 0..7")
        if not 0 <= self.raw < COUNTS_PER_REV:
            raise RangeError(f"raw {self.raw} out of 12-bit range")
        if not 0 <= self.seq < 256:
            raise ValueError(f"seq {self.seq} out of range 0..255")


@dataclass(frozen=True)
class EncoderCalibration:
    offset: float
    direction: int
    joint: JointId

    def __post_init__(self):
        if self.direction not in (+1, -1):
            raise ValueError("direction must be +1 or -1")


def _checksum(data: bytes) -> int:
    x = 0
    for b in data:
        x ^= b
    return x


def encode_frame(frame: EncoderFrame) -> bytes:
    head = struct.pack("<BBHB", MAGIC, frame.channel, frame.raw, frame.seq)
    return head + bytes([_checksum(head)])


def decode_frame(data: bytes) -> EncoderFrame:
    if len(data) != FRAME_SIZE:
        raise FramingError(f"expected {FRAME_SIZE} bytes, got {len(data)}")
    if data[0] != MAGIC:
        raise FramingError(f"bad magic 0x{data[0]:02X}")
    if _checksum(data[:5]) != data[5]:
        raise ChecksumError("checksum mismatch")
    _, channel, raw, seq = struct.unpack("<BBHB", data[:5])
    return EncoderFrame(channel=channel, raw=raw, seq=seq)


def raw_to_degrees(raw: int) -> float:
    if not 0 <= raw < COUNTS_PER_REV:
        raise RangeError(f"raw {raw} out of 12-bit range")
    return raw * DEG_PER_COUNT


def unwrap(prev: float, deg: float) -> float:
    """Continuous angle closest to `prev` that is congruent to `deg` mod 360."""
    delta = (deg - prev) % 360.0
    if delta > 180.0:
        delta -= 360.0
    return prev + delta


def apply_encoder_calibration(
    deg: float, prev: float | None, cal: EncoderCalibration
) -> float:
    """Calibrated continuous joint angle from a raw encoder angle.

    `prev` is the previous *unwrapped raw* angle (degrees), or None for the
    first sample of a stream.
    """
    unwrapped = deg if prev is None else unwrap(prev, deg)
    return cal.direction * unwrapped - cal.offset


class FrameScanner:
    """Incremental parser: feed bytes, collect valid frames.

    Corrupt or unsynchronized bytes are skipped by scanning to the next
    magic byte; malformed input never raises.
    """

    def __init__(self):
        self._buf = bytearray()
        self.dropped_bytes = 0
        self.bad_checksums = 0

    def feed(self, data: bytes) -> list[EncoderFrame]:
        self._buf.extend(data)
        frames = []
        while True:
            start = self._buf.find(bytes([MAGIC]))
            if start < 0:
                self.dropped_bytes += len(self._buf)
                self._buf.clear()
                break
            self.dropped_bytes += start
            del self._buf[:start]
            if len(self._buf) < FRAME_SIZE:
                break
            candidate = bytes(self._buf[:FRAME_SIZE])
            try:
                frames.append(decode_frame(candidate))
                del self._buf[:FRAME_SIZE]
            except (ChecksumError, RangeError):
                self.bad_checksums += 1
                del self._buf[:1]  # resync past this magic byte
        return frames


def read_replay_file(path: str | Path) -> Iterator[EncoderFrame]:
    """Frames from a replay file (raw frame concatenation)."""
    scanner = FrameScanner()
    with open(path, "rb") as f:
        while chunk := f.read(4096):
            yield from scanner.feed(chunk)


def write_replay_file(frames: Iterable[EncoderFrame], path: str | Path) -> None:
    with open(path, "wb") as f:
        for frame in frames:
            f.write(encode_frame(frame))


def export_csv(
    frames: Iterable[EncoderFrame],
    path: str | Path,
    calibrations: dict[int, EncoderCalibration] | None = None,
) -> None:
    """CSV export: timestamp_ms, channel, raw, degrees, calibrated."""
    prev: dict[int, float] = {}
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["timestamp_ms", "channel", "raw", "degrees", "calibrated"])
        for frame in frames:
            deg = raw_to_degrees(frame.raw)
            cal = (calibrations or {}).get(frame.channel)
            if cal is None:
                calibrated = ""
            else:
                unwrapped = (
                    deg
                    if frame.channel not in prev
                    else unwrap(prev[frame.channel], deg)
                )
                prev[frame.channel] = unwrapped
                calibrated = f"{cal.direction * unwrapped - cal.offset:.6f}"
            w.writerow(
                [f"{frame.timestamp_ms:.3f}", frame.channel, frame.raw,
                 f"{deg:.6f}", calibrated]
            )
