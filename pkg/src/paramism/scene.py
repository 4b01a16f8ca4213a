"""Object metadata, scene configuration and direction quantization."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

SAMPLE_RATE = 48000
FRAME_LENGTH = 960
FRAMES_PER_SECOND = SAMPLE_RATE // FRAME_LENGTH

AZIMUTH_BITS = 7
ELEVATION_BITS = 6
AZIMUTH_LEVELS = 1 << AZIMUTH_BITS
ELEVATION_LEVELS = 1 << ELEVATION_BITS
AZIMUTH_STEP = 360.0 / AZIMUTH_LEVELS
ELEVATION_STEP = 180.0 / (ELEVATION_LEVELS - 1)


class CorruptStreamError(ValueError):
    """Raised when decoded data cannot have been produced by a valid encoder."""


def wrap_azimuth(azimuth_deg: float) -> float:
    """Wrap an azimuth into [-180, 180)."""
    wrapped = math.fmod(azimuth_deg + 180.0, 360.0)
    if wrapped < 0.0:
        wrapped += 360.0
    wrapped -= 180.0
    # fmod can land exactly on +180 for inputs like -540 - tiny
    if wrapped >= 180.0:
        wrapped -= 360.0
    return wrapped


@dataclass(frozen=True)
class ObjectMetadataFrame:
    """Direction of one object for one 20 ms frame.

    Positive azimuth is the left hemisphere, positive elevation is up.
    """

    azimuth_deg: float
    elevation_deg: float

    def __post_init__(self):
        object.__setattr__(self, "azimuth_deg", wrap_azimuth(float(self.azimuth_deg)))
        object.__setattr__(
            self, "elevation_deg", min(90.0, max(-90.0, float(self.elevation_deg)))
        )


@dataclass(frozen=True)
class QuantizedDirection:
    azimuth_index: int
    elevation_index: int

    def __post_init__(self):
        if not 0 <= self.azimuth_index < AZIMUTH_LEVELS:
            raise CorruptStreamError(f"azimuth index {self.azimuth_index} out of range")
        if not 0 <= self.elevation_index < ELEVATION_LEVELS:
            raise CorruptStreamError(
                f"elevation index {self.elevation_index} out of range"
            )


@dataclass(frozen=True)
class SceneConfig:
    num_objects: int
    sample_rate_hz: int = SAMPLE_RATE
    frame_length_samples: int = FRAME_LENGTH

    def __post_init__(self):
        if not 2 <= self.num_objects <= 4:
            raise ValueError(f"num_objects must be in [2, 4], got {self.num_objects}")
        if self.sample_rate_hz != SAMPLE_RATE:
            raise ValueError(f"only {SAMPLE_RATE} Hz is supported")
        if self.frame_length_samples != self.sample_rate_hz // 50:
            raise ValueError("frame length must be 20 ms")


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def quantize_direction(md: ObjectMetadataFrame) -> QuantizedDirection:
    """Uniform 7-bit azimuth / 6-bit elevation quantizer.

    Ties round toward the larger index. The azimuth grid is circular, so
    values just below +180 map onto index 0 (-180).
    """
    az_idx = _round_half_up((md.azimuth_deg + 180.0) / AZIMUTH_STEP) % AZIMUTH_LEVELS
    el_idx = _round_half_up((md.elevation_deg + 90.0) / ELEVATION_STEP)
    el_idx = min(ELEVATION_LEVELS - 1, max(0, el_idx))
    return QuantizedDirection(az_idx, el_idx)


def dequantize_direction(q: QuantizedDirection) -> ObjectMetadataFrame:
    if not isinstance(q, QuantizedDirection):
        q = QuantizedDirection(*q)
    return ObjectMetadataFrame(
        -180.0 + q.azimuth_index * AZIMUTH_STEP,
        -90.0 + q.elevation_index * ELEVATION_STEP,
    )


def azimuth_difference(a: float, b: float) -> float:
    """Smallest signed angular difference a - b in degrees."""
    return wrap_azimuth(a - b)


def read_metadata_csv(path, num_frames: int | None = None) -> list[ObjectMetadataFrame]:
    """Read one object's per-frame directions from ``azimuth_deg,elevation_deg`` rows.

    A non-numeric first row is treated as a header. With ``num_frames`` the
    list is truncated, or padded by holding the last row.
    """
    rows = []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh)):
            if not row or not "".join(row).strip():
                continue
            try:
                az, el = float(row[0]), float(row[1])
            except (ValueError, IndexError):
                if lineno == 0 and not rows:
                    continue
                raise ValueError(f"{path}:{lineno + 1}: expected azimuth_deg,elevation_deg")
            rows.append(ObjectMetadataFrame(az, el))
    if not rows:
        raise ValueError(f"{path}: no metadata rows")
    if num_frames is not None:
        if len(rows) >= num_frames:
            rows = rows[:num_frames]
        else:
            rows = rows + [rows[-1]] * (num_frames - len(rows))
    return rows


def write_metadata_csv(path, frames) -> None:
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["azimuth_deg", "elevation_deg"])
        for md in frames:
            writer.writerow([f"{md.azimuth_deg:.6f}", f"{md.elevation_deg:.6f}"])


def num_frames_for(num_samples: int) -> int:
    return max(1, -(-num_samples // FRAME_LENGTH))


def frame_signal(x: np.ndarray, num_frames: int) -> np.ndarray:
    """Zero-pad the last axis to ``num_frames`` whole frames."""
    total = num_frames * FRAME_LENGTH
    pad = total - x.shape[-1]
    if pad < 0:
        raise ValueError("signal longer than the requested number of frames")
    widths = [(0, 0)] * (x.ndim - 1) + [(0, pad)]
    return np.pad(x, widths)
