"""Parametric side information: band powers, dominant objects, power ratios."""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Sequence

import numpy as np

from . import kernels
from .filterbank import DEC_BINS, ENC_BINS, ENC_SLOTS
from .scene import (
    AZIMUTH_BITS,
    ELEVATION_BITS,
    CorruptStreamError,
    ObjectMetadataFrame,
    QuantizedDirection,
    quantize_direction,
)

NUM_BANDS = 11
RATIO_BITS = 3
RATIO_LEVELS = 1 << RATIO_BITS
OBJECT_INDEX_BITS = 2
DIRECTION_BITS = AZIMUTH_BITS + ELEVATION_BITS
_RATIO_GUARD = 1e-9


@dataclass(frozen=True)
class BandPartition:
    """Parameter band borders over the encoder bins, half-open bands."""

    borders: tuple

    def __post_init__(self):
        b = tuple(int(v) for v in self.borders)
        object.__setattr__(self, "borders", b)
        if len(b) != NUM_BANDS + 1:
            raise ValueError(f"need {NUM_BANDS + 1} band borders, got {len(b)}")
        if b[0] != 0 or b[-1] != ENC_BINS:
            raise ValueError(f"band borders must start at 0 and end at {ENC_BINS}")
        if any(hi <= lo for lo, hi in zip(b, b[1:])):
            raise ValueError("band borders must be strictly increasing")

    @property
    def num_bands(self) -> int:
        return len(self.borders) - 1

    def as_array(self) -> np.ndarray:
        return np.asarray(self.borders, dtype=np.int64)

    def decoder_borders(self) -> np.ndarray:
        """Map the borders onto the 60-bin decoder grid.

        Each border is divided by four and rounded down; a border that would
        collide with its predecessor is pushed up by one bin so every band
        keeps at least one decoder bin.
        """
        enc_per_dec = ENC_BINS // DEC_BINS
        out = [0]
        for b in self.borders[1:-1]:
            out.append(max(b // enc_per_dec, out[-1] + 1))
        if out[-1] >= DEC_BINS:
            raise ValueError("band partition too fine for the decoder grid")
        out.append(DEC_BINS)
        return np.asarray(out, dtype=np.int64)

    @classmethod
    def load(cls, path) -> "BandPartition":
        text = Path(path).read_text()
        return cls.parse(text)

    @classmethod
    def parse(cls, text: str) -> "BandPartition":
        values = []
        for line in text.splitlines():
            line = line.split("#", 1)[0]
            values.extend(int(tok) for tok in line.replace(",", " ").split())
        return cls(tuple(values))

    @classmethod
    def default(cls) -> "BandPartition":
        text = resources.files("paramism.data").joinpath("bands_48k.txt").read_text()
        return cls.parse(text)


@dataclass(frozen=True)
class FrameSideInfo:
    dominant: tuple  # per band (idx1, idx2)
    ratio_index: tuple  # per band
    directions: tuple  # per object QuantizedDirection

    def __post_init__(self):
        dom = tuple((int(a), int(b)) for a, b in self.dominant)
        ratios = tuple(int(r) for r in self.ratio_index)
        dirs = tuple(
            d if isinstance(d, QuantizedDirection) else QuantizedDirection(*d)
            for d in self.directions
        )
        object.__setattr__(self, "dominant", dom)
        object.__setattr__(self, "ratio_index", ratios)
        object.__setattr__(self, "directions", dirs)
        if len(dom) != len(ratios):
            raise ValueError("dominant pairs and ratio indices differ in band count")
        n = len(dirs)
        for a, b in dom:
            if a == b:
                raise CorruptStreamError(f"dominant pair repeats object {a}")
            if not (0 <= a < n and 0 <= b < n):
                raise CorruptStreamError(f"object index out of range for {n} objects")
        for r in ratios:
            if not 0 <= r < RATIO_LEVELS:
                raise CorruptStreamError(f"ratio index {r} does not fit {RATIO_BITS} bits")

    @property
    def num_bands(self) -> int:
        return len(self.ratio_index)

    @property
    def num_objects(self) -> int:
        return len(self.directions)

    @property
    def bit_cost(self) -> int:
        return side_info_bits(self.num_objects, self.num_bands)


def side_info_bits(num_objects: int, num_bands: int = NUM_BANDS) -> int:
    """Bits per frame: object ids (4L), ratios (3L) and directions (13 per object)."""
    return (
        2 * OBJECT_INDEX_BITS * num_bands
        + RATIO_BITS * num_bands
        + DIRECTION_BITS * num_objects
    )


def band_powers(grids, bands: BandPartition) -> np.ndarray:
    """Sum |X_i(k, n)|^2 over all slots and the bins of each band.

    ``grids`` is a sequence (or stacked array) of per-object encoder grids of
    shape ``(slots, bins)``. Returns ``(num_objects, num_bands)``.
    """
    shapes = {np.shape(g) for g in grids}
    if len(shapes) != 1:
        raise ValueError(f"object grids differ in shape: {sorted(shapes)}")
    grid = np.ascontiguousarray(np.asarray(grids, dtype=np.complex128))
    if grid.ndim != 3 or grid.shape[2] != bands.borders[-1]:
        raise ValueError(f"grids of shape {grid.shape} do not match the band partition")
    return kernels.band_powers(grid, bands.as_array())


def select_dominant(powers: Sequence[float]) -> tuple:
    """Indices of the two largest powers; ties go to the lower object index."""
    if len(powers) < 2:
        raise ValueError("need at least two objects")
    order = sorted(range(len(powers)), key=lambda i: (-powers[i], i))
    return order[0], order[1]


def power_ratio(p1: float, p2: float) -> float:
    total = p1 + p2
    return 0.5 if total <= 0.0 else p1 / total


def quantize_ratio(p1: float, p2: float) -> int:
    """3-bit index of r1 = P1 / (P1 + P2), r1 in [0.5, 1]."""
    if p1 < 0.0 or p2 < 0.0:
        raise ValueError("band powers must be non-negative")
    r1 = power_ratio(p1, p2)
    # reconstruction points sit exactly on the floor boundaries; the guard
    # keeps them from rounding into the index below
    idx = math.floor(2.0 * (r1 - 0.5) * (RATIO_LEVELS - 1) + _RATIO_GUARD)
    return min(RATIO_LEVELS - 1, max(0, idx))


def dequantize_ratio(ratio_index: int) -> tuple:
    """Inverse of :func:`quantize_ratio`: returns (r1_hat, r2_hat)."""
    if not 0 <= ratio_index < RATIO_LEVELS:
        raise CorruptStreamError(f"ratio index {ratio_index} out of range")
    r1 = ratio_index / (2.0 * (RATIO_LEVELS - 1)) + 0.5
    return r1, 1.0 - r1


def side_info_from_powers(powers: np.ndarray, directions) -> FrameSideInfo:
    powers = np.asarray(powers, dtype=np.float64)
    if powers.shape[0] != len(directions):
        raise ValueError(
            f"{powers.shape[0]} objects in the band powers but {len(directions)} directions"
        )
    dominant, ratios = [], []
    for l in range(powers.shape[1]):
        col = powers[:, l].tolist()
        i1, i2 = select_dominant(col)
        dominant.append((i1, i2))
        ratios.append(quantize_ratio(col[i1], col[i2]))
    return FrameSideInfo(tuple(dominant), tuple(ratios), tuple(directions))


def build_side_info(grids, bands: BandPartition, metadata) -> FrameSideInfo:
    """Side information of one frame from object grids and directions.

    ``metadata`` holds one :class:`ObjectMetadataFrame` or an already
    quantized direction per object.
    """
    if len(grids) != len(metadata):
        raise ValueError(f"{len(grids)} object grids but {len(metadata)} metadata entries")
    for g in grids:
        if np.shape(g) != (ENC_SLOTS, ENC_BINS):
            raise ValueError(f"encoder grid must be ({ENC_SLOTS}, {ENC_BINS}), got {np.shape(g)}")
    directions = [
        quantize_direction(md) if isinstance(md, ObjectMetadataFrame) else md
        for md in metadata
    ]
    return side_info_from_powers(band_powers(grids, bands), directions)
