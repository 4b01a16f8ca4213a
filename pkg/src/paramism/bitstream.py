"""The ``.pism`` container: header, packed side information and PCM downmix.

Layout (all integers little-endian)::

    header   magic "PISM" | version u8 | num_objects u8 | num_bands u8 |
             downmix_bits u8 | sample_rate u32 | 12 x band border u16 |
             frame_count u32                                  (40 bytes)
    frame    side bits, MSB first, zero padded to a byte boundary
             | interleaved L/R PCM, 2 x 960 samples of 16 or 24 bits

Side bits per frame, in order: for every band ``(idx1, idx2)`` with 2 bits
each, then every band's 3-bit ratio index, then every object's 7-bit
azimuth and 6-bit elevation index.
"""

from __future__ import annotations

import io
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import BinaryIO, Iterator

import numpy as np

from .scene import (
    AZIMUTH_BITS,
    ELEVATION_BITS,
    FRAME_LENGTH,
    FRAMES_PER_SECOND,
    SAMPLE_RATE,
    CorruptStreamError,
    QuantizedDirection,
)
from .sideinfo import (
    OBJECT_INDEX_BITS,
    RATIO_BITS,
    BandPartition,
    FrameSideInfo,
    side_info_bits,
)

MAGIC = b"PISM"
VERSION = 1
HEADER_FORMAT = "<4sBBBBI12HI"
HEADER_SIZE = struct.calcsize(HEADER_FORMAT)
SUPPORTED_PCM_BITS = (16, 24)


class BitWriter:
    def __init__(self):
        self._value = 0
        self._nbits = 0

    def write(self, value: int, nbits: int):
        if value < 0 or value >> nbits:
            raise ValueError(f"value {value} does not fit in {nbits} bits")
        self._value = (self._value << nbits) | value
        self._nbits += nbits

    @property
    def bit_length(self) -> int:
        return self._nbits

    def to_bytes(self) -> bytes:
        nbytes = -(-self._nbits // 8)
        pad = nbytes * 8 - self._nbits
        return (self._value << pad).to_bytes(nbytes, "big")


class BitReader:
    def __init__(self, data: bytes):
        self._value = int.from_bytes(data, "big")
        self._remaining = len(data) * 8

    def read(self, nbits: int) -> int:
        if nbits > self._remaining:
            raise CorruptStreamError("side information ends early")
        self._remaining -= nbits
        return (self._value >> self._remaining) & ((1 << nbits) - 1)


def side_info_bytes(num_objects: int, num_bands: int) -> int:
    return -(-side_info_bits(num_objects, num_bands) // 8)


def side_info_bitrate(num_objects: int, num_bands: int = 11, frame_rate: int = FRAMES_PER_SECOND) -> int:
    """Side information rate in bit/s."""
    return side_info_bits(num_objects, num_bands) * frame_rate


def pack_side_info(side: FrameSideInfo) -> bytes:
    w = BitWriter()
    for i1, i2 in side.dominant:
        w.write(i1, OBJECT_INDEX_BITS)
        w.write(i2, OBJECT_INDEX_BITS)
    for r in side.ratio_index:
        w.write(r, RATIO_BITS)
    for d in side.directions:
        w.write(d.azimuth_index, AZIMUTH_BITS)
        w.write(d.elevation_index, ELEVATION_BITS)
    assert w.bit_length == side.bit_cost
    return w.to_bytes()


def unpack_side_info(data: bytes, num_objects: int, num_bands: int) -> FrameSideInfo:
    r = BitReader(data)
    dominant = [(r.read(OBJECT_INDEX_BITS), r.read(OBJECT_INDEX_BITS)) for _ in range(num_bands)]
    ratios = [r.read(RATIO_BITS) for _ in range(num_bands)]
    directions = [
        QuantizedDirection(r.read(AZIMUTH_BITS), r.read(ELEVATION_BITS))
        for _ in range(num_objects)
    ]
    # FrameSideInfo rejects repeated or out-of-range object indices
    return FrameSideInfo(tuple(dominant), tuple(ratios), tuple(directions))


def quantize_pcm(samples, bits: int = 24) -> np.ndarray:
    """Round float samples in [-1, 1) to signed integers, saturating."""
    scale = float(1 << (bits - 1))
    q = np.round(np.asarray(samples, dtype=np.float64) * scale)
    return np.clip(q, -scale, scale - 1).astype(np.int32)


def pcm_to_float(ints, bits: int = 24) -> np.ndarray:
    return np.asarray(ints, dtype=np.float64) / float(1 << (bits - 1))


def _encode_pcm(ints: np.ndarray, bits: int) -> bytes:
    inter = np.ascontiguousarray(ints.T).reshape(-1).astype("<i4")
    if bits == 16:
        return inter.astype("<i2").tobytes()
    raw = inter.view(np.uint8).reshape(-1, 4)[:, :3]
    return raw.tobytes()


def _decode_pcm(data: bytes, bits: int) -> np.ndarray:
    if bits == 16:
        inter = np.frombuffer(data, dtype="<i2").astype(np.int32)
    else:
        raw = np.frombuffer(data, dtype=np.uint8).reshape(-1, 3).astype(np.int32)
        inter = raw[:, 0] | (raw[:, 1] << 8) | (raw[:, 2] << 16)
        inter = np.where(inter >= 1 << 23, inter - (1 << 24), inter)
    return inter.reshape(-1, 2).T.copy()


@dataclass(frozen=True)
class StreamHeader:
    num_objects: int
    band_borders: tuple
    frame_count: int
    sample_rate: int = SAMPLE_RATE
    downmix_bits: int = 24
    version: int = VERSION

    def __post_init__(self):
        if self.version != VERSION:
            raise CorruptStreamError(f"unsupported stream version {self.version}")
        if not 2 <= self.num_objects <= 4:
            raise CorruptStreamError(f"invalid object count {self.num_objects}")
        if self.sample_rate != SAMPLE_RATE:
            raise CorruptStreamError(f"unsupported sample rate {self.sample_rate}")
        if self.downmix_bits not in SUPPORTED_PCM_BITS:
            raise CorruptStreamError(f"unsupported PCM width {self.downmix_bits}")
        try:
            BandPartition(tuple(self.band_borders))
        except ValueError as exc:
            raise CorruptStreamError(f"bad band borders: {exc}") from None

    @property
    def num_bands(self) -> int:
        return len(self.band_borders) - 1

    @property
    def bands(self) -> BandPartition:
        return BandPartition(tuple(self.band_borders))

    @property
    def side_bytes(self) -> int:
        return side_info_bytes(self.num_objects, self.num_bands)

    @property
    def frame_size(self) -> int:
        return self.side_bytes + 2 * FRAME_LENGTH * (self.downmix_bits // 8)

    @property
    def file_size(self) -> int:
        return HEADER_SIZE + self.frame_count * self.frame_size

    def pack(self) -> bytes:
        return struct.pack(
            HEADER_FORMAT,
            MAGIC,
            self.version,
            self.num_objects,
            self.num_bands,
            self.downmix_bits,
            self.sample_rate,
            *self.band_borders,
            self.frame_count,
        )

    @classmethod
    def unpack(cls, data: bytes) -> "StreamHeader":
        if len(data) < HEADER_SIZE:
            raise CorruptStreamError(f"header truncated at byte {len(data)}")
        fields = struct.unpack(HEADER_FORMAT, data[:HEADER_SIZE])
        magic, version, nobj, nbands, bits, rate = fields[:6]
        borders, count = fields[6:18], fields[18]
        if magic != MAGIC:
            raise CorruptStreamError(f"bad magic {magic!r}")
        if nbands != len(borders) - 1:
            raise CorruptStreamError(f"header declares {nbands} bands, expected {len(borders) - 1}")
        return cls(nobj, tuple(borders), count, rate, bits, version)


@dataclass(frozen=True)
class BitstreamFrame:
    side_bits: bytes
    downmix_payload: bytes

    def to_bytes(self) -> bytes:
        return self.side_bits + self.downmix_payload


def pack_frame(side: FrameSideInfo, dmx_ints: np.ndarray, downmix_bits: int = 24) -> BitstreamFrame:
    """Serialize one frame; ``dmx_ints`` are (2, 960) PCM integers."""
    dmx_ints = np.asarray(dmx_ints)
    if dmx_ints.shape != (2, FRAME_LENGTH):
        raise ValueError(f"downmix must be (2, {FRAME_LENGTH}), got {dmx_ints.shape}")
    lim = 1 << (downmix_bits - 1)
    if dmx_ints.min(initial=0) < -lim or dmx_ints.max(initial=0) >= lim:
        raise ValueError(f"downmix samples overflow {downmix_bits} bits")
    return BitstreamFrame(pack_side_info(side), _encode_pcm(dmx_ints, downmix_bits))


def unpack_frame(data: bytes, header: StreamHeader, offset: int = 0) -> tuple:
    """Parse one frame into (FrameSideInfo, (2, 960) PCM integers).

    ``offset`` is only used to report where a truncated frame started.
    """
    if len(data) < header.frame_size:
        raise CorruptStreamError(
            f"frame at byte {offset} truncated: {len(data)} of {header.frame_size} bytes "
            f"(stream ends at byte {offset + len(data)})"
        )
    side = unpack_side_info(data[:header.side_bytes], header.num_objects, header.num_bands)
    dmx = _decode_pcm(data[header.side_bytes:header.frame_size], header.downmix_bits)
    return side, dmx


class StreamWriter:
    """Write a ``.pism`` stream; the frame count is patched in on close."""

    def __init__(self, fh: BinaryIO, num_objects: int, bands: BandPartition, downmix_bits: int = 24):
        self._fh = fh
        self.header = StreamHeader(num_objects, bands.borders, 0, downmix_bits=downmix_bits)
        self._start = fh.tell()
        fh.write(self.header.pack())
        self.frame_count = 0

    def write_frame(self, side: FrameSideInfo, dmx_ints: np.ndarray):
        if side.num_objects != self.header.num_objects or side.num_bands != self.header.num_bands:
            raise ValueError("frame does not match the stream header")
        self._fh.write(pack_frame(side, dmx_ints, self.header.downmix_bits).to_bytes())
        self.frame_count += 1

    def close(self):
        end = self._fh.tell()
        h = self.header
        self.header = StreamHeader(
            h.num_objects, h.band_borders, self.frame_count, h.sample_rate, h.downmix_bits
        )
        self._fh.seek(self._start)
        self._fh.write(self.header.pack())
        self._fh.seek(end)


def read_header(fh: BinaryIO) -> StreamHeader:
    return StreamHeader.unpack(fh.read(HEADER_SIZE))


def iter_frames(fh: BinaryIO, header: StreamHeader) -> Iterator[tuple]:
    offset = HEADER_SIZE
    for _ in range(header.frame_count):
        data = fh.read(header.frame_size)
        yield unpack_frame(data, header, offset)
        offset += len(data)


def write_stream(path, num_objects: int, bands: BandPartition, frames, downmix_bits: int = 24) -> StreamHeader:
    """Write ``(side, dmx_ints)`` pairs to ``path``."""
    with open(path, "wb") as fh:
        writer = StreamWriter(fh, num_objects, bands, downmix_bits)
        for side, dmx in frames:
            writer.write_frame(side, dmx)
        writer.close()
        return writer.header


def read_stream(path) -> tuple:
    """Load a whole stream; returns (header, list of (side, dmx_ints)).

    The file is validated as a whole before any frame is returned.
    """
    data = Path(path).read_bytes()
    header = StreamHeader.unpack(data)
    if len(data) < header.file_size:
        # surface the precise offset of the first incomplete frame
        fh = io.BytesIO(data[HEADER_SIZE:])
        list(iter_frames(fh, header))
    if len(data) != header.file_size:
        raise CorruptStreamError(
            f"stream is {len(data)} bytes, header implies {header.file_size}"
        )
    frames = list(iter_frames(io.BytesIO(data[HEADER_SIZE:]), header))
    return header, frames
