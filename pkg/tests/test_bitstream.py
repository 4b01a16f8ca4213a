import struct

import numpy as np
import pytest

from paramism.bitstream import (
    HEADER_SIZE,
    BitReader,
    BitWriter,
    StreamHeader,
    pack_frame,
    pack_side_info,
    pcm_to_float,
    quantize_pcm,
    read_stream,
    side_info_bitrate,
    side_info_bytes,
    unpack_frame,
    unpack_side_info,
    write_stream,
)
from paramism.scene import CorruptStreamError, QuantizedDirection
from paramism.sideinfo import BandPartition, FrameSideInfo

BANDS = BandPartition.default()


def random_side(rng, n_obj=4, n_bands=11):
    dom = [tuple(int(v) for v in rng.choice(n_obj, 2, replace=False)) for _ in range(n_bands)]
    ratios = [int(v) for v in rng.integers(0, 8, n_bands)]
    dirs = [QuantizedDirection(int(rng.integers(128)), int(rng.integers(64))) for _ in range(n_obj)]
    return FrameSideInfo(tuple(dom), tuple(ratios), tuple(dirs))


def naive_pack(side):
    # string-of-bits oracle, MSB first
    bits = "".join(f"{a:02b}{b:02b}" for a, b in side.dominant)
    bits += "".join(f"{r:03b}" for r in side.ratio_index)
    bits += "".join(f"{d.azimuth_index:07b}{d.elevation_index:06b}" for d in side.directions)
    bits += "0" * (-len(bits) % 8)
    return bytes(int(bits[i:i + 8], 2) for i in range(0, len(bits), 8))


def test_side_sizes_and_rates():
    assert side_info_bytes(4, 11) == 17
    assert side_info_bytes(3, 11) == 15
    assert side_info_bitrate(4, 11, 50) == 6450
    assert side_info_bitrate(3, 11, 50) == 5800
    assert side_info_bitrate(4, 0, 50) == 13 * 4 * 50


def test_zero_side_info_packs_to_zero_bytes():
    side = FrameSideInfo(((0, 1),) * 11, (0,) * 11, (QuantizedDirection(0, 0),) * 4)
    # (0, 1) has a single set bit per band, so use the field-level oracle
    assert pack_side_info(side) == naive_pack(side)
    w = BitWriter()
    for _ in range(129):
        w.write(0, 1)
    assert w.to_bytes() == bytes(17)


@pytest.mark.parametrize("n_obj", [2, 3, 4])
def test_pack_matches_bit_string_oracle(rng, n_obj):
    for _ in range(200):
        side = random_side(rng, n_obj)
        packed = pack_side_info(side)
        assert packed == naive_pack(side)
        assert unpack_side_info(packed, n_obj, 11) == side


def test_frame_round_trip_1000(rng):
    header = StreamHeader(4, BANDS.borders, 1)
    for _ in range(1000):
        side = random_side(rng)
        ints = rng.integers(-(1 << 23), 1 << 23, (2, 960))
        data = pack_frame(side, ints).to_bytes()
        assert len(data) == header.frame_size
        s2, d2 = unpack_frame(data, header)
        assert s2 == side and np.array_equal(d2, ints)


def test_pcm16_round_trip(rng):
    header = StreamHeader(3, BANDS.borders, 1, downmix_bits=16)
    side = random_side(rng, 3)
    ints = rng.integers(-(1 << 15), 1 << 15, (2, 960))
    s2, d2 = unpack_frame(pack_frame(side, ints, 16).to_bytes(), header)
    assert np.array_equal(d2, ints)
    with pytest.raises(ValueError):
        pack_frame(side, ints * 4, 16)


def test_quantize_pcm_saturates():
    q = quantize_pcm(np.array([-2.0, -1.0, 0.0, 0.5, 1.0]), 16)
    assert q.tolist() == [-32768, -32768, 0, 16384, 32767]
    assert pcm_to_float(q, 16)[3] == 0.5


def test_truncated_frame_reports_offset(rng):
    header = StreamHeader(4, BANDS.borders, 1)
    data = pack_frame(random_side(rng), np.zeros((2, 960), int)).to_bytes()
    with pytest.raises(CorruptStreamError, match="byte 40"):
        unpack_frame(data[:-1], header, offset=40)


def test_repeated_dominant_index_is_corrupt():
    bits = BitWriter()
    for _ in range(11):
        bits.write(2, 2)
        bits.write(2, 2)
    for _ in range(11):
        bits.write(0, 3)
    for _ in range(4):
        bits.write(0, 13)
    with pytest.raises(CorruptStreamError):
        unpack_side_info(bits.to_bytes(), 4, 11)


def test_bit_writer_overflow_and_reader_underflow():
    with pytest.raises(ValueError):
        BitWriter().write(4, 2)
    r = BitReader(b"\x80")
    assert r.read(1) == 1
    with pytest.raises(CorruptStreamError):
        r.read(8)


def test_header_layout():
    h = StreamHeader(4, BANDS.borders, 7)
    raw = h.pack()
    assert len(raw) == HEADER_SIZE == 40
    assert raw[:4] == b"PISM"
    assert StreamHeader.unpack(raw) == h


def test_header_rejections():
    raw = bytearray(StreamHeader(4, BANDS.borders, 0).pack())
    bad_magic = b"XISM" + bytes(raw[4:])
    with pytest.raises(CorruptStreamError):
        StreamHeader.unpack(bad_magic)
    bad_version = bytes(raw[:4]) + b"\x09" + bytes(raw[5:])
    with pytest.raises(CorruptStreamError):
        StreamHeader.unpack(bad_version)
    decreasing = list(BANDS.borders)
    decreasing[3], decreasing[4] = decreasing[4], decreasing[3]
    raw2 = bytearray(raw)
    struct.pack_into("<12H", raw2, 12, *decreasing)
    with pytest.raises(CorruptStreamError, match="band borders"):
        StreamHeader.unpack(bytes(raw2))
    with pytest.raises(CorruptStreamError):
        StreamHeader.unpack(raw[:20])


def test_stream_file_round_trip_and_size(tmp_path, rng):
    frames = [(random_side(rng, 3), rng.integers(-1000, 1000, (2, 960))) for _ in range(5)]
    path = tmp_path / "x.pism"
    header = write_stream(path, 3, BANDS, frames)
    assert path.stat().st_size == header.file_size == 40 + 5 * (15 + 2 * 960 * 3)
    h2, back = read_stream(path)
    assert h2.frame_count == 5
    for (s, d), (s2, d2) in zip(frames, back):
        assert s == s2 and np.array_equal(d, d2)


def test_truncated_file(tmp_path, rng):
    frames = [(random_side(rng), np.zeros((2, 960), int)) for _ in range(3)]
    path = tmp_path / "x.pism"
    header = write_stream(path, 4, BANDS, frames)
    path.write_bytes(path.read_bytes()[:-1])
    with pytest.raises(CorruptStreamError, match=f"byte {40 + 2 * header.frame_size}"):
        read_stream(path)
    path.write_bytes(path.read_bytes() + b"\x00\x00")
    with pytest.raises(CorruptStreamError):
        read_stream(path)
