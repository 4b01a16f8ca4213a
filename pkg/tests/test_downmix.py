import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from paramism.downmix import (
    Downmixer,
    DownmixGains,
    EnergyCompensator,
    cardioid_gains,
    compensation_gain,
    energy_compensation,
    mix_frame,
)
from paramism.scene import QuantizedDirection
from paramism.sideinfo import FrameSideInfo


@pytest.mark.parametrize("az, expected", [(90, (1.0, 0.0)), (-90, (0.0, 1.0)), (0, (0.5, 0.5))])
def test_cardioid_examples(az, expected):
    assert cardioid_gains(az) == pytest.approx(expected, abs=1e-15)


@given(st.floats(-1e4, 1e4, allow_nan=False))
def test_cardioid_sum_and_range(az):
    wl, wr = cardioid_gains(az)
    assert abs(wl + wr - 1.0) <= 1e-12
    assert 0.0 <= wl <= 1.0 and 0.0 <= wr <= 1.0


@given(st.floats(1e-3, 180 - 1e-3))
def test_left_hemisphere_favours_left(az):
    wl, wr = cardioid_gains(az)
    assert wl > wr
    wl, wr = cardioid_gains(-az)
    assert wr > wl


def test_single_object_hard_left(rng):
    x = rng.standard_normal((1, 960))
    g = DownmixGains.from_azimuths([90.0])
    out = mix_frame(x, g, g)
    assert np.array_equal(out[0], x[0]) and not np.any(out[1])


def test_two_objects_at_opposite_sides(rng):
    s = rng.standard_normal(960)
    out = mix_frame(np.stack([s, s]), DownmixGains.from_azimuths([90.0, -90.0]))
    assert np.allclose(out[0], s) and np.allclose(out[1], s)


def test_gain_ramp_is_linear():
    x = np.ones((1, 960))
    out = mix_frame(x, DownmixGains.from_azimuths([90.0]), DownmixGains.from_azimuths([-90.0]))
    steps = np.diff(out[0])
    assert np.allclose(steps, 1 / 960)
    assert out[0, -1] == pytest.approx(1.0)
    assert np.max(np.abs(steps)) <= 1 / 960 + 1e-15


def test_mix_frame_linear(rng):
    a, b = rng.standard_normal((3, 960)), rng.standard_normal((3, 960))
    g = DownmixGains.from_azimuths([10.0, -70.0, 150.0])
    assert np.allclose(mix_frame(2 * a + b, g), 2 * mix_frame(a, g) + mix_frame(b, g))


def test_mix_frame_count_mismatch(rng):
    with pytest.raises(ValueError):
        mix_frame(rng.standard_normal((3, 960)), DownmixGains.from_azimuths([0.0, 1.0]))


def test_frame_boundary_continuity(rng):
    # constant metadata + a slow sine: no jump at the boundary beyond in-frame steps
    t = np.arange(960 * 3)
    x = np.sin(2 * np.pi * 50 * t / 48000)[None]
    dm = Downmixer(1, compensate=False)
    y = np.concatenate([dm.process(x[:, i:i + 960], [30.0]) for i in range(0, 2880, 960)], axis=1)
    d = np.abs(np.diff(y, axis=1))
    assert d[:, 959].max() <= d.max() + 1e-12


def _side(dominant):
    return FrameSideInfo(tuple(dominant), (0,) * len(dominant), (QuantizedDirection(0, 0),) * 4)


def test_compensation_examples():
    two = np.array([[1.0, 2.0], [3.0, 0.5], [0.0, 0.0], [0.0, 0.0]])
    assert compensation_gain(two, [(1, 0), (0, 1)]) == 1.0
    equal = np.ones((4, 11))
    assert compensation_gain(equal, [(0, 1)] * 11) == pytest.approx(math.sqrt(2))
    assert compensation_gain(np.zeros((4, 11)), [(0, 1)] * 11) == 1.0


def test_compensator_clamps_and_smooths():
    comp = EnergyCompensator()
    powers = np.zeros((4, 11))
    powers[:, 0] = 1.0  # 4 equal objects in one band: raw gain sqrt(2)
    prev, cur = comp.update(powers, [(0, 1)] * 11)
    assert prev == 1.0
    assert cur == pytest.approx(0.8 + 0.2 * math.sqrt(2))
    many = np.zeros((4, 11))
    many[:, 0] = [1, 1, 100, 100]
    comp = EnergyCompensator()
    for _ in range(200):
        comp.update(many, [(0, 1)] * 11)
    assert comp.gain == pytest.approx(2.0)  # clamp at the top


def test_energy_compensation_applies_equally(rng):
    dmx = rng.standard_normal((2, 960))
    powers = np.ones((4, 11))
    out = energy_compensation(dmx, powers, _side([(0, 1)] * 11))
    ratio = out / dmx
    assert np.allclose(ratio[0], ratio[1])
    assert ratio[0, -1] == pytest.approx(0.8 + 0.2 * math.sqrt(2))


def test_silent_frame_gain_is_unity():
    out = energy_compensation(np.ones((2, 960)), np.zeros((4, 11)), _side([(0, 1)] * 11))
    assert np.allclose(out, 1.0)
