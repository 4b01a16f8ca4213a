"""Cardioid stereo downmix with inter-frame smoothing and energy compensation."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .scene import wrap_azimuth

COMPENSATION_MIN = 1.0
COMPENSATION_MAX = 2.0
COMPENSATION_SMOOTHING = 0.8


def cardioid_gains(azimuth_deg: float) -> tuple:
    """Left/right weights of cardioids pointing at +90 and -90 degrees."""
    theta = math.radians(wrap_azimuth(azimuth_deg))
    w_left = 0.5 + 0.5 * math.cos(theta - math.pi / 2)
    # the identity w_left + w_right = 1 is exact by construction
    return w_left, 1.0 - w_left


@dataclass(frozen=True)
class DownmixGains:
    left: np.ndarray
    right: np.ndarray

    @classmethod
    def from_azimuths(cls, azimuths) -> "DownmixGains":
        pairs = [cardioid_gains(a) for a in azimuths]
        return cls(np.array([p[0] for p in pairs]), np.array([p[1] for p in pairs]))

    def __len__(self):
        return len(self.left)


def mix_frame(objects, gains: DownmixGains, prev_gains: DownmixGains | None = None) -> np.ndarray:
    """Downmix ``(num_objects, 960)`` samples into ``(2, 960)``.

    Per-sample gains ramp linearly from ``prev_gains`` (reached just before
    the frame) to ``gains`` (reached on the last sample).
    """
    x = np.asarray(objects, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError("objects must be a (num_objects, samples) array")
    if prev_gains is None:
        prev_gains = gains
    if not (x.shape[0] == len(gains) == len(prev_gains)):
        raise ValueError(
            f"{x.shape[0]} objects but {len(gains)}/{len(prev_gains)} gain entries"
        )
    n = x.shape[1]
    ramp = (np.arange(n) + 1.0) / n
    out = np.empty((2, n))
    for ch, (cur, prev) in enumerate(((gains.left, prev_gains.left), (gains.right, prev_gains.right))):
        w = prev[:, None] + (cur - prev)[:, None] * ramp[None, :]
        out[ch] = np.sum(w * x, axis=0)
    return out


def compensation_gain(powers: np.ndarray, dominant) -> float:
    """Broadband gain restoring total object power relative to the dominant pair.

    Unclamped and unsmoothed; 1 for an all-zero frame.
    """
    powers = np.asarray(powers, dtype=np.float64)
    total = float(powers.sum())
    dom = sum(powers[i1, l] + powers[i2, l] for l, (i1, i2) in enumerate(dominant))
    if total <= 0.0 or dom <= 0.0:
        return 1.0
    return math.sqrt(total / dom)


class EnergyCompensator:
    """Stateful broadband energy compensation, one instance per stream."""

    def __init__(self, smoothing: float = COMPENSATION_SMOOTHING):
        self.smoothing = smoothing
        self.gain = 1.0

    def update(self, powers, dominant) -> tuple:
        """Advance one frame; returns (previous smoothed gain, new smoothed gain)."""
        g = compensation_gain(powers, dominant)
        g = min(COMPENSATION_MAX, max(COMPENSATION_MIN, g))
        prev = self.gain
        self.gain = self.smoothing * prev + (1.0 - self.smoothing) * g
        return prev, self.gain

    def apply(self, dmx: np.ndarray, powers, dominant) -> np.ndarray:
        prev, cur = self.update(powers, dominant)
        n = dmx.shape[-1]
        ramp = prev + (cur - prev) * (np.arange(n) + 1.0) / n
        return dmx * ramp


def energy_compensation(dmx, powers, side, state: EnergyCompensator | None = None) -> np.ndarray:
    """Apply the smoothed compensation gain equally to both downmix channels."""
    state = state if state is not None else EnergyCompensator()
    return state.apply(np.asarray(dmx, dtype=np.float64), powers, side.dominant)


class Downmixer:
    """Per-stream downmix state: previous gains and the compensation filter."""

    def __init__(self, num_objects: int, compensate: bool = True):
        self.num_objects = num_objects
        self.compensate = compensate
        self.prev_gains: DownmixGains | None = None
        self.compensator = EnergyCompensator()

    def process(self, objects, azimuths, powers=None, side=None) -> np.ndarray:
        gains = DownmixGains.from_azimuths(azimuths)
        dmx = mix_frame(objects, gains, self.prev_gains)
        self.prev_gains = gains
        if self.compensate and powers is not None:
            dmx = self.compensator.apply(dmx, powers, side.dominant)
        return dmx

