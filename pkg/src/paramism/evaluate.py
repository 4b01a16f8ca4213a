"""Objective comparison of a decoded render against the uncoded reference."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import signal

from .filterbank import DEC_BINS, analyze_signal
from .scene import FRAME_LENGTH, SAMPLE_RATE
from .sideinfo import BandPartition

_FLOOR = 1e-20
MAX_LAG = 4 * FRAME_LENGTH


def _db(num, den) -> np.ndarray:
    return 10.0 * np.log10((np.asarray(num) + _FLOOR) / (np.asarray(den) + _FLOOR))


def estimate_delay(decoded: np.ndarray, reference: np.ndarray, max_lag: int = MAX_LAG) -> int:
    """Lag (samples) of ``decoded`` behind ``reference`` from the channel-summed signals."""
    a = np.atleast_2d(decoded).sum(axis=0)
    b = np.atleast_2d(reference).sum(axis=0)
    if not np.any(a) or not np.any(b):
        return 0
    xc = signal.correlate(a, b, mode="full", method="fft")
    lags = signal.correlation_lags(a.size, b.size, mode="full")
    keep = np.abs(lags) <= max_lag
    return int(lags[keep][np.argmax(np.abs(xc[keep]))])


def align(decoded: np.ndarray, reference: np.ndarray, max_lag: int = MAX_LAG) -> tuple:
    """Shift ``decoded`` by the estimated delay and cut both to a common length."""
    d, r = np.atleast_2d(decoded), np.atleast_2d(reference)
    lag = estimate_delay(d, r, max_lag)
    if lag > 0:
        d = d[:, lag:]
    elif lag < 0:
        r = r[:, -lag:]
    n = min(d.shape[1], r.shape[1])
    return d[:, :n], r[:, :n], lag


def band_energies(x: np.ndarray, bands: BandPartition | None = None) -> np.ndarray:
    """(channels, bands) energies on the decoder filterbank grid."""
    bands = bands or BandPartition.default()
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    pad = (-x.shape[1]) % FRAME_LENGTH
    grid = analyze_signal(np.pad(x, ((0, 0), (0, pad))))
    power = np.sum(np.abs(grid) ** 2, axis=1)
    return np.add.reduceat(power, bands.decoder_borders()[:-1], axis=1)


def bin_mask(lo_hz: float, hi_hz: float) -> np.ndarray:
    """Decoder bins whose center lies in [lo_hz, hi_hz]."""
    width = SAMPLE_RATE / 2 / DEC_BINS
    centers = (np.arange(DEC_BINS) + 0.5) * width
    return (centers >= lo_hz) & (centers <= hi_hz)


def energy_fraction(x: np.ndarray, channel: int, bins: np.ndarray | None = None) -> float:
    """Share of energy on ``channel``, optionally restricted to decoder ``bins``."""
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    if bins is None:
        e = np.sum(x * x, axis=1)
    else:
        pad = (-x.shape[1]) % FRAME_LENGTH
        grid = analyze_signal(np.pad(x, ((0, 0), (0, pad))))
        e = np.sum(np.abs(grid[..., bins]) ** 2, axis=(1, 2))
    total = e.sum()
    return float(e[channel] / total) if total > 0 else 0.0


def localization_overlap(dec_energy: np.ndarray, ref_energy: np.ndarray) -> np.ndarray:
    """Per-band overlap of the normalized channel energy distributions, in [0, 1].

    Inputs are (channels, bands). A band silent in both signals scores 1.
    """
    d = dec_energy / np.maximum(dec_energy.sum(axis=0, keepdims=True), _FLOOR)
    r = ref_energy / np.maximum(ref_energy.sum(axis=0, keepdims=True), _FLOOR)
    overlap = np.minimum(d, r).sum(axis=0)
    silent = (dec_energy.sum(axis=0) <= 0) & (ref_energy.sum(axis=0) <= 0)
    return np.clip(np.where(silent, 1.0, overlap), 0.0, 1.0)


@dataclass
class EvalReport:
    band_error_db: list  # [channel][band]
    band_overlap: list  # per band
    localization: float
    broadband_error_db: float
    window_error_db: list = field(default_factory=list)  # per 1 s window
    delay_samples: int = 0
    encode_realtime: float | None = None
    decode_realtime: float | None = None

    def to_json(self, path=None) -> str:
        text = json.dumps(asdict(self), indent=2)
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text + "\n")
        return text


def evaluate(decoded: np.ndarray, reference: np.ndarray, bands: BandPartition | None = None,
             window: int = SAMPLE_RATE, do_align: bool = True) -> EvalReport:
    decoded = np.atleast_2d(np.asarray(decoded, dtype=np.float64))
    reference = np.atleast_2d(np.asarray(reference, dtype=np.float64))
    if decoded.shape[0] != reference.shape[0]:
        raise ValueError(
            f"layout mismatch: {decoded.shape[0]} decoded vs {reference.shape[0]} reference channels"
        )
    lag = 0
    if do_align:
        decoded, reference, lag = align(decoded, reference)
    else:
        n = min(decoded.shape[1], reference.shape[1])
        decoded, reference = decoded[:, :n], reference[:, :n]

    be_d, be_r = band_energies(decoded, bands), band_energies(reference, bands)
    overlap = localization_overlap(be_d, be_r)
    weights = be_r.sum(axis=0) + be_d.sum(axis=0)
    loc = float(np.sum(overlap * weights) / weights.sum()) if weights.sum() > 0 else 1.0

    windows = [
        float(_db(np.sum(decoded[:, i:i + window] ** 2), np.sum(reference[:, i:i + window] ** 2)))
        for i in range(0, decoded.shape[1] - window + 1, window)
    ]
    return EvalReport(
        band_error_db=np.round(_db(be_d, be_r), 6).tolist(),
        band_overlap=np.round(overlap, 6).tolist(),
        localization=loc,
        broadband_error_db=float(_db(np.sum(decoded**2), np.sum(reference**2))),
        window_error_db=windows,
        delay_samples=lag,
    )


def realtime_factor(seconds_audio: float, seconds_wall: float) -> float:
    """Audio duration over processing time (>1 is faster than real time)."""
    return math.inf if seconds_wall <= 0 else seconds_audio / seconds_wall


__all__ = [
    "EvalReport",
    "align",
    "band_energies",
    "bin_mask",
    "energy_fraction",
    "estimate_delay",
    "evaluate",
    "localization_overlap",
    "realtime_factor",
]
