"""Time-frequency transforms.

Two banks with the tile geometries used by the codec:

* encoder: oddly stacked modified DFT, 480-sample sine window, hop 240,
  giving 4 slots x 240 bins (100 Hz) per 20 ms frame;
* decoder: oddly stacked complex-modulated bank, 600-tap prototype, hop 60,
  giving 16 slots x 60 bins (400 Hz) per frame, with a matching synthesis
  bank.

Bin ``k`` of either bank is centered at ``(k + 0.5) * fs / (2 * bins)``.
Arrays are laid out ``(..., slot, bin)``. Every analyzer/synthesizer keeps
per-channel history, so one instance serves exactly one set of streams.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .scene import FRAME_LENGTH

ENC_HOP = 240
ENC_BINS = 240
ENC_SLOTS = FRAME_LENGTH // ENC_HOP
ENC_WINDOW = 2 * ENC_HOP

DEC_HOP = 60
DEC_BINS = 60
DEC_SLOTS = FRAME_LENGTH // DEC_HOP
DEC_PROTOTYPE_LENGTH = 600
DEC_CHANNELS = 2 * DEC_BINS

#: analysis + synthesis delay of the decoder bank, in samples
DECODER_LATENCY = DEC_PROTOTYPE_LENGTH - DEC_HOP


@lru_cache(maxsize=None)
def encoder_window() -> np.ndarray:
    m = np.arange(ENC_WINDOW)
    return np.sin(np.pi * (m + 0.5) / ENC_WINDOW)


def _transition(t):
    # C3 smooth step with s(t) + s(1 - t) = 1
    return t**4 * (35.0 - 84.0 * t + 70.0 * t**2 - 20.0 * t**3)


@lru_cache(maxsize=None)
def decoder_prototype() -> np.ndarray:
    """Linear-phase lowpass prototype of the decoder bank.

    Designed in frequency: the magnitude response (in units of the 2*60
    channel spacing) is cos(pi/2 * s(|x|)) on |x| < 1, which makes adjacent
    channels power complementary and keeps every channel free of aliasing at
    decimation 60. The impulse response is truncated to 600 taps and scaled
    so that the overlapped squared window sums to one.
    """
    x = np.linspace(-1.0, 1.0, 40001)
    mag = np.cos(0.5 * np.pi * _transition(np.abs(x)))
    t = np.arange(DEC_PROTOTYPE_LENGTH) - 0.5 * (DEC_PROTOTYPE_LENGTH - 1)
    p = np.empty(DEC_PROTOTYPE_LENGTH)
    # symmetric, so only half needs integrating
    half = DEC_PROTOTYPE_LENGTH // 2
    kernel = np.cos(2.0 * np.pi * np.outer(t[half:], x) / DEC_CHANNELS)
    p[half:] = np.trapezoid(mag * kernel, x, axis=1) / DEC_CHANNELS
    p[:half] = p[half:][::-1]
    p *= np.sqrt(DEC_HOP / np.sum(p * p))
    p.setflags(write=False)
    return p


@lru_cache(maxsize=None)
def _decoder_modulated_prototype() -> np.ndarray:
    m = np.arange(DEC_PROTOTYPE_LENGTH)
    out = decoder_prototype() * np.exp(-1j * np.pi * m / DEC_CHANNELS)
    out.setflags(write=False)
    return out


def _check_frame(x: np.ndarray, channels: int) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1 and channels == 1:
        x = x[None, :]
    if x.ndim != 2 or x.shape != (channels, FRAME_LENGTH):
        raise ValueError(
            f"expected frame of shape ({channels}, {FRAME_LENGTH}), got {x.shape}"
        )
    return x


class EncoderAnalysis:
    """Modified DFT analysis, 4 x 240 tiles per frame and channel."""

    def __init__(self, channels: int = 1):
        self.channels = channels
        self._history = np.zeros((channels, ENC_WINDOW - ENC_HOP))
        m = np.arange(ENC_WINDOW)
        self._twiddle = (
            encoder_window() * np.exp(-1j * np.pi * m / ENC_WINDOW) / np.sqrt(ENC_BINS)
        )

    def reset(self):
        self._history[:] = 0.0

    def process(self, frame) -> np.ndarray:
        """Return a ``(channels, 4, 240)`` complex grid."""
        squeeze = np.ndim(frame) == 1
        x = _check_frame(frame, self.channels)
        buf = np.concatenate([self._history, x], axis=1)
        self._history = buf[:, -(ENC_WINDOW - ENC_HOP):].copy()
        seg = sliding_window_view(buf, ENC_WINDOW, axis=1)[:, ::ENC_HOP][:, :ENC_SLOTS]
        grid = np.fft.fft(seg * self._twiddle, axis=-1)[..., :ENC_BINS]
        return grid[0] if squeeze else grid

    def windowed_energy(self, frame) -> float:
        """Time-domain energy seen by the next ``process`` call (Parseval partner)."""
        x = _check_frame(frame, self.channels)
        buf = np.concatenate([self._history, x], axis=1)
        seg = sliding_window_view(buf, ENC_WINDOW, axis=1)[:, ::ENC_HOP][:, :ENC_SLOTS]
        return float(np.sum((seg * encoder_window()) ** 2))


class DecoderAnalysis:
    """Complex-modulated analysis bank, 16 x 60 tiles per frame and channel."""

    def __init__(self, channels: int = 1):
        self.channels = channels
        self._history = np.zeros((channels, DEC_PROTOTYPE_LENGTH - DEC_HOP))

    def reset(self):
        self._history[:] = 0.0

    def process(self, frame) -> np.ndarray:
        """Return a ``(channels, 16, 60)`` complex grid."""
        squeeze = np.ndim(frame) == 1
        x = _check_frame(frame, self.channels)
        buf = np.concatenate([self._history, x], axis=1)
        self._history = buf[:, -(DEC_PROTOTYPE_LENGTH - DEC_HOP):].copy()
        seg = sliding_window_view(buf, DEC_PROTOTYPE_LENGTH, axis=1)[:, ::DEC_HOP]
        seg = seg[:, :DEC_SLOTS] * _decoder_modulated_prototype()
        folded = seg.reshape(self.channels, DEC_SLOTS, -1, DEC_CHANNELS).sum(axis=2)
        grid = np.fft.fft(folded, axis=-1)[..., :DEC_BINS] / np.sqrt(DEC_HOP)
        return grid[0] if squeeze else grid


class DecoderSynthesis:
    """Inverse of :class:`DecoderAnalysis` up to a delay of ``DECODER_LATENCY``."""

    def __init__(self, channels: int = 1):
        self.channels = channels
        self._ola = np.zeros((channels, DEC_PROTOTYPE_LENGTH))
        m = np.arange(DEC_PROTOTYPE_LENGTH)
        self._demod = (
            np.exp(1j * np.pi * m / DEC_CHANNELS) * decoder_prototype() * np.sqrt(DEC_HOP)
        )

    def reset(self):
        self._ola[:] = 0.0

    def process(self, grid) -> np.ndarray:
        """Turn a ``(channels, 16, 60)`` grid into ``(channels, 960)`` samples."""
        grid = np.asarray(grid)
        squeeze = grid.ndim == 2
        if squeeze:
            grid = grid[None]
        if grid.shape != (self.channels, DEC_SLOTS, DEC_BINS):
            raise ValueError(
                f"expected grid of shape ({self.channels}, {DEC_SLOTS}, {DEC_BINS}), "
                f"got {grid.shape}"
            )
        if not np.all(np.isfinite(grid)):
            raise ValueError("grid contains non-finite values")
        # real input spectra are conjugate symmetric about the band middle
        full = np.concatenate([grid, np.conj(grid[..., ::-1])], axis=-1)
        periods = DEC_PROTOTYPE_LENGTH // DEC_CHANNELS
        seg = np.tile(np.fft.ifft(full, axis=-1), (1, 1, periods))
        seg = np.real(seg * self._demod)

        out = np.empty((self.channels, FRAME_LENGTH))
        ola = self._ola
        for n in range(DEC_SLOTS):
            ola += seg[:, n]
            out[:, n * DEC_HOP:(n + 1) * DEC_HOP] = ola[:, :DEC_HOP]
            ola[:, :-DEC_HOP] = ola[:, DEC_HOP:]
            ola[:, -DEC_HOP:] = 0.0
        return out[0] if squeeze else out


def encoder_analysis(frame) -> np.ndarray:
    """One-shot encoder analysis of a single frame with zero history."""
    return EncoderAnalysis(1).process(np.asarray(frame, dtype=np.float64).reshape(-1))


def decoder_analysis(frame) -> np.ndarray:
    """One-shot decoder analysis of a single frame with zero history."""
    return DecoderAnalysis(1).process(np.asarray(frame, dtype=np.float64).reshape(-1))


def decoder_synthesis(grid) -> np.ndarray:
    """One-shot synthesis of a single ``(16, 60)`` grid with empty overlap state."""
    return DecoderSynthesis(1).process(grid)


def analyze_signal(x: np.ndarray, bank: str = "decoder") -> np.ndarray:
    """Analyze a whole ``(channels, samples)`` signal frame by frame.

    Returns ``(channels, total_slots, bins)``. The sample count must be a
    multiple of the frame length.
    """
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    if x.shape[1] % FRAME_LENGTH:
        raise ValueError("signal length must be a whole number of frames")
    analyzer = DecoderAnalysis(x.shape[0]) if bank == "decoder" else EncoderAnalysis(x.shape[0])
    grids = [
        analyzer.process(x[:, i:i + FRAME_LENGTH])
        for i in range(0, x.shape[1], FRAME_LENGTH)
    ]
    return np.concatenate(grids, axis=1)


def synthesize_signal(grid: np.ndarray) -> np.ndarray:
    """Inverse of :func:`analyze_signal` for the decoder bank (delayed output)."""
    grid = np.asarray(grid)
    if grid.ndim == 2:
        grid = grid[None]
    synth = DecoderSynthesis(grid.shape[0])
    frames = [
        synth.process(grid[:, i:i + DEC_SLOTS])
        for i in range(0, grid.shape[1], DEC_SLOTS)
    ]
    return np.concatenate(frames, axis=1)
