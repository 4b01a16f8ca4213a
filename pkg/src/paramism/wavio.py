"""WAV reading (scipy) and 16/24-bit PCM writing (stdlib ``wave``)."""

from __future__ import annotations

import wave
from pathlib import Path

import numpy as np
from scipy.io import wavfile

from .bitstream import quantize_pcm
from .scene import SAMPLE_RATE


def read_wav(path) -> tuple:
    """Return ``(rate, (channels, samples) float64 in [-1, 1))``."""
    rate, data = wavfile.read(Path(path))
    data = np.asarray(data)
    if data.dtype == np.uint8:
        x = (data.astype(np.float64) - 128.0) / 128.0
    elif data.dtype.kind == "i":
        x = data.astype(np.float64) / float(np.iinfo(data.dtype).max + 1)
    else:
        x = data.astype(np.float64)
    x = x[:, None] if x.ndim == 1 else x
    return rate, x.T.copy()


def read_mono_48k(path) -> np.ndarray:
    rate, x = read_wav(path)
    if rate != SAMPLE_RATE:
        raise ValueError(f"{path}: sample rate {rate} Hz, expected {SAMPLE_RATE} Hz")
    if x.shape[0] != 1:
        raise ValueError(f"{path}: {x.shape[0]} channels, expected a mono file")
    return x[0]


def write_wav(path, x: np.ndarray, rate: int = SAMPLE_RATE, bits: int = 24) -> None:
    """Write ``(channels, samples)`` floats as interleaved little-endian PCM."""
    if bits not in (16, 24):
        raise ValueError("bits must be 16 or 24")
    ints = quantize_pcm(np.atleast_2d(x), bits)
    inter = np.ascontiguousarray(ints.T).reshape(-1).astype("<i4")
    if bits == 16:
        raw = inter.astype("<i2").tobytes()
    else:
        raw = inter.view(np.uint8).reshape(-1, 4)[:, :3].tobytes()
    with wave.open(str(path), "wb") as w:
        w.setnchannels(ints.shape[0])
        w.setsampwidth(bits // 8)
        w.setframerate(rate)
        w.writeframes(raw)
