"""Test-scene geometries and synthetic stand-in sources."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import signal

from .scene import FRAME_LENGTH, SAMPLE_RATE, ObjectMetadataFrame, wrap_azimuth


@dataclass(frozen=True)
class ObjectTrack:
    azimuth_start: float
    elevation: float
    azimuth_end: float | None = None

    @property
    def moving(self) -> bool:
        return self.azimuth_end is not None

    def frames(self, num_frames: int) -> list[ObjectMetadataFrame]:
        if not self.moving:
            return [ObjectMetadataFrame(self.azimuth_start, self.elevation)] * num_frames
        # uniform motion from start (first frame) to end (last frame)
        az = np.linspace(self.azimuth_start, self.azimuth_end, num_frames)
        return [ObjectMetadataFrame(float(wrap_azimuth(a)), self.elevation) for a in az]


@dataclass(frozen=True)
class ScenePreset:
    name: str
    kind: str
    objects: tuple

    def __post_init__(self):
        if not 3 <= len(self.objects) <= 4:
            raise ValueError(f"preset {self.name} must have 3 or 4 objects")

    @property
    def num_objects(self) -> int:
        return len(self.objects)

    def metadata(self, num_frames: int) -> list:
        return [track.frames(num_frames) for track in self.objects]


def _static(az, el):
    return tuple(ObjectTrack(a, e) for a, e in zip(az, el))


PRESETS = {
    "i1": ScenePreset("i1", "speech", _static((0, -180, 90, -90), (-5, -5, -5, -5))),
    "i2": ScenePreset("i2", "speech", _static((60, 30, -30, -60), (0, 0, 0, 0))),
    "i3": ScenePreset("i3", "speech", (
        ObjectTrack(0, 0), ObjectTrack(60, 0), ObjectTrack(-30, 15, -150), ObjectTrack(-45, 0),
    )),
    "i4": ScenePreset("i4", "speech", _static((75, 25, -25, -75), (30, 30, 30, 30))),
    "i5": ScenePreset("i5", "speech", _static((45, -135, -45, 135), (0, 0, 0, 0))),
    "i6": ScenePreset("i6", "music", _static((100, 10, -80, -170), (50, 50, 50, 50))),
    "i7": ScenePreset("i7", "music", _static((90, 30, -30, -90), (0, 0, 0, 0))),
    "i8": ScenePreset("i8", "music", _static((0, -70, 50, -20), (20, 22, 18, 0))),
    "i9": ScenePreset("i9", "music", _static((20, 40, -30, -45), (-5, 20, 5, -5))),
    "i10": ScenePreset("i10", "mixed", (
        ObjectTrack(60, 19, -10), ObjectTrack(-60, 25), ObjectTrack(90, -15), ObjectTrack(-90, 0),
    )),
    "i11": ScenePreset("i11", "vocals", _static((10, -10, 10, -10), (15, 20, 30, 30))),
    "i12": ScenePreset("i12", "speech", _static((20, 20, -20, -20), (0, 40, 0, 40))),
}


def get_preset(name: str) -> ScenePreset:
    try:
        return PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}") from None


def speech_shaped_noise(num_samples: int, rng: np.random.Generator, level_db: float = -26.0,
                        modulated: bool = False) -> np.ndarray:
    """White noise through a long-term speech spectrum shape.

    The shape is a second-order resonance near 500 Hz with a gentle
    high-frequency rolloff; ``modulated`` adds a 4 Hz syllabic envelope.
    """
    x = rng.standard_normal(num_samples)
    b, a = signal.iirpeak(500.0, 0.7, fs=SAMPLE_RATE)
    x = signal.lfilter(b, a, x) + 0.3 * x
    b, a = signal.butter(1, 3000.0, fs=SAMPLE_RATE)
    x = signal.lfilter(b, a, x)
    b, a = signal.butter(2, 80.0, btype="high", fs=SAMPLE_RATE)
    x = signal.lfilter(b, a, x)
    if modulated:
        t = np.arange(num_samples) / SAMPLE_RATE
        phase = rng.uniform(0, 2 * np.pi)
        x *= 0.55 + 0.45 * np.sin(2 * np.pi * 4.0 * t + phase)
    return _set_level(x, level_db)


def tone_complex(num_samples: int, rng: np.random.Generator, f0: float | None = None,
                 harmonics: int = 12, level_db: float = -26.0) -> np.ndarray:
    """Harmonic tone with 1/k amplitudes and random phases."""
    f0 = f0 if f0 is not None else rng.uniform(110.0, 440.0)
    t = np.arange(num_samples) / SAMPLE_RATE
    x = np.zeros(num_samples)
    for k in range(1, harmonics + 1):
        if k * f0 >= SAMPLE_RATE / 2:
            break
        x += np.sin(2 * np.pi * k * f0 * t + rng.uniform(0, 2 * np.pi)) / k
    return _set_level(x, level_db)


def transients(num_samples: int, rng: np.random.Generator, rate_hz: float = 4.0,
               level_db: float = -26.0) -> np.ndarray:
    """Decaying noise bursts at random onsets."""
    x = np.zeros(num_samples)
    onsets = np.nonzero(rng.random(num_samples) < rate_hz / SAMPLE_RATE)[0]
    decay = np.exp(-np.arange(2400) / 300.0)
    for o in onsets:
        seg = rng.standard_normal(decay.size) * decay
        end = min(num_samples, o + decay.size)
        x[o:end] += seg[: end - o]
    if not np.any(x):
        x[num_samples // 2] = 1.0
    return _set_level(x, level_db)


def bandpass_noise(num_samples: int, rng: np.random.Generator, lo_hz: float, hi_hz: float,
                   level_db: float = -26.0) -> np.ndarray:
    """Noise confined to [lo_hz, hi_hz] by zeroing FFT bins."""
    spec = np.fft.rfft(rng.standard_normal(num_samples))
    f = np.fft.rfftfreq(num_samples, 1.0 / SAMPLE_RATE)
    spec[(f < lo_hz) | (f > hi_hz)] = 0.0
    return _set_level(np.fft.irfft(spec, num_samples), level_db)


def _set_level(x: np.ndarray, level_db: float) -> np.ndarray:
    rms = np.sqrt(np.mean(x * x))
    if rms == 0.0:
        return x
    return x * (10.0 ** (level_db / 20.0) / rms)


SOURCES = {
    "speech": lambda n, rng: speech_shaped_noise(n, rng, modulated=True),
    "music": tone_complex,
    "vocals": lambda n, rng: speech_shaped_noise(n, rng, modulated=True),
    "mixed": transients,
}


def synthesize_scene(preset: ScenePreset, seconds: float, seed: int = 0,
                     stationary: bool = False) -> tuple:
    """Signals and metadata for a preset.

    Returns ``((num_objects, samples) array, metadata tracks)``. With
    ``stationary`` every object is independent unmodulated speech-shaped noise.
    """
    rng = np.random.default_rng(seed)
    n = int(round(seconds * SAMPLE_RATE))
    n -= n % FRAME_LENGTH
    if stationary:
        sig = [speech_shaped_noise(n, rng) for _ in preset.objects]
    else:
        sig = [SOURCES[preset.kind](n, rng) for _ in preset.objects]
    return np.stack(sig), preset.metadata(n // FRAME_LENGTH)
