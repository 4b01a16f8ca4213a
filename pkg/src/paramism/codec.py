"""Frame-level encoder and decoder built from the DSP blocks."""

from __future__ import annotations

import logging
from pathlib import Path

import numpy as np

from .bitstream import (
    StreamHeader,
    StreamWriter,
    pcm_to_float,
    quantize_pcm,
    read_stream,
)
from .downmix import Downmixer
from .filterbank import (
    DECODER_LATENCY,
    DecoderAnalysis,
    DecoderSynthesis,
    EncoderAnalysis,
)
from .layouts import SpeakerLayout, get_layout
from .render import Renderer
from .scene import (
    FRAME_LENGTH,
    ObjectMetadataFrame,
    SceneConfig,
    dequantize_direction,
    frame_signal,
    num_frames_for,
    quantize_direction,
)
from .sideinfo import BandPartition, FrameSideInfo, band_powers, side_info_from_powers

log = logging.getLogger(__name__)


class ParamIsmEncoder:
    """Turns object frames plus directions into (side info, downmix) frames."""

    def __init__(self, num_objects: int, bands: BandPartition | None = None,
                 compensate: bool = True):
        SceneConfig(num_objects)
        self.num_objects = num_objects
        self.bands = bands or BandPartition.default()
        self._borders = self.bands.as_array()
        self._analysis = EncoderAnalysis(num_objects)
        self._downmix = Downmixer(num_objects, compensate=compensate)

    def encode_frame(self, objects: np.ndarray, metadata) -> tuple:
        """Encode ``(num_objects, 960)`` samples; returns (FrameSideInfo, (2, 960) float downmix)."""
        objects = np.asarray(objects, dtype=np.float64)
        if objects.shape != (self.num_objects, FRAME_LENGTH):
            raise ValueError(
                f"expected ({self.num_objects}, {FRAME_LENGTH}) samples, got {objects.shape}"
            )
        if len(metadata) != self.num_objects:
            raise ValueError(f"{len(metadata)} directions for {self.num_objects} objects")
        directions = [
            quantize_direction(md) if isinstance(md, ObjectMetadataFrame) else md
            for md in metadata
        ]
        # the downmix uses the directions the decoder will see
        azimuths = [dequantize_direction(q).azimuth_deg for q in directions]
        grids = self._analysis.process(objects)
        powers = band_powers(grids, self.bands)
        side = side_info_from_powers(powers, directions)
        dmx = self._downmix.process(objects, azimuths, powers, side)
        return side, dmx


class ParamIsmDecoder:
    """Renders (side info, downmix) frames to a loudspeaker layout.

    Output is delayed by :data:`DECODER_LATENCY` samples; :func:`decode_frames`
    removes the delay.
    """

    def __init__(self, layout: SpeakerLayout | str, bands: BandPartition | None = None):
        self.layout = get_layout(layout) if isinstance(layout, str) else layout
        self.bands = bands or BandPartition.default()
        self._analysis = DecoderAnalysis(2)
        self._renderer = Renderer(self.layout, self.bands.decoder_borders())
        self._synthesis = DecoderSynthesis(self._renderer.num_speakers)
        self._out_index = self.layout.panned_indices

    def decode_frame(self, side: FrameSideInfo, dmx: np.ndarray) -> np.ndarray:
        """Render one ``(2, 960)`` downmix frame to ``(channels, 960)`` including LFE."""
        grid = self._analysis.process(np.asarray(dmx, dtype=np.float64))
        y = self._synthesis.process(self._renderer.process(grid, side))
        out = np.zeros((self.layout.num_channels, FRAME_LENGTH))
        out[self._out_index] = y
        return out


def encode_signals(objects: np.ndarray, metadata, bands: BandPartition | None = None,
                   downmix_bits: int = 24, compensate: bool = True) -> list:
    """Encode whole signals.

    ``objects`` is ``(num_objects, samples)``; ``metadata[i]`` is a list of
    per-frame directions for object ``i`` (held at its last entry). Returns
    a list of ``(FrameSideInfo, (2, 960) PCM integers)``.
    """
    x = np.atleast_2d(np.asarray(objects, dtype=np.float64))
    n_obj = x.shape[0]
    if len(metadata) != n_obj:
        raise ValueError(f"{len(metadata)} metadata tracks for {n_obj} objects")
    nframes = num_frames_for(x.shape[1])
    x = frame_signal(x, nframes)
    enc = ParamIsmEncoder(n_obj, bands, compensate)
    frames = []
    for t in range(nframes):
        md = [track[min(t, len(track) - 1)] for track in metadata]
        side, dmx = enc.encode_frame(x[:, t * FRAME_LENGTH:(t + 1) * FRAME_LENGTH], md)
        frames.append((side, quantize_pcm(dmx, downmix_bits)))
    return frames


def decode_frames(frames, layout: SpeakerLayout | str, bands: BandPartition | None = None,
                  downmix_bits: int = 24, compensate_latency: bool = True) -> np.ndarray:
    """Decode a list of ``(side, PCM integers)`` to ``(channels, frames * 960)``.

    With ``compensate_latency`` one extra silent frame is pushed through and
    the filterbank delay trimmed off, so output sample ``n`` lines up with
    input sample ``n``.
    """
    dec = ParamIsmDecoder(layout, bands)
    out = [dec.decode_frame(side, pcm_to_float(ints, downmix_bits)) for side, ints in frames]
    if not frames:
        return np.zeros((dec.layout.num_channels, 0))
    total = len(frames) * FRAME_LENGTH
    if compensate_latency:
        out.append(dec.decode_frame(frames[-1][0], np.zeros((2, FRAME_LENGTH))))
        y = np.concatenate(out, axis=1)
        return y[:, DECODER_LATENCY:DECODER_LATENCY + total]
    return np.concatenate(out, axis=1)


def encode_to_file(path, objects, metadata, bands: BandPartition | None = None,
                   downmix_bits: int = 24) -> StreamHeader:
    bands = bands or BandPartition.default()
    frames = encode_signals(objects, metadata, bands, downmix_bits)
    with open(path, "wb") as fh:
        writer = StreamWriter(fh, len(metadata), bands, downmix_bits)
        for side, ints in frames:
            writer.write_frame(side, ints)
        writer.close()
    return writer.header


def decode_file(path, layout: SpeakerLayout | str) -> tuple:
    """Decode a ``.pism`` file; returns (header, (channels, samples) float output)."""
    header, frames = read_stream(Path(path))
    log.info("decoder latency %d samples, compensated", DECODER_LATENCY)
    y = decode_frames(frames, layout, header.bands, header.downmix_bits)
    return header, y
