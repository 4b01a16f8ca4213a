"""Uncoded reference: direct panning of the original objects."""

from __future__ import annotations

import numpy as np

from .layouts import SpeakerLayout, get_layout
from .panning import panner_for
from .scene import FRAME_LENGTH, frame_signal, num_frames_for


def render_reference(objects: np.ndarray, metadata, layout: SpeakerLayout | str) -> np.ndarray:
    """Pan every object with its unquantized per-frame direction.

    Gains ramp linearly within each frame from the previous frame's value,
    as in the downmix. Returns ``(channels, samples)`` including silent LFE.
    """
    layout = get_layout(layout) if isinstance(layout, str) else layout
    x = np.atleast_2d(np.asarray(objects, dtype=np.float64))
    n_obj, n = x.shape
    if len(metadata) != n_obj:
        raise ValueError(f"{len(metadata)} metadata tracks for {n_obj} objects")
    nframes = num_frames_for(n)
    x = frame_signal(x, nframes)
    panner = panner_for(layout.name)

    az = np.array([[track[min(t, len(track) - 1)].azimuth_deg for t in range(nframes)]
                   for track in metadata])
    el = np.array([[track[min(t, len(track) - 1)].elevation_deg for t in range(nframes)]
                   for track in metadata])
    gains = panner.gains(az.reshape(-1), el.reshape(-1)).reshape(n_obj, nframes, -1)

    ramp = (np.arange(FRAME_LENGTH) + 1.0) / FRAME_LENGTH
    y = np.zeros((panner.num_speakers, nframes * FRAME_LENGTH))
    for t in range(nframes):
        cur = gains[:, t]
        prev = gains[:, t - 1] if t else cur
        seg = x[:, t * FRAME_LENGTH:(t + 1) * FRAME_LENGTH]
        # (obj, spk, n) gain trajectory
        g = prev[:, :, None] + (cur - prev)[:, :, None] * ramp
        y[:, t * FRAME_LENGTH:(t + 1) * FRAME_LENGTH] = np.einsum("osn,on->sn", g, seg)

    out = np.zeros((layout.num_channels, n))
    out[layout.panned_indices] = y[:, :n]
    return out
