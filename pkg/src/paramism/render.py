"""Covariance-domain rendering of the stereo downmix to loudspeakers."""

from __future__ import annotations

import numpy as np

from . import kernels
from .filterbank import DEC_BINS, DEC_SLOTS
from .layouts import SpeakerLayout, prototype_matrix
from .panning import panner_for
from .scene import dequantize_direction
from .sideinfo import FrameSideInfo, dequantize_ratio

__all__ = [
    "MAX_GAIN",
    "REGULARIZATION",
    "Renderer",
    "covariance_factor",
    "covariance_synthesis",
    "dequantize_ratio",
    "direct_responses",
    "input_covariance",
    "render_frame",
    "target_covariance",
]

MAX_GAIN = 4.0
REGULARIZATION = 1e-5


def input_covariance(grid: np.ndarray, k: int | None = None) -> np.ndarray:
    """Diagonal of the 2x2 downmix covariance, summed over the frame's slots.

    ``grid`` is ``(2, slots, bins)``. Returns ``(2,)`` for a single bin ``k``
    or ``(bins, 2)`` for all bins. Cross terms are taken as zero.
    """
    power = np.abs(np.asarray(grid)) ** 2
    diag = power.sum(axis=1).T
    return diag if k is None else diag[k]


def direct_responses(side: FrameSideInfo, layout: SpeakerLayout) -> np.ndarray:
    """(num_objects, S) panning gains from the transmitted directions."""
    dirs = [dequantize_direction(q) for q in side.directions]
    panner = panner_for(layout.name)
    return panner.gains(
        np.array([d.azimuth_deg for d in dirs]), np.array([d.elevation_deg for d in dirs])
    )


def _band_factor(side: FrameSideInfo, band: int, responses: np.ndarray) -> np.ndarray:
    i1, i2 = side.dominant[band]
    r1, r2 = dequantize_ratio(side.ratio_index[band])
    return np.stack([responses[i1] * np.sqrt(r1), responses[i2] * np.sqrt(r2)], axis=1)


def target_covariance(side: FrameSideInfo, band: int, p_dmx: float, layout: SpeakerLayout,
                      responses: np.ndarray | None = None) -> np.ndarray:
    """Target covariance R E R^T for one bin of ``band`` with downmix power ``p_dmx``."""
    if responses is None:
        responses = direct_responses(side, layout)
    factor = _band_factor(side, band, responses) * np.sqrt(p_dmx)
    return factor @ factor.T


def covariance_factor(cy: np.ndarray, rank: int = 2) -> np.ndarray:
    """S x rank factor K with K K^T = cy for a PSD matrix of rank <= ``rank``."""
    w, v = np.linalg.eigh(cy)
    w = np.clip(w[..., -rank:], 0.0, None)
    return v[..., :, -rank:] * np.sqrt(w)[..., None, :]


def covariance_synthesis(cx, cy, q, max_gain: float = MAX_GAIN,
                         regularization: float = REGULARIZATION) -> np.ndarray:
    """Mixing matrix M (S x 2) with M Cx M^T = Cy closest to the prototype ``q``.

    ``cx`` is the 2x2 input covariance (only its diagonal is used) or its
    diagonal; ``cy`` an S x S PSD target of rank at most 2. Also accepts a
    leading batch axis on both.
    """
    cx = np.asarray(cx, dtype=np.float64)
    cy = np.asarray(cy, dtype=np.float64)
    if cx.shape[-2:] == (2, 2):
        cx = np.diagonal(cx, axis1=-2, axis2=-1)
    batched = cy.ndim == 3
    cx2 = np.ascontiguousarray(np.atleast_2d(cx))
    ky = np.ascontiguousarray(covariance_factor(cy if batched else cy[None]))
    m = kernels.mixing_matrices(cx2, ky, np.ascontiguousarray(q, dtype=np.float64),
                                float(max_gain), float(regularization))
    return m if batched else m[0]


def _bin_band(dec_borders: np.ndarray) -> np.ndarray:
    return np.repeat(np.arange(len(dec_borders) - 1), np.diff(dec_borders))


class Renderer:
    """Stateful per-stream renderer holding the previous frame's matrices."""

    def __init__(self, layout: SpeakerLayout, dec_borders: np.ndarray,
                 max_gain: float = MAX_GAIN, regularization: float = REGULARIZATION):
        self.layout = layout
        self.q = np.ascontiguousarray(prototype_matrix(layout))
        self.num_speakers = self.q.shape[0]
        self.band_of_bin = _bin_band(np.asarray(dec_borders))
        if self.band_of_bin.size != DEC_BINS:
            raise ValueError("decoder band borders must cover all 60 bins")
        self.max_gain = max_gain
        self.regularization = regularization
        self.prev_m: np.ndarray | None = None

    def mixing_matrices(self, grid: np.ndarray, side: FrameSideInfo) -> np.ndarray:
        """(bins, S, 2) mixing matrices for one frame."""
        cx = np.ascontiguousarray(input_covariance(grid))
        p_dmx = cx.sum(axis=1)
        responses = direct_responses(side, self.layout)
        band_factors = np.stack(
            [_band_factor(side, l, responses) for l in range(side.num_bands)]
        )
        ky = band_factors[self.band_of_bin] * np.sqrt(p_dmx)[:, None, None]
        return kernels.mixing_matrices(
            cx, np.ascontiguousarray(ky), self.q, self.max_gain, self.regularization
        )

    def process(self, grid: np.ndarray, side: FrameSideInfo) -> np.ndarray:
        """Render a ``(2, 16, 60)`` downmix grid to ``(S, 16, 60)``."""
        grid = np.ascontiguousarray(grid, dtype=np.complex128)
        if grid.shape != (2, DEC_SLOTS, DEC_BINS):
            raise ValueError(f"downmix grid must be (2, {DEC_SLOTS}, {DEC_BINS})")
        m = self.mixing_matrices(grid, side)
        prev = m if self.prev_m is None else self.prev_m
        self.prev_m = m
        return kernels.apply_mixing(grid, prev, m)


def render_frame(grid: np.ndarray, side: FrameSideInfo, layout: SpeakerLayout,
                 dec_borders: np.ndarray, prev_m: np.ndarray | None = None) -> np.ndarray:
    """Stateless single-frame render; ``prev_m`` seeds the matrix cross-fade."""
    r = Renderer(layout, dec_borders)
    r.prev_m = prev_m
    return r.process(grid, side)
