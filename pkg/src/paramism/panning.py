"""Edge-fading amplitude panning (EFAP) over a loudspeaker polygon mesh.

The mesh is the convex hull of the speaker directions plus two virtual
speakers at the poles. Coplanar hull facets are merged into polygons. A
source is panned inside the polygon that contains it in the
azimuth/elevation plane: every vertex gets the product of its normalized
distances to the polygon edges it does not touch, so its gain is 1 on the
vertex and fades to 0 on the far edges. Virtual speaker gains are handed
to their mesh neighbours and the result is normalized to unit power.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.spatial import ConvexHull

from . import kernels
from .layouts import SpeakerLayout, get_layout
from .scene import ObjectMetadataFrame, wrap_azimuth

_TOL = 1e-9


def _unit_vectors(az_deg, el_deg) -> np.ndarray:
    az, el = np.radians(az_deg), np.radians(el_deg)
    return np.stack([np.cos(el) * np.cos(az), np.cos(el) * np.sin(az), np.sin(el)], axis=-1)


class EfapPanner:
    def __init__(self, layout: SpeakerLayout):
        self.layout = layout
        dirs = layout.directions()
        if dirs.shape[0] < 3:
            raise ValueError(f"layout {layout.name} has fewer than 3 non-LFE speakers")
        self.num_speakers = dirs.shape[0]

        ghosts = [d for d in ((0.0, 90.0), (0.0, -90.0)) if not np.any(np.abs(dirs[:, 1] - d[1]) < 1e-6)]
        verts = np.vstack([dirs, np.array(ghosts).reshape(-1, 2)])
        self.vertices = verts
        self.num_vertices = verts.shape[0]
        xyz = _unit_vectors(verts[:, 0], verts[:, 1])

        self.polygons = self._polygons(xyz)
        self._pack(verts)
        self.downmix = self._ghost_downmix()

    @staticmethod
    def _polygons(xyz):
        hull = ConvexHull(xyz)
        # facets sharing a supporting plane form one polygon
        planes, members = [], []
        for simplex, eq in zip(hull.simplices, hull.equations):
            for plane, group in zip(planes, members):
                if np.allclose(plane, eq, atol=1e-9):
                    group.update(int(v) for v in simplex)
                    break
            else:
                planes.append(eq)
                members.append({int(v) for v in simplex})
        polygons = []
        for plane, group in zip(planes, members):
            idx = np.array(sorted(group))
            pts = xyz[idx]
            c = pts.mean(axis=0)
            normal = plane[:3]
            u = pts[0] - c
            u /= np.linalg.norm(u)
            w = np.cross(normal, u)
            ang = np.arctan2((pts - c) @ w, (pts - c) @ u)
            polygons.append(tuple(idx[np.argsort(ang)]))
        polygons.sort()
        return polygons

    def _pack(self, verts):
        npoly = len(self.polygons)
        maxv = max(len(p) for p in self.polygons)
        self._poly_verts = np.full((npoly, maxv), -1, dtype=np.int64)
        self._poly_az = np.zeros((npoly, maxv))
        self._poly_el = np.zeros((npoly, maxv))
        self._poly_pole = np.zeros((npoly, maxv), dtype=np.bool_)
        self._poly_n = np.zeros(npoly, dtype=np.int64)
        self._poly_wrap = np.zeros(npoly, dtype=np.bool_)
        for p, poly in enumerate(self.polygons):
            n = len(poly)
            az = verts[list(poly), 0].copy()
            el = verts[list(poly), 1]
            pole = np.abs(el) >= 90.0 - 1e-9
            ring = az[~pole]
            wrap = ring.size > 0 and ring.max() - ring.min() > 180.0
            if wrap:
                az = np.where(az < 0.0, az + 360.0, az)
            self._poly_verts[p, :n] = poly
            self._poly_az[p, :n] = az
            self._poly_el[p, :n] = el
            self._poly_pole[p, :n] = pole
            self._poly_n[p] = n
            self._poly_wrap[p] = wrap

    def _ghost_downmix(self) -> np.ndarray:
        """(V, S) matrix folding virtual speakers onto their real neighbours."""
        dm = np.zeros((self.num_vertices, self.num_speakers))
        dm[: self.num_speakers] = np.eye(self.num_speakers)
        for g in range(self.num_speakers, self.num_vertices):
            neighbours = set()
            for poly in self.polygons:
                if g in poly:
                    i = poly.index(g)
                    neighbours.update((poly[i - 1], poly[(i + 1) % len(poly)]))
            real = sorted(v for v in neighbours if v < self.num_speakers)
            dm[g, real] = 1.0 / len(real)
        return dm

    def vertex_gains(self, azimuth, elevation) -> np.ndarray:
        """Raw edge-fading gains on mesh vertices (including virtual ones)."""
        az = np.array([wrap_azimuth(a) for a in np.atleast_1d(azimuth)], dtype=np.float64)
        el = np.clip(np.atleast_1d(np.asarray(elevation, dtype=np.float64)), -90.0, 90.0)
        return kernels.efap_gains(
            az, el, self._poly_az, self._poly_el, self._poly_pole, self._poly_verts,
            self._poly_n, self._poly_wrap, self.num_vertices, _TOL,
        )

    def gains(self, azimuth, elevation) -> np.ndarray:
        """Power-normalized gains on the non-LFE speakers, shape (..., S)."""
        scalar = np.ndim(azimuth) == 0
        g = self.vertex_gains(azimuth, elevation) @ self.downmix
        g /= np.sqrt(np.sum(g * g, axis=-1, keepdims=True))
        return g[0] if scalar else g


@lru_cache(maxsize=None)
def panner_for(layout_name: str) -> EfapPanner:
    return EfapPanner(get_layout(layout_name))


def panning_gains(direction: ObjectMetadataFrame, layout: SpeakerLayout) -> np.ndarray:
    """Direct response of one direction: unit-power gains on the non-LFE speakers."""
    return panner_for(layout.name).gains(direction.azimuth_deg, direction.elevation_deg)
