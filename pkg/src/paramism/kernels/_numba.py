"""Loop-level numba versions of the hot kernels.

Each function mirrors its counterpart in ``_numpy`` exactly; the test suite
checks the two against each other.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def band_powers(grid, borders):
    nobj, nslots, _ = grid.shape
    nbands = borders.shape[0] - 1
    out = np.zeros((nobj, nbands))
    for i in range(nobj):
        for l in range(nbands):
            acc = 0.0
            for n in range(nslots):
                for k in range(borders[l], borders[l + 1]):
                    v = grid[i, n, k]
                    acc += v.real * v.real + v.imag * v.imag
            out[i, l] = acc
    return out


@njit(cache=True)
def mixing_matrices(cx, ky, q, max_gain, floor_rel):
    nbins, nspk = ky.shape[0], ky.shape[1]
    out = np.zeros((nbins, nspk, 2))
    a = np.empty((2, 2))
    for k in range(nbins):
        c0, c1 = cx[k, 0], cx[k, 1]
        cmax = max(c0, c1)
        cy_trace = 0.0
        for s in range(nspk):
            cy_trace += ky[k, s, 0] ** 2 + ky[k, s, 1] ** 2
        if cmax <= 0.0 or cy_trace <= 0.0:
            continue
        kx0, kx1 = np.sqrt(c0), np.sqrt(c1)
        inv0 = 1.0 / np.sqrt(max(c0, floor_rel * cmax))
        inv1 = 1.0 / np.sqrt(max(c1, floor_rel * cmax))

        a[:, :] = 0.0
        for s in range(nspk):
            cy_ss = ky[k, s, 0] ** 2 + ky[k, s, 1] ** 2
            proto = q[s, 0] ** 2 * c0 + q[s, 1] ** 2 * c1
            g = min(np.sqrt(cy_ss / max(proto, 1e-30 * cmax)), max_gain)
            for j in range(2):
                a[0, j] += kx0 * g * q[s, 0] * ky[k, s, j]
                a[1, j] += kx1 * g * q[s, 1] * ky[k, s, j]
        u, _, vt = np.linalg.svd(a)
        p = vt.T @ u.T

        peak = 0.0
        for s in range(nspk):
            for j in range(2):
                v = ky[k, s, 0] * p[0, j] + ky[k, s, 1] * p[1, j]
                v *= inv0 if j == 0 else inv1
                out[k, s, j] = v
                peak = max(peak, abs(v))
        if peak > max_gain:
            achieved = 0.0
            new_peak = 0.0
            for s in range(nspk):
                for j in range(2):
                    v = min(max(out[k, s, j], -max_gain), max_gain)
                    out[k, s, j] = v
                    achieved += v * v * (c0 if j == 0 else c1)
                    new_peak = max(new_peak, abs(v))
            scale = np.sqrt(cy_trace / max(achieved, 1e-300))
            scale = min(scale, max_gain / new_peak)
            for s in range(nspk):
                for j in range(2):
                    out[k, s, j] *= scale
    return out


@njit(cache=True)
def apply_mixing(x, m_prev, m_cur):
    nslots, nbins = x.shape[1], x.shape[2]
    nspk = m_cur.shape[1]
    y = np.zeros((nspk, nslots, nbins), dtype=np.complex128)
    for n in range(nslots):
        w = (n + 1.0) / nslots
        for k in range(nbins):
            x0, x1 = x[0, n, k], x[1, n, k]
            for s in range(nspk):
                prev = m_prev[k, s, 0] * x0 + m_prev[k, s, 1] * x1
                cur = m_cur[k, s, 0] * x0 + m_cur[k, s, 1] * x1
                y[s, n, k] = prev * (1.0 - w) + cur * w
    return y


@njit(cache=True)
def _edge_fn(bx, by, cx, cy, px, py, ax, ay):
    ex, ey = cx - bx, cy - by
    num = ex * (py - by) - ey * (px - bx)
    den = ex * (ay - by) - ey * (ax - bx)
    return num / den


@njit(cache=True)
def efap_gains(az, el, poly_az, poly_el, poly_pole, poly_verts, poly_n, poly_wrap, nvert, tol):
    npts = az.shape[0]
    npoly = poly_verts.shape[0]
    gains = np.zeros((npts, nvert))
    maxv = poly_verts.shape[1]
    vx = np.empty(maxv)
    vy = np.empty(maxv)
    for d in range(npts):
        best_score = -np.inf
        best_poly = -1
        for p in range(npoly):
            n = poly_n[p]
            px = az[d] + 360.0 if (poly_wrap[p] and az[d] < 0.0) else az[d]
            for j in range(n):
                vx[j] = px if poly_pole[p, j] else poly_az[p, j]
                vy[j] = poly_el[p, j]
            score = np.inf
            for j in range(n):
                b, c, a = j, (j + 1) % n, (j + 2) % n
                f = _edge_fn(vx[b], vy[b], vx[c], vy[c], px, el[d], vx[a], vy[a])
                score = min(score, f)
            if best_score < -tol and (score >= -tol or score > best_score):
                best_score = score
                best_poly = p

        p = best_poly
        n = poly_n[p]
        px = az[d] + 360.0 if (poly_wrap[p] and az[d] < 0.0) else az[d]
        for j in range(n):
            vx[j] = px if poly_pole[p, j] else poly_az[p, j]
            vy[j] = poly_el[p, j]
        for i in range(n):
            g = 1.0
            for jj in range(i + 1, i + n - 1):
                b, c = jj % n, (jj + 1) % n
                f = _edge_fn(vx[b], vy[b], vx[c], vy[c], px, el[d], vx[i], vy[i])
                g *= max(f, 0.0)
            gains[d, poly_verts[p, i]] = g
    return gains
