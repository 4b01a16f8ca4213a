"""Vectorized numpy versions of the hot kernels."""

import numpy as np


def band_powers(grid, borders):
    power = (grid.real**2 + grid.imag**2).sum(axis=1)
    return np.add.reduceat(power, borders[:-1], axis=-1)


def mixing_matrices(cx, ky, q, max_gain, floor_rel):
    nbins, nspk = ky.shape[0], ky.shape[1]
    out = np.zeros((nbins, nspk, 2))
    cy_diag = np.sum(ky * ky, axis=2)
    cx_max = cx.max(axis=1)
    live = (cx_max > 0.0) & (cy_diag.sum(axis=1) > 0.0)
    if not np.any(live):
        return out
    cx, ky, cy_diag, cx_max = cx[live], ky[live], cy_diag[live], cx_max[live]

    kx = np.sqrt(cx)
    kx_inv = 1.0 / np.sqrt(np.maximum(cx, floor_rel * cx_max[:, None]))

    proto_energy = (q * q) @ cx.T  # (S, K)
    gain = np.sqrt(cy_diag / np.maximum(proto_energy.T, 1e-30 * cx_max[:, None]))
    gain = np.minimum(gain, max_gain)
    q_norm = gain[:, :, None] * q[None]

    a = np.einsum("ki,ksi,ksj->kij", kx, q_norm, ky)
    u, _, vt = np.linalg.svd(a)
    p = np.swapaxes(vt, 1, 2) @ np.swapaxes(u, 1, 2)
    m = (ky @ p) * kx_inv[:, None, :]

    peak = np.abs(m).max(axis=(1, 2))
    over = peak > max_gain
    if np.any(over):
        mo = np.clip(m[over], -max_gain, max_gain)
        target = cy_diag[over].sum(axis=1)
        achieved = np.einsum("ksj,kj->k", mo * mo, cx[over])
        scale = np.sqrt(target / np.maximum(achieved, 1e-300))
        scale = np.minimum(scale, max_gain / np.abs(mo).max(axis=(1, 2)))
        m[over] = mo * scale[:, None, None]
    out[live] = m
    return out


def apply_mixing(x, m_prev, m_cur):
    nslots = x.shape[1]
    w = (np.arange(nslots) + 1.0) / nslots
    prev = np.einsum("ksj,jnk->snk", m_prev, x)
    cur = np.einsum("ksj,jnk->snk", m_cur, x)
    return prev * (1.0 - w)[None, :, None] + cur * w[None, :, None]


def _edge_fn(bx, by, cx, cy, px, py, ax, ay):
    ex, ey = cx - bx, cy - by
    num = ex * (py - by) - ey * (px - bx)
    den = ex * (ay - by) - ey * (ax - bx)
    return num / den


def efap_gains(az, el, poly_az, poly_el, poly_pole, poly_verts, poly_n, poly_wrap, nvert, tol):
    npts = az.shape[0]
    npoly = poly_verts.shape[0]
    gains = np.zeros((npts, nvert))
    best_score = np.full(npts, -np.inf)
    best_poly = np.full(npts, -1)
    # first pass: locate the polygon for every point
    for p in range(npoly):
        n = poly_n[p]
        px = np.where(poly_wrap[p] & (az < 0.0), az + 360.0, az)
        vx = np.where(poly_pole[p, :n][None, :], px[:, None], poly_az[p, :n][None, :])
        vy = np.broadcast_to(poly_el[p, :n][None, :], vx.shape)
        score = np.full(npts, np.inf)
        for j in range(n):
            b, c, a = j, (j + 1) % n, (j + 2) % n
            f = _edge_fn(vx[:, b], vy[:, b], vx[:, c], vy[:, c], px, el, vx[:, a], vy[:, a])
            score = np.minimum(score, f)
        unassigned_inside = (best_score < -tol) & (score >= -tol)
        better_outside = (best_score < -tol) & (score > best_score)
        take = unassigned_inside | better_outside
        best_score = np.where(take, score, best_score)
        best_poly = np.where(take, p, best_poly)

    for p in range(npoly):
        sel = np.nonzero(best_poly == p)[0]
        if sel.size == 0:
            continue
        n = poly_n[p]
        idx = poly_verts[p, :n]
        pa, pe = az[sel], el[sel]
        px = np.where(poly_wrap[p] & (pa < 0.0), pa + 360.0, pa)
        vx = np.where(poly_pole[p, :n][None, :], px[:, None], poly_az[p, :n][None, :])
        vy = np.broadcast_to(poly_el[p, :n][None, :], vx.shape)
        for i in range(n):
            g = np.ones(sel.size)
            for jj in range(i + 1, i + n - 1):
                b, c = jj % n, (jj + 1) % n
                f = _edge_fn(vx[:, b], vy[:, b], vx[:, c], vy[:, c], px, pe, vx[:, i], vy[:, i])
                g = g * np.maximum(f, 0.0)
            gains[sel, idx[i]] = g
    return gains
