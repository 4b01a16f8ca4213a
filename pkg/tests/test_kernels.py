import os
import subprocess
import sys

import numpy as np
import pytest

from paramism import kernels
from paramism.layouts import get_layout, prototype_matrix
from paramism.panning import panner_for

BACKENDS = kernels.available_backends()
needs_both = pytest.mark.skipif(len(BACKENDS) < 2, reason="numba not installed")


def both(name):
    return [getattr(kernels.implementation(b), name) for b in ("numba", "numpy")]


@needs_both
def test_band_powers_agree(rng):
    grid = rng.standard_normal((3, 4, 240)) + 1j * rng.standard_normal((3, 4, 240))
    borders = np.array([0, 2, 4, 7, 11, 17, 26, 40, 61, 93, 142, 240], dtype=np.int64)
    a, b = (f(grid, borders) for f in both("band_powers"))
    assert np.allclose(a, b, rtol=1e-12)


@needs_both
@pytest.mark.parametrize("scale", [1.0, 1e-3, 30.0])
def test_mixing_matrices_agree(rng, scale):
    cx = rng.uniform(0.0, 2.0, (60, 2))
    cx[::7, 1] = 0.0
    cx[5] = 0.0
    ky = rng.standard_normal((60, 11, 2)) * scale
    ky[9] = 0.0
    q = np.ascontiguousarray(prototype_matrix(get_layout("7_1_4")))
    a, b = (f(cx, ky, q, 4.0, 1e-5) for f in both("mixing_matrices"))
    # SVD sign conventions cancel in Vt^T U^T, so results match closely
    assert np.allclose(a, b, atol=1e-9)


@needs_both
def test_apply_mixing_agree(rng):
    x = rng.standard_normal((2, 16, 60)) + 1j * rng.standard_normal((2, 16, 60))
    m0, m1 = rng.standard_normal((2, 60, 7, 2))
    a, b = (f(x, m0, m1) for f in both("apply_mixing"))
    assert np.allclose(a, b)


@needs_both
@pytest.mark.parametrize("layout", ["5_1", "5_1_4", "7_1", "7_1_4"])
def test_efap_agree(rng, layout):
    p = panner_for(layout)
    az, el = rng.uniform(-180, 180, 3000), rng.uniform(-90, 90, 3000)
    args = (az, el, p._poly_az, p._poly_el, p._poly_pole, p._poly_verts,
            p._poly_n, p._poly_wrap, p.num_vertices, 1e-9)
    a, b = (f(*args) for f in both("efap_gains"))
    assert np.allclose(a, b, atol=1e-12)


def test_backend_flag(tmp_path):
    code = "from paramism import kernels; print(kernels.BACKEND)"
    env = dict(os.environ, PARAMISM_BACKEND="numpy")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert out.stdout.strip() == "numpy"
    env["PARAMISM_BACKEND"] = "fortran"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert out.returncode != 0 and "PARAMISM_BACKEND" in out.stderr


def test_unknown_implementation():
    with pytest.raises(ValueError):
        kernels.implementation("cuda")
