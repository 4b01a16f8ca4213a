"""Hot numeric kernels with a numba path and a pure-numpy fallback.

The backend is picked once at import time from ``PARAMISM_BACKEND``
(``numba`` or ``numpy``). Without the variable numba is used when it can be
imported. Both implementations stay importable for tests and benchmarks via
:func:`implementation`.
"""

import logging
import os

from . import _numpy

log = logging.getLogger(__name__)

KERNELS = ("band_powers", "mixing_matrices", "apply_mixing", "efap_gains")

try:
    from . import _numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    _numba = None


def _select_backend() -> str:
    requested = os.environ.get("PARAMISM_BACKEND", "").strip().lower()
    if requested not in ("", "numba", "numpy"):
        raise ValueError(f"PARAMISM_BACKEND must be 'numba' or 'numpy', got {requested!r}")
    if requested == "numpy":
        return "numpy"
    if _numba is None:
        if requested == "numba":
            log.warning("numba requested but not importable, using numpy kernels")
        return "numpy"
    return "numba"


BACKEND = _select_backend()


def implementation(backend: str):
    """Return the kernel module for ``backend``."""
    if backend == "numpy":
        return _numpy
    if backend == "numba":
        if _numba is None:
            raise RuntimeError("numba is not available")
        return _numba
    raise ValueError(backend)


def available_backends():
    return ("numba", "numpy") if _numba is not None else ("numpy",)


_active = implementation(BACKEND)
band_powers = _active.band_powers
mixing_matrices = _active.mixing_matrices
apply_mixing = _active.apply_mixing
efap_gains = _active.efap_gains
