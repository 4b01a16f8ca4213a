"""Compare the numba and numpy kernel backends on frame-sized inputs.

Run with ``python3 benchmarks/bench_kernels.py [--repeat N]``. Also times a
full 4-object encode/decode of a few seconds under each backend, in a
subprocess so the ``PARAMISM_BACKEND`` switch takes effect.
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from paramism import kernels
from paramism.layouts import get_layout, prototype_matrix
from paramism.panning import panner_for


def _inputs(rng):
    grid = rng.standard_normal((4, 4, 240)) + 1j * rng.standard_normal((4, 4, 240))
    borders = np.array([0, 2, 4, 7, 11, 17, 26, 40, 61, 93, 142, 240], dtype=np.int64)
    cx = rng.uniform(0.5, 1.5, (60, 2))
    ky = rng.standard_normal((60, 11, 2))
    q = np.ascontiguousarray(prototype_matrix(get_layout("7_1_4")))
    x = rng.standard_normal((2, 16, 60)) + 1j * rng.standard_normal((2, 16, 60))
    m0, m1 = rng.standard_normal((60, 11, 2)), rng.standard_normal((60, 11, 2))
    p = panner_for("7_1_4")
    az, el = rng.uniform(-180, 180, 64), rng.uniform(-90, 90, 64)
    efap_args = (az, el, p._poly_az, p._poly_el, p._poly_pole, p._poly_verts,
                 p._poly_n, p._poly_wrap, p.num_vertices, 1e-9)
    return {
        "band_powers": (grid, borders),
        "mixing_matrices": (cx, ky, q, 4.0, 1e-5),
        "apply_mixing": (x, m0, m1),
        "efap_gains": efap_args,
    }


def _time(fn, args, repeat):
    fn(*args)  # warm-up, triggers compilation for numba
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


_PIPELINE = """
import time
from paramism.presets import PRESETS, synthesize_scene
from paramism.codec import encode_signals, decode_frames
x, md = synthesize_scene(PRESETS["i2"], 0.2, seed=0)
decode_frames(encode_signals(x, md), "7_1_4")
x, md = synthesize_scene(PRESETS["i2"], {seconds}, seed=0)
t0 = time.perf_counter(); f = encode_signals(x, md); t1 = time.perf_counter()
decode_frames(f, "7_1_4"); t2 = time.perf_counter()
print(t1 - t0, t2 - t1)
"""


def pipeline(backend, seconds):
    env = dict(os.environ, PARAMISM_BACKEND=backend)
    out = subprocess.run([sys.executable, "-c", _PIPELINE.format(seconds=seconds)],
                         env=env, capture_output=True, text=True, check=True)
    enc, dec = (float(v) for v in out.stdout.split())
    return enc, dec


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=200)
    ap.add_argument("--seconds", type=float, default=4.0)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    inputs = _inputs(rng)
    backends = kernels.available_backends()
    print(f"{'kernel':18s}" + "".join(f"{b:>14s}" for b in backends) + "   speedup")
    for name, fargs in inputs.items():
        times = [_time(getattr(kernels.implementation(b), name), fargs, args.repeat)
                 for b in backends]
        speed = times[-1] / times[0] if len(times) == 2 else 1.0
        print(f"{name:18s}" + "".join(f"{t * 1e6:11.1f} us" for t in times) + f"   {speed:6.2f}x")

    print(f"\nfull 4-object pipeline, {args.seconds:g} s of audio, 7.1.4 output")
    for b in backends:
        enc, dec = pipeline(b, args.seconds)
        print(f"  {b:6s} encode {args.seconds / enc:6.1f}x realtime, "
              f"decode {args.seconds / dec:6.1f}x realtime")


if __name__ == "__main__":
    main()
