#!/usr/bin/env python3
"""Race the numba kernels against the pure-numpy fallbacks.

Usage: python benchmarks/bench_kernels.py [--n 1000000] [--grid 24] [--repeat 5]

Covers the three hot paths: batched cross products, batched defect-form
evaluation, and the lattice Dirac stencils.  Both implementations are
imported directly, so the result is independent of G2CALIB_BACKEND.
"""

import argparse
import time

import numpy as np

import g2calib._kernels as K
from g2calib.backend import HAVE_NUMBA
from g2calib.dirac import Connection1Form
from g2calib.forms import chi_flat
from g2calib.octonion import _CT_A, _CT_B, _CT_C, _CT_S


def timeit(fn, repeat):
    fn()  # warm-up (and JIT compile)
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=1_000_000, help="batch size")
    ap.add_argument("--grid", type=int, default=24, help="lattice size for stencils")
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    if not HAVE_NUMBA:
        print("numba not importable; only the numpy path will run")

    rng = np.random.default_rng(0)
    n, g, rep = args.n, args.grid, args.repeat
    rows = []

    U, V, W = (rng.normal(size=(n, 7)) for _ in range(3))
    rows.append(("cross7 batch", f"n={n}",
                 timeit(lambda: K.bilinear_batch_numpy(U, V, _CT_A, _CT_B, _CT_C, _CT_S, 7), rep),
                 timeit(lambda: K.bilinear_batch_numba(U, V, _CT_A, _CT_B, _CT_C, _CT_S, 7), rep)
                 if HAVE_NUMBA else None))

    j0, j1, j2, al, co = chi_flat().packed()
    rows.append(("chi batch", f"n={n}",
                 timeit(lambda: K.vv3_batch_numpy(U, V, W, j0, j1, j2, al, co, 7), rep),
                 timeit(lambda: K.vv3_batch_numba(U, V, W, j0, j1, j2, al, co, 7), rep)
                 if HAVE_NUMBA else None))

    conn = Connection1Form(g, u1=rng.normal(size=(g, g, g, 3)))
    sF, rF = conn.quat_links()
    sF, rF = np.ascontiguousarray(sF), np.ascontiguousarray(rF)
    vq = rng.normal(size=(g, g, g, 4))
    rows.append(("dirac real stencil", f"grid={g}^3",
                 timeit(lambda: K.dirac_real_numpy(vq, sF, rF, 0.5 * g), rep),
                 timeit(lambda: K.dirac_real_numba(vq, sF, rF, 0.5 * g), rep)
                 if HAVE_NUMBA else None))

    ph = np.ascontiguousarray(conn.phase_links())
    vc = rng.normal(size=(g, g, g, 2)) + 1j * rng.normal(size=(g, g, g, 2))
    rows.append(("dirac complex stencil", f"grid={g}^3",
                 timeit(lambda: K.dirac_complex_numpy(vc, ph, 0.5 * g), rep),
                 timeit(lambda: K.dirac_complex_numba(vc, ph, 0.5 * g), rep)
                 if HAVE_NUMBA else None))

    print(f"{'kernel':24s} {'size':12s} {'numpy':>10s} {'numba':>10s} {'speedup':>8s}")
    for name, size, t_np, t_nb in rows:
        if t_nb is None:
            print(f"{name:24s} {size:12s} {t_np*1e3:9.2f}ms {'-':>10s} {'-':>8s}")
        else:
            print(f"{name:24s} {size:12s} {t_np*1e3:9.2f}ms {t_nb*1e3:9.2f}ms "
                  f"{t_np/t_nb:7.2f}x")


if __name__ == "__main__":
    main()
