#!/usr/bin/env python3
"""Benchmark the hot integrand kernels: numba JIT vs pure NumPy.

Times the three kernels on node-array sizes representative of the adaptive
quadrature's batched refinement sweeps, plus one end-to-end correlation
point on the active backend.  Run with --no-end-to-end to skip the latter.

    python benchmarks/bench_kernels.py
    PAIREMIT_NO_NUMBA=1 pairemit validate --quick   # fallback path, for CI
"""

from __future__ import annotations

import argparse
import math
import time

import numpy as np

from pairemit import kernels


def _timeit(fn, *args, repeat=200):
    fn(*args)                      # warm (JIT compile / cache touch)
    best = math.inf
    for _ in range(5):
        t0 = time.perf_counter()
        for _ in range(repeat):
            fn(*args)
        best = min(best, (time.perf_counter() - t0) / repeat)
    return best


def build_variants():
    plain = {
        "gamma_integrand": kernels._gamma_integrand,
        "chi_f": kernels._chi_f,
        "chi_p": kernels._chi_p,
    }
    try:
        from numba import njit
    except ImportError:
        return plain, None
    jitted = {
        "gamma_integrand": njit(cache=True)(kernels._gamma_integrand_loop),
        "chi_f": njit(cache=True)(kernels._chi_f_loop),
        "chi_p": njit(cache=True)(kernels._chi_p_loop),
    }
    return plain, jitted


def bench_kernels():
    sizes = (60, 450, 4500)        # single panel, leaf batch, refinement sweep
    plain, jitted = build_variants()
    if jitted is None:
        print("numba unavailable: benchmarking the NumPy path only")
    print(f"{'kernel':>16s} {'n':>6s} {'numpy':>12s} {'numba':>12s} {'speedup':>8s}")
    for n in sizes:
        u = np.linspace(-0.4, 0.4, n)
        c1 = np.cos(np.linspace(0.0, 1.0, n))
        c2 = -c1
        fm = np.full(n, 0.08 + 0.02j)
        fp = np.full(n, 0.07 - 0.01j)
        phi = np.linspace(0.0, math.pi, n)
        cases = {
            "gamma_integrand": (phi, -0.01, 0.9, 3e-3, 3e-3, 6.28, 628.0,
                                628.0, 0.7, 0.999),
            "chi_f": (u, 1.0, 6.28, c1, c2, 628.0, 628.0),
            "chi_p": (u, fm, fp, 0.003, 1.0, 6.28, c1, c2, 628.0, 628.0),
        }
        for name, args in cases.items():
            t_np = _timeit(plain[name], *args)
            if jitted is not None:
                t_nb = _timeit(jitted[name], *args)
                print(f"{name:>16s} {n:>6d} {t_np*1e6:>10.2f}us "
                      f"{t_nb*1e6:>10.2f}us {t_np/t_nb:>7.1f}x")
            else:
                print(f"{name:>16s} {n:>6d} {t_np*1e6:>10.2f}us {'-':>12s}")


def bench_end_to_end():
    from pairemit.correlations import DetectorGeometry, rho2_and_Q
    from pairemit.model import EmitterParams
    kernels.warmup()
    params = EmitterParams(delta=2.997e-3, ec=2.997e-3, w=1.0)
    geom = DetectorGeometry.from_r_theta(100.0, math.pi)
    t0 = time.perf_counter()
    res = rho2_and_Q(geom, params)
    dt = time.perf_counter() - t0
    print(f"\nend-to-end Q(r=100 lambda_F, pi) on backend "
          f"'{kernels.BACKEND}': {dt:.1f} s  (Q = {res.Q:.3f})")
    print("rerun with PAIREMIT_NO_NUMBA=1 to time the NumPy fallback")


if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--no-end-to-end", action="store_true")
    args = ap.parse_args()
    bench_kernels()
    if not args.no_end_to_end:
        bench_end_to_end()
