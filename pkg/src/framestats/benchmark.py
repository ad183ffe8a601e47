"""Benchmark the compiled kernel core against the NumPy fallback.

Run as ``python -m framestats.benchmark``.  Reports wall time per
kernel and the speedup of the compiled backend; useful for checking
that the extension built and is worth selecting.
"""

import time

import numpy as np

from . import kernels
from .kernels import pykernels


def _time(fn, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def _cases():
    draws_small = np.arange(20_000, dtype=np.uint64)
    draws_big = np.arange(200_000, dtype=np.uint64)
    rng_pts = pykernels.sample_uniform_sphere(7, pykernels.TAG_UNIFORM,
                                              np.arange(1500, dtype=np.uint64), 3)
    w = np.full(rng_pts.shape[0], 1.0 / rng_pts.shape[0])
    axis2 = np.array([1.0, 0.0])
    axis3 = np.array([0.0, 0.0, 1.0])
    return [
        ("uniform sphere d=3, n=2e5",
         lambda m: m.sample_uniform_sphere(1, m.TAG_UNIFORM, draws_big, 3)),
        ("watson d=2 kappa=10, n=2e4",
         lambda m: m.sample_watson(1, m.TAG_WATSON, draws_small, axis2, 10.0)),
        ("watson d=3 kappa=-50, n=2e4",
         lambda m: m.sample_watson(1, m.TAG_WATSON, draws_small, axis3, -50.0)),
        ("frame potential pair sum, n=1500",
         lambda m: m.pair_frame_potential(rng_pts, w)),
        ("riesz potential pair sum, n=1500",
         lambda m: m.pair_riesz_potential(rng_pts, w)),
    ]


def main():
    backends = kernels.available_backends()
    print(f"available backends: {', '.join(backends)}")
    if "compiled" not in backends:
        print("compiled kernel not built; timing the python backend only")
    rows = []
    for name, call in _cases():
        row = {"case": name}
        for backend in backends:
            mod = kernels.backend_module(backend)
            row[backend] = _time(lambda: call(mod))
        rows.append(row)

    width = max(len(r["case"]) for r in rows)
    header = f"{'kernel':<{width}}  " + "  ".join(f"{b:>12}" for b in backends)
    if len(backends) == 2:
        header += f"  {'speedup':>8}"
    print(header)
    for row in rows:
        line = f"{row['case']:<{width}}  " + "  ".join(
            f"{row[b] * 1e3:>10.2f}ms" for b in backends
        )
        if len(backends) == 2:
            line += f"  {row['python'] / row['compiled']:>7.1f}x"
        print(line)


if __name__ == "__main__":
    main()
