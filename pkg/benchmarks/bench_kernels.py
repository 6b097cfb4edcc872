"""Time the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--n 33] [--repeat 3]

Both backends run the same sweeps on the same data; results are checked to be
bit-identical before timings are reported.
"""

import argparse
import time

import numpy as np

from curvemac import kernels
from curvemac.grid import transfinite_interpolation
from curvemac.scenarios import build_stenosis, stenosis_edges
from curvemac.solver import pressure_coefficients


def best_of(fn, repeat):
    best = np.inf
    out = None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def bench_pressure(n, sweeps, repeat):
    sc = build_stenosis(n_xi=4 * n + 1, n_eta=n)
    coef = pressure_coefficients(sc.metrics, 5e-3)
    rng = np.random.default_rng(0)
    b = rng.standard_normal(coef.shape[1:])
    b -= b.mean()
    rows = {}
    for name in ("cython", "python"):
        mod = kernels.backend(name)

        def run():
            p = np.zeros(coef.shape[1:])
            # tol 0 forces exactly `sweeps` sweeps
            mod.gauss_seidel_9pt(coef, b, p, 1.5, 0.0, sweeps)
            return p

        rows[name] = best_of(run, repeat)
    assert np.array_equal(rows["cython"][1], rows["python"][1])
    return {k: v[0] for k, v in rows.items()}


def bench_smoothing(n, sweeps, repeat):
    e = stenosis_edges(n_xi=4 * n + 1, n_eta=n)
    x0, y0 = transfinite_interpolation(e["south"], e["east"], e["north"], e["west"])
    rows = {}
    for name in ("cython", "python"):
        mod = kernels.backend(name)

        def run():
            x, y = x0.copy(), y0.copy()
            mod.smooth_grid(x, y, sweeps, 0.0, True)
            return x

        rows[name] = best_of(run, repeat)
    assert np.array_equal(rows["cython"][1], rows["python"][1])
    return {k: v[0] for k, v in rows.items()}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=20, help="eta lines (xi lines = 4n + 1)")
    ap.add_argument("--sweeps", type=int, default=50)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    print(f"default backend: {kernels.BACKEND}")
    print(f"{'kernel':<22}{'cython [s]':>12}{'python [s]':>12}{'speed-up':>10}")
    for label, fn in (("pressure SOR sweeps", bench_pressure),
                      ("Winslow smoothing", bench_smoothing)):
        t = fn(args.n, args.sweeps, args.repeat)
        print(f"{label:<22}{t['cython']:>12.4f}{t['python']:>12.4f}"
              f"{t['python'] / t['cython']:>9.0f}x")


if __name__ == "__main__":
    main()
