"""Benchmark the compiled kernels against the pure-Python fallback.

Times the two accumulation kernels on synthetic data and a full cubature
evaluation on a real plan with each backend.  Run from the repo root:

    python benchmarks/bench_kernels.py
"""

import time

import numpy as np

from relcube import Integrand, Region, engine, rules
from relcube import _kernels_py
from relcube.problem import normalize

try:
    from relcube import _kernels
except ImportError:
    _kernels = None


def timeit(fn, repeats=5):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_weighted_sum():
    rng = np.random.default_rng(1234)
    print(f"{'weighted_sum':>24s} {'n':>10s} {'cython':>12s} {'python':>12s}"
          f" {'speedup':>8s}")
    for n in (1_000, 100_000, 10_000_000):
        w = rng.standard_normal(n)
        v = rng.standard_normal(n)
        t_py = timeit(lambda: _kernels_py.weighted_sum(w, v))
        if _kernels is not None:
            t_cy = timeit(lambda: _kernels.weighted_sum(w, v))
            assert _kernels.weighted_sum(w, v) == _kernels_py.weighted_sum(w, v)
            print(f"{'':>24s} {n:>10d} {t_cy*1e3:>10.3f}ms {t_py*1e3:>10.3f}ms"
                  f" {t_py/t_cy:>7.1f}x")
        else:
            print(f"{'':>24s} {n:>10d} {'-':>12s} {t_py*1e3:>10.3f}ms")


def bench_row_sums():
    rng = np.random.default_rng(99)
    print(f"{'row_weighted_sums':>24s} {'rows x len':>14s} {'cython':>12s}"
          f" {'python':>12s} {'speedup':>8s}")
    for rows, length in ((1_000, 100), (10_000, 1_000), (3_621, 735)):
        total = rows * length
        w = rng.standard_normal(total)
        v = rng.standard_normal(total)
        offsets = np.arange(rows + 1, dtype=np.int64) * length
        out_py = np.empty(rows)
        t_py = timeit(lambda: _kernels_py.row_weighted_sums(w, v, offsets, out_py))
        if _kernels is not None:
            out_cy = np.empty(rows)
            t_cy = timeit(lambda: _kernels.row_weighted_sums(w, v, offsets, out_cy))
            _kernels.row_weighted_sums(w, v, offsets, out_cy)
            _kernels_py.row_weighted_sums(w, v, offsets, out_py)
            assert np.array_equal(out_cy, out_py)
            print(f"{'':>24s} {rows:>7d}x{length:<6d} {t_cy*1e3:>10.3f}ms"
                  f" {t_py*1e3:>10.3f}ms {t_py/t_cy:>7.1f}x")
        else:
            print(f"{'':>24s} {rows:>7d}x{length:<6d} {'-':>12s}"
                  f" {t_py*1e3:>10.3f}ms")


def bench_full_evaluation():
    """End-to-end cubature with each backend on a real grid."""
    region = Region(a=1.0, b=2.0, lower=lambda x: x**2 / 5,
                    upper=lambda x: x**3 / 5)
    integrand = Integrand(eval=lambda x, y: np.exp(4.0 * x * y))
    prob = normalize(region, integrand)
    rule = rules.get_rule("simpson")
    plan = engine.plan_grid(5.527e-4, prob.normalized_region, rule)

    import relcube.kernels as kern
    saved = (kern.weighted_sum, kern.sum_ltr, kern.row_weighted_sums,
             kern.IMPLEMENTATION)
    results = {}
    print(f"{'full evaluate':>24s} nodes={plan.nodes_total}")
    for name, impl in (("python", _kernels_py),
                       ("cython", _kernels)):
        if impl is None:
            continue
        kern.weighted_sum = impl.weighted_sum
        kern.sum_ltr = impl.sum_ltr
        kern.row_weighted_sums = impl.row_weighted_sums
        t = timeit(lambda: engine.evaluate(prob.g, plan), repeats=3)
        results[name] = (t, engine.evaluate(prob.g, plan).value)
        print(f"{'':>24s} {name:>8s} {t*1e3:>10.1f}ms")
    (kern.weighted_sum, kern.sum_ltr, kern.row_weighted_sums,
     kern.IMPLEMENTATION) = saved
    if len(results) == 2:
        assert results["python"][1] == results["cython"][1], \
            "backends disagree"
        print(f"{'':>24s} backends agree bitwise:"
              f" {results['cython'][1]!r}")


if __name__ == "__main__":
    if _kernels is None:
        print("compiled extension not available; timing fallback only")
    bench_weighted_sum()
    bench_row_sums()
    bench_full_evaluation()
