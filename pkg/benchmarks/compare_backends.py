"""Time the enumeration kernels under both backends.

Runs each hot kernel (complementarity index, the four marginal-bound
excess scans, and the optimal-allocation dynamic program) on seeded
random monotone tables and reports the best wall time per backend, plus
the numba speedup over the pure-numpy lattice transforms.  The numba
path is JIT-warmed before timing so compilation is not billed.

Usage:
    python3 benchmarks/compare_backends.py --sizes 8,10,12 --agents 4
"""

import argparse
import time

import numpy as np

from exchange_lab.kernels import numpy_backend

try:
    from exchange_lab.kernels import numba_backend
except ImportError:
    numba_backend = None


def monotone_table(rng: np.random.Generator, m: int) -> np.ndarray:
    """Random normalized monotone table with strictly positive marginals."""
    table = rng.uniform(0.0, 8.0, 1 << m)
    table[0] = 0.0
    for j in range(m):
        jb = 1 << j
        for mask in range(1 << m):
            if mask & jb:
                table[mask] = max(table[mask], table[mask ^ jb])
    sizes = np.array([bin(mask).count("1") for mask in range(1 << m)], dtype=float)
    return table + 0.25 * sizes


def timed(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def kernel_calls(backend, table: np.ndarray, tables: np.ndarray, m: int):
    return [
        ("submod_index", lambda: backend.submod_index(table, m, 1e-9)),
        ("superset_excess", lambda: backend.superset_base_excess(table, m, 2.0)),
        ("split_excess", lambda: backend.split_bound_excess(table, m, 2.0)),
        ("inner_excess", lambda: backend.inner_singletons_excess(table, m, 2.0)),
        ("outer_excess", lambda: backend.outer_singletons_excess(table, m, 2.0)),
        ("alloc_dp", lambda: backend.alloc_dp(tables, m)),
    ]


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="8,10,12",
                        help="comma-separated item counts (default 8,10,12)")
    parser.add_argument("--agents", type=int, default=4,
                        help="agents in the allocation DP (default 4)")
    parser.add_argument("--repeats", type=int, default=5,
                        help="timed repetitions per kernel, best kept (default 5)")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    sizes = [int(x) for x in args.sizes.split(",")]
    rng = np.random.default_rng(args.seed)

    print(f"{'kernel':<16} {'m':>3} {'numpy ms':>10} {'numba ms':>10} {'speedup':>8}")
    for m in sizes:
        table = monotone_table(rng, m)
        tables = np.stack([monotone_table(rng, m) for _ in range(args.agents)])
        rows = {}
        for name, call in kernel_calls(numpy_backend, table, tables, m):
            rows[name] = [timed(call, args.repeats), None]
        if numba_backend is not None:
            for name, call in kernel_calls(numba_backend, table, tables, m):
                call()  # warm the JIT cache before timing
                rows[name][1] = timed(call, args.repeats)
        for name, (t_np, t_nb) in rows.items():
            if t_nb is None:
                print(f"{name:<16} {m:>3} {t_np * 1e3:>10.3f} {'n/a':>10} {'n/a':>8}")
            else:
                print(f"{name:<16} {m:>3} {t_np * 1e3:>10.3f} {t_nb * 1e3:>10.3f} "
                      f"{t_np / t_nb:>7.1f}x")


if __name__ == "__main__":
    main()
