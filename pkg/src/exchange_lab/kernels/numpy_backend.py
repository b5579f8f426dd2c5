"""Pure-numpy fallbacks for the enumeration kernels.

Semantics contract shared with the jitted backend: same quotients, same
summation order (ascending item index, matching the doubling construction
in :mod:`exchange_lab.bitops`), ties toward the smallest mask.  The two
backends return bit-identical values; the test suite asserts exact
equality.

Tables ``values`` are dense float64 arrays of length ``2^m`` indexed by
bundle mask.
"""

from __future__ import annotations

import numpy as np

from ..bitops import sublattice


def _subset_min(table: np.ndarray, k: int) -> np.ndarray:
    """Subset-minimum transform over a k-bit lattice given in ascending order."""
    if k == 0:
        return table.copy()
    out = table.reshape((2,) * k).copy()
    for ax in range(k):
        np.minimum.accumulate(out, axis=ax, out=out)
    return out.ravel()


def _doubling_sums(weights: list[float]) -> np.ndarray:
    out = np.zeros(1)
    for w in weights:
        out = np.concatenate([out, out + w])
    return out


def submod_index(values: np.ndarray, m: int, tol: float):
    """(unbounded, factor): least a >= 1 with v(x | S) <= a * v(x | W) for W <= S.

    ``unbounded`` is True when some item has a zero increment at a base but a
    positive increment at a superset of that base.
    """
    worst = 1.0
    masks = np.arange(1 << m, dtype=np.int64)
    for x in range(m):
        xb = 1 << x
        no_x = masks[(masks & xb) == 0]
        h = values[no_x | xb] - values[no_x]
        hmin = _subset_min(h, m - 1)
        if np.any((hmin <= tol) & (h > tol)):
            return True, float("inf")
        pos = hmin > tol
        if np.any(pos):
            mx = float((h[pos] / hmin[pos]).max())
            if mx > worst:
                worst = mx
    return False, worst


def superset_base_excess(values: np.ndarray, m: int, a: float) -> float:
    """max over nonempty A and S <= T (disjoint from A) of v(A|T) - a*v(A|S)."""
    full = (1 << m) - 1
    worst = -np.inf
    for A in range(1, full + 1):
        comp = full & ~A
        lat = sublattice(comp)
        g = values[lat | A] - values[lat]
        gmin = _subset_min(g, comp.bit_count())
        ex = float((g - a * gmin).max())
        if ex > worst:
            worst = ex
    return worst


def split_bound_excess(values: np.ndarray, m: int, a: float) -> float:
    """max over disjoint (A nonempty, B) of v(A|B) - a * sum_x min_{B' <= B} v(x|B')."""
    full = (1 << m) - 1
    masks = np.arange(full + 1, dtype=np.int64)
    minh = np.empty((m, full + 1))
    for x in range(m):
        xb = 1 << x
        no_x = masks[(masks & xb) == 0]
        h = values[no_x | xb] - values[no_x]
        minh[x, no_x] = _subset_min(h, m - 1)
    worst = -np.inf
    for B in range(full + 1):
        comp = full & ~B
        if comp == 0:
            continue
        lat = sublattice(comp)
        sums = _doubling_sums([minh[x, B] for x in range(m) if (comp >> x) & 1])
        ex = (values[lat | B] - values[B]) - a * sums
        mx = float(ex[1:].max())
        if mx > worst:
            worst = mx
    return worst


def inner_singletons_excess(values: np.ndarray, m: int, a: float) -> float:
    """max over S and nonempty A <= S of sum_{j in A} v(j|S-j) - a*v(A|S-A)."""
    full = (1 << m) - 1
    worst = -np.inf
    for S in range(1, full + 1):
        vS = values[S]
        lat = sublattice(S)
        sums = _doubling_sums([vS - values[S ^ (1 << j)] for j in range(m) if (S >> j) & 1])
        ex = sums - a * (vS - values[S ^ lat])
        mx = float(ex[1:].max())
        if mx > worst:
            worst = mx
    return worst


def outer_singletons_excess(values: np.ndarray, m: int, a: float) -> float:
    """max over disjoint (S, A nonempty) of v(A|S) - a * sum_{j in A} v(j|S)."""
    full = (1 << m) - 1
    worst = -np.inf
    for S in range(full + 1):
        comp = full & ~S
        if comp == 0:
            continue
        vS = values[S]
        lat = sublattice(comp)
        sums = _doubling_sums([values[S | (1 << j)] - vS for j in range(m) if (comp >> j) & 1])
        ex = (values[S | lat] - vS) - a * sums
        mx = float(ex[1:].max())
        if mx > worst:
            worst = mx
    return worst


def alloc_dp(tables: np.ndarray, m: int):
    """Optimal-split dynamic program over agents.

    Returns (best value over allocations of all/some items, choice) where
    choice[k, S] is the bundle agent k takes in an optimal split of S among
    agents 0..k.  Ties resolve toward the smallest bundle mask.
    """
    n = tables.shape[0]
    size = 1 << m
    full = size - 1
    prev = np.zeros(size)
    choice = np.zeros((n, size), dtype=np.int64)
    for k in range(n):
        cur = prev.copy()
        row = tables[k]
        for T in range(1, size):
            lat = sublattice(full & ~T)
            tgt = lat + T
            cand = prev[lat] + row[T]
            better = cand > cur[tgt]
            if better.any():
                sel = tgt[better]
                cur[sel] = cand[better]
                choice[k, sel] = T
        prev = cur
    return float(prev[full]), choice
