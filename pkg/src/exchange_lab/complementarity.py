"""Complementarity measurement for valuations.

The submodularity index of a valuation is the least factor ``a >= 1`` such
that conditioning on more items never multiplies a single item's increment
by more than ``a``: for every base W, bundle A and item x outside both,

    v(A + x | W) - v(A | W)  <=  a * v(x | W).

Additive tables score exactly 1, as does anything submodular; the index is
unbounded when some item has a zero increment at one base but a positive
increment at a larger base.  The ``*_bounded`` checks verify the collection
of marginal inequalities a finite index implies.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels, tolerances
from .economy import Economy, Valuation


@dataclass(frozen=True)
class SubmodularityIndex:
    """Index value; ``value is None`` means unbounded complementarity."""

    value: float | None

    @classmethod
    def infinite(cls) -> "SubmodularityIndex":
        return cls(None)

    @property
    def is_finite(self) -> bool:
        return self.value is not None

    def __str__(self) -> str:
        return "infinite" if self.value is None else repr(self.value)

    def to_json(self):
        return "infinite" if self.value is None else float(self.value)


def submodularity_index(v: Valuation, tol=None) -> SubmodularityIndex:
    """Least bounding factor of ``v`` (clamped up to 1), or infinite."""
    tol = tolerances.resolve(tol)
    unbounded, factor = kernels.submod_index(v.table, v.num_items, tol)
    if unbounded:
        return SubmodularityIndex.infinite()
    return SubmodularityIndex(max(1.0, float(factor)))


def economy_index(e: Economy, tol=None) -> SubmodularityIndex:
    """Max of the agents' indexes; infinite if any agent's is."""
    worst = 1.0
    for v in e.valuations:
        idx = submodularity_index(v, tol)
        if not idx.is_finite:
            return SubmodularityIndex.infinite()
        worst = max(worst, idx.value)
    return SubmodularityIndex(worst)


def is_submodular(v: Valuation, tol=None) -> bool:
    """Direct diminishing-increments test: v(x|S) <= v(x|W) for W <= S.

    Checked on adjacent pairs (base grown by one item), which is equivalent
    by chaining.  Used as an independent cross-check of index == 1.
    """
    tol = tolerances.resolve(tol)
    m = v.num_items
    masks = np.arange(1 << m, dtype=np.int64)
    for x in range(m):
        xb = 1 << x
        base = masks[(masks & xb) == 0]
        h = v.table[base | xb] - v.table[base]
        for y in range(m):
            yb = 1 << y
            if y == x:
                continue
            sel = (base & yb) == 0
            lo = base[sel]
            # increment of x at lo versus at lo + y
            if np.any(h[np.searchsorted(base, lo | yb)] > h[sel] + tol):
                return False
    return True


def superset_marginals_bounded(v: Valuation, a: float, tol=None) -> bool:
    """v(A | T) <= a * v(A | S) for every nonempty A and S <= T disjoint from A."""
    tol = tolerances.resolve(tol)
    return kernels.superset_base_excess(v.table, v.num_items, float(a)) <= tol


def split_marginals_bounded(v: Valuation, a: float, tol=None) -> bool:
    """v(A | B) <= a * sum over x in A of v(x | B_x), minimized over B_x <= B.

    Since each term minimizes independently, this is checked against the
    per-item subset minimum, which is exactly the hardest choice of B_x.
    """
    tol = tolerances.resolve(tol)
    return kernels.split_bound_excess(v.table, v.num_items, float(a)) <= tol


def inner_singleton_marginals_bounded(v: Valuation, a: float, tol=None) -> bool:
    """a * v(A | S - A) >= sum over j in A of v(j | S - j) for nonempty A <= S."""
    tol = tolerances.resolve(tol)
    return kernels.inner_singletons_excess(v.table, v.num_items, float(a)) <= tol


def outer_singleton_marginals_bounded(v: Valuation, a: float, tol=None) -> bool:
    """v(A | S) <= a * sum over j in A of v(j | S) for nonempty A disjoint from S."""
    tol = tolerances.resolve(tol)
    return kernels.outer_singletons_excess(v.table, v.num_items, float(a)) <= tol
