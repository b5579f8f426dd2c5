"""Seeded random economies for the property and acceptance tests.

All generators take a ``numpy.random.Generator`` so every test pins its own
seed.  Sizes stay small (m <= 6, n <= 4) to keep the exhaustive oracles and
the LP cross-checks fast.
"""

import numpy as np

from exchange_lab import (
    Economy,
    Valuation,
    additive_valuation,
    budgeted_additive_valuation,
    unit_demand_valuation,
)

ITEM_NAMES = "abcdefgh"


def _wrap(valuations) -> Economy:
    m = valuations[0].num_items
    agents = [(str(i + 1), v) for i, v in enumerate(valuations)]
    return Economy(ITEM_NAMES[:m], agents)


def additive_economy(rng: np.random.Generator, m: int, n: int) -> Economy:
    vals = [additive_valuation(rng.uniform(0.0, 10.0, m)) for _ in range(n)]
    return _wrap(vals)


def unit_demand_economy(rng: np.random.Generator, m: int, n: int) -> Economy:
    """Small integer values, so ties between optima are common."""
    vals = [unit_demand_valuation(rng.integers(0, 6, m).astype(float))
            for _ in range(n)]
    return _wrap(vals)


def budgeted_economy(rng: np.random.Generator, m: int, n: int) -> Economy:
    vals = []
    for _ in range(n):
        weights = rng.uniform(0.0, 10.0, m)
        budget = float(rng.uniform(0.3, 1.0) * weights.sum())
        vals.append(budgeted_additive_valuation(weights, budget))
    return _wrap(vals)


def monotone_economy(rng: np.random.Generator, m: int, n: int) -> Economy:
    """Random monotone tables with strictly positive marginals.

    A raw table is pushed up through the monotone closure, then every bundle
    gains 0.25 per member.  Each marginal is then at least 0.25, so the
    complementarity index of every agent is finite.
    """
    vals = []
    for _ in range(n):
        table = rng.uniform(0.0, 8.0, 1 << m)
        table[0] = 0.0
        for j in range(m):
            jb = 1 << j
            for mask in range(1 << m):
                if mask & jb:
                    table[mask] = max(table[mask], table[mask ^ jb])
        sizes = np.array([bin(mask).count("1") for mask in range(1 << m)])
        vals.append(Valuation(m, table + 0.25 * sizes))
    return _wrap(vals)


def corpus(kind: str, count: int, seed: int):
    """A list of ``count`` seeded economies of one generator family."""
    maker = {
        "additive": additive_economy,
        "unit_demand": unit_demand_economy,
        "budgeted": budgeted_economy,
        "monotone": monotone_economy,
    }[kind]
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        m = int(rng.integers(2, 7))
        n = int(rng.integers(2, 5))
        out.append(maker(rng, m, n))
    return out
