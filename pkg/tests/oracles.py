"""Slow reference implementations used to cross-check the library.

Everything in this module is written as plain loops over bundle masks, as
close to the defining inequalities as possible, with no shared code paths
into :mod:`exchange_lab`.  The tests treat these as ground truth on small
instances (m <= 6 for enumeration, m <= 3 for the doubly-exponential ones).
"""

from itertools import product

import numpy as np


def submasks(mask):
    """Yield every submask of ``mask``, including 0 and ``mask`` itself."""
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


def naive_submod_index(table, m, tol=1e-9):
    """Least factor ``a`` with v(x | S) <= a * v(x | W) for all W <= S, x outside S.

    Returns ``(unbounded, factor)`` exactly like the kernel: ``unbounded`` is
    True when some zero-marginal item gains a positive marginal at a superset.
    """
    full = (1 << m) - 1
    worst = 1.0
    for w in range(full + 1):
        for x in range(m):
            xb = 1 << x
            if w & xb:
                continue
            denom = table[w | xb] - table[w]
            for extra in submasks(full & ~(w | xb)):
                s = w | extra
                inc = table[s | xb] - table[s]
                if denom <= tol:
                    if inc > tol:
                        return True, np.inf
                elif inc / denom > worst:
                    worst = inc / denom
    return False, worst


def naive_optimum(economy):
    """Best total value over all n^m assignments of items to agents."""
    m = economy.num_items
    tables = [v.table for v in economy.valuations]
    best = -np.inf
    best_masks = None
    for assign in product(range(economy.num_agents), repeat=m):
        masks = [0] * economy.num_agents
        for j, i in enumerate(assign):
            masks[i] |= 1 << j
        total = sum(tables[i][masks[i]] for i in range(economy.num_agents))
        if total > best:
            best = total
            best_masks = tuple(masks)
    return best, best_masks


def naive_max_quality(economy, masks, prices, tol=1e-9):
    """(r_star, s_star) computed straight from the defining ratios.

    ``None`` stands in for an infinite component, matching QualityReport.
    """
    m = economy.num_items
    full = (1 << m) - 1
    r_star = None
    s_star = None
    for i, v in enumerate(economy.valuations):
        own = masks[i]
        pay = sum(prices[j] for j in range(m) if own >> j & 1)
        if pay > tol:
            ratio = v.table[own] / pay
            if r_star is None or ratio < r_star:
                r_star = ratio
        for a in submasks(full & ~own):
            if a == 0:
                continue
            marg = v.table[own | a] - v.table[own]
            if marg > tol:
                cost = sum(prices[j] for j in range(m) if a >> j & 1)
                ratio = cost / marg
                if s_star is None or ratio < s_star:
                    s_star = ratio
    return r_star, s_star


def naive_quasi_quality(economy, masks, prices, tol=1e-9):
    """Quasi-equilibrium quality by direct enumeration of demand bundles."""
    m = economy.num_items
    full = (1 << m) - 1
    held = 0
    for i in range(economy.num_agents):
        held |= masks[i]
    for j in range(m):
        if not held >> j & 1 and prices[j] > tol:
            return 0.0
    q = 1.0
    for i, v in enumerate(economy.valuations):
        own = masks[i]
        pay = sum(prices[j] for j in range(m) if own >> j & 1)
        mine = v.table[own] - pay
        if mine < -tol:
            return 0.0
        top = -np.inf
        for d in range(full + 1):
            cost = sum(prices[j] for j in range(m) if d >> j & 1)
            top = max(top, v.table[d] - cost)
        if top > tol:
            q = min(q, max(mine, 0.0) / top)
    return min(q, 1.0)


def naive_superset_base(table, m, a, tol=1e-9):
    """Check v(A | T) <= a * v(A | S) for all S <= T disjoint from A != {}."""
    full = (1 << m) - 1
    for a_mask in range(1, full + 1):
        comp = full & ~a_mask
        for t in submasks(comp):
            lhs = table[t | a_mask] - table[t]
            for s in submasks(t):
                if lhs > a * (table[s | a_mask] - table[s]) + tol:
                    return False
    return True


def naive_split_bound(table, m, a, tol=1e-9):
    """Check the per-item split bound over every family of carrier sets.

    For disjoint A, B and any choice of B_x <= B per item x in A:
    v(A | B) <= a * sum_x v(x | B_x).  Exponential in 2^m twice; keep m <= 3.
    """
    full = (1 << m) - 1
    for a_mask in range(1, full + 1):
        items = [j for j in range(m) if a_mask >> j & 1]
        for b in submasks(full & ~a_mask):
            lhs = table[b | a_mask] - table[b]
            for picks in product(*(list(submasks(b)) for _ in items)):
                rhs = sum(table[bx | (1 << x)] - table[bx]
                          for x, bx in zip(items, picks))
                if lhs > a * rhs + tol:
                    return False
    return True


def naive_inner_singletons(table, m, a, tol=1e-9):
    """Check sum_{x in A} v(x | S - x) <= a * v(A | S - A) for A <= S."""
    full = (1 << m) - 1
    for s in range(full + 1):
        for a_mask in submasks(s):
            if a_mask == 0:
                continue
            lhs = sum(table[s] - table[s & ~(1 << x)]
                      for x in range(m) if a_mask >> x & 1)
            rhs = table[s] - table[s & ~a_mask]
            if lhs > a * rhs + tol:
                return False
    return True


def naive_outer_singletons(table, m, a, tol=1e-9):
    """Check v(A | S) <= a * sum_{x in A} v(x | S) for A disjoint from S."""
    full = (1 << m) - 1
    for s in range(full + 1):
        for a_mask in submasks(full & ~s):
            if a_mask == 0:
                continue
            lhs = table[s | a_mask] - table[s]
            rhs = sum(table[s | (1 << x)] - table[s]
                      for x in range(m) if a_mask >> x & 1)
            if lhs > a * rhs + tol:
                return False
    return True


def naive_is_local_optimum(economy, masks, tol=1e-9):
    """True when no single-item move or grab raises total value."""
    m = economy.num_items
    n = economy.num_agents
    tables = [v.table for v in economy.valuations]
    owner = {}
    for i in range(n):
        for j in range(m):
            if masks[i] >> j & 1:
                owner[j] = i
    total = sum(tables[i][masks[i]] for i in range(n))
    for j in range(m):
        jb = 1 << j
        src = owner.get(j)
        for i in range(n):
            if i == src:
                continue
            trial = list(masks)
            if src is not None:
                trial[src] &= ~jb
            trial[i] |= jb
            if sum(tables[k][trial[k]] for k in range(n)) > total + tol:
                return False
    return True
