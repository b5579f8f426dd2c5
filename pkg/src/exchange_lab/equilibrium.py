"""Equilibrium notions for priced allocations: local (r, s) quality, strong
individual rationality, Walrasian and quasi-Walrasian checks, and searches
for the best multiplier a given allocation supports at any price vector.

Conventions shared by every check in this module:

* prices are nonnegative and a per-call tolerance ``tol`` (default EPS)
  absorbs round-off: an inequality "lhs >= rhs" is accepted when
  ``lhs >= rhs - tol``;
* an outward deviation of agent i is a nonempty bundle A disjoint from the
  agent's own bundle (items held by others and unallocated items alike);
* "infinite" quality is represented by None in reports and by ``math.inf``
  in the bisection results, never by an ad-hoc sentinel number.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .bitops import indices_of, sublattice, subset_sums
from .economy import (
    Allocation,
    Bundle,
    Economy,
    PriceVector,
    _check_pair,
    _check_prices,
)
from .lp import feasible_point
from .tolerances import BISECT_MAX_ITER, BISECT_TOL, resolve

_MAX_WITNESSES = 32


@dataclass(frozen=True, eq=False)
class QualityReport:
    """Best (r, s) pair a priced allocation supports.

    ``r_star`` is the largest r for which every agent keeps
    v_i(S_i) >= r * p(S_i); None when no agent pays more than tol, so any
    r works.  ``s_star`` is the largest s with s * v_i(A | S_i) <= p(A)
    for every outward deviation A; None when every outward marginal is
    within tol of zero.  ``unallocated_price_ok`` records whether all
    unassigned items are priced at (tolerance) zero, which both
    equilibrium notions require independently of r and s.
    ``binding_ir_agent`` is the agent index attaining r_star and
    ``binding_os_witness`` the (agent index, Bundle) pair attaining s_star.
    """

    r_star: Optional[float]
    s_star: Optional[float]
    unallocated_price_ok: bool
    binding_ir_agent: Optional[int] = None
    binding_os_witness: Optional[tuple[int, Bundle]] = None


@dataclass(frozen=True)
class EquilibriumVerdict:
    """Outcome of a direct inequality check.

    ``violations`` holds (condition-id, witness) pairs, at most 32;
    ``truncated`` marks that more existed.  ``holds`` is True iff none
    were found.
    """

    holds: bool
    violations: tuple = ()
    truncated: bool = False


class _Collector:
    def __init__(self):
        self.items: list[tuple[str, str]] = []
        self.truncated = False

    def add(self, condition: str, witness: str) -> None:
        if len(self.items) < _MAX_WITNESSES:
            self.items.append((condition, witness))
        else:
            self.truncated = True

    def verdict(self) -> EquilibriumVerdict:
        return EquilibriumVerdict(not self.items, tuple(self.items), self.truncated)


def _names(e: Economy, bundle: Bundle) -> str:
    """Human-readable item-name listing of a bundle, for witness text."""
    return "{" + ",".join(e.items[j] for j in bundle.members) + "}"


def _sublattice_prices(prices: np.ndarray, mask: int) -> np.ndarray:
    """p(A) for every A in sublattice(mask), in the same ascending order."""
    return subset_sums(prices[list(indices_of(mask))])


def max_quality(
    e: Economy, f: Allocation, p: PriceVector, tol: Optional[float] = None
) -> QualityReport:
    """Largest r and s the pair (f, p) supports, with witnesses.

    Agents whose bundle costs at most tol impose no r constraint; outward
    deviations whose marginal value is at most tol impose no s constraint.
    Ties go to the lowest agent index, then the smallest bundle mask.
    """
    tol = resolve(tol)
    masks = _check_pair(e, f)
    prices = _check_prices(e, p)
    full = (1 << e.num_items) - 1

    unallocated_price_ok = True
    for j in indices_of(f.unallocated_mask):
        if prices[j] > tol:
            unallocated_price_ok = False
            break

    r_star = None
    binding_ir_agent = None
    s_star = None
    binding_os_witness = None
    for i, v in enumerate(e.valuations):
        own = masks[i]
        cost = float(prices[list(indices_of(own))].sum())
        if cost > tol:
            ratio = float(v.table[own]) / cost
            if r_star is None or ratio < r_star:
                r_star = ratio
                binding_ir_agent = i
        comp = full & ~own
        lat = sublattice(comp)
        marg = v.table[lat | own] - v.table[own]
        psum = _sublattice_prices(prices, comp)
        live = np.nonzero(marg > tol)[0]
        for k in live:
            ratio = float(psum[k]) / float(marg[k])
            if s_star is None or ratio < s_star:
                s_star = ratio
                binding_os_witness = (i, Bundle(int(lat[k]), e.num_items))

    return QualityReport(
        r_star=r_star,
        s_star=s_star,
        unallocated_price_ok=unallocated_price_ok,
        binding_ir_agent=binding_ir_agent,
        binding_os_witness=binding_os_witness,
    )


def verify_local_equilibrium(
    e: Economy,
    f: Allocation,
    p: PriceVector,
    r: float,
    s: float,
    tol: Optional[float] = None,
) -> EquilibriumVerdict:
    """Check the three (r, s)-local conditions directly.

    1. unassigned items are priced at most tol;
    2. v_i(S_i) >= r * p(S_i) - tol for every agent;
    3. s * v_i(A | S_i) <= p(A) + tol for every outward deviation A.
    """
    tol = resolve(tol)
    if r < 0 or s < 0:
        raise ValueError("r and s must be nonnegative")
    masks = _check_pair(e, f)
    prices = _check_prices(e, p)
    full = (1 << e.num_items) - 1
    out = _Collector()

    for j in indices_of(f.unallocated_mask):
        if prices[j] > tol:
            out.add("unallocated-price", f"item {e.items[j]} priced {prices[j]:.6g}")

    for i, v in enumerate(e.valuations):
        own = masks[i]
        cost = float(prices[list(indices_of(own))].sum())
        held = float(v.table[own])
        if held < r * cost - tol:
            out.add(
                "individual-rationality",
                f"agent {e.agent_names[i]}: value {held:.6g} < {r:.6g} * cost {cost:.6g}",
            )
        comp = full & ~own
        lat = sublattice(comp)
        marg = v.table[lat | own] - v.table[own]
        psum = _sublattice_prices(prices, comp)
        bad = np.nonzero(s * marg > psum + tol)[0]
        for k in bad:
            bundle = Bundle(int(lat[k]), e.num_items)
            out.add(
                "outward-stability",
                f"agent {e.agent_names[i]}: bundle {_names(e, bundle)} has "
                f"{s:.6g} * marginal {marg[k]:.6g} > price {psum[k]:.6g}",
            )
    return out.verdict()


def verify_strong_ir(
    e: Economy,
    f: Allocation,
    p: PriceVector,
    c: float,
    tol: Optional[float] = None,
) -> EquilibriumVerdict:
    """Inward check at multiplier c: every nonempty part A of an agent's own
    bundle earns its keep, v_i(A | S_i - A) >= c * p(A) - tol."""
    tol = resolve(tol)
    if c < 0:
        raise ValueError("c must be nonnegative")
    masks = _check_pair(e, f)
    prices = _check_prices(e, p)
    out = _Collector()
    for i, v in enumerate(e.valuations):
        own = masks[i]
        if own == 0:
            continue
        lat = sublattice(own)
        marg = v.table[own] - v.table[own ^ lat]
        psum = _sublattice_prices(prices, own)
        bad = np.nonzero(marg < c * psum - tol)[0]
        for k in bad:
            bundle = Bundle(int(lat[k]), e.num_items)
            out.add(
                "strong-individual-rationality",
                f"agent {e.agent_names[i]}: inner bundle {_names(e, bundle)} "
                f"worth {marg[k]:.6g} < {c:.6g} * price {psum[k]:.6g}",
            )
    return out.verdict()


def verify_walrasian(
    e: Economy, f: Allocation, p: PriceVector, tol: Optional[float] = None
) -> EquilibriumVerdict:
    """Walrasian check: unassigned items cost nothing and every agent's
    bundle maximizes utility v_i(D) - p(D) over all 2^m bundles D."""
    tol = resolve(tol)
    masks = _check_pair(e, f)
    prices = _check_prices(e, p)
    psum = subset_sums(prices)
    out = _Collector()
    for j in indices_of(f.unallocated_mask):
        if prices[j] > tol:
            out.add("unallocated-price", f"item {e.items[j]} priced {prices[j]:.6g}")
    for i, v in enumerate(e.valuations):
        util = v.table - psum
        held = float(util[masks[i]])
        best = int(np.argmax(util))
        if util[best] > held + tol:
            bundle = Bundle(best, e.num_items)
            out.add(
                "utility-maximization",
                f"agent {e.agent_names[i]}: utility {held:.6g} but bundle "
                f"{_names(e, bundle)} gives {util[best]:.6g}",
            )
    return out.verdict()


def quasi_walrasian_quality(
    e: Economy, f: Allocation, p: PriceVector, tol: Optional[float] = None
) -> float:
    """Largest q in [0, 1] with u_i(S_i) >= q * u_i(A) for all agents and
    bundles, where u_i(A) = v_i(A) - p(A).

    Returns 0 when some unassigned item has a positive price or some agent
    holds strictly negative utility (then no q in [0, 1] works), and 1 when
    no bundle offers utility above tol.  Capped at 1.
    """
    tol = resolve(tol)
    masks = _check_pair(e, f)
    prices = _check_prices(e, p)
    for j in indices_of(f.unallocated_mask):
        if prices[j] > tol:
            return 0.0
    psum = subset_sums(prices)
    q = 1.0
    for i, v in enumerate(e.valuations):
        util = v.table - psum
        held = float(util[masks[i]])
        if held < -tol:
            return 0.0
        top = float(util.max())
        if top > tol:
            q = min(q, max(held, 0.0) / top)
    return q


def check_single_swap(
    e: Economy, f: Allocation, p: PriceVector, tol: Optional[float] = None
) -> EquilibriumVerdict:
    """One-for-one exchange check: no agent gains by releasing one owned
    item j and taking one outside item k at the posted price difference,
    v_i(S_i) - v_i(S_i - j + k) >= p_j - p_k - tol."""
    tol = resolve(tol)
    masks = _check_pair(e, f)
    prices = _check_prices(e, p)
    full = (1 << e.num_items) - 1
    out = _Collector()
    for i, v in enumerate(e.valuations):
        own = masks[i]
        held = float(v.table[own])
        for j in indices_of(own):
            for k in indices_of(full & ~own):
                swapped = (own ^ (1 << j)) | (1 << k)
                lhs = held - float(v.table[swapped])
                rhs = prices[j] - prices[k]
                if lhs < rhs - tol:
                    out.add(
                        "single-swap",
                        f"agent {e.agent_names[i]}: swap {e.items[j]} -> "
                        f"{e.items[k]} gains {rhs - lhs:.6g}",
                    )
    return out.verdict()


# ---------------------------------------------------------------------------
# Best supportable quality over all price vectors


def _local_rows(e: Economy, masks: tuple, tol: float):
    """Static pieces of the (q, q)-local price system for an allocation.

    Returns (pin, ir_ind, ir_val, out_ind, out_marg): pinned unallocated
    rows, per-agent bundle indicators and values, and outward deviation
    indicators with the largest marginal per deviation mask (rows that share
    a mask only bind through their largest right-hand side).
    """
    m = e.num_items
    full = (1 << m) - 1
    assigned = 0
    for mask in masks:
        assigned |= mask
    pin = []
    for j in indices_of(full & ~assigned):
        row = np.zeros(m)
        row[j] = -1.0
        pin.append(row)

    ir_ind = np.zeros((e.num_agents, m))
    ir_val = np.zeros(e.num_agents)
    best_marg: dict[int, float] = {}
    for i, v in enumerate(e.valuations):
        own = masks[i]
        for j in indices_of(own):
            ir_ind[i, j] = 1.0
        ir_val[i] = float(v.table[own])
        comp = full & ~own
        lat = sublattice(comp)
        marg = v.table[lat | own] - v.table[own]
        for k in range(1, len(lat)):
            a = int(lat[k])
            g = float(marg[k])
            if g > tol and g > best_marg.get(a, -math.inf):
                best_marg[a] = g

    out_ind = np.zeros((len(best_marg), m))
    out_marg = np.zeros(len(best_marg))
    for row, a in enumerate(sorted(best_marg)):
        for j in indices_of(a):
            out_ind[row, j] = 1.0
        out_marg[row] = best_marg[a]
    pin_arr = np.array(pin).reshape(-1, m)
    return pin_arr, ir_ind, ir_val, out_ind, out_marg


def _bisect_feasible(feasible, hi_start: float):
    """Grow [0, hi] until infeasible, then bisect; returns (q, witness)
    from the last feasible probe."""
    lo = 0.0
    wit = feasible(0.0)
    if wit is None:  # pragma: no cover - q = 0 admits the zero vector
        raise RuntimeError("quality system infeasible at q = 0")
    hi = hi_start
    for _ in range(200):
        probe = feasible(hi)
        if probe is None:
            break
        lo, wit = hi, probe
        hi *= 2.0
    else:  # pragma: no cover
        raise RuntimeError("quality bracket failed to close")
    for _ in range(BISECT_MAX_ITER):
        if hi - lo <= BISECT_TOL * max(1.0, lo):
            break
        mid = 0.5 * (lo + hi)
        probe = feasible(mid)
        if probe is None:
            hi = mid
        else:
            lo, wit = mid, probe
    return lo, wit


def max_q_for_allocation(
    e: Economy,
    f: Allocation,
    equal_prices: bool = False,
    tol: Optional[float] = None,
) -> tuple[float, PriceVector]:
    """Largest q such that some price vector makes (f, p) a (q, q)-local
    equilibrium, together with a witness price vector.

    When every outward marginal is within tol of zero the supremum is
    unbounded: returns (math.inf, zero prices).  With ``equal_prices`` the
    search is restricted to vectors that price every item identically
    (unassigned items then force the common price to zero).  Feasibility of
    each probe q is decided by a linear program, and q is located by
    bracketing and bisection.

    One family of infeasibilities is decided exactly instead of numerically:
    at any q > 0, items held by an agent whose bundle is worth zero must be
    priced zero, so an outward deviation with positive marginal value into
    such items (or unassigned ones) rules out every positive q and the
    result is exactly (0, zero prices).
    """
    tol = resolve(tol)
    masks = _check_pair(e, f)
    m = e.num_items
    if m > 16:
        raise ValueError(f"price-system search enumerates 2^m rows; m = {m} exceeds 16")
    pin, ir_ind, ir_val, out_ind, out_marg = _local_rows(e, masks, tol)

    if len(out_marg) == 0:
        return math.inf, PriceVector.zeros(m)

    full = (1 << m) - 1
    forced_zero = full
    for i, mask in enumerate(masks):
        if ir_val[i] > tol:
            forced_zero &= ~mask
    for i, v in enumerate(e.valuations):
        dead = forced_zero & ~masks[i]
        if dead:
            lat = sublattice(dead)
            if float((v.table[lat | masks[i]] - v.table[masks[i]]).max()) > tol:
                return 0.0, PriceVector.zeros(m)

    def feasible(q: float):
        rows = np.vstack([pin, -q * ir_ind, out_ind])
        rhs = np.concatenate([np.zeros(len(pin)), -ir_val, q * out_marg])
        if equal_prices:
            rows = rows.sum(axis=1, keepdims=True)
        p = feasible_point(rows, rhs)
        if p is None:
            return None
        return np.full(m, p[0]) if equal_prices else p

    top = 1.0 + max(float(v.table[-1]) for v in e.valuations)
    q, wit = _bisect_feasible(feasible, top)
    return q, PriceVector(wit)


def max_quasi_q_for_allocation(
    e: Economy, f: Allocation, tol: Optional[float] = None
) -> tuple[float, PriceVector]:
    """Largest q in [0, 1] such that some price vector makes (f, p) a
    q-quasi-Walrasian outcome, with a witness price vector.

    Rows: unassigned items pinned to zero and, for every agent i and every
    bundle A, u_i(S_i) >= q * u_i(A).  Checks q = 1 first and otherwise
    bisects inside [0, 1].
    """
    tol = resolve(tol)
    masks = _check_pair(e, f)
    m, n = e.num_items, e.num_agents
    if m > 16:
        raise ValueError(f"price-system search enumerates 2^m rows; m = {m} exceeds 16")
    size = 1 << m
    full = size - 1

    assigned = 0
    for mask in masks:
        assigned |= mask
    pin = []
    for j in indices_of(full & ~assigned):
        row = np.zeros(m)
        row[j] = -1.0
        pin.append(row)
    pin_arr = np.array(pin).reshape(-1, m)

    ind = np.zeros((size, m))
    for j in range(m):
        ind[:, j] = (np.arange(size) >> j) & 1

    own_ind = np.stack([ind[masks[i]] for i in range(n)])
    own_val = np.array([float(e.valuations[i].table[masks[i]]) for i in range(n)])
    tabs = np.stack([v.table for v in e.valuations])

    def feasible(q: float):
        blocks = [pin_arr]
        rhs = [np.zeros(len(pin_arr))]
        for i in range(n):
            blocks.append(q * ind - own_ind[i][None, :])
            rhs.append(q * tabs[i] - own_val[i])
        return feasible_point(np.vstack(blocks), np.concatenate(rhs))

    wit = feasible(1.0)
    if wit is not None:
        return 1.0, PriceVector(wit)
    lo, wit = 0.0, feasible(0.0)
    if wit is None:  # pragma: no cover - q = 0 admits the zero vector
        raise RuntimeError("quasi system infeasible at q = 0")
    hi = 1.0
    for _ in range(BISECT_MAX_ITER):
        if hi - lo <= BISECT_TOL:
            break
        mid = 0.5 * (lo + hi)
        probe = feasible(mid)
        if probe is None:
            hi = mid
        else:
            lo, wit = mid, probe
    return lo, PriceVector(wit)
