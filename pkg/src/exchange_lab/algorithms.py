"""Allocation procedures: marginal-greedy assignment with stage prices,
strict-improvement local search over single-item transfers, the exact
optimal split by dynamic programming, and the supported price band of a
local optimum.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .economy import Allocation, Economy, PriceVector, _check_pair
from .equilibrium import EquilibriumVerdict, _Collector
from .kernels import alloc_dp
from .tolerances import EPS, resolve


@dataclass(frozen=True)
class PriceRule:
    """Selects a price inside a [lo, hi] band: p = lo + lam * (hi - lo).

    lam = 0 is the second-price (competitor) end, lam = 1 the owner end.
    The field is named ``lam`` because ``lambda`` is reserved in Python.
    """

    lam: float = 0.0

    def __post_init__(self):
        if not 0.0 <= float(self.lam) <= 1.0:
            raise ValueError(f"lam must lie in [0, 1], got {self.lam}")

    def pick(self, lo: float, hi: float) -> float:
        return lo + self.lam * max(hi - lo, 0.0)


@dataclass(frozen=True)
class GreedyTrace:
    """Audit record of a greedy pass.

    ``stage_marginals[k][i]`` is agent i's marginal value for the item
    processed at stage k, just before it was assigned.  ``prices`` aligns
    with item index, like any PriceVector.
    """

    order: tuple
    winners: tuple
    stage_marginals: tuple
    prices: PriceVector


def greedy_allocate(
    e: Economy, order: Optional[Sequence] = None, rule: Optional[PriceRule] = None
) -> tuple[Allocation, PriceVector, GreedyTrace]:
    """Assign items one at a time to the agent with the highest marginal.

    Items are processed in ``order`` (default: index order; names accepted).
    Each item's price sits in the band between the best losing marginal and
    the winner's marginal, selected by ``rule`` (default second-price); with
    a single agent the band floor is 0.  Ties go to the lowest agent index.
    """
    rule = rule or PriceRule()
    m, n = e.num_items, e.num_agents
    if order is None:
        seq = list(range(m))
    else:
        seq = [x if isinstance(x, int) else e.item_index(x) for x in order]
        if sorted(seq) != list(range(m)):
            raise ValueError("order must be a permutation of all items")

    masks = [0] * n
    owner = [0] * m
    prices = np.zeros(m)
    winners = []
    stage_marginals = []
    for j in seq:
        jb = 1 << j
        margs = np.array(
            [float(v.table[masks[i] | jb] - v.table[masks[i]]) for i, v in enumerate(e.valuations)]
        )
        win = int(np.argmax(margs))
        rest = np.delete(margs, win)
        second = float(rest.max()) if len(rest) else 0.0
        masks[win] |= jb
        owner[j] = win
        prices[j] = rule.pick(second, float(margs[win]))
        winners.append(win)
        stage_marginals.append(tuple(float(x) for x in margs))
    trace = GreedyTrace(tuple(seq), tuple(winners), tuple(stage_marginals), PriceVector(prices))
    return Allocation(tuple(owner)), trace.prices, trace


# ---------------------------------------------------------------------------
# Local search over single-item transfers


@dataclass(frozen=True)
class SearchPolicy:
    """How the local search picks among improving transfers.

    improvement_rule: "best" (largest gain, ties to the earliest in scan
    order), "first" (scan order: item index, then target agent), or
    "random" (uniform over improving moves, seeded).  min_gain is the
    strict improvement threshold; it must be positive so the search
    terminates.
    """

    improvement_rule: str = "best"
    seed: Optional[int] = None
    min_gain: float = EPS

    def __post_init__(self):
        if self.improvement_rule not in ("best", "first", "random"):
            raise ValueError(f"unknown improvement rule {self.improvement_rule!r}")
        if not self.min_gain > 0:
            raise ValueError("min_gain must be positive")


@dataclass(frozen=True)
class Move:
    """Transfer of one item between two agents."""

    item: int
    source: int
    target: int
    gain: float


@dataclass(frozen=True)
class SearchResult:
    allocation: Allocation
    moves: tuple
    converged: bool

    @property
    def num_moves(self) -> int:
        return len(self.moves)


def _require_total(e: Economy, f: Allocation) -> list:
    if not f.is_total:
        raise ValueError("allocation must be total (every item assigned to an agent)")
    return list(_check_pair(e, f))


def _transfer_gains(e: Economy, owner: list, masks: list, min_gain: float) -> list:
    """Improving single-item transfers in scan order (item, then target)."""
    out = []
    for j in range(e.num_items):
        jb = 1 << j
        src = owner[j]
        stab = e.valuations[src].table
        loss = float(stab[masks[src]] - stab[masks[src] ^ jb])
        for k in range(e.num_agents):
            if k == src:
                continue
            tab = e.valuations[k].table
            gain = float(tab[masks[k] | jb] - tab[masks[k]]) - loss
            if gain > min_gain:
                out.append(Move(j, src, k, gain))
    return out


def is_local_optimum(e: Economy, f: Allocation, tol: Optional[float] = None) -> EquilibriumVerdict:
    """Check that no single-item transfer raises the social value.

    Holds iff v_i(j | S_i - j) >= v_k(j | S_k) - tol for every owner i,
    item j of theirs, and other agent k.  Violations list the profitable
    transfers.  Total allocations only.
    """
    tol = resolve(tol)
    masks = _require_total(e, f)
    owner = [f.owner_of(j) for j in range(e.num_items)]
    out = _Collector()
    for mv in _transfer_gains(e, owner, masks, tol):
        out.add(
            "local-optimum",
            f"move item {e.items[mv.item]} from agent "
            f"{e.agent_names[mv.source]} to {e.agent_names[mv.target]} "
            f"gains {mv.gain:.6g}",
        )
    return out.verdict()


def local_optimum_search(
    e: Economy,
    f0: Optional[Allocation] = None,
    policy: Optional[SearchPolicy] = None,
    move_cap: int = 1_000_000,
) -> SearchResult:
    """Apply improving single-item transfers until none remains.

    Starts from total allocation ``f0`` (default: item j to agent j mod n).
    Every move raises the social value by more than policy.min_gain, so the
    search terminates; ``converged`` is False only when move_cap stops it
    first.
    """
    policy = policy or SearchPolicy()
    m, n = e.num_items, e.num_agents
    if f0 is None:
        f0 = Allocation(tuple(j % n for j in range(m)))
    masks = _require_total(e, f0)
    owner = [f0.owner_of(j) for j in range(m)]
    rng = np.random.default_rng(policy.seed) if policy.improvement_rule == "random" else None

    applied = []
    for _ in range(move_cap):
        moves = _transfer_gains(e, owner, masks, policy.min_gain)
        if not moves:
            return SearchResult(Allocation(tuple(owner)), tuple(applied), True)
        if policy.improvement_rule == "first":
            mv = moves[0]
        elif policy.improvement_rule == "random":
            mv = moves[int(rng.integers(len(moves)))]
        else:
            mv = max(moves, key=lambda x: x.gain)
        jb = 1 << mv.item
        masks[mv.source] ^= jb
        masks[mv.target] |= jb
        owner[mv.item] = mv.target
        applied.append(mv)
    moves = _transfer_gains(e, owner, masks, policy.min_gain)
    return SearchResult(Allocation(tuple(owner)), tuple(applied), not moves)


def supporting_prices(
    e: Economy, f: Allocation, rule: Optional[PriceRule] = None, tol: Optional[float] = None
) -> PriceVector:
    """Prices inside the band a local optimum supports.

    Each item is priced between the best competitor marginal (lam = 0)
    and the owner's own marginal for it (lam = 1); local optimality makes
    the band nonempty.  Raises ValueError when f is not a local optimum.
    """
    rule = rule or PriceRule()
    verdict = is_local_optimum(e, f, tol)
    if not verdict.holds:
        raise ValueError("allocation is not a local optimum; the price band is empty")
    masks = _check_pair(e, f)
    prices = np.zeros(e.num_items)
    for j in range(e.num_items):
        src = f.owner_of(j)
        jb = 1 << j
        lo = 0.0
        for k in range(e.num_agents):
            if k == src:
                continue
            tab = e.valuations[k].table
            lo = max(lo, float(tab[masks[k] | jb] - tab[masks[k]]))
        own = e.valuations[src].table
        hi = float(own[masks[src]] - own[masks[src] ^ jb])
        prices[j] = rule.pick(lo, hi)
    return PriceVector(prices)


def optimal_allocation(e: Economy) -> tuple[Allocation, float]:
    """Exact social optimum by the split dynamic program.

    The DP may leave worthless items out of every chosen bundle; they are
    merged into agent 0's bundle (free disposal keeps the value unchanged),
    so the returned allocation is total.
    """
    tables = np.stack([v.table for v in e.valuations])
    value, choice = alloc_dp(tables, e.num_items)
    n, m = e.num_agents, e.num_items
    owner = [0] * m
    left = (1 << m) - 1
    for k in range(n - 1, -1, -1):
        t = int(choice[k, left])
        for j in range(m):
            if (t >> j) & 1:
                owner[j] = k
        left ^= t
    # remaining bits stay with agent 0, already the default
    return Allocation(tuple(owner)), float(value)
