"""Core data model: bundles, valuations, economies, allocations, prices.

The item universe is small (at most ``MAX_ITEMS`` items), so a valuation is
a dense float64 table over all ``2^m`` bundles, indexed by bit mask.  All
operations are pure; enumeration-heavy ones iterate bundles in ascending
mask order so results are deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from . import tolerances
from .bitops import indices_of, mask_of, subset_sums

MAX_ITEMS = 24


@dataclass(frozen=True, order=True)
class Bundle:
    """An order-insensitive set of item indices, stored as a bit mask."""

    mask: int
    num_items: int

    def __post_init__(self):
        if not 1 <= self.num_items <= MAX_ITEMS:
            raise ValueError(f"num_items must be in [1, {MAX_ITEMS}], got {self.num_items}")
        if not 0 <= self.mask < (1 << self.num_items):
            raise ValueError(f"mask {self.mask:#x} out of range for {self.num_items} items")

    @classmethod
    def from_indices(cls, indices: Iterable[int], num_items: int) -> "Bundle":
        return cls(mask_of(indices), num_items)

    @classmethod
    def empty(cls, num_items: int) -> "Bundle":
        return cls(0, num_items)

    @classmethod
    def full(cls, num_items: int) -> "Bundle":
        return cls((1 << num_items) - 1, num_items)

    @property
    def members(self) -> tuple[int, ...]:
        return indices_of(self.mask)

    def __len__(self) -> int:
        return self.mask.bit_count()

    def __iter__(self):
        return iter(self.members)

    def __contains__(self, item: int) -> bool:
        return bool((self.mask >> item) & 1)

    def __or__(self, other: "Bundle") -> "Bundle":
        return Bundle(self.mask | other.mask, self.num_items)

    def __and__(self, other: "Bundle") -> "Bundle":
        return Bundle(self.mask & other.mask, self.num_items)

    def __sub__(self, other: "Bundle") -> "Bundle":
        return Bundle(self.mask & ~other.mask, self.num_items)

    def add(self, item: int) -> "Bundle":
        return Bundle(self.mask | (1 << item), self.num_items)

    def remove(self, item: int) -> "Bundle":
        return Bundle(self.mask & ~(1 << item), self.num_items)

    def issubset(self, other: "Bundle") -> bool:
        return self.mask & ~other.mask == 0

    def isdisjoint(self, other: "Bundle") -> bool:
        return self.mask & other.mask == 0

    def __repr__(self) -> str:
        return f"Bundle({{{', '.join(map(str, self.members))}}}, m={self.num_items})"


def _as_mask(bundle) -> int:
    """Accept a Bundle or a raw mask int."""
    if isinstance(bundle, Bundle):
        return bundle.mask
    return int(bundle)


class Valuation:
    """Total value table of one agent over all bundles of ``num_items`` items.

    ``table[mask]`` is the value of the bundle with that mask.  Construction
    checks shape and finiteness only; normalization (empty bundle worth 0)
    and free disposal (supersets worth at least as much) are linted by
    :func:`validate_valuation`, so deliberately broken tables can be built
    and inspected.
    """

    __slots__ = ("num_items", "table")

    def __init__(self, num_items: int, table):
        if not 1 <= num_items <= MAX_ITEMS:
            raise ValueError(f"num_items must be in [1, {MAX_ITEMS}], got {num_items}")
        arr = np.ascontiguousarray(table, dtype=float)
        if arr.shape != (1 << num_items,):
            raise ValueError(
                f"table must have length 2^{num_items} = {1 << num_items}, got shape {arr.shape}"
            )
        if not np.isfinite(arr).all():
            raise ValueError("valuation table contains non-finite entries")
        arr.setflags(write=False)
        object.__setattr__(self, "num_items", num_items)
        object.__setattr__(self, "table", arr)

    def __setattr__(self, name, value):
        raise AttributeError("Valuation is immutable")

    def value(self, bundle) -> float:
        return float(self.table[_as_mask(bundle)])

    def marginal(self, add, base) -> float:
        return marginal_value(self, add, base)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Valuation):
            return NotImplemented
        return self.num_items == other.num_items and np.array_equal(self.table, other.table)

    __hash__ = None

    def __repr__(self) -> str:
        return f"Valuation(num_items={self.num_items})"


class TableViolation(NamedTuple):
    """A witness that a valuation table breaks normalization or free disposal."""

    kind: str  # "normalization" | "free_disposal"
    subset: Bundle
    superset: Bundle

    def describe(self, valuation: "Valuation") -> str:
        if self.kind == "normalization":
            return f"empty bundle valued {valuation.value(self.subset)!r}, expected 0"
        return (
            f"bundle {self.subset.members} valued {valuation.value(self.subset)!r} exceeds "
            f"superset {self.superset.members} valued {valuation.value(self.superset)!r}"
        )


def validate_valuation(v: Valuation, tol=None) -> list[TableViolation]:
    """Check normalization and free disposal; empty list iff both hold.

    Free disposal is checked on adjacent pairs (S, S + item), which is
    equivalent to the full subset ordering by transitivity, and each
    violation names the witnessing pair.
    """
    tol = tolerances.resolve(tol)
    m = v.num_items
    out: list[TableViolation] = []
    if abs(v.table[0]) > tol:
        empty = Bundle.empty(m)
        out.append(TableViolation("normalization", empty, empty))
    masks = np.arange(1 << m, dtype=np.int64)
    for j in range(m):
        jb = 1 << j
        lo = masks[(masks & jb) == 0]
        bad = np.nonzero(v.table[lo] > v.table[lo | jb] + tol)[0]
        for idx in bad:
            s = int(lo[idx])
            out.append(TableViolation("free_disposal", Bundle(s, m), Bundle(s | jb, m)))
    return out


def marginal_value(v: Valuation, add, base) -> float:
    """v(A | S) = v(A + S) - v(S) for disjoint A and S."""
    a = _as_mask(add)
    s = _as_mask(base)
    if a & s:
        raise ValueError(
            f"marginal_value needs disjoint bundles, got overlap {indices_of(a & s)}"
        )
    return float(v.table[a | s] - v.table[s])


class Economy:
    """Named items plus one valuation per named agent, all over the same items."""

    __slots__ = ("items", "agent_names", "valuations", "_item_index", "_agent_index")

    def __init__(self, items: Sequence[str], agents: Sequence[tuple[str, Valuation]]):
        items = tuple(str(x) for x in items)
        if not items:
            raise ValueError("economy needs at least one item")
        if len(items) > MAX_ITEMS:
            raise ValueError(f"at most {MAX_ITEMS} items supported, got {len(items)}")
        if len(set(items)) != len(items):
            raise ValueError("item names must be unique")
        agents = tuple((str(name), val) for name, val in agents)
        if not agents:
            raise ValueError("economy needs at least one agent")
        names = [name for name, _ in agents]
        if len(set(names)) != len(names):
            raise ValueError("agent names must be unique")
        m = len(items)
        for name, val in agents:
            if not isinstance(val, Valuation):
                raise ValueError(f"agent {name!r}: expected a Valuation")
            if val.num_items != m:
                raise ValueError(
                    f"agent {name!r}: valuation covers {val.num_items} items, economy has {m}"
                )
            violations = validate_valuation(val)
            if violations:
                details = "; ".join(t.describe(val) for t in violations[:3])
                raise ValueError(f"agent {name!r}: invalid valuation: {details}")
        object.__setattr__(self, "items", items)
        object.__setattr__(self, "agent_names", tuple(names))
        object.__setattr__(self, "valuations", tuple(val for _, val in agents))
        object.__setattr__(self, "_item_index", {x: j for j, x in enumerate(items)})
        object.__setattr__(self, "_agent_index", {x: i for i, x in enumerate(names)})

    def __setattr__(self, name, value):
        raise AttributeError("Economy is immutable")

    @property
    def num_items(self) -> int:
        return len(self.items)

    @property
    def num_agents(self) -> int:
        return len(self.agent_names)

    def item_index(self, name: str) -> int:
        try:
            return self._item_index[name]
        except KeyError:
            raise ValueError(f"unknown item {name!r}; items are {list(self.items)}") from None

    def agent_index(self, name) -> int:
        if isinstance(name, int):
            if not 0 <= name < self.num_agents:
                raise ValueError(f"agent index {name} out of range")
            return name
        try:
            return self._agent_index[name]
        except KeyError:
            raise ValueError(
                f"unknown agent {name!r}; agents are {list(self.agent_names)}"
            ) from None

    def valuation(self, agent) -> Valuation:
        return self.valuations[self.agent_index(agent)]

    def bundle(self, names: Iterable[str]) -> Bundle:
        return Bundle(mask_of(self.item_index(x) for x in names), self.num_items)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Economy):
            return NotImplemented
        return (
            self.items == other.items
            and self.agent_names == other.agent_names
            and self.valuations == other.valuations
        )

    __hash__ = None

    def __repr__(self) -> str:
        return f"Economy(items={list(self.items)}, agents={list(self.agent_names)})"


@dataclass(frozen=True)
class Allocation:
    """Partial assignment of items to agents; ``None`` marks an unallocated item.

    ``assignment[j]`` is the receiving agent's index for item ``j``.  Each
    item appears in at most one bundle by construction.
    """

    assignment: tuple

    def __post_init__(self):
        cleaned = []
        for owner in self.assignment:
            if owner is None:
                cleaned.append(None)
            else:
                owner = int(owner)
                if owner < 0:
                    raise ValueError(f"agent index must be nonnegative, got {owner}")
                cleaned.append(owner)
        object.__setattr__(self, "assignment", tuple(cleaned))

    @classmethod
    def nothing_assigned(cls, num_items: int) -> "Allocation":
        return cls((None,) * num_items)

    @classmethod
    def single_owner(cls, num_items: int, agent: int) -> "Allocation":
        return cls((agent,) * num_items)

    @property
    def num_items(self) -> int:
        return len(self.assignment)

    @property
    def is_total(self) -> bool:
        return all(owner is not None for owner in self.assignment)

    @property
    def unallocated_mask(self) -> int:
        return mask_of(j for j, owner in enumerate(self.assignment) if owner is None)

    def bundle_masks(self, num_agents: int) -> list[int]:
        """Per-agent bundle masks (index-aligned with the economy's agents)."""
        masks = [0] * num_agents
        for j, owner in enumerate(self.assignment):
            if owner is not None:
                if owner >= num_agents:
                    raise ValueError(
                        f"item {j} assigned to agent {owner}, but only {num_agents} agents exist"
                    )
                masks[owner] |= 1 << j
        return masks

    def owner_of(self, item: int):
        return self.assignment[item]

    def move(self, item: int, to_agent: int) -> "Allocation":
        new = list(self.assignment)
        new[item] = to_agent
        return Allocation(tuple(new))


class PriceVector:
    """Nonnegative item prices, index-aligned with the economy's items."""

    __slots__ = ("values",)

    def __init__(self, values, *, tol=None):
        tol = tolerances.resolve(tol)
        arr = np.ascontiguousarray(values, dtype=float)
        if arr.ndim != 1:
            raise ValueError("prices must be a flat sequence")
        if not np.isfinite(arr).all():
            raise ValueError("prices must be finite")
        if (arr < -tol).any():
            j = int(np.argmin(arr))
            raise ValueError(f"price of item index {j} is negative: {arr[j]!r}")
        arr = np.maximum(arr, 0.0)  # clamp tolerated round-off
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    def __setattr__(self, name, value):
        raise AttributeError("PriceVector is immutable")

    @classmethod
    def zeros(cls, num_items: int) -> "PriceVector":
        return cls(np.zeros(num_items))

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, j: int) -> float:
        return float(self.values[j])

    def __iter__(self):
        return iter(float(x) for x in self.values)

    def total(self, bundle=None) -> float:
        if bundle is None:
            return float(self.values.sum())
        members = indices_of(_as_mask(bundle))
        return float(self.values[list(members)].sum()) if members else 0.0

    def __eq__(self, other) -> bool:
        if not isinstance(other, PriceVector):
            return NotImplemented
        return np.array_equal(self.values, other.values)

    __hash__ = None

    def __repr__(self) -> str:
        return f"PriceVector({self.values.tolist()})"


def _check_pair(e: Economy, f: Allocation) -> list[int]:
    """Dimension checks for (economy, allocation); returns per-agent masks."""
    if f.num_items != e.num_items:
        raise ValueError(
            f"allocation covers {f.num_items} items, economy has {e.num_items}"
        )
    return f.bundle_masks(e.num_agents)


def _check_prices(e: Economy, p: PriceVector) -> np.ndarray:
    if len(p) != e.num_items:
        raise ValueError(f"price vector has {len(p)} entries, economy has {e.num_items} items")
    return p.values


def social_value(e: Economy, f: Allocation) -> float:
    """Sum over agents of the value of their allocated bundle."""
    masks = _check_pair(e, f)
    return float(sum(v.table[mask] for v, mask in zip(e.valuations, masks)))


# ---------------------------------------------------------------------------
# Valuation families


def additive_valuation(item_values) -> Valuation:
    """v(S) = sum of per-item values."""
    vals = np.asarray(item_values, dtype=float)
    return Valuation(len(vals), subset_sums(vals))


def unit_demand_valuation(item_values) -> Valuation:
    """v(S) = best single item in S."""
    vals = np.asarray(item_values, dtype=float)
    m = len(vals)
    table = np.zeros(1 << m)
    for j in range(m):
        masks = np.arange(1 << m)
        table = np.where((masks >> j) & 1, np.maximum(table, vals[j]), table)
    return Valuation(m, table)


def symmetric_valuation(values_by_size) -> Valuation:
    """v(S) depends only on |S|; values_by_size has m + 1 entries."""
    by_size = np.asarray(values_by_size, dtype=float)
    m = len(by_size) - 1
    if m < 1:
        raise ValueError("values_by_size needs at least two entries (sizes 0 and 1)")
    masks = np.arange(1 << m, dtype=np.int64)
    sizes = np.zeros(1 << m, dtype=np.int64)
    for j in range(m):
        sizes += (masks >> j) & 1
    return Valuation(m, by_size[sizes])


def budgeted_additive_valuation(item_values, budget: float) -> Valuation:
    """v(S) = min(budget, sum of per-item values)."""
    vals = np.asarray(item_values, dtype=float)
    return Valuation(len(vals), np.minimum(subset_sums(vals), float(budget)))


def explicit_valuation(num_items: int, entries, *, partial: bool = True) -> Valuation:
    """Build from explicit (bundle, value) pairs.

    ``entries`` maps bundle masks (or iterables of item indices) to values.
    Unspecified bundles are completed by monotone closure: value(B) is the
    max over specified A below B, and 0 when none is specified.  A specified
    pair that itself breaks free disposal or normalization is an error.
    """
    size = 1 << num_items
    specified = np.full(size, np.nan)
    for key, value in entries.items() if hasattr(entries, "items") else entries:
        mask = key if isinstance(key, int) else mask_of(key)
        if not 0 <= mask < size:
            raise ValueError(f"bundle mask {mask:#x} out of range for {num_items} items")
        value = float(value)
        if not np.isnan(specified[mask]) and specified[mask] != value:
            raise ValueError(
                f"bundle {indices_of(mask)} specified twice with different values"
            )
        specified[mask] = value
    if not partial and np.isnan(specified).any():
        missing = int(np.isnan(specified).nonzero()[0][0])
        raise ValueError(f"full table required; bundle {indices_of(missing)} missing")
    if not np.isnan(specified[0]) and abs(specified[0]) > tolerances.EPS:
        raise ValueError(f"empty bundle must be valued 0, got {specified[0]!r}")
    table = np.where(np.isnan(specified), 0.0, specified)
    closure = table.copy()
    masks = np.arange(size, dtype=np.int64)
    for j in range(num_items):
        jb = 1 << j
        hi = masks[(masks & jb) != 0]
        closure[hi] = np.maximum(closure[hi], closure[hi ^ jb])
    bad = ~np.isnan(specified) & (specified + tolerances.EPS < closure)
    if bad.any():
        b = int(np.nonzero(bad)[0][0])
        raise ValueError(
            f"explicit table violates free disposal: bundle {indices_of(b)} valued "
            f"{specified[b]!r} but a specified subset is worth {closure[b]!r}"
        )
    return Valuation(num_items, closure)


_FAMILY_KEYS = {
    "explicit": ("table",),
    "additive": ("values",),
    "unit_demand": ("values",),
    "symmetric": ("by_size",),
    "budgeted_additive": ("values", "budget"),
}


def build_valuation(num_items: int, spec: dict) -> Valuation:
    """Construct a valuation from a family spec dict (see the JSON schema).

    ``spec["type"]`` selects the family; bundle keys in explicit tables are
    item-index iterables (name resolution happens in the JSON layer).  The
    result always satisfies normalization and free disposal, otherwise this
    raises with witnesses.
    """
    if "type" not in spec:
        raise ValueError("valuation spec needs a 'type' key")
    kind = spec["type"]
    if kind not in _FAMILY_KEYS:
        raise ValueError(
            f"unknown valuation type {kind!r}; expected one of {sorted(_FAMILY_KEYS)}"
        )
    for key in _FAMILY_KEYS[kind]:
        if key not in spec:
            raise ValueError(f"valuation type {kind!r} needs a {key!r} key")

    def _item_array(values) -> np.ndarray:
        arr = np.zeros(num_items)
        for j, value in values.items() if hasattr(values, "items") else enumerate(values):
            arr[int(j)] = float(value)
        return arr

    if kind == "explicit":
        v = explicit_valuation(num_items, spec["table"])
    elif kind == "additive":
        v = additive_valuation(_item_array(spec["values"]))
    elif kind == "unit_demand":
        v = unit_demand_valuation(_item_array(spec["values"]))
    elif kind == "symmetric":
        by_size = [float(x) for x in spec["by_size"]]
        if len(by_size) != num_items + 1:
            raise ValueError(
                f"symmetric spec needs {num_items + 1} entries (sizes 0..{num_items}), "
                f"got {len(by_size)}"
            )
        v = symmetric_valuation(by_size)
    else:
        v = budgeted_additive_valuation(_item_array(spec["values"]), spec["budget"])
    if v.num_items != num_items:
        raise ValueError(
            f"valuation spec covers {v.num_items} items, economy has {num_items}"
        )
    violations = validate_valuation(v)
    if violations:
        details = "; ".join(t.describe(v) for t in violations[:3])
        raise ValueError(f"valuation spec violates table laws: {details}")
    return v
