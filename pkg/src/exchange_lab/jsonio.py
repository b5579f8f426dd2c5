"""JSON readers and writers for economies, allocations, and prices.

File formats:

* economy: ``{"items": [name...], "agents": [{"name": str, "valuation":
  {...}}...]}`` where a valuation spec carries a ``type`` key (explicit,
  additive, unit_demand, symmetric, budgeted_additive) plus its parameters.
  Explicit tables are lists of ``{"bundle": [item-name...], "value": num}``
  rows in any order; loaders canonicalize.
* allocation: ``{"assignment": {"agent-name": [item-name...]},
  "unallocated": [item-name...]}``.
* prices: ``{"item-name": number, ...}``.

Floats are written with Python's shortest round-trip representation, so a
saved file reloads to a bit-identical in-memory object.  Malformed JSON is
reported with line and column; schema problems with the offending key path.
"""

import json
from typing import Optional

from .economy import (
    Allocation,
    Economy,
    PriceVector,
    build_valuation,
)
from .bitops import indices_of

__all__ = [
    "InputError",
    "economy_from_json",
    "economy_to_json",
    "allocation_from_json",
    "allocation_to_json",
    "prices_from_json",
    "prices_to_json",
    "load_economy",
    "load_allocation",
    "load_prices",
    "save_json",
]


class InputError(ValueError):
    """A file or its contents cannot be understood; message says where."""


def _expect(data, kind, where: str):
    if not isinstance(data, kind) or isinstance(data, bool):
        want = (
            "/".join(k.__name__ for k in kind)
            if isinstance(kind, tuple)
            else kind.__name__
        )
        raise InputError(f"{where}: expected {want}, got {type(data).__name__}")
    return data


def _expect_key(data: dict, key: str, kind, where: str):
    if key not in data:
        raise InputError(f"{where}: missing key {key!r}")
    return _expect(data[key], kind, f"{where}.{key}")


def _item_table(items: list) -> dict:
    return {name: j for j, name in enumerate(items)}


def _resolve_items(names, items: dict, where: str) -> tuple:
    out = []
    for name in _expect(names, list, where):
        if name not in items:
            raise InputError(f"{where}: unknown item {name!r}")
        out.append(items[name])
    return tuple(out)


def _valuation_spec_to_indices(spec: dict, items: dict, where: str) -> dict:
    """Translate item names inside a valuation spec into item indices."""
    spec = dict(_expect(spec, dict, where))
    if spec.get("type") != "explicit":
        return spec
    rows = _expect_key(spec, "table", list, where)
    entries = []
    for k, row in enumerate(rows):
        rw = f"{where}.table[{k}]"
        row = _expect(row, dict, rw)
        bundle = _resolve_items(_expect_key(row, "bundle", list, rw), items, rw)
        value = _expect_key(row, "value", (int, float), rw)
        entries.append((bundle, float(value)))
    spec["table"] = entries
    return spec


def economy_from_json(data) -> Economy:
    """Build an Economy from parsed JSON data (the economy schema)."""
    root = _expect(data, dict, "economy")
    item_names = _expect_key(root, "items", list, "economy")
    for j, name in enumerate(item_names):
        _expect(name, str, f"economy.items[{j}]")
    items = _item_table(item_names)
    if len(items) != len(item_names):
        raise InputError("economy.items: item names must be unique")
    agents = []
    for k, agent in enumerate(_expect_key(root, "agents", list, "economy")):
        where = f"economy.agents[{k}]"
        agent = _expect(agent, dict, where)
        name = _expect_key(agent, "name", str, where)
        spec = _valuation_spec_to_indices(
            _expect_key(agent, "valuation", dict, where), items, f"{where}.valuation"
        )
        try:
            valuation = build_valuation(len(item_names), spec)
        except ValueError as err:
            raise InputError(f"{where}.valuation: {err}") from err
        agents.append((name, valuation))
    try:
        return Economy(item_names, agents)
    except ValueError as err:
        raise InputError(f"economy: {err}") from err


def economy_to_json(e: Economy) -> dict:
    """Serialize an economy with explicit tables (zero bundles implied)."""
    agents = []
    for i, name in enumerate(e.agent_names):
        table = e.valuation(i).table
        rows = []
        for mask in range(1, table.size):
            value = float(table[mask])
            if value != 0.0:
                rows.append(
                    {
                        "bundle": [e.items[j] for j in indices_of(mask)],
                        "value": value,
                    }
                )
        agents.append({"name": name, "valuation": {"type": "explicit", "table": rows}})
    return {"items": list(e.items), "agents": agents}


def _item_of(e: Economy, name, where: str) -> int:
    try:
        return e.item_index(name)
    except (ValueError, TypeError) as err:
        raise InputError(f"{where}: {err}") from err


def allocation_from_json(data, e: Economy) -> Allocation:
    """Build an Allocation from parsed JSON; unmentioned items stay free."""
    root = _expect(data, dict, "allocation")
    assignment: list = [None] * e.num_items
    seen_agents = set()
    for agent_name, item_list in _expect_key(
        root, "assignment", dict, "allocation"
    ).items():
        where = f"allocation.assignment[{agent_name!r}]"
        try:
            agent = e.agent_index(agent_name)
        except ValueError as err:
            raise InputError(f"{where}: {err}") from err
        if agent in seen_agents:
            raise InputError(f"{where}: agent listed twice")
        seen_agents.add(agent)
        for item_name in _expect(item_list, list, where):
            j = _item_of(e, item_name, where)
            if assignment[j] is not None:
                raise InputError(f"{where}: item {item_name!r} assigned twice")
            assignment[j] = agent
    for item_name in _expect(
        root.get("unallocated", []), list, "allocation.unallocated"
    ):
        where = "allocation.unallocated"
        j = _item_of(e, item_name, where)
        if assignment[j] is not None:
            raise InputError(
                f"{where}: item {item_name!r} is both assigned and unallocated"
            )
    return Allocation(tuple(assignment))


def allocation_to_json(e: Economy, f: Allocation) -> dict:
    if f.num_items != e.num_items:
        raise InputError(
            f"allocation covers {f.num_items} items, economy has {e.num_items}"
        )
    assignment: dict = {name: [] for name in e.agent_names}
    unallocated = []
    for j, owner in enumerate(f.assignment):
        if owner is None:
            unallocated.append(e.items[j])
        else:
            assignment[e.agent_names[owner]].append(e.items[j])
    return {"assignment": assignment, "unallocated": unallocated}


def prices_from_json(data, e: Economy) -> PriceVector:
    root = _expect(data, dict, "prices")
    values = [None] * e.num_items
    for item_name, value in root.items():
        where = f"prices[{item_name!r}]"
        j = _item_of(e, item_name, where)
        values[j] = float(_expect(value, (int, float), where))
    missing = [e.items[j] for j, v in enumerate(values) if v is None]
    if missing:
        raise InputError(f"prices: missing items {missing}")
    try:
        return PriceVector(values)
    except ValueError as err:
        raise InputError(f"prices: {err}") from err


def prices_to_json(e: Economy, p: PriceVector) -> dict:
    if len(p) != e.num_items:
        raise InputError(f"prices cover {len(p)} items, economy has {e.num_items}")
    return {e.items[j]: float(p[j]) for j in range(e.num_items)}


def _load_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return json.load(handle)
    except OSError as err:
        raise InputError(f"{path}: {err.strerror or err}") from err
    except json.JSONDecodeError as err:
        raise InputError(f"{path}:{err.lineno}:{err.colno}: {err.msg}") from err


def load_economy(path: str) -> Economy:
    data = _load_json(path)
    try:
        return economy_from_json(data)
    except InputError as err:
        raise InputError(f"{path}: {err}") from err


def load_allocation(path: str, e: Economy) -> Allocation:
    data = _load_json(path)
    try:
        return allocation_from_json(data, e)
    except InputError as err:
        raise InputError(f"{path}: {err}") from err


def load_prices(path: str, e: Economy) -> PriceVector:
    data = _load_json(path)
    try:
        return prices_from_json(data, e)
    except InputError as err:
        raise InputError(f"{path}: {err}") from err


def save_json(path: str, data) -> None:
    """Write canonical JSON: two-space indent, trailing newline."""
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(data, handle, indent=2)
        handle.write("\n")
