"""Built-in example economies with canonical allocation/price pairs.

Each entry bundles a small economy, a JSON-ready family spec for it, and one
allocation/price pair worth studying.  The cases cover the interesting
regimes at desk scale: stable-but-suboptimal pairings, economies with no
exact equilibrium, arbitrarily low attainable quality, and greedy runs whose
outcome is not transfer-stable.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

from .economy import Allocation, Economy, PriceVector
from .jsonio import economy_from_json

__all__ = ["ExampleCase", "EXAMPLE_NAMES", "build_example"]


@dataclass(frozen=True)
class ExampleCase:
    """A named economy plus one canonical allocation/price pair.

    ``economy_spec`` is the JSON-schema dict the economy file is written
    from; rebuilding from it reproduces ``economy`` exactly.  ``note`` says
    what the case demonstrates.
    """

    name: str
    note: str
    economy: Economy
    economy_spec: dict
    allocation: Allocation
    prices: PriceVector
    params: dict = field(default_factory=dict)


def _economy_from_spec(spec: dict) -> Economy:
    return economy_from_json(spec)


def _table(entries: dict) -> list:
    return [
        {"bundle": list(names), "value": value} for names, value in entries.items()
    ]


def ex_first() -> ExampleCase:
    """Two unit-demand agents; the crossed pairing is stable but suboptimal.

    Giving each agent the item it values less, at uniform prices 2, leaves
    nobody willing to sell back or to buy extra; value 6 against optimum 8.
    Halving the prices halves the attainable quality to 1/2.
    """
    spec = {
        "items": ["a", "b"],
        "agents": [
            {"name": "1", "valuation": {"type": "unit_demand", "values": [4.0, 3.0]}},
            {"name": "2", "valuation": {"type": "unit_demand", "values": [3.0, 4.0]}},
        ],
    }
    return ExampleCase(
        name="ex-first",
        note="crossed unit-demand pairing: stable at uniform prices, value 6 of 8",
        economy=_economy_from_spec(spec),
        economy_spec=spec,
        allocation=Allocation((1, 0)),
        prices=PriceVector([2.0, 2.0]),
    )


def ex_welfare_pair() -> ExampleCase:
    """Budgeted-additive pair hitting the factor-2 welfare bound exactly.

    The straight pairing (a to 1, b to 2) is market-clearing at prices
    (1.5, 1.5) with value 4; the crossed pairing at prices (1, 1) is a
    quality-(1,1) pair of value 2, exactly half the optimum.
    """
    spec = {
        "items": ["a", "b"],
        "agents": [
            {
                "name": "1",
                "valuation": {
                    "type": "budgeted_additive",
                    "values": [2.0, 1.0],
                    "budget": 2.0,
                },
            },
            {
                "name": "2",
                "valuation": {
                    "type": "budgeted_additive",
                    "values": [1.0, 2.0],
                    "budget": 2.0,
                },
            },
        ],
    }
    return ExampleCase(
        name="ex-welfare-pair",
        note="straight pairing clears the market at (1.5, 1.5); the crossed one"
        " is half as good yet fully stable at (1, 1)",
        economy=_economy_from_spec(spec),
        economy_spec=spec,
        allocation=Allocation((0, 1)),
        prices=PriceVector([1.5, 1.5]),
    )


def ex_smallq(epsilon: float = 0.04) -> ExampleCase:
    """One item, two agents, and an equilibrium of arbitrarily low quality.

    The low-value agent holds the item at price sqrt(epsilon): quality
    (sqrt(epsilon), sqrt(epsilon)), while the welfare ratio is 1/epsilon.
    Shows the welfare guarantee 1 + 1/q**2 is essentially tight.
    """
    if not 0.0 < epsilon <= 1.0:
        raise ValueError(f"epsilon must lie in (0, 1], got {epsilon!r}")
    spec = {
        "items": ["a"],
        "agents": [
            {"name": "1", "valuation": {"type": "additive", "values": [1.0]}},
            {"name": "2", "valuation": {"type": "additive", "values": [epsilon]}},
        ],
    }
    return ExampleCase(
        name="ex-smallq",
        note="low-value holder at price sqrt(epsilon): quality sqrt(epsilon),"
        " welfare ratio 1/epsilon",
        economy=_economy_from_spec(spec),
        economy_spec=spec,
        allocation=Allocation((1,)),
        prices=PriceVector([math.sqrt(epsilon)]),
        params={"epsilon": epsilon},
    )


def ex_no_wal() -> ExampleCase:
    """Two identical pair-loving agents; no market-clearing prices exist.

    Bundles are worth 0/0/3/4 by size.  Best quality over all allocations
    and prices is 2*sqrt(2)/3, reached by giving everything to one agent at
    uniform prices sqrt(2).  Integral optimum 4, fractional optimum 4.5.
    """
    symmetric = {"type": "symmetric", "by_size": [0.0, 0.0, 3.0, 4.0]}
    spec = {
        "items": ["a", "b", "c"],
        "agents": [
            {"name": "1", "valuation": symmetric},
            {"name": "2", "valuation": symmetric},
        ],
    }
    return ExampleCase(
        name="ex-no-wal",
        note="identical pair-loving agents: best attainable quality is"
        " 2*sqrt(2)/3, no exact equilibrium",
        economy=_economy_from_spec(spec),
        economy_spec=spec,
        allocation=Allocation((0, 0, 0)),
        prices=PriceVector([math.sqrt(2.0)] * 3),
    )


def ex_no_eq() -> ExampleCase:
    """Three agents wanting overlapping pairs; equilibrium prices surprise.

    Agent 1 wants {a,b}, agent 2 wants {b,c}, agent 3 wants {c,a}, each pair
    worth 1.  With everything allocated to agent 1, the only quality-(1,1)
    prices are (0, 0, 1): the two privately contested items are free and the
    holder pays full price for the item it does not even use.
    """
    spec = {
        "items": ["a", "b", "c"],
        "agents": [
            {
                "name": "1",
                "valuation": {"type": "explicit", "table": _table({("a", "b"): 1.0})},
            },
            {
                "name": "2",
                "valuation": {"type": "explicit", "table": _table({("b", "c"): 1.0})},
            },
            {
                "name": "3",
                "valuation": {"type": "explicit", "table": _table({("c", "a"): 1.0})},
            },
        ],
    }
    return ExampleCase(
        name="ex-no-eq",
        note="cyclic pair demands: unique quality-(1,1) prices are (0, 0, 1)"
        " for the all-to-one allocation",
        economy=_economy_from_spec(spec),
        economy_spec=spec,
        allocation=Allocation((0, 0, 0)),
        prices=PriceVector([0.0, 0.0, 1.0]),
    )


def ex_asubmod(a: float = 3.0) -> ExampleCase:
    """One complement-loving agent against an additive one, tunable by ``a``.

    Agent 1 values each item at 1 and the pair at 1 + a; agent 2 is additive
    (1, 1).  Giving both items to agent 2 at unit prices yields exactly
    quality (1, 2/(1+a)): the more complementary agent 1 is, the worse the
    outward fit.  At a = 1 both agents are submodular.
    """
    if a < 0.0:
        raise ValueError(f"pair bonus must be nonnegative, got {a!r}")
    spec = {
        "items": ["a", "b"],
        "agents": [
            {
                "name": "1",
                "valuation": {
                    "type": "explicit",
                    "table": _table({("a",): 1.0, ("b",): 1.0, ("a", "b"): 1.0 + a}),
                },
            },
            {"name": "2", "valuation": {"type": "additive", "values": [1.0, 1.0]}},
        ],
    }
    return ExampleCase(
        name="ex-asubmod",
        note="pair-bonus agent versus additive agent: quality degrades to"
        " (1, 2/(1+a)) as the bonus a grows",
        economy=_economy_from_spec(spec),
        economy_spec=spec,
        allocation=Allocation((1, 1)),
        prices=PriceVector([1.0, 1.0]),
        params={"a": a},
    )


def ex_no_pareto() -> ExampleCase:
    """Submodular economy where greedy output is not transfer-stable.

    Greedy in order (a, b) hands both items to agent 1 at prices (4, 1), but
    moving item a to agent 2 afterwards gains 4 - 2 = 2, so the outcome is
    not a local optimum and fails the strong sell-back test at item a.
    """
    spec = {
        "items": ["a", "b"],
        "agents": [
            {
                "name": "1",
                "valuation": {
                    "type": "explicit",
                    "table": _table({("a",): 5.0, ("b",): 5.0, ("a", "b"): 7.0}),
                },
            },
            {
                "name": "2",
                "valuation": {
                    "type": "explicit",
                    "table": _table({("a",): 4.0, ("b",): 1.0, ("a", "b"): 5.0}),
                },
            },
        ],
    }
    return ExampleCase(
        name="ex-no-pareto",
        note="greedy hands both items to agent 1 at prices (4, 1); a single"
        " transfer then improves welfare by 2",
        economy=_economy_from_spec(spec),
        economy_spec=spec,
        allocation=Allocation((0, 0)),
        prices=PriceVector([4.0, 1.0]),
    )


_BUILDERS: dict[str, Callable[..., ExampleCase]] = {
    "ex-first": ex_first,
    "ex-welfare-pair": ex_welfare_pair,
    "ex-smallq": ex_smallq,
    "ex-no-wal": ex_no_wal,
    "ex-no-eq": ex_no_eq,
    "ex-asubmod": ex_asubmod,
    "ex-no-pareto": ex_no_pareto,
}

EXAMPLE_NAMES: tuple = tuple(_BUILDERS)


def build_example(
    name: str, *, a: Optional[float] = None, epsilon: Optional[float] = None
) -> ExampleCase:
    """Build a catalog case by name, forwarding the parameters it accepts.

    ``a`` only applies to ex-asubmod and ``epsilon`` to ex-smallq; passing a
    parameter to a case that does not take it is an error.
    """
    if name not in _BUILDERS:
        known = ", ".join(EXAMPLE_NAMES)
        raise KeyError(f"unknown example {name!r}; known names: {known}")
    kwargs = {}
    if a is not None:
        if name != "ex-asubmod":
            raise ValueError(f"parameter 'a' does not apply to {name}")
        kwargs["a"] = a
    if epsilon is not None:
        if name != "ex-smallq":
            raise ValueError(f"parameter 'epsilon' does not apply to {name}")
        kwargs["epsilon"] = epsilon
    return _BUILDERS[name](**kwargs)
