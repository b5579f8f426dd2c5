"""Toolkit for discrete exchange economies with indivisible items.

Models valuations as dense tables over all bundles, allocates by greedy and
local-search procedures, solves the fractional relaxation and its dual with
a built-in simplex, and verifies or maximizes the quality of priced
allocations.  See the README for the command-line surface.
"""

__version__ = "0.1.0"

from .economy import (
    Allocation,
    Bundle,
    Economy,
    PriceVector,
    TableViolation,
    Valuation,
    additive_valuation,
    budgeted_additive_valuation,
    build_valuation,
    explicit_valuation,
    marginal_value,
    social_value,
    symmetric_valuation,
    unit_demand_valuation,
    validate_valuation,
)
from .complementarity import (
    SubmodularityIndex,
    economy_index,
    inner_singleton_marginals_bounded,
    is_submodular,
    outer_singleton_marginals_bounded,
    split_marginals_bounded,
    submodularity_index,
    superset_marginals_bounded,
)
from .equilibrium import (
    EquilibriumVerdict,
    QualityReport,
    check_single_swap,
    max_q_for_allocation,
    max_quasi_q_for_allocation,
    max_quality,
    quasi_walrasian_quality,
    verify_local_equilibrium,
    verify_strong_ir,
    verify_walrasian,
)
from .algorithms import (
    GreedyTrace,
    Move,
    PriceRule,
    SearchPolicy,
    SearchResult,
    greedy_allocate,
    is_local_optimum,
    local_optimum_search,
    optimal_allocation,
    supporting_prices,
)
from .lp import (
    DualSolution,
    FractionalAllocation,
    LpOutcome,
    LpProblem,
    dual_prices,
    feasible_point,
    fractional_optimum,
    solve_feasibility,
    solve_lp,
)
from .catalog import EXAMPLE_NAMES, ExampleCase, build_example

__all__ = [
    "__version__",
    "Allocation",
    "Bundle",
    "Economy",
    "PriceVector",
    "TableViolation",
    "Valuation",
    "additive_valuation",
    "budgeted_additive_valuation",
    "build_valuation",
    "explicit_valuation",
    "marginal_value",
    "social_value",
    "symmetric_valuation",
    "unit_demand_valuation",
    "validate_valuation",
    "SubmodularityIndex",
    "economy_index",
    "inner_singleton_marginals_bounded",
    "is_submodular",
    "outer_singleton_marginals_bounded",
    "split_marginals_bounded",
    "submodularity_index",
    "superset_marginals_bounded",
    "EquilibriumVerdict",
    "QualityReport",
    "check_single_swap",
    "max_q_for_allocation",
    "max_quasi_q_for_allocation",
    "max_quality",
    "quasi_walrasian_quality",
    "verify_local_equilibrium",
    "verify_strong_ir",
    "verify_walrasian",
    "GreedyTrace",
    "Move",
    "PriceRule",
    "SearchPolicy",
    "SearchResult",
    "greedy_allocate",
    "is_local_optimum",
    "local_optimum_search",
    "optimal_allocation",
    "supporting_prices",
    "DualSolution",
    "FractionalAllocation",
    "LpOutcome",
    "LpProblem",
    "dual_prices",
    "feasible_point",
    "fractional_optimum",
    "solve_feasibility",
    "solve_lp",
    "EXAMPLE_NAMES",
    "ExampleCase",
    "build_example",
]
