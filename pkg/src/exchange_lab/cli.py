"""Command-line entry point.

Subcommands:

* ``analyze``   -- submodularity indices, integral and fractional optima,
  dual prices, and the integral gap of an economy file.
* ``verify``    -- quality report plus selected equilibrium checks for an
  (economy, allocation, prices) triple.
* ``run``       -- one procedure: greedy | local-search | optimal |
  supporting-prices | max-q | max-quasi-q, optionally chained with
  ``--verify``.
* ``examples``  -- write the built-in example economies with canonical
  allocations and prices.

Reports are deterministic: same inputs and flags give byte-identical output.
Exit codes: 0 success, 1 a requested check failed under ``--strict``,
2 input error, 3 non-convergence.
"""

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
from dataclasses import dataclass, fields
from typing import Optional

import numpy as np

from . import __version__
from .algorithms import (
    PriceRule,
    SearchPolicy,
    greedy_allocate,
    is_local_optimum,
    local_optimum_search,
    optimal_allocation,
    supporting_prices,
)
from .catalog import EXAMPLE_NAMES, build_example
from .complementarity import economy_index, submodularity_index
from .economy import Economy, social_value
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
from .jsonio import (
    InputError,
    allocation_to_json,
    economy_to_json,
    load_allocation,
    load_economy,
    load_prices,
    prices_to_json,
    save_json,
)
from .lp import dual_prices, fractional_optimum
from .tolerances import resolve

__all__ = ["RunConfig", "Report", "main"]

_PROCEDURES = (
    "greedy",
    "local-search",
    "optimal",
    "supporting-prices",
    "max-q",
    "max-quasi-q",
)


@dataclass(frozen=True)
class RunConfig:
    """Everything one invocation needs, parsed from flags.

    Unset tolerances fall back to module defaults; the seed default is 0 so
    repeated runs match byte for byte.
    """

    command: str
    procedure: Optional[str] = None
    economy: Optional[str] = None
    allocation: Optional[str] = None
    prices: Optional[str] = None
    r: Optional[float] = None
    s: Optional[float] = None
    c: Optional[float] = None
    walrasian: bool = False
    quasi: bool = False
    single_swap: bool = False
    order: Optional[str] = None
    lam: float = 0.0
    policy: str = "best"
    seed: int = 0
    move_cap: int = 1_000_000
    min_gain: Optional[float] = None
    equal_prices: bool = False
    verify: bool = False
    names: tuple = ()
    a: Optional[float] = None
    epsilon: Optional[float] = None
    out: Optional[str] = None
    out_dir: str = "."
    format: str = "json"
    strict: bool = False
    tol: Optional[float] = None


@dataclass(frozen=True)
class Report:
    """Serializable outcome of one command.

    ``economy_sha256`` fingerprints the economy content (not the file
    bytes), so reformatting an input file does not change the report.
    """

    command: str
    economy_sha256: Optional[str]
    results: dict
    version: str = __version__

    def to_data(self) -> dict:
        return _clean(
            {
                "command": self.command,
                "economy_sha256": self.economy_sha256,
                "version": self.version,
                "results": self.results,
            }
        )


# ---------------------------------------------------------------------------
# Serialization helpers


def _round12(x: float) -> float:
    return float(f"{x:.12g}")


def _clean(obj):
    """Recursively convert to JSON-ready data with 12-significant-digit
    floats and the string "infinite" for unbounded quantities."""
    if obj is None or isinstance(obj, (bool, str, int)):
        return obj
    if isinstance(obj, float):
        if math.isinf(obj):
            return "infinite"
        return _round12(obj)
    if isinstance(obj, (np.floating, np.integer)):
        return _clean(obj.item())
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _fingerprint(e: Economy) -> str:
    canonical = json.dumps(economy_to_json(e), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def _verdict_data(v: EquilibriumVerdict) -> dict:
    return {
        "holds": v.holds,
        "violations": [
            {"condition": cond, "witness": wit} for cond, wit in v.violations
        ],
        "truncated": v.truncated,
    }


def _quality_data(e: Economy, q: QualityReport) -> dict:
    witness = None
    if q.binding_os_witness is not None:
        agent, bundle = q.binding_os_witness
        witness = {
            "agent": e.agent_names[agent],
            "bundle": [e.items[j] for j in bundle.members],
        }
    return {
        "r_star": "infinite" if q.r_star is None else q.r_star,
        "s_star": "infinite" if q.s_star is None else q.s_star,
        "unallocated_price_ok": q.unallocated_price_ok,
        "binding_ir_agent": None
        if q.binding_ir_agent is None
        else e.agent_names[q.binding_ir_agent],
        "binding_os_witness": witness,
    }


def _flatten(obj, prefix: str, rows: list) -> None:
    if isinstance(obj, dict):
        for key in obj:
            _flatten(obj[key], f"{prefix}.{key}" if prefix else str(key), rows)
    elif isinstance(obj, list):
        for idx, value in enumerate(obj):
            _flatten(value, f"{prefix}[{idx}]", rows)
    else:
        rows.append((prefix, obj))


def _render(report: Report, fmt: str) -> str:
    data = report.to_data()
    if fmt == "json":
        return json.dumps(data, indent=2, sort_keys=True) + "\n"
    if report.command not in ("analyze", "verify"):
        raise InputError("csv output supports flat reports only; use --format json")
    rows: list = []
    _flatten(data, "", rows)
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["key", "value"])
    for key, value in rows:
        writer.writerow([key, "" if value is None else value])
    return buffer.getvalue()


# ---------------------------------------------------------------------------
# Commands


def cmd_analyze(cfg: RunConfig) -> tuple[Report, int]:
    e = load_economy(cfg.economy)
    tol = resolve(cfg.tol)
    agents = [
        {
            "name": name,
            "submodularity_index": submodularity_index(e.valuation(i), cfg.tol).to_json(),
        }
        for i, name in enumerate(e.agent_names)
    ]
    best_f, m_int = optimal_allocation(e)
    _, m_frac = fractional_optimum(e)
    duals = dual_prices(e)
    results = {
        "agents": agents,
        "max_index": economy_index(e, cfg.tol).to_json(),
        "integral_optimum": m_int,
        "optimal_allocation": allocation_to_json(e, best_f),
        "fractional_optimum": m_frac,
        "dual_prices": prices_to_json(e, duals.item_prices),
        "dual_agent_utilities": {
            name: float(duals.agent_utilities[i])
            for i, name in enumerate(e.agent_names)
        },
        "integral_gap": (m_frac / m_int) if m_int > tol else None,
    }
    return Report("analyze", _fingerprint(e), results), 0


def cmd_verify(cfg: RunConfig) -> tuple[Report, int]:
    e = load_economy(cfg.economy)
    f = load_allocation(cfg.allocation, e)
    p = load_prices(cfg.prices, e)
    r = 1.0 if cfg.r is None else cfg.r
    s = 1.0 if cfg.s is None else cfg.s

    checks: dict = {
        "local": {
            "r": r,
            "s": s,
            **_verdict_data(verify_local_equilibrium(e, f, p, r, s, cfg.tol)),
        }
    }
    if cfg.c is not None:
        checks["strong"] = {
            "c": cfg.c,
            **_verdict_data(verify_strong_ir(e, f, p, cfg.c, cfg.tol)),
        }
    if cfg.walrasian:
        checks["walrasian"] = _verdict_data(verify_walrasian(e, f, p, cfg.tol))
    if cfg.quasi:
        checks["quasi_quality"] = quasi_walrasian_quality(e, f, p, cfg.tol)
    if cfg.single_swap:
        checks["single_swap"] = _verdict_data(check_single_swap(e, f, p, cfg.tol))

    results = {
        "quality": _quality_data(e, max_quality(e, f, p, cfg.tol)),
        "social_value": social_value(e, f),
        "checks": checks,
    }
    failed = any(
        isinstance(check, dict) and check.get("holds") is False
        for check in checks.values()
    )
    code = 1 if cfg.strict and failed else 0
    return Report("verify", _fingerprint(e), results), code


def _run_greedy(cfg: RunConfig, e: Economy) -> tuple[dict, int]:
    order = None
    if cfg.order:
        order = [e.item_index(x.strip()) for x in cfg.order.split(",")]
    f, p, trace = greedy_allocate(e, order=order, rule=PriceRule(cfg.lam))
    results = {
        "allocation": allocation_to_json(e, f),
        "prices": prices_to_json(e, p),
        "value": social_value(e, f),
        "trace": {
            "order": [e.items[j] for j in trace.order],
            "winners": [e.agent_names[i] for i in trace.winners],
            "stage_marginals": [list(stage) for stage in trace.stage_marginals],
            "stage_prices": [trace.prices[j] for j in trace.order],
        },
    }
    if cfg.verify:
        results["quality"] = _quality_data(e, max_quality(e, f, p, cfg.tol))
        results["local_check"] = _verdict_data(
            verify_local_equilibrium(e, f, p, 1.0, 1.0, cfg.tol)
        )
    return results, 0


def _run_local_search(cfg: RunConfig, e: Economy) -> tuple[dict, int]:
    f0 = load_allocation(cfg.allocation, e) if cfg.allocation else None
    policy_args = {"improvement_rule": cfg.policy, "seed": cfg.seed}
    if cfg.min_gain is not None:
        policy_args["min_gain"] = cfg.min_gain
    result = local_optimum_search(
        e, f0=f0, policy=SearchPolicy(**policy_args), move_cap=cfg.move_cap
    )
    results = {
        "allocation": allocation_to_json(e, result.allocation),
        "value": social_value(e, result.allocation),
        "moves": result.num_moves,
        "status": "converged" if result.converged else "move-cap-exhausted",
    }
    if cfg.verify:
        results["local_optimum"] = _verdict_data(
            is_local_optimum(e, result.allocation, cfg.tol)
        )
    return results, 0 if result.converged else 3


def _run_optimal(cfg: RunConfig, e: Economy) -> tuple[dict, int]:
    f, value = optimal_allocation(e)
    results = {"allocation": allocation_to_json(e, f), "value": value}
    if cfg.verify:
        results["local_optimum"] = _verdict_data(is_local_optimum(e, f, cfg.tol))
    return results, 0


def _run_supporting_prices(cfg: RunConfig, e: Economy) -> tuple[dict, int]:
    if not cfg.allocation:
        raise InputError("supporting-prices needs --allocation")
    f = load_allocation(cfg.allocation, e)
    p = supporting_prices(e, f, rule=PriceRule(cfg.lam), tol=cfg.tol)
    results = {
        "allocation": allocation_to_json(e, f),
        "prices": prices_to_json(e, p),
        "value": social_value(e, f),
    }
    if cfg.verify:
        results["quality"] = _quality_data(e, max_quality(e, f, p, cfg.tol))
    return results, 0


def _run_max_q(cfg: RunConfig, e: Economy) -> tuple[dict, int]:
    if not cfg.allocation:
        raise InputError("max-q needs --allocation")
    f = load_allocation(cfg.allocation, e)
    q, witness = max_q_for_allocation(
        e, f, equal_prices=cfg.equal_prices, tol=cfg.tol
    )
    results = {
        "q_star": q,
        "prices": prices_to_json(e, witness),
        "equal_prices": cfg.equal_prices,
    }
    if cfg.verify:
        probe = 1.0 if math.isinf(q) else q
        results["local_check"] = _verdict_data(
            verify_local_equilibrium(e, f, witness, probe, probe, cfg.tol)
        )
    return results, 0


def _run_max_quasi_q(cfg: RunConfig, e: Economy) -> tuple[dict, int]:
    if not cfg.allocation:
        raise InputError("max-quasi-q needs --allocation")
    f = load_allocation(cfg.allocation, e)
    q, witness = max_quasi_q_for_allocation(e, f, tol=cfg.tol)
    results = {"q_star": q, "prices": prices_to_json(e, witness)}
    if cfg.verify:
        results["quasi_quality"] = quasi_walrasian_quality(e, f, witness, cfg.tol)
    return results, 0


def cmd_run(cfg: RunConfig) -> tuple[Report, int]:
    e = load_economy(cfg.economy)
    runner = {
        "greedy": _run_greedy,
        "local-search": _run_local_search,
        "optimal": _run_optimal,
        "supporting-prices": _run_supporting_prices,
        "max-q": _run_max_q,
        "max-quasi-q": _run_max_quasi_q,
    }[cfg.procedure]
    results, code = runner(cfg, e)
    results = {"procedure": cfg.procedure, **results}
    return Report("run", _fingerprint(e), results), code


def cmd_examples(cfg: RunConfig) -> tuple[Report, int]:
    names = cfg.names or EXAMPLE_NAMES
    unknown = [name for name in names if name not in EXAMPLE_NAMES]
    if unknown:
        raise InputError(
            f"unknown example names {unknown}; known: {', '.join(EXAMPLE_NAMES)}"
        )
    os.makedirs(cfg.out_dir, exist_ok=True)
    written: dict = {}
    for name in names:
        case = build_example(
            name,
            a=cfg.a if name == "ex-asubmod" else None,
            epsilon=cfg.epsilon if name == "ex-smallq" else None,
        )
        paths = {
            kind: os.path.join(cfg.out_dir, f"{name}.{kind}.json")
            for kind in ("economy", "allocation", "prices")
        }
        save_json(paths["economy"], case.economy_spec)
        save_json(paths["allocation"], allocation_to_json(case.economy, case.allocation))
        save_json(paths["prices"], prices_to_json(case.economy, case.prices))
        written[name] = {
            "note": case.note,
            "files": paths,
            "economy_sha256": _fingerprint(case.economy),
        }
        if case.params:
            written[name]["params"] = case.params
    return Report("examples", None, {"written": written}), 0


# ---------------------------------------------------------------------------
# Argument parsing


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="exchange-lab",
        description="Analysis toolkit for discrete exchange economies.",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument(
        "--format", choices=("json", "csv"), default="json", help="report format"
    )
    common.add_argument(
        "--tol", type=float, default=None, help="comparison tolerance override"
    )
    econ = argparse.ArgumentParser(add_help=False)
    econ.add_argument("--economy", required=True, help="economy JSON file")

    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser(
        "analyze",
        parents=[econ, common],
        help="indices, optima, dual prices, and the integral gap",
    )

    verify = sub.add_parser(
        "verify",
        parents=[econ, common],
        help="quality report and equilibrium checks for a priced allocation",
    )
    verify.add_argument("--allocation", required=True, help="allocation JSON file")
    verify.add_argument("--prices", required=True, help="prices JSON file")
    verify.add_argument("--r", type=float, default=None, help="sell-side quality (default 1)")
    verify.add_argument("--s", type=float, default=None, help="buy-side quality (default 1)")
    verify.add_argument(
        "--c", type=float, default=None, help="also run the strong inward check at this multiplier"
    )
    verify.add_argument("--walrasian", action="store_true", help="also run the market-clearing check")
    verify.add_argument("--quasi", action="store_true", help="also report the quasi quality")
    verify.add_argument("--single-swap", action="store_true", help="also run the one-for-one swap check")
    verify.add_argument("--strict", action="store_true", help="exit 1 when a requested check fails")

    run = sub.add_parser(
        "run", parents=[econ, common], help="run one allocation or pricing procedure"
    )
    run.add_argument("procedure", choices=_PROCEDURES)
    run.add_argument("--allocation", help="input allocation (start point or subject)")
    run.add_argument("--order", help="comma-separated item order for greedy")
    run.add_argument(
        "--lambda",
        dest="lam",
        type=float,
        default=0.0,
        help="price position inside the feasible band, 0 = low end, 1 = high end",
    )
    run.add_argument(
        "--policy", choices=("first", "best", "random"), default="best",
        help="local-search improvement rule",
    )
    run.add_argument("--seed", type=int, default=0, help="seed for --policy random")
    run.add_argument("--move-cap", type=int, default=1_000_000, help="transfer budget for local search")
    run.add_argument("--min-gain", type=float, default=None, help="smallest transfer gain local search accepts")
    run.add_argument(
        "--equal-prices", action="store_true", help="restrict max-q to uniform prices"
    )
    run.add_argument(
        "--verify", action="store_true", help="append a quality report for the result"
    )

    examples = sub.add_parser(
        "examples", parents=[common], help="write the built-in example files"
    )
    examples.add_argument(
        "names", nargs="*", metavar="NAME", default=(),
        help=f"which examples to write (default: all of {', '.join(EXAMPLE_NAMES)})",
    )
    examples.add_argument("--out-dir", default=".", help="directory for the files")
    examples.add_argument("--a", type=float, default=None, help="pair bonus for ex-asubmod")
    examples.add_argument(
        "--epsilon", type=float, default=None, help="low value for ex-smallq"
    )
    return parser


def _config_from_args(ns: argparse.Namespace) -> RunConfig:
    values = {}
    for spec in fields(RunConfig):
        if hasattr(ns, spec.name):
            value = getattr(ns, spec.name)
            if spec.name == "names":
                value = tuple(value)
            values[spec.name] = value
    return RunConfig(**values)


_COMMANDS = {
    "analyze": cmd_analyze,
    "verify": cmd_verify,
    "run": cmd_run,
    "examples": cmd_examples,
}


def main(argv=None) -> int:
    ns = _build_parser().parse_args(argv)
    cfg = _config_from_args(ns)
    try:
        report, code = _COMMANDS[cfg.command](cfg)
        text = _render(report, cfg.format)
    except InputError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except ArithmeticError as err:
        print(f"error: {err}", file=sys.stderr)
        return 3
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
