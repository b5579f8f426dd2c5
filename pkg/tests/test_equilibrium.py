"""Equilibrium quality, verification verdicts, and best-q searches."""

import math

import numpy as np
import pytest

from exchange_lab import (
    Allocation,
    Economy,
    PriceVector,
    additive_valuation,
    build_example,
    check_single_swap,
    greedy_allocate,
    max_q_for_allocation,
    max_quality,
    max_quasi_q_for_allocation,
    quasi_walrasian_quality,
    verify_local_equilibrium,
    verify_strong_ir,
    verify_walrasian,
)

from generators import corpus
from oracles import naive_max_quality, naive_quasi_quality

ROOT8_OVER_3 = math.sqrt(8.0) / 3.0  # best quality the pair-lovers support


def _case_triple(name, **kw):
    case = build_example(name, **kw)
    return case.economy, case.allocation, case.prices


def test_quality_on_crossed_unit_demand():
    e, f, p = _case_triple("ex-first")
    rep = max_quality(e, f, p)
    assert rep.r_star == pytest.approx(1.5)
    assert rep.s_star == pytest.approx(2.0)
    assert rep.unallocated_price_ok
    assert verify_local_equilibrium(e, f, p, 1.0, 1.0).holds
    assert verify_local_equilibrium(e, f, p, 1.5, 2.0).holds
    assert not verify_local_equilibrium(e, f, p, 1.6, 2.0).holds
    assert not verify_local_equilibrium(e, f, p, 1.5, 2.1).holds


def test_quality_on_pair_lovers():
    e, f, p = _case_triple("ex-no-wal")
    rep = max_quality(e, f, p)
    assert rep.r_star == pytest.approx(ROOT8_OVER_3, abs=1e-12)
    assert rep.s_star == pytest.approx(ROOT8_OVER_3, abs=1e-12)
    assert rep.binding_ir_agent == 0
    agent, bundle = rep.binding_os_witness
    assert agent == 1
    assert bundle.mask == 0b011  # ties resolve to the smallest pair mask
    assert verify_local_equilibrium(e, f, p, ROOT8_OVER_3, ROOT8_OVER_3).holds
    assert not verify_local_equilibrium(e, f, p, 1.0, 1.0).holds


def test_quality_on_worthless_holder():
    e, f, p = _case_triple("ex-smallq", epsilon=0.04)
    rep = max_quality(e, f, p)
    assert rep.r_star == pytest.approx(0.2, abs=1e-12)
    assert rep.s_star == pytest.approx(0.2, abs=1e-12)


def test_quality_on_cyclic_pairs():
    e, f, p = _case_triple("ex-no-eq")
    rep = max_quality(e, f, p)
    assert rep.r_star == pytest.approx(1.0)
    assert rep.s_star == pytest.approx(1.0)
    assert verify_local_equilibrium(e, f, p, 1.0, 1.0).holds


def test_quality_degrades_with_pair_bonus():
    for a in (1.0, 2.0, 3.0, 5.0):
        e, f, p = _case_triple("ex-asubmod", a=a)
        rep = max_quality(e, f, p)
        assert rep.r_star == pytest.approx(1.0)
        assert rep.s_star == pytest.approx(2.0 / (1.0 + a), abs=1e-12)


def test_quality_infinite_sides():
    # straight budgeted pairing: no outward deviation has positive marginal
    e, f, p = _case_triple("ex-welfare-pair")
    rep = max_quality(e, f, p)
    assert rep.s_star is None
    assert rep.r_star == pytest.approx(4.0 / 3.0)
    # zero prices: no agent pays anything, so no r constraint either
    rep0 = max_quality(e, f, PriceVector.zeros(2))
    assert rep0.r_star is None


def test_quality_flags_priced_leftovers():
    e, _, p = _case_triple("ex-first")
    partial = Allocation((None, 0))
    rep = max_quality(e, partial, p)
    assert not rep.unallocated_price_ok
    verdict = verify_local_equilibrium(e, partial, p, 1.0, 1.0)
    assert not verdict.holds
    assert any(cond == "unallocated-price" for cond, _ in verdict.violations)


def test_quality_matches_naive_on_greedy_pairs():
    for e in corpus("budgeted", 3, seed=211) + corpus("unit_demand", 3, seed=223):
        f, p, _ = greedy_allocate(e)
        rep = max_quality(e, f, p)
        masks = f.bundle_masks(e.num_agents)
        r0, s0 = naive_max_quality(e, masks, list(p))
        if r0 is None:
            assert rep.r_star is None
        else:
            assert rep.r_star == pytest.approx(r0, abs=1e-9)
        if s0 is None:
            assert rep.s_star is None
        else:
            assert rep.s_star == pytest.approx(s0, abs=1e-9)
        got = quasi_walrasian_quality(e, f, p)
        assert got == pytest.approx(
            naive_quasi_quality(e, masks, list(p)), abs=1e-9
        )


def test_verify_rejects_negative_parameters():
    e, f, p = _case_triple("ex-first")
    with pytest.raises(ValueError):
        verify_local_equilibrium(e, f, p, -0.1, 1.0)
    with pytest.raises(ValueError):
        verify_strong_ir(e, f, p, -1.0)


def test_witnesses_name_agents_and_bundles():
    e, f, p = _case_triple("ex-no-wal")
    verdict = verify_local_equilibrium(e, f, p, 1.0, 1.0)
    assert not verdict.holds
    conditions = {cond for cond, _ in verdict.violations}
    assert conditions == {"individual-rationality", "outward-stability"}
    texts = " | ".join(wit for _, wit in verdict.violations)
    assert "agent 1" in texts and "{a,b}" in texts


def test_violation_list_truncates_at_cap():
    e = Economy(
        "abcdef",
        [
            ("1", additive_valuation(np.ones(6))),
            ("2", additive_valuation(np.ones(6))),
        ],
    )
    f = Allocation((0,) * 6)
    verdict = verify_local_equilibrium(e, f, PriceVector.zeros(6), 1.0, 1.0)
    assert not verdict.holds
    assert len(verdict.violations) == 32
    assert verdict.truncated


def test_strong_ir_checks_inner_bundles():
    e, f, p = _case_triple("ex-no-pareto")
    assert verify_local_equilibrium(e, f, p, 1.0, 1.0).holds
    assert verify_strong_ir(e, f, p, 0.5).holds
    verdict = verify_strong_ir(e, f, p, 1.0)
    assert not verdict.holds
    assert any("{a}" in wit for _, wit in verdict.violations)


def test_walrasian_verdicts_on_catalog():
    e, f, p = _case_triple("ex-welfare-pair")
    assert verify_walrasian(e, f, p).holds
    assert quasi_walrasian_quality(e, f, p) == pytest.approx(1.0)

    e, f, p = _case_triple("ex-first")
    verdict = verify_walrasian(e, f, p)
    assert not verdict.holds
    assert all(cond == "utility-maximization" for cond, _ in verdict.violations)
    assert quasi_walrasian_quality(e, f, p) == pytest.approx(0.5)

    e, f, p = _case_triple("ex-no-wal")
    assert not verify_walrasian(e, f, p).holds
    assert quasi_walrasian_quality(e, f, p) == 0.0  # negative held utility


def test_single_swap_detects_crossed_pairing():
    e, f, p = _case_triple("ex-first")
    verdict = check_single_swap(e, f, p)
    assert not verdict.holds
    assert len(verdict.violations) == 2  # both agents want to trade across
    straight = Allocation((0, 1))
    assert check_single_swap(e, straight, p).holds


def test_max_q_reproduces_canonical_prices():
    case = build_example("ex-no-eq")
    q, prices = max_q_for_allocation(case.economy, case.allocation)
    assert q == pytest.approx(1.0, abs=1e-9)
    assert list(prices) == pytest.approx([0.0, 0.0, 1.0], abs=1e-6)


def test_max_q_equal_prices_is_tighter():
    case = build_example("ex-no-eq")
    q, prices = max_q_for_allocation(case.economy, case.allocation, equal_prices=True)
    assert q == pytest.approx(math.sqrt(2.0 / 3.0), abs=1e-6)
    assert prices[0] == pytest.approx(1.0 / math.sqrt(6.0), abs=1e-4)
    assert len(set(round(x, 9) for x in prices)) == 1


def test_max_q_on_pair_lovers():
    case = build_example("ex-no-wal")
    q, prices = max_q_for_allocation(case.economy, case.allocation)
    assert q == pytest.approx(ROOT8_OVER_3, abs=1e-6)
    assert verify_local_equilibrium(
        case.economy, case.allocation, prices, q, q
    ).holds


def test_max_q_infinite_when_no_outward_gain():
    case = build_example("ex-welfare-pair")
    q, prices = max_q_for_allocation(case.economy, case.allocation)
    assert q == math.inf
    assert list(prices) == [0.0, 0.0]


def test_max_q_structural_zero():
    # worthless holder blocks every positive q exactly
    e = Economy(
        "ab",
        [
            ("1", additive_valuation([0.0, 0.0])),
            ("2", additive_valuation([1.0, 1.0])),
        ],
    )
    f = Allocation((0, 0))
    q, prices = max_q_for_allocation(e, f)
    assert q == 0.0
    assert list(prices) == [0.0, 0.0]
    # q = 0 still is a (0, 0)-local equilibrium at zero prices
    assert verify_local_equilibrium(e, f, prices, 0.0, 0.0).holds


def test_max_q_rejects_wide_economies():
    wide = Economy(
        [f"i{k}" for k in range(17)],
        [("1", additive_valuation(np.ones(17)))],
    )
    with pytest.raises(ValueError):
        max_q_for_allocation(wide, Allocation.single_owner(17, 0))


def test_max_quasi_q_walrasian_case():
    case = build_example("ex-welfare-pair")
    q, prices = max_quasi_q_for_allocation(case.economy, case.allocation)
    assert q == pytest.approx(1.0)
    assert verify_walrasian(case.economy, case.allocation, prices).holds


def test_max_quasi_q_zero_case():
    case = build_example("ex-no-wal")
    q, _ = max_quasi_q_for_allocation(case.economy, case.allocation)
    assert q == pytest.approx(0.0, abs=1e-6)


def test_max_quasi_q_witness_attains_quality():
    for e in corpus("additive", 3, seed=307):
        f, _, _ = greedy_allocate(e)
        q, prices = max_quasi_q_for_allocation(e, f)
        got = quasi_walrasian_quality(e, f, prices)
        assert got >= q - 1e-6


def test_price_length_must_match_items():
    e, f, _ = _case_triple("ex-first")
    with pytest.raises(ValueError):
        max_quality(e, f, PriceVector([1.0]))
