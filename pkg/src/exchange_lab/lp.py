"""Linear programming: a dense two-phase revised simplex with Bland's rule,
the bundle-assignment relaxation built on top of it, and the feasibility
probe used by the quality bisections.

Everything here is deterministic: Bland's rule picks the lowest-index
entering column and the lowest-index basic variable among tied leaving
ratios, which also guarantees termination on the heavily degenerate
feasibility systems.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .bitops import subset_sums
from .economy import Bundle, Economy, PriceVector
from .tolerances import FEAS_TOL, OPT_TOL, PIVOT_TOL

_MAX_ITER = 100_000


@dataclass
class LpProblem:
    """min or max ``objective @ x`` over ``x >= 0`` subject to
    ``a_ub @ x <= b_ub`` and ``a_eq @ x == b_eq``."""

    objective: np.ndarray
    maximize: bool = False
    a_ub: Optional[np.ndarray] = None
    b_ub: Optional[np.ndarray] = None
    a_eq: Optional[np.ndarray] = None
    b_eq: Optional[np.ndarray] = None


@dataclass
class LpOutcome:
    """Solve result.

    ``status`` is one of "optimal", "infeasible", "unbounded".  On optimal,
    ``x`` satisfies every constraint within FEAS_TOL and ``dual_ub`` /
    ``dual_eq`` hold the constraint marginals d(value)/d(rhs) in the
    problem's own sense (so for a maximization, dual_ub >= 0).
    """

    status: str
    x: Optional[np.ndarray] = None
    value: Optional[float] = None
    dual_ub: Optional[np.ndarray] = None
    dual_eq: Optional[np.ndarray] = None


def _pivot(B_inv: np.ndarray, x_B: np.ndarray, u: np.ndarray, r: int) -> None:
    """Replace basis row r by the entering column with direction u (in place)."""
    piv = u[r]
    B_inv[r] /= piv
    x_B[r] /= piv
    coef = u.copy()
    coef[r] = 0.0
    B_inv -= np.outer(coef, B_inv[r])
    x_B -= coef * x_B[r]


def _leaving_row(x_B: np.ndarray, u: np.ndarray, basis: np.ndarray) -> int:
    """Bland ratio test; -1 signals an unbounded direction."""
    pos = u > PIVOT_TOL
    if not pos.any():
        return -1
    rows = np.nonzero(pos)[0]
    ratios = x_B[rows] / u[rows]
    tmin = ratios.min()
    near = rows[ratios <= tmin + 1e-12]
    return int(near[np.argmin(basis[near])])


class _DenseSimplex:
    """Revised simplex (minimisation) over an explicit column matrix."""

    def __init__(self, A, b, basis):
        self.A = A
        self.b = b
        self.R, self.C = A.shape
        self.basis = np.asarray(basis, dtype=np.int64)
        self.in_basis = np.zeros(self.C, dtype=bool)
        self.in_basis[self.basis] = True
        self.B_inv = np.eye(self.R)
        self.x_B = b.astype(float).copy()

    def refresh(self):
        self.B_inv = np.linalg.inv(self.A[:, self.basis])
        self.x_B = self.B_inv @ self.b
        np.clip(self.x_B, 0.0, None, out=self.x_B)

    def run(self, c, allowed):
        """Iterate to optimality for costs c; returns 'optimal' or 'unbounded'."""
        for it in range(1, _MAX_ITER + 1):
            y = c[self.basis] @ self.B_inv
            reduced = c - y @ self.A
            cand = allowed & ~self.in_basis & (reduced < -OPT_TOL)
            if not cand.any():
                return "optimal"
            j = int(np.argmax(cand))
            u = self.B_inv @ self.A[:, j]
            r = _leaving_row(self.x_B, u, self.basis)
            if r < 0:
                return "unbounded"
            self.in_basis[self.basis[r]] = False
            self.in_basis[j] = True
            _pivot(self.B_inv, self.x_B, u, r)
            self.basis[r] = j
            if it % 500 == 0:
                self.refresh()
        raise RuntimeError("simplex iteration limit exceeded")

    def force_out(self, r: int, limit: int):
        """Pivot the basic variable at row r out, entering any usable column
        with index below ``limit``; no-op when the row is redundant."""
        row = self.B_inv[r] @ self.A[:, :limit]
        usable = np.nonzero((np.abs(row) > PIVOT_TOL) & ~self.in_basis[:limit])[0]
        if len(usable) == 0:
            return
        j = int(usable[0])
        u = self.B_inv @ self.A[:, j]
        self.in_basis[self.basis[r]] = False
        self.in_basis[j] = True
        _pivot(self.B_inv, self.x_B, u, r)
        self.basis[r] = j


def solve_lp(prob: LpProblem) -> LpOutcome:
    """Two-phase dense simplex over an LpProblem."""
    c_user = np.asarray(prob.objective, dtype=float)
    nvar = len(c_user)
    sign = -1.0 if prob.maximize else 1.0
    c_min = sign * c_user

    def _block(a, b, label):
        if a is None and b is None:
            return np.zeros((0, nvar)), np.zeros(0)
        a = np.asarray(a, dtype=float).reshape(-1, nvar)
        b = np.asarray(b, dtype=float).reshape(-1)
        if a.shape[0] != b.shape[0]:
            raise ValueError(f"{label}: matrix has {a.shape[0]} rows, rhs has {b.shape[0]}")
        return a, b

    A_ub, b_ub = _block(prob.a_ub, prob.b_ub, "a_ub/b_ub")
    A_eq, b_eq = _block(prob.a_eq, prob.b_eq, "a_eq/b_eq")
    r_ub, r_eq = len(b_ub), len(b_eq)
    R = r_ub + r_eq

    if R == 0:
        if (c_min < -OPT_TOL).any():
            return LpOutcome("unbounded")
        x = np.zeros(nvar)
        return LpOutcome("optimal", x, 0.0, np.zeros(0), np.zeros(0))

    T = np.vstack([A_ub, A_eq])
    b = np.concatenate([b_ub, b_eq])
    flip = np.where(b < 0, -1.0, 1.0)
    T = T * flip[:, None]
    b = b * flip

    slack = np.zeros((R, r_ub))
    slack[np.arange(r_ub), np.arange(r_ub)] = flip[:r_ub]
    art_start = nvar + r_ub

    need_phase1 = r_eq > 0 or bool((flip[:r_ub] < 0).any())
    if need_phase1:
        A = np.hstack([T, slack, np.eye(R)])
        sx = _DenseSimplex(A, b, np.arange(art_start, art_start + R))
        c1 = np.zeros(A.shape[1])
        c1[art_start:] = 1.0
        status = sx.run(c1, np.ones(A.shape[1], dtype=bool))
        if status != "optimal":
            raise RuntimeError("phase-1 objective is bounded; solver state corrupt")
        if float(c1[sx.basis] @ sx.x_B) > FEAS_TOL:
            return LpOutcome("infeasible")
        for r in range(R):
            if sx.basis[r] >= art_start:
                sx.force_out(r, art_start)
    else:
        A = np.hstack([T, slack])
        sx = _DenseSimplex(A, b, np.arange(nvar, nvar + R))

    c2 = np.zeros(A.shape[1])
    c2[:nvar] = c_min
    allowed = np.ones(A.shape[1], dtype=bool)
    allowed[art_start:] = False
    status = sx.run(c2, allowed)
    if status == "unbounded":
        return LpOutcome("unbounded")

    x_full = np.zeros(A.shape[1])
    x_full[sx.basis] = np.maximum(sx.x_B, 0.0)
    x = x_full[:nvar]
    value = float(c_user @ x)
    y = c2[sx.basis] @ sx.B_inv
    marginals = y * flip  # back to the original row orientation
    if prob.maximize:
        marginals = -marginals
    return LpOutcome("optimal", x, value, marginals[:r_ub].copy(), marginals[r_ub:].copy())


def solve_feasibility(prob: LpProblem) -> LpOutcome:
    """Phase-one verdict for the constraint system of ``prob`` (objective ignored)."""
    probe = LpProblem(
        objective=np.zeros(len(np.asarray(prob.objective, dtype=float))),
        a_ub=prob.a_ub,
        b_ub=prob.b_ub,
        a_eq=prob.a_eq,
        b_eq=prob.b_eq,
    )
    return solve_lp(probe)


def feasible_point(ge_rows, ge_rhs) -> Optional[np.ndarray]:
    """A nonnegative p with ``ge_rows @ p >= ge_rhs``, or None if none exists.

    Routed through the transposed auxiliary program
    ``max rhs @ y  s.t.  rows.T @ y <= 0, y >= 0``
    whose value is 0 exactly when the system is feasible (unbounded
    otherwise), keeping the simplex basis at num-variables size no matter
    how many rows the bisections generate.  The witness p is the auxiliary
    program's constraint marginals.
    """
    G = np.asarray(ge_rows, dtype=float)
    h = np.asarray(ge_rhs, dtype=float)
    if G.ndim != 2:
        raise ValueError("ge_rows must be a matrix")
    nvar = G.shape[1]
    if G.shape[0] == 0:
        return np.zeros(nvar)
    aux = LpProblem(objective=h, maximize=True, a_ub=G.T, b_ub=np.zeros(nvar))
    out = solve_lp(aux)
    if out.status == "unbounded":
        return None
    if out.status != "optimal":  # pragma: no cover - y = 0 is always feasible
        raise RuntimeError("auxiliary program cannot be infeasible")
    return np.maximum(out.dual_ub, 0.0)


# ---------------------------------------------------------------------------
# Bundle-assignment relaxation


@dataclass(frozen=True)
class FractionalAllocation:
    """Sparse fractional assignment: weight of (agent index, bundle)."""

    weights: dict

    def value(self, e: Economy) -> float:
        return float(
            sum(w * e.valuations[i].table[b.mask] for (i, b), w in self.weights.items())
        )

    def agent_mass(self, agent: int) -> float:
        return float(sum(w for (i, _), w in self.weights.items() if i == agent))

    def item_mass(self, item: int) -> float:
        return float(
            sum(w for (_, b), w in self.weights.items() if item in b)
        )


@dataclass(frozen=True, eq=False)
class DualSolution:
    """Optimal dual of the relaxation: item prices plus per-agent utilities.

    Feasibility means every (agent, bundle) column is covered:
    ``v_i(D) <= price(D) + agent_utilities[i]``.
    """

    item_prices: PriceVector
    agent_utilities: np.ndarray

    @property
    def objective(self) -> float:
        return float(self.item_prices.values.sum() + self.agent_utilities.sum())


@dataclass(frozen=True, eq=False)
class _RelaxationResult:
    allocation: FractionalAllocation
    value: float
    prices: np.ndarray
    utilities: np.ndarray


def _solve_relaxation(e: Economy) -> _RelaxationResult:
    """Revised simplex on the assignment relaxation with implicit columns.

    Rows: one <= 1 per item, then one <= 1 per agent.  Columns: one per
    (agent, bundle) pair, priced implicitly via subset sums, plus one slack
    per row; Bland order is agent-major bundle order, slacks last.
    """
    m, n = e.num_items, e.num_agents
    if m > 16:
        raise ValueError(f"relaxation enumerates 2^m columns; m = {m} exceeds 16")
    size = 1 << m
    R = m + n
    n_struct = n * size
    tabs = np.stack([v.table for v in e.valuations])

    basis = np.arange(n_struct, n_struct + R, dtype=np.int64)  # slack start
    c_B = np.zeros(R)
    B_inv = np.eye(R)
    x_B = np.ones(R)
    in_basis = np.zeros(n_struct + R, dtype=bool)
    in_basis[basis] = True

    for _ in range(_MAX_ITER):
        y = c_B @ B_inv
        p, pi = y[:m], y[m:]
        psum = subset_sums(p)
        reduced = np.concatenate([(tabs - psum[None, :] - pi[:, None]).ravel(), -y])
        cand = (reduced > OPT_TOL) & ~in_basis
        if not cand.any():
            break
        j = int(np.argmax(cand))
        if j < n_struct:
            agent, mask = divmod(j, size)
            rows = [k for k in range(m) if (mask >> k) & 1] + [m + agent]
            cost = tabs[agent, mask]
        else:
            rows = [j - n_struct]
            cost = 0.0
        u = B_inv[:, rows].sum(axis=1)
        r = _leaving_row(x_B, u, basis)
        if r < 0:  # pragma: no cover - the relaxation is bounded
            raise RuntimeError("assignment relaxation cannot be unbounded")
        in_basis[basis[r]] = False
        in_basis[j] = True
        _pivot(B_inv, x_B, u, r)
        basis[r] = j
        c_B[r] = cost
    else:  # pragma: no cover
        raise RuntimeError("simplex iteration limit exceeded")

    value = float(c_B @ x_B)
    y = c_B @ B_inv
    weights = {}
    for r, col in enumerate(basis):
        if col < n_struct and x_B[r] > 1e-12:
            agent, mask = divmod(int(col), size)
            weights[(agent, Bundle(mask, m))] = float(x_B[r])
    return _RelaxationResult(
        allocation=FractionalAllocation(weights),
        value=value,
        prices=np.maximum(y[:m], 0.0),
        utilities=np.maximum(y[m:], 0.0),
    )


def fractional_optimum(e: Economy) -> tuple[FractionalAllocation, float]:
    """Optimal fractional assignment and its value (the relaxation optimum)."""
    res = _solve_relaxation(e)
    return res.allocation, res.value


def dual_prices(e: Economy) -> DualSolution:
    """Optimal dual of the relaxation, certified before returning.

    The certificate enumerates every (agent, bundle) column: the dual must
    cover each within 1e-6, and its objective must match the primal value
    (strong duality).  Failure raises, since it would mean the simplex left
    an inconsistent basis.
    """
    res = _solve_relaxation(e)
    psum = subset_sums(res.prices)
    for i, v in enumerate(e.valuations):
        gap = float((v.table - psum - res.utilities[i]).max())
        if gap > 1e-6:
            raise ArithmeticError(f"dual infeasible for agent {e.agent_names[i]}: gap {gap}")
    dual_obj = float(res.prices.sum() + res.utilities.sum())
    if abs(dual_obj - res.value) > 1e-6:
        raise ArithmeticError(
            f"strong duality violated: dual {dual_obj} vs primal {res.value}"
        )
    return DualSolution(PriceVector(res.prices), res.utilities.copy())
