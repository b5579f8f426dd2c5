"""Numerical tolerances shared across the package.

All comparisons are absolute: the desk-scale economies this package targets
keep values within a few orders of unity, so relative error handling would
add noise for no benefit.  Strict inequalities are tested as ``x > EPS``.
"""

import os

# Absolute comparison tolerance for valuation and price arithmetic.
# Overridable through the EXCHANGE_LAB_TOL environment variable (read once,
# at import time); individual operations also accept a ``tol`` argument.
EPS = float(os.environ.get("EXCHANGE_LAB_TOL", "1e-9"))

# Linear programming.
PIVOT_TOL = 1e-10   # simplex pivots smaller than this are rejected
FEAS_TOL = 1e-8     # constraint satisfaction for reported solutions
OPT_TOL = 1e-9      # reduced-cost threshold for optimality

# Bisection over equilibrium quality.
BISECT_TOL = 1e-9
BISECT_MAX_ITER = 200


def resolve(tol):
    """Return ``tol`` unless it is None, in which case the global EPS."""
    return EPS if tol is None else float(tol)
