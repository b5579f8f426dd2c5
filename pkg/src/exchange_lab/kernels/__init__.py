"""Hot enumeration kernels with two interchangeable backends.

The default backend JIT-compiles the tight mask loops with numba; the
fallback keeps the same semantics using vectorised lattice transforms in
pure numpy.  Selection happens once at import, driven by the
``EXCHANGE_LAB_BACKEND`` environment variable:

* ``numpy``   force the pure-numpy fallback,
* ``numba``   require the jitted backend (raise if numba is unavailable),
* ``auto``    (default) numba when importable, numpy otherwise.

Both backends return bit-identical values; the test suite asserts this.
"""

import os

from . import numpy_backend

_requested = os.environ.get("EXCHANGE_LAB_BACKEND", "auto").strip().lower()
if _requested not in ("auto", "numba", "numpy"):
    raise ValueError(
        f"EXCHANGE_LAB_BACKEND must be auto, numba or numpy, got {_requested!r}"
    )

if _requested == "numpy":
    _impl = numpy_backend
    BACKEND = "numpy"
else:
    try:
        from . import numba_backend as _impl  # noqa: F401

        BACKEND = "numba"
    except ImportError:
        if _requested == "numba":
            raise
        _impl = numpy_backend
        BACKEND = "numpy"


def active_backend() -> str:
    """Name of the backend selected at import ('numba' or 'numpy')."""
    return BACKEND


submod_index = _impl.submod_index
superset_base_excess = _impl.superset_base_excess
split_bound_excess = _impl.split_bound_excess
inner_singletons_excess = _impl.inner_singletons_excess
outer_singletons_excess = _impl.outer_singletons_excess
alloc_dp = _impl.alloc_dp
