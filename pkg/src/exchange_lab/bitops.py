"""Bit-mask helpers for subsets of a small item universe.

A bundle over ``m`` items is an integer mask in ``[0, 2^m)``; bit ``j`` set
means item ``j`` is in the bundle.  Dense tables indexed by mask have length
``2^m``.
"""

from __future__ import annotations

import numpy as np


def mask_of(indices) -> int:
    """Mask with the given item indices set."""
    mask = 0
    for j in indices:
        mask |= 1 << j
    return mask


def indices_of(mask: int) -> tuple[int, ...]:
    """Sorted item indices present in ``mask``."""
    out = []
    j = 0
    while mask:
        if mask & 1:
            out.append(j)
        mask >>= 1
        j += 1
    return tuple(out)


def subset_sums(weights) -> np.ndarray:
    """Table ``t`` with ``t[S] = sum(weights[j] for j in S)`` for every mask.

    Built by doubling, so weights are accumulated in ascending item order;
    the jitted kernels sum in the same order, keeping both backends
    bit-identical.
    """
    out = np.zeros(1)
    for w in np.asarray(weights, dtype=float):
        out = np.concatenate([out, out + w])
    return out


def sublattice(mask: int) -> np.ndarray:
    """All submasks of ``mask`` in ascending numeric order."""
    out = np.zeros(1, dtype=np.int64)
    bits = mask
    while bits:
        bit = bits & -bits
        bits ^= bit
        out = np.concatenate([out, out + bit])
    return out


def iter_submasks(mask: int):
    """Yield the nonempty submasks of ``mask`` in descending order."""
    sub = mask
    while sub:
        yield sub
        sub = (sub - 1) & mask
