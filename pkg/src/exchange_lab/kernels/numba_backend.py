"""Jitted enumeration kernels.

Mirrors :mod:`exchange_lab.kernels.numpy_backend` exactly: same quotients,
ascending-index summation order, ties toward the smallest mask.  Loop order
is part of the contract; both backends return bit-identical values.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def submod_index(values, m, tol):
    full = (1 << m) - 1
    worst = 1.0
    for w in range(full + 1):
        comp = full & ~w
        vw = values[w]
        xbits = comp
        while xbits:
            xb = xbits & (-xbits)
            xbits ^= xb
            denom = values[w | xb] - vw
            rest = comp & ~xb
            sub = 0
            while True:
                base = w | sub
                inc = values[base | xb] - values[base]
                if denom <= tol:
                    if inc > tol:
                        return True, np.inf
                else:
                    r = inc / denom
                    if r > worst:
                        worst = r
                if sub == rest:
                    break
                sub = (sub - rest) & rest
    return False, worst


@njit(cache=True)
def superset_base_excess(values, m, a):
    full = (1 << m) - 1
    size = full + 1
    g = np.empty(size)
    gmin = np.empty(size)
    worst = -np.inf
    for A in range(1, size):
        comp = full & ~A
        sub = 0
        while True:
            val = values[sub | A] - values[sub]
            g[sub] = val
            gmin[sub] = val
            if sub == comp:
                break
            sub = (sub - comp) & comp
        bits = comp
        while bits:
            b = bits & (-bits)
            bits ^= b
            sub = 0
            while True:
                if sub & b:
                    if gmin[sub ^ b] < gmin[sub]:
                        gmin[sub] = gmin[sub ^ b]
                if sub == comp:
                    break
                sub = (sub - comp) & comp
        sub = 0
        while True:
            ex = g[sub] - a * gmin[sub]
            if ex > worst:
                worst = ex
            if sub == comp:
                break
            sub = (sub - comp) & comp
    return worst


@njit(cache=True)
def split_bound_excess(values, m, a):
    full = (1 << m) - 1
    size = full + 1
    minh = np.empty((m, size))
    for x in range(m):
        xb = 1 << x
        comp = full & ~xb
        sub = 0
        while True:
            minh[x, sub] = values[sub | xb] - values[sub]
            if sub == comp:
                break
            sub = (sub - comp) & comp
        bits = comp
        while bits:
            b = bits & (-bits)
            bits ^= b
            sub = 0
            while True:
                if sub & b:
                    if minh[x, sub ^ b] < minh[x, sub]:
                        minh[x, sub] = minh[x, sub ^ b]
                if sub == comp:
                    break
                sub = (sub - comp) & comp
    worst = -np.inf
    for B in range(size):
        comp = full & ~B
        if comp == 0:
            continue
        vB = values[B]
        sub = 0
        while True:
            sub = (sub - comp) & comp
            if sub == 0:
                break
            s = 0.0
            for x in range(m):
                if (sub >> x) & 1:
                    s = s + minh[x, B]
            ex = (values[sub | B] - vB) - a * s
            if ex > worst:
                worst = ex
    return worst


@njit(cache=True)
def inner_singletons_excess(values, m, a):
    full = (1 << m) - 1
    worst = -np.inf
    for S in range(1, full + 1):
        vS = values[S]
        sub = 0
        while True:
            sub = (sub - S) & S
            if sub == 0:
                break
            s = 0.0
            for j in range(m):
                if (sub >> j) & 1:
                    s = s + (vS - values[S ^ (1 << j)])
            ex = s - a * (vS - values[S ^ sub])
            if ex > worst:
                worst = ex
    return worst


@njit(cache=True)
def outer_singletons_excess(values, m, a):
    full = (1 << m) - 1
    worst = -np.inf
    for S in range(full + 1):
        comp = full & ~S
        if comp == 0:
            continue
        vS = values[S]
        sub = 0
        while True:
            sub = (sub - comp) & comp
            if sub == 0:
                break
            s = 0.0
            for j in range(m):
                if (sub >> j) & 1:
                    s = s + (values[S | (1 << j)] - vS)
            ex = (values[S | sub] - vS) - a * s
            if ex > worst:
                worst = ex
    return worst


@njit(cache=True)
def alloc_dp(tables, m):
    n = tables.shape[0]
    size = 1 << m
    prev = np.zeros(size)
    cur = np.empty(size)
    choice = np.zeros((n, size), dtype=np.int64)
    for k in range(n):
        for S in range(size):
            best = prev[S]
            best_t = 0
            sub = 0
            while True:
                sub = (sub - S) & S
                if sub == 0:
                    break
                cand = prev[S ^ sub] + tables[k, sub]
                if cand > best:
                    best = cand
                    best_t = sub
            cur[S] = best
            choice[k, S] = best_t
        tmp = prev
        prev = cur
        cur = tmp
    return prev[size - 1], choice
