"""Ryser permanent with Gray-code row-sum updates.

Terms of the inclusion-exclusion sum grow like ``n^n`` while the permanent of
an O(1) matrix is closer to ``n!``, so the products and the running sum are
carried in double-double (error-free transformations) to keep the
cancellation from eating the result.
"""
from __future__ import annotations

import numpy as np
from numba import njit

_SPLITTER = 134217729.0  # 2**27 + 1


@njit(cache=True, inline="always")
def _two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


@njit(cache=True, inline="always")
def _quick_two_sum(a, b):
    s = a + b
    return s, b - (s - a)


@njit(cache=True, inline="always")
def _two_prod(a, b):
    p = a * b
    c = _SPLITTER * a
    ah = c - (c - a)
    al = a - ah
    c = _SPLITTER * b
    bh = c - (c - b)
    bl = b - bh
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


@njit(cache=True)
def ryser_parts(a):
    """Return ``(hi, lo)`` with ``hi + lo`` the permanent of square ``a``."""
    n = a.shape[0]
    rows = np.zeros(n)
    acc_hi = 0.0
    acc_lo = 0.0
    gray = 0
    size = 0
    for step in range(1, 1 << n):
        j = 0
        t = step
        while (t & 1) == 0:
            t >>= 1
            j += 1
        bit = 1 << j
        if gray & bit:
            for i in range(n):
                rows[i] -= a[i, j]
            size -= 1
        else:
            for i in range(n):
                rows[i] += a[i, j]
            size += 1
        gray ^= bit

        ph = 1.0
        pl = 0.0
        for i in range(n):
            r = rows[i]
            hi, err = _two_prod(ph, r)
            err += pl * r
            ph, pl = _quick_two_sum(hi, err)
        if (n - size) & 1:
            ph = -ph
            pl = -pl

        s, e = _two_sum(acc_hi, ph)
        e += acc_lo + pl
        acc_hi, acc_lo = _quick_two_sum(s, e)
    return acc_hi, acc_lo
