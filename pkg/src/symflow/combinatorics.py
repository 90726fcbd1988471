"""Exact combinatorial quantities: factorials, binomials, derangement and
rencontres numbers.

Everything here is arbitrary-precision ``int`` / :class:`fractions.Fraction`.
Factorials and derangement numbers are tabulated once up to :data:`N_MAX`
(and extended on demand past it); the table build is guarded by a lock so
concurrent first use is safe.
"""
from __future__ import annotations

import threading
from fractions import Fraction
from math import comb

N_MAX = 64

_lock = threading.Lock()
# (factorials, derangements); replaced atomically, never mutated in place
_tables: tuple[tuple[int, ...], tuple[int, ...]] | None = None


def _build(n_max: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    fact = [1]
    der = [1, 0]
    for k in range(1, n_max + 1):
        fact.append(fact[-1] * k)
    for k in range(2, n_max + 1):
        der.append((k - 1) * (der[k - 1] + der[k - 2]))
    return tuple(fact), tuple(der[: n_max + 1])


def _get_tables(k: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    global _tables
    tables = _tables
    if tables is None or k >= len(tables[0]):
        with _lock:
            tables = _tables
            if tables is None or k >= len(tables[0]):
                tables = _build(max(N_MAX, k))
                _tables = tables
    return tables


def _check_nonneg(**kwargs: int) -> None:
    for name, value in kwargs.items():
        if value < 0:
            raise ValueError(f"{name} must be non-negative, got {value}")


def factorial(k: int) -> int:
    """Return ``k!``."""
    _check_nonneg(k=k)
    return _get_tables(k)[0][k]


def binomial(n: int, k: int) -> int:
    """Return C(n, k); zero when ``k > n``."""
    _check_nonneg(n=n, k=k)
    return comb(n, k)


def derangements(k: int) -> int:
    """Number of fixed-point-free permutations of ``k`` elements.

    Tabulated by the recurrence ``c_k = (k-1)(c_{k-1} + c_{k-2})``; see
    :func:`derangements_alternating` for the closed-form route.
    """
    _check_nonneg(k=k)
    return _get_tables(k)[1][k]


def derangements_alternating(k: int) -> int:
    """``k! * sum_{j=0}^{k} (-1)^j / j!`` evaluated in integers.

    Each term ``k!/j!`` is the falling product ``(j+1)(j+2)...k``.
    """
    _check_nonneg(k=k)
    total = 0
    falling = 1  # k!/j! for j = k, k-1, ..., 0
    for j in range(k, -1, -1):
        total += falling if j % 2 == 0 else -falling
        falling *= j if j > 0 else 1
    return total


def rencontres(n: int, k: int) -> int:
    """D(n, k): permutations of ``n`` elements with exactly ``k`` fixed points."""
    _check_nonneg(n=n, k=k)
    if k > n:
        raise ValueError(f"rencontres({n}, {k}): k must not exceed n")
    return binomial(n, k) * derangements(n - k)


def rencontres_fraction(n: int, k: int) -> Fraction:
    """d(n, k) = D(n, k) / n!, the probability of exactly ``k`` fixed points."""
    return Fraction(rencontres(n, k), factorial(n))


def rencontres_row(n: int) -> list[int]:
    """``[D(n, 0), ..., D(n, n)]``."""
    return [rencontres(n, k) for k in range(n + 1)]
