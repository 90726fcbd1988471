"""The fixed-point expectation ``L_n``, the pair mean ``R_n`` and ``f_n = L_n - R_n``.

``L_n(x)`` is the average over all permutations of ``n`` letters of the
product of ``x_i`` over the fixed points.  It is evaluated three ways:

* :func:`L_formula` -- ``(1/n!) sum_i c_{n-i} e_i(x)`` (canonical);
* :func:`L_enumerate` -- literal enumeration of the symmetric group;
* :func:`L_permanent` -- ``per(M(x)) / n!`` with ``M(x)`` the all-ones
  matrix whose diagonal is replaced by ``x``.

``R_n(x)`` is the mean of ``sqrt(x_i x_j)`` over pairs.  Coordinates are
0-based array positions and every evaluator accepts unsorted points;
``L_formula``, ``R_value``, ``f_n`` and ``gradient_array`` also take batches
of shape ``(..., n)``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional

import numpy as np

from . import combinatorics as comb
from ._ryser import ryser_parts
from .sympoly import elem_all, elem_without, leave_one_out, normalized_all

ENUM_MAX_N = 10
PERMANENT_MAX_N = 28


class SizeError(ValueError):
    """Raised when an exponential-cost oracle is asked for too large an ``n``."""


def as_points(x, min_n: int = 1) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0:
        raise ValueError("a point needs at least one coordinate")
    if arr.shape[-1] < min_n:
        raise ValueError(f"need at least {min_n} coordinates, got {arr.shape[-1]}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("coordinates must be finite")
    if np.any(arr < 0):
        raise ValueError("coordinates must be non-negative")
    return arr


def _out(value, arr: np.ndarray):
    return float(value) if arr.ndim == 1 else value


@lru_cache(maxsize=None)
def _weights_tuple(n: int) -> tuple[float, ...]:
    nf = comb.factorial(n)
    return tuple(float(Fraction(comb.derangements(n - i), nf)) for i in range(n + 1))


def fixed_point_weights(n: int) -> np.ndarray:
    """``c_{n-i} / n!`` for ``i = 0..n``, each rounded once from the exact ratio."""
    return np.array(_weights_tuple(n))


def L_formula(x):
    """``(1/n!) sum_{i=0}^{n} c_{n-i} e_i(x)``."""
    arr = as_points(x)
    w = fixed_point_weights(arr.shape[-1])
    return _out(elem_all(arr) @ w, arr)


def L_formula_exact(x) -> Fraction:
    """Exact rational ``L_n`` for rational coordinates."""
    coords = [Fraction(v) for v in x]
    if any(v < 0 for v in coords):
        raise ValueError("coordinates must be non-negative")
    n = len(coords)
    e = elem_all(coords, exact=True)
    total = sum(comb.derangements(n - i) * e[i] for i in range(n + 1))
    return total / comb.factorial(n)


@lru_cache(maxsize=None)
def _fixed_set_histogram(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Enumerate S_n; return (fixed-point masks, multiplicities)."""
    total = comb.factorial(n)
    flat = np.fromiter(
        itertools.chain.from_iterable(itertools.permutations(range(n))),
        dtype=np.int8,
        count=total * n,
    )
    perms = flat.reshape(total, n)
    fixed = perms == np.arange(n, dtype=np.int8)
    codes = fixed.astype(np.int64) @ (np.int64(1) << np.arange(n, dtype=np.int64))
    uniq, counts = np.unique(codes, return_counts=True)
    masks = ((uniq[:, None] >> np.arange(n)) & 1).astype(bool)
    masks.setflags(write=False)
    return masks, counts.astype(float)


def L_enumerate(x):
    """Average of ``prod_{i in fix(pi)} x_i`` over every permutation ``pi``.

    Permutations with the same fixed-point set are grouped after
    enumeration, so the cost is one pass over ``n!`` permutations per ``n``
    (cached) plus ``O(2^n n)`` per point.
    """
    arr = as_points(x)
    n = arr.shape[-1]
    if n > ENUM_MAX_N:
        raise SizeError(f"enumeration limited to n <= {ENUM_MAX_N}, got {n}")
    masks, counts = _fixed_set_histogram(n)
    prods = np.where(masks, arr[..., None, :], 1.0).prod(axis=-1)
    return _out(prods @ counts / comb.factorial(n), arr)


@dataclass(frozen=True, eq=False)
class OnesPlusDiag:
    """Square matrix with ones off the diagonal and ``diag`` on it."""

    diag: np.ndarray

    def __post_init__(self):
        d = np.array(self.diag, dtype=float)
        if d.ndim != 1 or d.size < 1:
            raise ValueError("diag must be a non-empty vector")
        if np.any(d < 0) or not np.all(np.isfinite(d)):
            raise ValueError("diag entries must be finite and non-negative")
        d.setflags(write=False)
        object.__setattr__(self, "diag", d)

    @property
    def n(self) -> int:
        return self.diag.size

    def dense(self) -> np.ndarray:
        m = np.ones((self.n, self.n))
        np.fill_diagonal(m, self.diag)
        return m


def permanent_parts(m: OnesPlusDiag) -> tuple[float, float]:
    """Permanent of ``m`` as an unevaluated double-double sum ``hi + lo``."""
    if not isinstance(m, OnesPlusDiag):
        m = OnesPlusDiag(m)
    if m.n > PERMANENT_MAX_N:
        raise SizeError(f"permanent limited to n <= {PERMANENT_MAX_N}, got {m.n}")
    hi, lo = ryser_parts(m.dense())
    return float(hi), float(lo)


def permanent(m: OnesPlusDiag) -> float:
    hi, lo = permanent_parts(m)
    return hi + lo


def L_permanent(x) -> float:
    arr = as_points(x)
    if arr.ndim != 1:
        raise ValueError("L_permanent takes a single point")
    hi, lo = permanent_parts(OnesPlusDiag(arr))
    nf = float(comb.factorial(arr.size))
    return hi / nf + lo / nf


def R_value(x):
    """Mean of ``sqrt(x_i x_j)`` over unordered pairs, i.e. ``s_2(sqrt(x))``."""
    arr = as_points(x, min_n=2)
    return _out(normalized_all(np.sqrt(arr))[..., 2], arr)


def f_n(x):
    """``L_n(x) - R_n(x)`` using the canonical evaluator."""
    arr = as_points(x, min_n=2)
    w = fixed_point_weights(arr.shape[-1])
    val = elem_all(arr) @ w - normalized_all(np.sqrt(arr))[..., 2]
    return _out(val, arr)


@dataclass
class MeasureEval:
    L_formula: float
    L_enum: Optional[float]
    L_permanent: Optional[float]
    R: float
    f: float

    @property
    def max_disagreement(self) -> float:
        """Largest gap to ``L_formula``, relative to ``max(1, L_formula)``."""
        scale = max(1.0, abs(self.L_formula))
        gaps = [abs(v - self.L_formula) for v in (self.L_enum, self.L_permanent) if v is not None]
        return max(gaps, default=0.0) / scale


def f_value(x) -> MeasureEval:
    arr = as_points(x, min_n=2)
    if arr.ndim != 1:
        raise ValueError("f_value takes a single point")
    n = arr.size
    L = L_formula(arr)
    R = R_value(arr)
    return MeasureEval(
        L_formula=L,
        L_enum=L_enumerate(arr) if n <= ENUM_MAX_N else None,
        L_permanent=L_permanent(arr) if n <= PERMANENT_MAX_N else None,
        R=R,
        f=L - R,
    )


def gradient_array(x) -> np.ndarray:
    """Partials of ``f_n``; ``-inf`` where a zero coordinate makes them diverge.

    ``df/dx_i = L_{n-1}(x without i)/n - sum_{j != i} sqrt(x_j/x_i) / (n(n-1))``.
    When ``x_i = 0`` and every other coordinate is zero too the pair term
    vanishes identically and the partial is finite.
    """
    arr = as_points(x, min_n=2)
    n = arr.shape[-1]
    loo = leave_one_out(arr)
    term_l = elem_all(loo) @ fixed_point_weights(n - 1) / n
    root = np.sqrt(arr)
    others = np.sqrt(loo).sum(axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        term_r = others / root / (n * (n - 1))
    term_r = np.where(root == 0, np.where(others == 0, 0.0, np.inf), term_r)
    return term_l - term_r


@dataclass
class Gradient:
    partials: np.ndarray
    valid: np.ndarray = field(repr=False)

    @property
    def all_valid(self) -> bool:
        return bool(np.all(self.valid))


def gradient(x) -> Gradient:
    arr = as_points(x, min_n=2)
    if arr.ndim != 1:
        raise ValueError("gradient takes a single point; use gradient_array for batches")
    g = gradient_array(arr)
    return Gradient(partials=g, valid=np.isfinite(g))


def hessian_entry(x, i: int, j: int) -> float:
    """Second partial ``d^2 f_n / dx_j dx_i`` at a strictly positive point."""
    arr = as_points(x, min_n=2)
    if arr.ndim != 1:
        raise ValueError("hessian_entry takes a single point")
    n = arr.size
    if not (0 <= i < n and 0 <= j < n):
        raise IndexError(f"({i}, {j}) out of range for n={n}")
    if np.any(arr == 0):
        raise ValueError("second partials diverge at zero coordinates")
    denom = n * (n - 1)
    if i == j:
        others = np.sqrt(np.delete(arr, i)).sum()
        return float(others / arr[i] ** 1.5 / (2 * denom))
    e = elem_without(arr, (i, j))
    l_rest = float(e @ fixed_point_weights(n - 2))
    return l_rest / denom - 1.0 / (2 * denom * np.sqrt(arr[i] * arr[j]))


def hessian(x) -> np.ndarray:
    arr = as_points(x, min_n=2)
    n = arr.size
    return np.array([[hessian_entry(arr, i, j) for j in range(n)] for i in range(n)])
