"""Monotone-flow machinery for locating the critical points of ``f_n``.

Points are sorted non-decreasingly and the operators act on *ranks*:
``k`` and ``j`` below are 1-based positions in the sorted point, so
``x_k`` is the k-th smallest coordinate and ``x_n`` the largest.  For each
rank ``k < n``::

    O_k = x_k d/dx_k - x_n d/dx_n,      O_k f_n(x) = (x_k - x_n) S_k(x) / n!

so whenever ``x_k < x_n`` and ``S_k(x) > 0`` the direction
``x_k b_k - x_n b_n`` strictly decreases ``f_n``.  :func:`classify` picks,
for any point, a region certificate or such a direction, and
:func:`descend` follows those directions with a backtracking line search.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Optional

import numpy as np

from . import combinatorics as comb
from .fixedpoint import as_points, f_n, gradient_array
from .sympoly import elem_all

ONE_TOL = 1e-9
STEP_FLOOR = 1e-12
BOUNDARY_STEP = 1e-8
COMPACT_FACTOR = 6

REGIONS = (
    "outside_C",
    "boundary",
    "all_above_one",
    "all_below_one",
    "critical_candidate",
    "descent",
)


class FlowConsistencyError(AssertionError):
    """Two routes to the same flow quantity disagreed."""


@dataclass
class SortedPoint:
    """``coords`` sorted non-decreasingly; ``perm[r]`` is the original index
    of the coordinate with 0-based sorted position ``r``."""

    coords: np.ndarray
    perm: np.ndarray

    @property
    def n(self) -> int:
        return self.coords.size

    def original_index(self, rank: int) -> int:
        return int(self.perm[rank - 1])


def sort_point(x) -> SortedPoint:
    arr = as_points(x)
    if arr.ndim != 1:
        raise ValueError("sort_point takes a single point")
    perm = np.argsort(arr, kind="stable")
    return SortedPoint(coords=arr[perm], perm=perm)


def _coords(x) -> np.ndarray:
    if isinstance(x, SortedPoint):
        return x.coords
    return as_points(x)


class CompactMembership(NamedTuple):
    inside: bool
    margin: float


def in_compact(x) -> CompactMembership:
    """Membership in ``{x >= 0 : sum x <= 6n}`` and the margin ``6n - sum x``."""
    arr = as_points(x)
    margin = float(COMPACT_FACTOR * arr.shape[-1] - arr.sum())
    return CompactMembership(margin >= 0, margin)


def _check_rank(n: int, k: int) -> None:
    if n < 4:
        raise ValueError(f"flow operators need n >= 4, got {n}")
    if not 1 <= k <= n - 1:
        raise IndexError(f"rank k={k} must lie in 1..{n - 1}")


def S_k_value(x, k: int):
    """``S_k(x) = sum_{i=1}^{n-2} c_{n-i} e_{i-1}(x minus ranks k, n)
    - (n-2)! sum_{i != k, n} sqrt(x_i) / (sqrt(x_k) + sqrt(x_n))``.

    ``x`` is a :class:`SortedPoint` or an already-sorted array (batches of
    shape ``(..., n)`` allowed).
    """
    arr = _coords(x)
    n = arr.shape[-1]
    _check_rank(n, k)
    denom = np.sqrt(arr[..., k - 1]) + np.sqrt(arr[..., n - 1])
    if np.any(denom == 0):
        raise ValueError("S_k undefined when x_k = x_n = 0")
    rest = np.delete(arr, [k - 1, n - 1], axis=-1)
    coef = np.array([float(comb.derangements(n - i)) for i in range(1, n - 1)])
    poly = elem_all(rest)[..., : n - 2] @ coef
    pair = float(comb.factorial(n - 2)) * np.sqrt(rest).sum(axis=-1) / denom
    out = poly - pair
    return float(out) if arr.ndim == 1 else out


def operator_Ok(x, k: int, rtol: float = 1e-8):
    """``O_k f_n(x)`` by the closed form ``(x_k - x_n) S_k(x) / n!``.

    The value is cross-checked against ``x_k df/dx_k - x_n df/dx_n`` from
    the gradient; a mismatch beyond ``rtol`` (relative to the size of the
    gradient terms) raises :class:`FlowConsistencyError`.
    """
    arr = _coords(x)
    n = arr.shape[-1]
    xk, xn = arr[..., k - 1], arr[..., n - 1]
    closed = (xk - xn) * np.asarray(S_k_value(arr, k)) / float(comb.factorial(n))

    g = gradient_array(arr)
    with np.errstate(invalid="ignore"):
        a, b = xk * g[..., k - 1], xn * g[..., n - 1]
    route = a - b
    ok = np.isfinite(route)
    scale = np.maximum.reduce([np.abs(closed), np.abs(a), np.abs(b), np.full_like(closed, 1e-300)])
    bad = ok & (np.abs(closed - route) > rtol * scale)
    if np.any(bad):
        raise FlowConsistencyError(
            f"O_{k} closed form {closed[bad]} disagrees with gradient route {route[bad]}"
        )
    return float(closed) if arr.ndim == 1 else closed


def F_k_scalar(xv, x_k: float, x_n: float, n: int):
    """``c_{n-1}/(n-2) + c_{n-2} xv - (n-2)! sqrt(xv) / (sqrt(x_k) + sqrt(x_n))``."""
    if n < 4:
        raise ValueError(f"need n >= 4, got {n}")
    denom = np.sqrt(x_k) + np.sqrt(x_n)
    if denom == 0:
        raise ValueError("degenerate denominator: x_k = x_n = 0")
    xv = np.asarray(xv, dtype=float)
    if np.any(xv < 0):
        raise ValueError("xv must be non-negative")
    val = (
        comb.derangements(n - 1) / (n - 2)
        + float(comb.derangements(n - 2)) * xv
        - float(comb.factorial(n - 2)) * np.sqrt(xv) / denom
    )
    return float(val) if val.ndim == 0 else val


def pairing_bound(x, k: int, j: int) -> float:
    """``F_k(x_j) + F_k(x_{n-j})`` for ``floor(n/2) <= k <= n-2``, ``k < j < n``."""
    arr = _coords(x)
    if arr.ndim != 1:
        raise ValueError("pairing_bound takes a single point")
    n = arr.size
    if n < 4:
        raise ValueError(f"need n >= 4, got {n}")
    if not n // 2 <= k <= n - 2:
        raise IndexError(f"k={k} outside {n // 2}..{n - 2}")
    if not k + 1 <= j <= n - 1:
        raise IndexError(f"j={j} outside {k + 1}..{n - 1}")
    xk, xn = arr[k - 1], arr[n - 1]
    return F_k_scalar(arr[j - 1], xk, xn, n) + F_k_scalar(arr[n - j - 1], xk, xn, n)


@dataclass(frozen=True)
class AuxParams:
    """Parameters of the tail-equal lower bounds: ``n = 2*ell`` or ``2*ell + 1``."""

    n: int
    t: int
    y: float | Fraction = 0.0

    @property
    def ell(self) -> int:
        return self.n // 2

    @property
    def k(self) -> int:
        """Rank ``k`` the parameters describe (``ell-t-1`` even, ``ell-t`` odd)."""
        return self.ell - self.t - 1 if self.n % 2 == 0 else self.ell - self.t


def _check_y(y) -> None:
    if np.any(np.asarray(y, dtype=float) < 0) or np.any(np.asarray(y, dtype=float) > 1):
        raise ValueError("y must lie in [0, 1]")


def _aux(n: int, t: int, y, small_count: int, exact: bool):
    ell = n // 2
    big = ell + t
    poly = sum(comb.derangements(n - i) * comb.binomial(big, i - 1) for i in range(1, n - 1))
    nf = comb.factorial(n - 2)
    # f(y) = (A + B y) / (1 + y) with A = f(0), B the y -> infinity limit
    a = poly - nf * big
    b = poly - nf * small_count
    if exact or isinstance(y, Fraction):
        y = Fraction(y)
        return (a + b * y) / (1 + y)
    y = np.asarray(y, dtype=float)
    val = (float(a) + float(b) * y) / (1.0 + y)
    return float(val) if val.ndim == 0 else val


def aux_even(params: AuxParams, exact: bool = False):
    """Lower bound for ``S_k`` when ``n = 2*ell`` and ``x_k < x_{k+1} = ... = x_n >= 1``:

    ``sum_{i=1}^{n-2} c_{n-i} C(ell+t, i-1)
    - (n-2)! ((ell+t)/(y+1) + (ell-t-2) y/(y+1))``,  ``k = ell-t-1``.
    """
    n, t = params.n, params.t
    if n % 2 or n < 4:
        raise ValueError(f"aux_even needs even n >= 4, got {n}")
    ell = n // 2
    if not 0 <= t <= ell - 2:
        raise ValueError(f"t={t} outside 0..{ell - 2}")
    _check_y(params.y)
    return _aux(n, t, params.y, ell - t - 2, exact)


def aux_odd(params: AuxParams, exact: bool = False):
    """Odd counterpart (``n = 2*ell + 1``, ``k = ell - t``, ``t in 1..ell-1``)
    with ``ell - t - 1`` in place of ``ell - t - 2``."""
    n, t = params.n, params.t
    if n % 2 == 0 or n < 5:
        raise ValueError(f"aux_odd needs odd n >= 5, got {n}")
    ell = n // 2
    if not 1 <= t <= ell - 1:
        raise ValueError(f"t={t} outside 1..{ell - 1}")
    _check_y(params.y)
    return _aux(n, t, params.y, ell - t - 1, exact)


def aux_value(params: AuxParams, exact: bool = False):
    return aux_even(params, exact) if params.n % 2 == 0 else aux_odd(params, exact)


@dataclass
class FlowReport:
    """Classification of a point.

    ``witness`` is the signed certificate: ``f`` itself outside the compact
    region or on its ``sum = 6n`` face, the smallest partial on
    ``(1, inf)^n``, ``<grad f, 1>`` on ``(0, 1)^n``, a one-sided difference
    quotient at zero coordinates, ``O_k f_n`` for a descent, and the largest
    absolute partial at a critical candidate.  ``direction`` is in the
    caller's original coordinate order.
    """

    region: str
    witness: float
    k: Optional[int] = None
    direction: Optional[np.ndarray] = field(default=None, repr=False)
    label: str = ""
    tail: tuple[int, ...] = ()


def _difference_quotient(x: np.ndarray, d: np.ndarray, h: float = BOUNDARY_STEP) -> float:
    return (f_n(x + h * d) - f_n(x)) / h


def classify(x) -> FlowReport:
    arr = as_points(x)
    if arr.ndim != 1:
        raise ValueError("classify takes a single point")
    n = arr.size
    if n < 4:
        raise ValueError(f"classify needs n >= 4, got {n}")

    inside, margin = in_compact(arr)
    if not inside:
        return FlowReport("outside_C", f_n(arr), direction=-gradient_array(arr), label="-grad")
    if margin == 0:
        return FlowReport("boundary", f_n(arr), direction=-gradient_array(arr), label="-grad")

    zeros = np.flatnonzero(arr == 0)
    if zeros.size == n:
        d = np.ones(n)
        return FlowReport("boundary", _difference_quotient(arr, d), direction=d, label="+1")
    if zeros.size:
        i = int(zeros[0])
        d = np.zeros(n)
        d[i] = 1.0
        return FlowReport("boundary", _difference_quotient(arr, d), direction=d, label=f"+b_{i}")

    g = gradient_array(arr)
    if np.all(np.abs(arr - 1.0) <= ONE_TOL):
        return FlowReport("critical_candidate", float(np.abs(g).max()))
    if np.all(arr > 1.0):
        return FlowReport("all_above_one", float(g.min()), direction=-g, label="-grad")
    if np.all(arr < 1.0):
        return FlowReport("all_below_one", float(g.sum()), direction=np.ones(n), label="+1")

    sp = sort_point(arr)
    xs = sp.coords
    k = int(np.flatnonzero(xs[:-1] < xs[1:])[-1]) + 1
    witness = operator_Ok(sp, k)
    if not witness < 0:
        # no certified direction: report it rather than invent one
        return FlowReport("critical_candidate", witness, k=k)
    d = np.zeros(n)
    d[sp.original_index(k)] = xs[k - 1]
    d[sp.original_index(n)] = -xs[n - 1]
    tail = tuple(int(i) for i in sp.perm[k:])
    return FlowReport(
        "descent", witness, k=k, direction=d, label=f"x_{k} b_{k} - x_{n} b_{n}", tail=tail
    )


@dataclass
class DescentResult:
    points: list[np.ndarray]
    values: list[float]
    status: str  # "critical", "max_iters" or "stalled"
    regions: list[str] = field(default_factory=list, repr=False)

    @property
    def final(self) -> np.ndarray:
        return self.points[-1]

    @property
    def iterations(self) -> int:
        return len(self.points) - 1

    @property
    def monotone(self) -> bool:
        v = self.values
        return all(b < a for a, b in zip(v, v[1:]))


def _tie_average(x: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Average ``v`` over groups of exactly equal coordinates of ``x``."""
    _, groups = np.unique(x, return_inverse=True)
    sums = np.bincount(groups, weights=v)
    return (sums / np.bincount(groups))[groups]


def descend(x0, step: float = 1.0, max_iters: int = 10_000) -> DescentResult:
    """Follow the certified decrease directions from ``x0``.

    Each iteration takes the direction chosen by :func:`classify` and halves
    a trial step (starting at ``step``) until ``f_n`` strictly decreases and
    the point stays strictly positive.  Stops at a critical candidate, after
    ``max_iters`` iterations, or with status ``"stalled"`` when no step
    above ``1e-12`` decreases ``f_n``.

    For a descent certificate the ``-x_n b_n`` part of ``x_k b_k - x_n b_n``
    is spread evenly over the coordinates tied with ``x_n``; by symmetry of
    ``f_n`` this has the same directional derivative ``O_k f_n(x)`` but keeps
    the tie intact.  The trial step is capped where ``x_k`` meets the tail,
    and a step of exactly that length merges ``x_k`` into the tail.
    Gradient steps use the gradient averaged over exactly tied coordinates
    (its projection onto the tie-preserving subspace), so rounding cannot
    split a merged tail.
    """
    x = as_points(x0).copy()
    if x.ndim != 1 or x.size < 4:
        raise ValueError("descend takes a single point with n >= 4")
    if np.any(x <= 0) or not in_compact(x).margin > 0:
        raise ValueError("start must be strictly positive and inside the compact region")
    fx = f_n(x)
    result = DescentResult(points=[x.copy()], values=[fx], status="max_iters")
    for _ in range(max_iters):
        rep = classify(x)
        result.regions.append(rep.region)
        if rep.region == "critical_candidate":
            result.status = "critical"
            break
        d = rep.direction
        if rep.label == "-grad":
            d = _tie_average(x, d)
        alpha = step
        merge = None
        if rep.region == "descent":
            i, tail = rep.direction.argmax(), list(rep.tail)
            xk, xn, m = x[i], x[tail[0]], len(tail)
            d = np.zeros_like(x)
            d[i] = xk
            d[tail] = -xn / m
            merge = (xn - xk) / (xk + xn / m)
            alpha = min(step, merge)
        while alpha >= STEP_FLOOR:
            trial = x + alpha * d
            if merge is not None and alpha == merge:
                trial[tail] = trial[tail[0]]
                trial[i] = trial[tail[0]]
            if np.all(trial > 0):
                ft = f_n(trial)
                if ft < fx:
                    break
            alpha *= 0.5
        else:
            result.status = "stalled"
            break
        x, fx = trial, ft
        result.points.append(x.copy())
        result.values.append(fx)
    return result
