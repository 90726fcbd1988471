"""Elementary symmetric polynomials and their normalized means.

All evaluators take the variables along the last axis, so a batch of points
is an array of shape ``(..., n)``.  Indices are 0-based array positions.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Iterable, Sequence

import numpy as np


def _as_array(x) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0 or arr.shape[-1] < 1:
        raise ValueError("expected at least one coordinate")
    return arr


def elem_all(x, exact: bool = False):
    """Return ``(e_0(x), ..., e_n(x))``.

    Built by multiplying out ``prod_i (1 + x_i t)`` one linear factor at a
    time, which only ever adds non-negative terms on non-negative input.
    With ``exact=True`` the coordinates are converted to ``Fraction`` and a
    list of ``Fraction`` is returned (single point only).
    """
    if exact:
        coords = [Fraction(v) for v in x]
        if not coords:
            raise ValueError("expected at least one coordinate")
        e = [Fraction(1)] + [Fraction(0)] * len(coords)
        for j, v in enumerate(coords):
            for k in range(j + 1, 0, -1):
                e[k] += v * e[k - 1]
        return e

    arr = _as_array(x)
    n = arr.shape[-1]
    e = np.zeros(arr.shape[:-1] + (n + 1,))
    e[..., 0] = 1.0
    for j in range(n):
        # right-hand side is materialized before the in-place add
        e[..., 1 : j + 2] += arr[..., j : j + 1] * e[..., 0 : j + 1]
    return e


def binomial_row(n: int) -> np.ndarray:
    return np.array([float(comb(n, k)) for k in range(n + 1)])


def normalized_all(x) -> np.ndarray:
    """``s_k = e_k / C(n, k)`` for ``k = 0..n``."""
    e = elem_all(x)
    return e / binomial_row(e.shape[-1] - 1)


def _check_removed(n: int, removed: Iterable[int]) -> list[int]:
    idx = [int(i) for i in removed]
    if len(idx) > 2:
        raise ValueError("at most two coordinates may be removed")
    if len(set(idx)) != len(idx):
        raise ValueError(f"duplicate indices in {idx}")
    for i in idx:
        if not 0 <= i < n:
            raise IndexError(f"index {i} out of range for {n} coordinates")
    return idx


def elem_without(x, removed: Sequence[int] = ()):
    """Elementary symmetric values of ``x`` with the given positions deleted.

    Recomputed from the remaining coordinates rather than by dividing out a
    factor, which is unstable near zero coordinates.
    """
    arr = _as_array(x)
    idx = _check_removed(arr.shape[-1], removed)
    if len(idx) >= arr.shape[-1]:
        return np.ones(arr.shape[:-1] + (1,))
    return elem_all(np.delete(arr, idx, axis=-1))


def leave_one_out(x) -> np.ndarray:
    """Stack of ``x`` with each coordinate removed in turn: ``(..., n, n-1)``."""
    arr = _as_array(x)
    n = arr.shape[-1]
    keep = np.array([[j for j in range(n) if j != i] for i in range(n)], dtype=int)
    return arr[..., keep.reshape(-1)].reshape(arr.shape[:-1] + (n, n - 1))


@dataclass
class NewtonMaclaurinReport:
    s: np.ndarray
    newton: list[bool] = field(default_factory=list)
    maclaurin: list[bool] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(self.newton) and all(self.maclaurin)


def newton_maclaurin_check(x, tol: float = 1e-12) -> NewtonMaclaurinReport:
    """Check log-concavity of ``s_k`` and that ``s_k^(1/k)`` is non-increasing.

    ``newton[k-1]`` refers to ``s_k^2 >= s_{k-1} s_{k+1}`` (``1 <= k <= n-1``),
    ``maclaurin[k-1]`` to ``s_k^(1/k) >= s_{k+1}^(1/(k+1))``.  Both are tested
    with relative slack ``tol``.
    """
    arr = _as_array(x)
    if arr.ndim != 1:
        raise ValueError("newton_maclaurin_check takes a single point")
    if np.any(arr < 0):
        raise ValueError("coordinates must be non-negative")
    s = normalized_all(arr)
    n = arr.size
    newton = []
    for k in range(1, n):
        lhs, rhs = s[k] ** 2, s[k - 1] * s[k + 1]
        newton.append(bool(lhs - rhs >= -tol * max(lhs, rhs)))
    roots = [s[k] ** (1.0 / k) for k in range(1, n + 1)]
    maclaurin = [bool(roots[k] - roots[k + 1] >= -tol * roots[k]) for k in range(n - 1)]
    return NewtonMaclaurinReport(s=s, newton=newton, maclaurin=maclaurin)
