"""Numerical certification harness: sampling, grid and multi-start searches for
violations of ``L_n >= R_n``, replays of the small-``n`` arguments, lemma
audits for the flow machinery, and report serialization.

Randomness comes from PCG64 streams keyed by ``(seed, stream index)``; work
is split into fixed-size chunks whose stream index does not depend on the
number of workers, and results are merged by a deterministic reduction
(minimum by value, ties to the lowest sample index), so serial and threaded
runs produce identical reports.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Optional

import numpy as np

from . import combinatorics as comb
from . import flow
from .fixedpoint import (
    L_enumerate,
    L_formula,
    L_permanent,
    f_n,
    gradient_array,
)
from .sympoly import normalized_all

MODES = ("sample", "grid", "minimize", "flow", "lemmas", "tables", "eval")
FORMATS = ("json", "csv")

CHUNK = 8192
CROSS_CHECK_POINTS = 64
ENUM_CHECK_MAX_N = 8
PERMANENT_CHECK_MAX_N = 16

AGREEMENT_TOL = 1e-9
EQUALITY_TOL = 1e-12
NEAR_ONES_TOL = 1e-6
MIN_F_TOL = 1e-6
MIN_X_TOL = 1e-4
COMPACT_BOUND = 5.0 / 6.0


def substream(seed: int, index: int) -> np.random.Generator:
    """PCG64 generator for stream ``index`` of run ``seed``."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(index,))))


def worker_count(requested: Optional[int] = None) -> int:
    if requested:
        return max(1, int(requested))
    env = os.environ.get("SYMFLOW_THREADS")
    if env:
        return max(1, int(env))
    return min(4, os.cpu_count() or 1)


def _map(fn: Callable, items: Iterable, workers: int) -> list:
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


@dataclass
class RunConfig:
    n: int
    samples: int = 10_000
    seed: int = 0
    tolerance: float = 1e-12
    box: Optional[float] = None
    mode: str = "sample"
    output_format: str = "json"
    exact: bool = False
    workers: Optional[int] = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.samples < 0:
            raise ValueError("samples must be non-negative")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.output_format not in FORMATS:
            raise ValueError(f"unknown format {self.output_format!r}")
        if self.box is not None and not self.box > 0:
            raise ValueError("box must be positive")

    @property
    def upper(self) -> float:
        return float(self.box) if self.box is not None else 6.0 * self.n


@dataclass
class CheckResult:
    passed: bool
    worst: float
    count: int = 0


@dataclass
class VerifyReport:
    n: int
    seed: int
    samples: int
    tolerance: float
    mode: str
    min_f: float
    argmin: list[float]
    violations: int
    samples_run: int
    evaluator_max_disagreement: float = 0.0
    checks: dict[str, CheckResult] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.violations == 0 and all(c.passed for c in self.checks.values())

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "VerifyReport":
        data = dict(data)
        data["checks"] = {k: CheckResult(**v) for k, v in data.get("checks", {}).items()}
        return cls(**data)


def _config_fields(cfg: RunConfig) -> dict:
    return dict(n=cfg.n, seed=cfg.seed, samples=cfg.samples, tolerance=cfg.tolerance, mode=cfg.mode)


# ---------------------------------------------------------------- sampling


def probe_points(n: int) -> np.ndarray:
    """Seed-independent probes: zeros, ones, axis multiples, simplex corners."""
    total = 6.0 * n
    pts = [np.zeros(n), np.ones(n), np.full(n, 6.0)]
    eye = np.eye(n)
    for scale in (0.5, 1.0, 2.0, total):
        pts.extend(scale * eye)
    pts.extend(eye + np.ones(n))
    if n == 2:
        pts.extend(hyperbola_probes())
    return np.array(pts)


def hyperbola_probes() -> np.ndarray:
    ts = [2.0**p for p in range(-3, 4)] + [4.0, 1.5, 1 / 3]
    return np.array([[t, 1.0 / t] for t in ts])


def uniform_simplex(rng: np.random.Generator, n: int, total: float, count: int, face: bool = False) -> np.ndarray:
    """Uniform points of ``{x >= 0, sum x <= total}`` (or of the face ``sum x = total``)."""
    e = rng.standard_exponential((count, n + (0 if face else 1)))
    return total * e[:, :n] / e.sum(axis=1, keepdims=True)


def _near_ones(x: np.ndarray, tol: float) -> np.ndarray:
    return np.all(np.abs(x - 1.0) <= tol, axis=-1)


@dataclass
class _ChunkStats:
    start: int
    min_f: float
    argmin: np.ndarray
    violations: int
    false_equalities: int
    count: int


def _scan(points: np.ndarray, start: int, tol: float) -> _ChunkStats:
    vals = f_n(points)
    i = int(np.argmin(vals))
    zeroish = np.abs(vals) <= EQUALITY_TOL
    false_eq = int(np.count_nonzero(zeroish & ~_near_ones(points, NEAR_ONES_TOL)))
    return _ChunkStats(start, float(vals[i]), points[i].copy(), int(np.count_nonzero(vals < -tol)), false_eq, len(points))


def _merge(stats: list[_ChunkStats]) -> _ChunkStats:
    best = None
    for s in sorted(stats, key=lambda s: s.start):
        if best is None or s.min_f < best.min_f:
            best = s
    return _ChunkStats(
        0,
        best.min_f,
        best.argmin,
        sum(s.violations for s in stats),
        sum(s.false_equalities for s in stats),
        sum(s.count for s in stats),
    )


def evaluator_disagreement(points: np.ndarray) -> float:
    """Largest relative gap between ``L_formula`` and the enabled oracles."""
    n = points.shape[-1]
    worst = 0.0
    for x in points:
        ref = L_formula(x)
        scale = max(1.0, abs(ref))
        if n <= ENUM_CHECK_MAX_N:
            worst = max(worst, abs(L_enumerate(x) - ref) / scale)
        if n <= PERMANENT_CHECK_MAX_N:
            worst = max(worst, abs(L_permanent(x) - ref) / scale)
    return worst


def rencontres_form(x) -> float:
    """``sum_k d(n, k) s_k(x)``, the rencontres-weighted mean of the ``s_k``."""
    x = np.asarray(x, dtype=float)
    n = x.shape[-1]
    d = np.array([float(comb.rencontres_fraction(n, k)) for k in range(n + 1)])
    return normalized_all(x) @ d


def _common_checks(cfg: RunConfig, cross: np.ndarray, merged: _ChunkStats, report: VerifyReport) -> None:
    report.checks["inequality"] = CheckResult(merged.violations == 0, merged.min_f, merged.count)
    disagreement = evaluator_disagreement(cross)
    report.evaluator_max_disagreement = disagreement
    report.checks["evaluator_agreement"] = CheckResult(disagreement <= AGREEMENT_TOL, disagreement, len(cross))
    gaps = np.abs(rencontres_form(cross) - L_formula(cross)) / np.maximum(1.0, np.abs(L_formula(cross)))
    report.checks["rencontres_reformulation"] = CheckResult(bool(gaps.max() <= EQUALITY_TOL), float(gaps.max()), len(cross))
    if cfg.n == 2:
        hyp = np.abs(f_n(hyperbola_probes()))
        report.checks["equality_curve"] = CheckResult(bool(hyp.max() <= EQUALITY_TOL), float(hyp.max()), len(hyp))
    else:
        report.checks["equality_only_at_ones"] = CheckResult(
            merged.false_equalities == 0, float(merged.false_equalities), merged.count
        )


def _sampled_run(cfg: RunConfig, chunk_points: Callable[[int], np.ndarray], n_chunks: int) -> VerifyReport:
    probes = probe_points(cfg.n)
    workers = worker_count(cfg.workers)

    def job(c: int) -> _ChunkStats:
        return _scan(chunk_points(c), len(probes) + c * CHUNK, cfg.tolerance)

    stats = [_scan(probes, 0, cfg.tolerance)] + _map(job, range(n_chunks), workers)
    merged = _merge(stats)
    cross = probes
    if n_chunks:
        cross = np.vstack([probes, chunk_points(0)[:CROSS_CHECK_POINTS]])
    report = VerifyReport(
        **_config_fields(cfg),
        min_f=merged.min_f,
        argmin=[float(v) for v in merged.argmin],
        violations=merged.violations,
        samples_run=merged.count,
    )
    _common_checks(cfg, cross, merged, report)
    return report


def verify_sampling(cfg: RunConfig) -> VerifyReport:
    """Uniform samples in ``[0, box]^n`` plus the deterministic probe set."""
    if cfg.n < 2:
        raise ValueError("the inequality needs n >= 2")
    n_chunks = math.ceil(cfg.samples / CHUNK)

    def chunk_points(c: int) -> np.ndarray:
        size = min(CHUNK, cfg.samples - c * CHUNK)
        return substream(cfg.seed, c).uniform(0.0, cfg.upper, (size, cfg.n))

    return _sampled_run(cfg, chunk_points, n_chunks)


def verify_grid(cfg: RunConfig) -> VerifyReport:
    """Regular grid with ``m`` levels per axis, ``m^n <= samples`` (``m >= 2``)."""
    if cfg.n < 2:
        raise ValueError("the inequality needs n >= 2")
    m = 2
    while (m + 1) ** cfg.n <= cfg.samples:
        m += 1
    levels = np.linspace(0.0, cfg.upper, m)
    total = m**cfg.n
    n_chunks = math.ceil(total / CHUNK)

    def chunk_points(c: int) -> np.ndarray:
        idx = np.arange(c * CHUNK, min(total, (c + 1) * CHUNK))
        return levels[np.stack(np.unravel_index(idx, (m,) * cfg.n), axis=-1)]

    return _sampled_run(cfg, chunk_points, n_chunks)


# ---------------------------------------------------------------- minimization


@dataclass
class MinimizeResult:
    x: np.ndarray
    f: float
    iterations: int
    status: str


def projected_descent(x0, upper: float, max_iters: int = 10_000) -> MinimizeResult:
    """Projected gradient descent on ``[0, upper]^n`` with Barzilai-Borwein
    trial steps and halving backtracking; every accepted step strictly
    decreases ``f_n`` and keeps all coordinates positive."""
    x = np.asarray(x0, dtype=float).copy()
    fx = f_n(x)
    g = gradient_array(x)
    alpha = 1.0
    for it in range(max_iters):
        if not np.all(np.isfinite(g)) or np.abs(g).max() <= EQUALITY_TOL:
            return MinimizeResult(x, fx, it, "critical")
        trial_alpha = alpha
        while trial_alpha >= flow.STEP_FLOOR:
            trial = np.clip(x - trial_alpha * g, 0.0, upper)
            if np.all(trial > 0):
                ft = f_n(trial)
                if ft < fx:
                    break
            trial_alpha *= 0.5
        else:
            return MinimizeResult(x, fx, it, "stalled")
        g_new = gradient_array(trial)
        s, yv = trial - x, g_new - g
        sy = float(s @ yv)
        alpha = float(np.clip(s @ s / sy, 1e-8, 1e3)) if sy > 0 else 1.0
        x, fx, g = trial, ft, g_new
    return MinimizeResult(x, fx, max_iters, "max_iters")


def verify_minimize(cfg: RunConfig) -> VerifyReport:
    """Multi-start local minimization from ``cfg.samples`` random interior
    points of ``{x >= 0, sum x <= 6n}``; the best local minimum is expected
    at the all-ones point."""
    if cfg.n < 3:
        raise ValueError("minimization needs n >= 3 (for n = 2 the minimizers form a curve)")
    workers = worker_count(cfg.workers)
    upper = cfg.upper

    def job(i: int) -> MinimizeResult:
        x0 = uniform_simplex(substream(cfg.seed, i), cfg.n, 6.0 * cfg.n, 1)[0]
        return projected_descent(np.minimum(x0, upper), upper)

    results = _map(job, range(cfg.samples), workers)
    best_i = min(range(len(results)), key=lambda i: (results[i].f, i)) if results else None
    dist = [float(np.abs(r.x - 1.0).max()) for r in results]
    converged = all(d <= MIN_X_TOL and abs(r.f) <= MIN_F_TOL for d, r in zip(dist, results))
    violations = sum(r.f < -cfg.tolerance for r in results)
    best = results[best_i] if results else None
    report = VerifyReport(
        **_config_fields(cfg),
        min_f=best.f if best else math.inf,
        argmin=[float(v) for v in best.x] if best else [],
        violations=violations,
        samples_run=len(results),
    )
    report.checks["inequality"] = CheckResult(violations == 0, report.min_f, len(results))
    report.checks["converged_to_ones"] = CheckResult(converged, max(dist, default=0.0), len(results))
    return report


# ---------------------------------------------------------------- small n


def check_n2(samples: int, seed: int) -> dict[str, CheckResult]:
    """``1 + a b >= 2 sqrt(a b)``, with equality exactly on ``a b = 1``."""
    rng = substream(seed, 0)
    pts = rng.uniform(0.0, 12.0, (samples, 2))
    pts = np.vstack([pts, [[0.0, 5.0], [5.0, 0.0], [0.0, 0.0]]])
    prod = pts[:, 0] * pts[:, 1]
    slack = 1.0 + prod - 2.0 * np.sqrt(prod)
    hyp = hyperbola_probes()
    hprod = hyp[:, 0] * hyp[:, 1]
    hslack = np.abs(1.0 + hprod - 2.0 * np.sqrt(hprod))
    scaled_gap = np.abs(2.0 * f_n(pts) - slack)
    return {
        "am_gm": CheckResult(bool(slack.min() >= -EQUALITY_TOL), float(slack.min()), len(pts)),
        "equality_curve": CheckResult(bool(hslack.max() <= EQUALITY_TOL), float(hslack.max()), len(hyp)),
        "matches_f": CheckResult(bool(scaled_gap.max() <= 1e-9), float(scaled_gap.max()), len(pts)),
    }


def n3_sides(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Both sides of the ``n = 3`` inequality scaled by ``3! = 6``."""
    a1, a2, a3 = a[..., 0], a[..., 1], a[..., 2]
    lhs = 2.0 + a1 + a2 + a3 + a1 * a2 * a3
    rhs = 2.0 * (np.sqrt(a1 * a2) + np.sqrt(a2 * a3) + np.sqrt(a1 * a3))
    return lhs, rhs


def check_n3(samples: int, seed: int) -> dict[str, CheckResult]:
    """Replay the three-variable argument step by step on random triples in ``[0, 10]^3``."""
    rng = substream(seed, 0)
    pts = np.vstack([rng.uniform(0.0, 10.0, (samples, 3)), [[1.0, 1.0, 1.0], [0.0, 0.0, 0.0]]])
    x, y, z = pts.T
    lhs, rhs = n3_sides(pts)

    prod = x * y * z
    cube = np.cbrt(prod)
    am_gm = 2.0 + prod - 3.0 * cube
    schur = x * (x - y) * (x - z) + y * (y - z) * (y - x) + z * (z - x) * (z - y)

    a, b, c = np.cbrt(x), np.cbrt(y), np.cbrt(z)
    mixed = a * b * (a + b) + b * c * (b + c) + a * c * (a + c)
    schur_cubes = a**3 + b**3 + c**3 + 3 * a * b * c - mixed
    chain = mixed - 2.0 * ((a * b) ** 1.5 + (b * c) ** 1.5 + (a * c) ** 1.5)
    reduced = x + y + z + 3.0 * cube - rhs

    ones_lhs, ones_rhs = n3_sides(np.ones(3))
    scaled_gap = np.abs(6.0 * f_n(pts) - (lhs - rhs))

    def ok(values: np.ndarray) -> CheckResult:
        return CheckResult(bool(values.min() >= -EQUALITY_TOL), float(values.min()), len(values))

    return {
        "n3_inequality": ok(lhs - rhs),
        "am_gm_step": ok(am_gm),
        "schur": ok(schur),
        "schur_cubes": ok(schur_cubes),
        "final_am_gm": ok(chain),
        "reduced_inequality": ok(reduced),
        "equality_at_ones": CheckResult(
            bool(ones_lhs == 6.0 and ones_rhs == 6.0), float(ones_lhs - ones_rhs), 1
        ),
        "matches_f": CheckResult(bool(scaled_gap.max() <= 1e-9), float(scaled_gap.max()), len(pts)),
    }


# ---------------------------------------------------------------- lemma audits


def tail_equal_configs(rng: np.random.Generator, n: int, k: int, count: int, top: float = 6.0) -> np.ndarray:
    """Sorted points with ``x_k < x_{k+1} = ... = x_n >= 1`` (``k`` a 1-based rank)."""
    xn = rng.uniform(1.0, top, count)
    u = 1.0 - rng.random(count)  # (0, 1]
    xk = xn * (1.0 - u)
    xk = np.where(xk < xn, xk, np.nextafter(xn, 0.0))
    lower = np.sort(xk[:, None] * (1.0 - rng.random((count, k - 1))), axis=1)
    tail = np.repeat(xn[:, None], n - k, axis=1)
    return np.hstack([lower, xk[:, None], tail])


def audit_compact(rng: np.random.Generator, n: int, count: int) -> tuple[CheckResult, np.ndarray, np.ndarray]:
    """``f_n >= 5/6`` on the face ``sum x = 6n``."""
    pts = uniform_simplex(rng, n, 6.0 * n, count, face=True)
    vals = f_n(pts)
    return CheckResult(bool(vals.min() >= COMPACT_BOUND - 1e-9), float(vals.min()), count), pts, vals


def audit_all_above_one(rng: np.random.Generator, n: int, count: int, low: float = 1.001, high: float = 6.0) -> CheckResult:
    pts = rng.uniform(low, high, (count, n))
    worst = float(gradient_array(pts).min())
    return CheckResult(worst > 0, worst, count)


def audit_all_below_one(rng: np.random.Generator, n: int, count: int, low: float = 1e-4, high: float = 0.999) -> CheckResult:
    pts = rng.uniform(low, high, (count, n))
    worst = float(gradient_array(pts).sum(axis=-1).max())
    return CheckResult(worst < 0, worst, count)


def audit_s_k(rng: np.random.Generator, n: int, k: int, count: int) -> CheckResult:
    """``S_k > 0`` and ``O_k f_n < 0`` on tail-equal configurations; the worst
    value reported is ``min S_k / (n-2)!``."""
    pts = tail_equal_configs(rng, n, k, count)
    s = flow.S_k_value(pts, k)
    ok_op = flow.operator_Ok(pts, k)
    passed = bool(s.min() > 0 and ok_op.max() < 0)
    return CheckResult(passed, float(s.min() / comb.factorial(n - 2)), count)


def audit_pairing(rng: np.random.Generator, n: int, count: int) -> CheckResult:
    worst = math.inf
    total = 0
    for k in range(n // 2, n - 1):
        pts = tail_equal_configs(rng, n, k, count)
        for j in range(k + 1, n):
            for x in pts:
                worst = min(worst, flow.pairing_bound(x, k, j))
                total += 1
    return CheckResult(worst > 0, worst, total)


def audit_aux_lower_bound(rng: np.random.Generator, n: int, count: int) -> CheckResult:
    """``S_k >= aux(y, t)`` for ``k <= ell - 1``, compared after dividing by ``(n-2)!``."""
    ell = n // 2
    scale = float(comb.factorial(n - 2))
    worst = math.inf
    total = 0
    for k in range(1, ell):
        t = ell - k - 1 if n % 2 == 0 else ell - k
        pts = tail_equal_configs(rng, n, k, count)
        y = np.sqrt(pts[:, k - 1] / pts[:, -1])
        gap = (flow.S_k_value(pts, k) - flow.aux_value(flow.AuxParams(n, t, y))) / scale
        worst = min(worst, float(gap.min()))
        total += count
    if total == 0:
        return CheckResult(True, 0.0, 0)
    return CheckResult(worst >= -1e-9, worst, total)


def _t_range(n: int) -> range:
    ell = n // 2
    return range(0, ell - 1) if n % 2 == 0 else range(1, ell)


def audit_aux_identities(n: int) -> dict[str, CheckResult]:
    """Exact identities: zero at the extreme ``t``, strict decrease in ``t``
    at ``y = 0``, and the permutation count of ``[n-2]``."""
    out = {}
    ts = list(_t_range(n))
    vals = [flow.aux_value(flow.AuxParams(n, t, Fraction(0)), exact=True) for t in ts]
    out["aux_zero_at_max_t"] = CheckResult(vals[-1] == 0, float(vals[-1]), 1)
    steps = [a - b for a, b in zip(vals, vals[1:])]
    out["aux_decreasing_in_t"] = CheckResult(all(s > 0 for s in steps), float(min(steps, default=0)), len(steps))
    m = n - 2
    total = sum(comb.derangements(m - j) * comb.binomial(m, j) for j in range(m + 1))
    out["derangement_identity"] = CheckResult(total == comb.factorial(m), float(total - comb.factorial(m)), 1)
    return out


def audit_aux_monotone_y(n: int, grid: int = 1000) -> CheckResult:
    """Strict increase in ``y`` on a grid of ``(0, 1]``, and positivity there."""
    ys = np.linspace(0.0, 1.0, grid + 1)
    scale = float(comb.factorial(n - 2))
    worst_step, worst_val = math.inf, math.inf
    for t in _t_range(n):
        vals = flow.aux_value(flow.AuxParams(n, t, ys)) / scale
        worst_step = min(worst_step, float(np.diff(vals).min()))
        worst_val = min(worst_val, float(vals[1:].min()))
    return CheckResult(worst_step > 1e-12 and worst_val > 0, worst_step, grid)


def audit_classify(rng: np.random.Generator, n: int, count: int) -> tuple[CheckResult, CheckResult]:
    """No false critical points inside the compact region, and every descent
    direction decreases ``f_n`` over a step of ``1e-6``."""
    pts = uniform_simplex(rng, n, 6.0 * n, count)
    false_critical = 0
    worst_drop = -math.inf
    descents = 0
    for x in pts:
        rep = flow.classify(x)
        if rep.region == "critical_candidate" and not _near_ones(x, flow.ONE_TOL):
            false_critical += 1
        if rep.region == "descent":
            descents += 1
            worst_drop = max(worst_drop, f_n(x + 1e-6 * rep.direction) - f_n(x))
    return (
        CheckResult(false_critical == 0, float(false_critical), count),
        CheckResult(descents == 0 or worst_drop < 0, worst_drop if descents else 0.0, descents),
    )


def check_lemmas(cfg: RunConfig) -> VerifyReport:
    """Run every flow audit at ``cfg.samples`` points per audit."""
    n = cfg.n
    if n < 4:
        raise ValueError("lemma audits need n >= 4")
    count = cfg.samples
    checks: dict[str, CheckResult] = {}

    compact, pts, vals = audit_compact(substream(cfg.seed, 0), n, count)
    checks["compact"] = compact
    ones = np.ones(n)
    at_ones = max(abs(f_n(ones)), float(np.abs(gradient_array(ones)).max()))
    checks["critical_point_at_ones"] = CheckResult(at_ones <= EQUALITY_TOL, at_ones, 1)
    checks["all_above_one"] = audit_all_above_one(substream(cfg.seed, 1), n, count)
    checks["all_below_one"] = audit_all_below_one(substream(cfg.seed, 2), n, count)
    s_k = [audit_s_k(substream(cfg.seed, 100 + k), n, k, count) for k in range(1, n)]
    checks["s_k_positive"] = CheckResult(
        all(c.passed for c in s_k), min(c.worst for c in s_k), sum(c.count for c in s_k)
    )
    checks["pairing"] = audit_pairing(substream(cfg.seed, 3), n, count)
    checks["aux_lower_bound"] = audit_aux_lower_bound(substream(cfg.seed, 4), n, count)
    checks.update(audit_aux_identities(n))
    checks["aux_monotone_in_y"] = audit_aux_monotone_y(n)
    no_false, witness = audit_classify(substream(cfg.seed, 5), n, count)
    checks["no_false_critical"] = no_false
    checks["descent_witness"] = witness

    i = int(np.argmin(vals)) if len(vals) else 0
    return VerifyReport(
        **_config_fields(cfg),
        min_f=float(vals[i]) if len(vals) else math.inf,
        argmin=[float(v) for v in pts[i]] if len(vals) else [],
        violations=int(np.count_nonzero(vals < -cfg.tolerance)),
        samples_run=count,
        checks=checks,
    )


def run(cfg: RunConfig) -> VerifyReport:
    if cfg.mode == "sample":
        return verify_sampling(cfg)
    if cfg.mode == "grid":
        return verify_grid(cfg)
    if cfg.mode == "minimize":
        return verify_minimize(cfg)
    if cfg.mode == "lemmas":
        return check_lemmas(cfg)
    raise ValueError(f"mode {cfg.mode!r} does not produce a verification report")


# ---------------------------------------------------------------- output


CSV_FIELDS = ("record", "name", "passed", "value", "count", "n", "seed", "samples", "tolerance", "mode")


def emit_report(report: VerifyReport, fmt: str = "json", path: Optional[str] = None) -> str:
    """Serialize ``report`` (and write it to ``path`` when given)."""
    if fmt == "json":
        text = json.dumps(report.to_dict(), indent=2) + "\n"
    elif fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_FIELDS)
        echo = [report.n, report.seed, report.samples, repr(report.tolerance), report.mode]
        summary = [
            ("min_f", repr(report.min_f)),
            ("argmin", " ".join(repr(v) for v in report.argmin)),
            ("violations", report.violations),
            ("samples_run", report.samples_run),
            ("evaluator_max_disagreement", repr(report.evaluator_max_disagreement)),
        ]
        for name, value in summary:
            writer.writerow(["summary", name, report.passed, value, report.samples_run, *echo])
        for name, c in report.checks.items():
            writer.writerow(["check", name, c.passed, repr(c.worst), c.count, *echo])
        text = buf.getvalue()
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if path is not None:
        try:
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            raise OSError(f"could not write report to {path}: {exc}") from exc
    return text


def parse_report(text: str) -> VerifyReport:
    return VerifyReport.from_dict(json.loads(text))
