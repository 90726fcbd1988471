import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from symflow import combinatorics as comb
from symflow.fixedpoint import (
    ENUM_MAX_N,
    PERMANENT_MAX_N,
    OnesPlusDiag,
    SizeError,
    L_enumerate,
    L_formula,
    L_formula_exact,
    L_permanent,
    R_value,
    f_n,
    f_value,
    fixed_point_weights,
    gradient,
    gradient_array,
    hessian,
    hessian_entry,
    permanent,
    permanent_parts,
)


def brute_L(x):
    """Literal average over S_n, independent of the library's histogram."""
    n = len(x)
    total = 0.0
    for p in itertools.permutations(range(n)):
        total += math.prod(x[i] for i in range(n) if p[i] == i)
    return total / math.factorial(n)


def brute_permanent(m):
    n = len(m)
    return sum(math.prod(m[i][p[i]] for i in range(n)) for p in itertools.permutations(range(n)))


def central_gradient(x, h=1e-5):
    return np.array([(f_n(x + h * e) - f_n(x - h * e)) / (2 * h) for e in np.eye(x.size)])


# ------------------------------------------------------------------ L_n


@pytest.mark.parametrize("n", range(1, 15))
def test_L_at_ones(n):
    assert L_formula(np.ones(n)) == pytest.approx(1.0, abs=1e-14)
    assert L_permanent(np.ones(n)) == pytest.approx(1.0, abs=1e-14)
    if n <= ENUM_MAX_N:
        assert L_enumerate(np.ones(n)) == pytest.approx(1.0, abs=1e-14)


def test_L_examples():
    assert L_formula([4, 9]) == 18.5
    assert L_enumerate([4, 9]) == 18.5
    assert L_formula(np.zeros(3)) == pytest.approx(1 / 3)
    assert L_enumerate([1, 0, 0]) == pytest.approx(0.5)
    assert L_formula([1, 0, 0]) == pytest.approx(0.5)
    assert L_formula_exact([1, 0, 0]) == Fraction(1, 2)
    assert L_formula_exact([1, 1, 4]) == 2


@given(st.floats(0, 50), st.floats(0, 50))
def test_L_two_variables(a, b):
    assert L_formula([a, b]) == pytest.approx((1 + a * b) / 2, rel=1e-14, abs=1e-14)


@pytest.mark.parametrize("n", range(1, 8))
def test_L_matches_literal_average(rng, n):
    for _ in range(5):
        x = rng.uniform(0, 6, n)
        ref = brute_L(x)
        assert L_formula(x) == pytest.approx(ref, rel=1e-12)
        assert L_enumerate(x) == pytest.approx(ref, rel=1e-12)
        assert L_permanent(x) == pytest.approx(ref, rel=1e-12)


def test_L_formula_exact_matches_float(rng):
    for n in range(2, 10):
        x = rng.integers(0, 7, n)
        assert float(L_formula_exact(x.tolist())) == pytest.approx(L_formula(x), rel=1e-13)


def test_weights_sum_to_one():
    for n in range(0, 30):
        w = [Fraction(comb.derangements(n - i), comb.factorial(n)) * comb.binomial(n, i) for i in range(n + 1)]
        assert sum(w) == 1
        assert fixed_point_weights(n).shape == (n + 1,)


def test_all_equal_matches_rencontres_form():
    for n in range(2, 16):
        for a in (0.0, 0.3, 1.0, 2.5, 6.0):
            ref = sum(float(comb.rencontres_fraction(n, k)) * a**k for k in range(n + 1))
            assert L_formula(np.full(n, a)) == pytest.approx(ref, rel=1e-12, abs=1e-12)


def test_batch_matches_single(rng):
    xs = rng.uniform(0, 6, (6, 5))
    np.testing.assert_allclose(L_formula(xs), [L_formula(x) for x in xs], rtol=1e-15)
    np.testing.assert_allclose(L_enumerate(xs), [L_enumerate(x) for x in xs], rtol=1e-15)
    np.testing.assert_allclose(f_n(xs), [f_n(x) for x in xs], rtol=1e-14)


def test_size_limits():
    with pytest.raises(SizeError):
        L_enumerate(np.ones(ENUM_MAX_N + 1))
    with pytest.raises(SizeError):
        L_permanent(np.ones(PERMANENT_MAX_N + 1))


@pytest.mark.parametrize("bad", [[-1.0, 2.0], [np.nan, 1.0], [np.inf, 1.0]])
def test_rejects_bad_points(bad):
    with pytest.raises(ValueError):
        L_formula(bad)
    with pytest.raises(ValueError):
        f_value(bad)


# ------------------------------------------------------------------ permanent


def test_permanent_examples():
    assert permanent(OnesPlusDiag([3.0, 5.0])) == 16.0
    for n in range(1, 10):
        assert permanent(OnesPlusDiag(np.ones(n))) == math.factorial(n)


@pytest.mark.parametrize("n", range(1, 21))
def test_permanent_of_J_minus_I_counts_derangements(n):
    hi, lo = permanent_parts(OnesPlusDiag(np.zeros(n)))
    assert round(Fraction(hi) + Fraction(lo)) == comb.derangements(n)


def test_permanent_matches_brute_force(rng):
    for n in range(1, 7):
        d = rng.uniform(0, 5, n)
        m = OnesPlusDiag(d)
        assert permanent(m) == pytest.approx(brute_permanent(m.dense().tolist()), rel=1e-13)


def test_ones_plus_diag_validation():
    m = OnesPlusDiag([1.0, 2.0, 3.0])
    assert m.n == 3
    np.testing.assert_array_equal(m.dense(), [[1, 1, 1], [1, 2, 1], [1, 1, 3]])
    with pytest.raises(ValueError):
        m.diag[0] = 5.0
    for bad in ([], [-1.0], [[1.0]]):
        with pytest.raises(ValueError):
            OnesPlusDiag(bad)


# ------------------------------------------------------------------ R and f


def test_R_examples():
    assert R_value(np.ones(7)) == pytest.approx(1.0)
    assert R_value([4, 9]) == 6.0
    assert R_value([0, 5]) == 0.0
    with pytest.raises(ValueError):
        R_value([3.0])


def test_f_examples():
    for n in range(2, 21):
        assert abs(f_n(np.ones(n))) <= 1e-12
    assert f_value([1, 1, 4]).f == pytest.approx(1 / 3, rel=1e-14)
    ev = f_value([24, 0, 0, 0])
    assert ev.f == pytest.approx(57 / 24, rel=1e-14) and ev.f >= 5 / 6
    assert ev.max_disagreement <= 1e-12


def test_f_value_fields():
    ev = f_value(np.linspace(0.5, 3, 12))
    assert ev.L_enum is None and ev.L_permanent is not None
    ev = f_value(np.linspace(0.5, 3, 30))
    assert ev.L_enum is None and ev.L_permanent is None
    assert ev.max_disagreement == 0.0


@pytest.mark.parametrize("n", range(3, 13))
def test_leading_slope_along_diagonal(n):
    # f(t 1) = c_n/n! - (1 - c_{n-1}/(n-1)!) t + O(t^2)
    c0 = comb.derangements(n) / math.factorial(n)
    slope = -(1 - comb.derangements(n - 1) / math.factorial(n - 1))
    assert f_n(np.zeros(n)) == pytest.approx(c0, rel=1e-14)
    ts = np.array([1e-2, 5e-3, 2.5e-3, 1.25e-3])
    resid = np.array([f_n(np.full(n, t)) - c0 - slope * t for t in ts])
    # the t^2 coefficient c_{n-2} / (2 (n-2)!) is at most 1/2
    assert np.all(np.abs(resid) <= ts**2)


# ------------------------------------------------------------------ derivatives


@pytest.mark.parametrize("n", range(3, 11))
def test_gradient_matches_finite_differences(rng, n):
    for _ in range(10):
        x = rng.uniform(0.05, 6, n)
        g = gradient(x)
        assert g.all_valid
        fd = central_gradient(x)
        assert np.abs(g.partials - fd).max() <= 1e-6 * np.abs(g.partials).max()


def test_gradient_at_ones():
    for n in range(2, 21):
        assert np.abs(gradient(np.ones(n)).partials).max() <= 1e-12


def test_gradient_zero_coordinate():
    g = gradient([0.0, 1.0, 2.0, 3.0])
    assert not g.valid[0] and g.valid[1:].all()
    assert g.partials[0] == -np.inf
    g = gradient(np.zeros(4))
    assert g.all_valid
    # the pair term has zero partials at the origin, so only L_{n-1}(0)/n remains
    np.testing.assert_allclose(g.partials, comb.derangements(3) / math.factorial(3) / 4)


def test_gradient_batch(rng):
    xs = rng.uniform(0.1, 4, (5, 6))
    g = gradient_array(xs)
    for x, row in zip(xs, g):
        np.testing.assert_array_equal(row, gradient(x).partials)


@pytest.mark.parametrize("n", range(4, 9))
def test_hessian_matches_gradient_differences(rng, n):
    h = 1e-5
    for _ in range(5):
        x = rng.uniform(0.05, 6, n)
        H = hessian(x)
        fd = np.array([(gradient_array(x + h * e) - gradient_array(x - h * e)) / (2 * h) for e in np.eye(n)])
        assert np.abs(H - fd).max() <= 1e-4 * np.abs(H).max()
        np.testing.assert_allclose(H, H.T, rtol=1e-12)


def test_hessian_at_ones():
    for n in range(2, 10):
        H = hessian(np.ones(n))
        assert H[0, 0] == pytest.approx(1 / (2 * n))
        if n > 2:
            assert H[0, 1] == pytest.approx(1 / (2 * n * (n - 1)))


@settings(max_examples=100)
@given(arrays(np.float64, st.integers(2, 8), elements=st.floats(1.0001, 6)), st.data())
def test_hessian_off_diagonal_bound_above_one(x, data):
    n = x.size
    i = data.draw(st.integers(0, n - 1))
    j = data.draw(st.integers(0, n - 1).filter(lambda v: v != i))
    assert hessian_entry(x, i, j) >= 1 / (2 * n * (n - 1)) - 1e-12


def test_hessian_rejects_zero():
    with pytest.raises(ValueError):
        hessian_entry([0.0, 1.0, 1.0], 0, 1)
    with pytest.raises(IndexError):
        hessian_entry([1.0, 1.0, 1.0], 0, 3)
