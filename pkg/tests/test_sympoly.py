from fractions import Fraction
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from symflow.sympoly import (
    elem_all,
    elem_without,
    leave_one_out,
    newton_maclaurin_check,
    normalized_all,
)
from conftest import brute_elem

points = st.integers(1, 10).flatmap(
    lambda n: arrays(np.float64, n, elements=st.floats(0, 10, allow_nan=False))
)


def test_elem_all_examples():
    np.testing.assert_array_equal(elem_all([1, 1, 1, 1]), [1, 4, 6, 4, 1])
    np.testing.assert_array_equal(elem_all([1, 2, 3]), [1, 6, 11, 6])
    np.testing.assert_array_equal(elem_all(np.zeros(5)), [1, 0, 0, 0, 0, 0])


def test_elem_all_exact_path():
    e = elem_all([Fraction(1, 2), Fraction(1, 3), 2], exact=True)
    assert e == [1, Fraction(17, 6), Fraction(11, 6), Fraction(1, 3)]


@pytest.mark.parametrize("n", range(1, 13))
def test_elem_all_matches_subset_oracle(rng, n):
    for _ in range(5):
        x = rng.uniform(0, 10, n)
        e = elem_all(x)
        ref = np.array([brute_elem(x, k) for k in range(n + 1)])
        np.testing.assert_allclose(e, ref, rtol=1e-12)


def test_elem_all_batch_matches_rows(rng):
    xs = rng.uniform(0, 3, (7, 5))
    batch = elem_all(xs)
    for x, e in zip(xs, batch):
        np.testing.assert_array_equal(e, elem_all(x))


def test_normalized_all():
    np.testing.assert_allclose(normalized_all(np.ones(6)), np.ones(7))
    assert normalized_all([1, 2, 3])[2] == pytest.approx(11 / 3)
    assert normalized_all([4, 9])[2] == 36


def test_elem_without():
    np.testing.assert_array_equal(elem_without([1, 2, 3], [1]), [1, 4, 3])
    np.testing.assert_array_equal(elem_without([1, 2, 3], []), elem_all([1, 2, 3]))
    np.testing.assert_array_equal(elem_without([1, 1, 1, 1], [0, 3]), [1, 2, 1])
    with pytest.raises(IndexError):
        elem_without([1, 2, 3], [3])
    with pytest.raises(ValueError):
        elem_without([1, 2, 3], [1, 1])
    with pytest.raises(ValueError):
        elem_without([1, 2, 3, 4], [0, 1, 2])


def test_leave_one_out_rows():
    loo = leave_one_out([1.0, 2.0, 3.0])
    np.testing.assert_array_equal(loo, [[2, 3], [1, 3], [1, 2]])


@settings(max_examples=200)
@given(points, st.randoms(use_true_random=False))
def test_permutation_symmetry(x, r):
    y = list(x)
    r.shuffle(y)
    np.testing.assert_allclose(elem_all(y), elem_all(x), rtol=1e-12, atol=1e-300)


@settings(max_examples=200)
@given(points, st.floats(0.01, 10))
def test_scaling(x, c):
    k = np.arange(x.size + 1)
    np.testing.assert_allclose(elem_all(c * x), c**k * elem_all(x), rtol=1e-12, atol=1e-300)


@settings(max_examples=200)
@given(points.filter(lambda x: x.size >= 2), st.data())
def test_deletion_identity(x, data):
    i = data.draw(st.integers(0, x.size - 1))
    e = elem_all(x)
    rest = elem_without(x, [i])
    rebuilt = np.append(rest, 0.0) + x[i] * np.concatenate([[0.0], rest])
    np.testing.assert_allclose(rebuilt, e, rtol=1e-12, atol=1e-300)


def test_newton_maclaurin_examples():
    rep = newton_maclaurin_check(np.ones(5))
    assert rep.passed and len(rep.newton) == 4 and len(rep.maclaurin) == 4
    s = normalized_all([1, 2, 3, 4])
    assert s[1] ** 2 == 6.25
    assert s[0] * s[2] == pytest.approx(35 / 6)
    assert newton_maclaurin_check([1, 2, 3, 4]).passed


@given(points)
def test_newton_maclaurin_random(x):
    assert newton_maclaurin_check(x).passed


def test_newton_maclaurin_rejects_negative():
    with pytest.raises(ValueError):
        newton_maclaurin_check([1.0, -1.0])
