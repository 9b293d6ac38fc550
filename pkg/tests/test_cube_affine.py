from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fpfree.core_seq import Coeffs
from fpfree.cube_affine import (AlphaSchedule, affine_f, affine_f_power, in_cube, positive_part,
                                q_retract, simplex_shift, uniform_ar_bound)
from fpfree.lin_map import NotInSetError

A = AlphaSchedule.one_minus_geometric()
N = 24

cube_fracs = st.lists(st.fractions(0, 1, max_denominator=64), min_size=1, max_size=N)
reals = st.lists(st.floats(-3, 3, allow_subnormal=False), min_size=1, max_size=30)


@given(reals)
def test_q_retract_is_idempotent_onto_cube(v):
    r = q_retract(Coeffs(np.array(v)))
    assert in_cube(r)
    assert np.array_equal(q_retract(r).values, r.values)


@given(reals, reals)
def test_q_retract_nonexpansive_in_sup(u, v):
    n = max(len(u), len(v))
    a = np.pad(np.array(u), (0, n - len(u)))
    b = np.pad(np.array(v), (0, n - len(v)))
    ra, rb = (np.pad(v, (0, n - len(v))) for v in (q_retract(Coeffs(a)).values, q_retract(Coeffs(b)).values))
    assert np.max(np.abs(ra - rb)) <= np.max(np.abs(a - b))


@given(cube_fracs, st.integers(1, 64))
def test_closed_form_power_matches_iteration_exactly(t, m):
    x = Coeffs(np.array(t, dtype=object))
    it = x
    for _ in range(m):
        it = affine_f(it, A, N, exact=True)
    closed = affine_f_power(x, A, m, N, exact=True)
    assert list(it.values) == list(closed.values)


@given(cube_fracs, cube_fracs, st.fractions(0, 1, max_denominator=16))
def test_affine_exactly(t, s, lam):
    x = np.array(t + [Fraction(0)] * (N - len(t)), dtype=object)
    y = np.array(s + [Fraction(0)] * (N - len(s)), dtype=object)
    mix = affine_f(Coeffs(lam * x + (1 - lam) * y), A, N, exact=True).values
    sep = lam * affine_f(Coeffs(x), A, N, exact=True).values \
        + (1 - lam) * affine_f(Coeffs(y), A, N, exact=True).values
    assert list(mix) == list(sep)


@given(cube_fracs, st.integers(1, 64))
def test_ar_step_bounded(t, m):
    x = Coeffs(np.array(t, dtype=object))
    a = affine_f_power(x, A, m + 1, N, exact=True).values
    b = affine_f_power(x, A, m, N, exact=True).values
    step = max(abs(u - v) for u, v in zip(a, b))
    assert step <= uniform_ar_bound(A, m, exact=True)


def test_first_bound_is_half():
    assert uniform_ar_bound(A, 1, exact=True) == Fraction(1, 2)
    assert uniform_ar_bound(A, 1) == pytest.approx(0.5, abs=1e-12)


def test_bound_tends_to_zero():
    vals = [uniform_ar_bound(A, m) for m in (1, 10, 100, 1000)]
    assert all(b < a for a, b in zip(vals, vals[1:]))
    assert vals[-1] < 1e-2


@given(cube_fracs)
def test_no_fixed_point_below_ones(t):
    x = Coeffs(np.array(t, dtype=object))
    if all(v == 1 for v in t):
        return
    fx = affine_f(x, A, N, exact=True).values
    padded = list(t) + [Fraction(0)] * (N - len(t))
    assert any(u != v for u, v in zip(fx, padded))


def test_rejects_points_outside_cube():
    with pytest.raises(NotInSetError):
        affine_f(Coeffs(np.array([1.5])), A, N)


def test_explicit_schedule_validation():
    with pytest.raises(ValueError):
        AlphaSchedule.from_list([0.5, 0.4])
    with pytest.raises(ValueError):
        AlphaSchedule(ratio=1.0)


def test_simplex_shift_example():
    out = simplex_shift(Coeffs(np.array([0.5, 0.5])))
    assert list(out.values) == [0.0, 0.5, 0.5]
    with pytest.raises(NotInSetError):
        simplex_shift(Coeffs(np.array([0.5, 0.2])))


def test_positive_part():
    assert list(positive_part(Coeffs(np.array([-1.0, 2.0]))).values) == [0.0, 2.0]
