from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fpfree import flat_construction as fc
from fpfree.transfer import (Holder, Lipschitz, ModulusTable, build_holder_free_map, compose_moduli,
                             compose_with_retraction, distance, holder_search, iterate_search,
                             largest_dyadic, lin_handle, pad_pair, radial_handle, radial_retract,
                             sample_ball, scale_map, shrink_map)

G = lin_handle("Hilbert")
vecs = st.lists(st.floats(-1, 1, allow_subnormal=False), min_size=1, max_size=12).map(np.array)


def _ball(v):
    n = np.linalg.norm(v)
    return v / n if n > 1 else v


def test_radial_examples():
    x = np.array([0.03, 0.04])
    assert np.array_equal(radial_retract(x, 0.1), x)
    y = np.array([0.12, 0.16])
    assert np.allclose(radial_retract(y, 0.1), y / 2)


@given(vecs, vecs, st.floats(0.01, 1))
def test_radial_two_lipschitz(u, v, r):
    a, b = pad_pair(u, v)
    lhs = np.linalg.norm(radial_retract(a, r) - radial_retract(b, r))
    assert lhs <= 2 * np.linalg.norm(a - b) + 1e-12


@given(vecs, st.sampled_from([0.9, 0.5, 69 / 70]))
def test_shrink_displacement_identity(v, lam):
    x = _ball(v)
    T = shrink_map(G, lam)
    assert T.displacement(x) == pytest.approx((1 - lam) * G.displacement(x), rel=1e-12, abs=1e-15)


def test_shrink_constant_example():
    lam = 69 / 70
    assert (1 - lam) * 8 + lam < 1.1 + 1e-15
    assert (1 - 0.985) * 8 + 0.985 > 1.1
    T = shrink_map(type(G)("g", G.fn, Lipschitz(8.0)), 0.99)
    assert T.modulus.L == pytest.approx(0.01 * 8 + 0.99)


@given(vecs)
def test_shrink_keeps_map_fixed_point_free(v):
    x = _ball(v)
    assert shrink_map(G, 0.9).displacement(x) > 0


@given(vecs, st.integers(1, 32))
def test_scale_conjugation(v, n):
    r = 1 / 16
    S = scale_map(G, r)
    x = r * _ball(v)
    assert np.array_equal(S.iterate(x, n), r * G.iterate(x / r, n))


@given(vecs)
def test_scale_displacement(v):
    r = 0.25
    x = _ball(v)
    S = scale_map(G, r)
    assert S.displacement(r * x) == pytest.approx(r * G.displacement(x), rel=1e-12)


def test_scale_identity_and_modulus():
    x = np.array([0.2, 0.1])
    assert np.array_equal(scale_map(G, 1.0)(x), G(x))
    m = scale_map(G, 1 / 16, alpha=0.5).modulus
    assert isinstance(m, Holder) and m.lam == pytest.approx((2 / 16) ** 0.5 * 2)
    assert 2 * 2 * (1 / 16) ** 0.5 <= 1


def test_largest_dyadic_for_hilbert():
    assert largest_dyadic(lambda r: 2 * 2 * r ** 0.5 <= 1) == 1 / 16
    T = build_holder_free_map(0.5, 1.0, "Hilbert")
    assert T.notes["r"] == 1 / 16 and T.modulus.lam <= 1


def test_compose_moduli():
    assert compose_moduli(Lipschitz(2), Lipschitz(3)) == Lipschitz(6)
    assert compose_moduli(Holder(0.5, 2), Lipschitz(4)) == Holder(0.5, 4)
    assert compose_moduli(Lipschitz(3), Holder(0.5, 2)) == Holder(0.5, 6)
    tab = compose_moduli(ModulusTable((0, 1), (0, 1)), Lipschitz(1))
    assert isinstance(tab, ModulusTable)


@given(vecs)
def test_composition_agrees_on_core(v):
    R = radial_handle(0.5)
    C = compose_with_retraction(G, R)
    x = 0.49 * _ball(v)
    assert np.array_equal(C(x), G(x))


def test_hilbert_map_holder_search_small():
    T = build_holder_free_map(0.5, 1.0, "Hilbert")
    res = holder_search(T, 0.5, 1.0, dim=8, pairs=2000, restarts=20, seed=0)
    assert res.violations == 0 and res.worst_ratio <= 1


@given(vecs)
def test_hilbert_map_is_fixed_point_free(v):
    T = build_holder_free_map(0.5, 1.0, "Hilbert")
    x = _ball(v)
    assert T.displacement(x) > 0


def test_thm_m4_handle_iterates():
    H = build_holder_free_map(0.5, source="ThmM4")
    assert H.r.r_float(1) == pytest.approx(1 / 400)
    res = iterate_search(H, 20, pairs=30, seed=1)
    assert res.violations == 0
    x = np.array([0.3, -0.2, 0.1])
    assert H.orbit(x, 3)[-1] == fc.flat_shift_power(H.R.to_w(x), 3)


def test_pipeline_budget():
    H = build_holder_free_map(0.5, 1.0, source="Pipeline")
    notes = H.notes
    mu, gamma, theta = notes["mu"], notes["gamma"], notes["theta"]
    assert (2 * mu) ** (1 - gamma) * 1520 * 20 ** (2 - theta) <= 1
    assert (4 * mu) ** (1 - gamma) * 1520 * 20 ** (2 - theta) > 1
    assert H.K.mu == Fraction(mu)


def test_witness_displacement_vanishes():
    H = build_holder_free_map(0.5, source="ThmM4")
    rows = H.witness(20)
    assert float(rows[-1][1]) < 1e-100


def test_bad_arguments():
    with pytest.raises(ValueError):
        build_holder_free_map(1.5)
    with pytest.raises(ValueError):
        scale_map(G, 1.5)
    with pytest.raises(ValueError):
        shrink_map(G, 1.0)
    with pytest.raises(ValueError):
        lin_handle("Hilbert", p=3.0)


def test_sample_ball_inside():
    pts = sample_ball(500, 5, np.random.default_rng(0))
    assert np.all(np.linalg.norm(pts, axis=1) <= 1 + 1e-12)
    assert distance([1.0], [0.0, 1.0]) == pytest.approx(np.sqrt(2))
