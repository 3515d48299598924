import itertools
import json
import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ncfunc.core import InputError, Point, ResourceError, random_point, row_norm, spectral_norm
from ncfunc.series import (
    DivergenceWarning,
    FreeSeries,
    closed_form,
    degree_norm,
    directional_derivative,
    evaluate,
    gen_power,
    luminet,
    luminet_term,
    multiply,
    permutation_sign,
    radius,
)
from ncfunc.suites import random_polynomial


def test_hand_evaluation_at_scalars():
    theta = FreeSeries.monomial(2, (1, 2), 2.0)
    val = evaluate(theta, Point.scalars([0.5, 0.25])).value
    assert val[0, 0] == pytest.approx(0.25)


def test_words_are_ordered_products(rng):
    z = random_point(rng, 2, 3)
    val = evaluate(FreeSeries.monomial(2, (2, 1, 1)), z).value
    np.testing.assert_allclose(val, z.mats[1] @ z.mats[0] @ z.mats[0], atol=1e-14)


def test_constant_term_is_identity_multiple(rng):
    val = evaluate(FreeSeries.constant(3, 2 - 1j), random_point(rng, 3, 4)).value
    np.testing.assert_allclose(val, (2 - 1j) * np.eye(4))


def test_zero_series():
    z = FreeSeries(2)
    assert z.degree == -1 and z.is_polynomial
    assert not evaluate(z, Point.zeros(2, 2)).value.any()


def test_multiply_hand_example():
    # (1 + X1)(X2 - X1) = X2 - X1 + X1X2 - X1X1
    a = FreeSeries(2, {(): 1, (1,): 1})
    b = FreeSeries(2, {(2,): 1, (1,): -1})
    assert dict(multiply(a, b).coeffs) == {(2,): 1, (1,): -1, (1, 2): 1, (1, 1): -1}


def test_multiply_is_noncommutative():
    x1, x2 = FreeSeries.monomial(2, (1,)), FreeSeries.monomial(2, (2,))
    assert (x1 * x2).max_coeff_diff(x2 * x1) == 1.0


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31))
def test_evaluation_is_multiplicative(seed):
    rng = np.random.default_rng(seed)
    d, n = int(rng.integers(1, 4)), int(rng.integers(1, 4))
    th, et = random_polynomial(rng, d, 3), random_polynomial(rng, d, 3)
    z = random_point(rng, d, n, norm=0.9)
    lhs = evaluate(th * et, z).value
    rhs = evaluate(th, z).value @ evaluate(et, z).value
    assert spectral_norm(lhs - rhs) <= 1e-12


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31))
def test_evaluation_is_linear(seed):
    rng = np.random.default_rng(seed)
    th, et = random_polynomial(rng, 2, 4), random_polynomial(rng, 2, 4)
    z = random_point(rng, 2, 3)
    c = complex(rng.standard_normal(), rng.standard_normal())
    lhs = evaluate(th + et.scaled(c), z).value
    rhs = evaluate(th, z).value + c * evaluate(et, z).value
    assert spectral_norm(lhs - rhs) <= 1e-11


def test_evaluation_respects_similarity(rng):
    th = random_polynomial(rng, 3, 4)
    z = random_point(rng, 3, 3)
    S = rng.standard_normal((3, 3)) + 3 * np.eye(3)
    Si = np.linalg.inv(S)
    w = Point(np.array([S @ Z @ Si for Z in z.mats]))
    assert spectral_norm(S @ evaluate(th, z).value @ Si - evaluate(th, w).value) < 1e-11


@pytest.mark.parametrize("scale", [0.5, 1.0, 2.0 + 1j])
def test_geometric_radius(scale):
    est = radius(FreeSeries.geometric(2, 2, scale))
    assert est.exact and est.value == pytest.approx(1 / abs(scale))


@pytest.mark.parametrize("d", [1, 2, 3])
def test_full_radius(d):
    est = radius(FreeSeries.full(d, 0.5))
    assert est.value == pytest.approx(2 / math.sqrt(d))
    # coefficient vector of degree k has d^k entries of size 2^-k
    assert degree_norm(FreeSeries.full(d, 0.5), 3) == pytest.approx(math.sqrt(d**3) / 8)


def test_polynomial_radius_infinite_and_exact(rng):
    est = radius(random_polynomial(rng, 2, 4))
    assert math.isinf(est.value) and est.exact


def test_geometric_partial_sum_within_tail_bound(rng):
    theta = FreeSeries.geometric(1, scale=1.0)
    z = random_point(rng, 1, 3, norm=0.6)
    for k in (0, 3, 10, 40):
        res = evaluate(theta, z, k)
        assert spectral_norm(res.value - closed_form(theta, z)) <= res.tail_bound


def test_full_series_matches_closed_form(rng):
    theta = FreeSeries.full(3, 0.4)
    z = random_point(rng, 3, 2, norm=0.5)
    res = evaluate(theta, z, 60)
    assert spectral_norm(res.value - closed_form(theta, z)) <= max(res.tail_bound, 1e-13)


def test_geometric_terms_match_truncation():
    theta = FreeSeries.geometric(2, 2, 0.5)
    assert dict(theta.truncate(3).coeffs) == {(): 1, (2,): 0.5, (2, 2): 0.25, (2, 2, 2): 0.125}


def test_divergence_warning_outside_radius(rng):
    z = random_point(rng, 1, 2, norm=1.5)
    with pytest.warns(DivergenceWarning):
        res = evaluate(FreeSeries.geometric(1), z, 5)
    assert math.isinf(res.tail_bound)


def test_infinite_series_needs_kmax(rng):
    with pytest.raises(InputError):
        evaluate(FreeSeries.geometric(1), random_point(rng, 1, 2, norm=0.1))


def test_dimension_mismatch(rng):
    with pytest.raises(InputError):
        evaluate(FreeSeries.monomial(2, (1,)), random_point(rng, 3, 2))


def test_bad_letters_rejected():
    with pytest.raises(InputError):
        FreeSeries(2, {(3,): 1.0})
    with pytest.raises(InputError):
        FreeSeries(2, {(0,): 1.0})


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31))
def test_directional_derivative_matches_central_difference(seed):
    rng = np.random.default_rng(seed)
    d, n = int(rng.integers(1, 4)), int(rng.integers(1, 4))
    th = random_polynomial(rng, d, 4)
    z, u = random_point(rng, d, n, norm=0.8), random_point(rng, d, n, norm=1.0)
    h = 1e-5
    fd = (evaluate(th, z + u * h).value - evaluate(th, z - u * h).value) / (2 * h)
    assert spectral_norm(fd - directional_derivative(th, z, u)) <= 1e-6 * max(1, spectral_norm(fd))


def test_directional_derivative_of_square():
    z, u = Point.scalars([3.0]), Point.scalars([1.0])
    val = directional_derivative(FreeSeries.monomial(1, (1, 1)), z, u)
    assert val[0, 0] == pytest.approx(6.0)


def test_geometric_derivative_matches_resolvent_derivative(rng):
    # d/dt (I - A - tB)^{-1} = R B R
    theta = FreeSeries.geometric(1)
    z, u = random_point(rng, 1, 3, norm=0.4), random_point(rng, 1, 3, norm=1.0)
    R = closed_form(theta, z)
    got = directional_derivative(theta, z, u, 80)
    assert spectral_norm(got - R @ u.mats[0] @ R) < 1e-12


def test_gen_power_counts_and_cap(rng):
    z = random_point(rng, 2, 2)
    prods = gen_power(z, 3)
    assert len(prods) == 8
    np.testing.assert_allclose(prods[1], z.mats[0] @ z.mats[0] @ z.mats[1])
    with pytest.raises(ResourceError):
        gen_power(z, 30)


def test_permutation_sign():
    assert permutation_sign([0, 1, 2]) == 1
    assert permutation_sign([1, 0, 2]) == -1
    assert permutation_sign([1, 2, 0]) == 1


def _standard_polynomial(mats):
    k = len(mats)
    total = np.zeros_like(mats[0])
    for perm in itertools.permutations(range(k)):
        prod = np.eye(mats[0].shape[0], dtype=complex)
        for p in perm:
            prod = prod @ mats[p]
        total += permutation_sign(perm) * prod
    return total


@pytest.mark.parametrize("k", [2, 3, 4])
def test_luminet_term_matches_brute_force_standard_polynomial(k, rng):
    z = random_point(rng, 2, 3)
    X1, X2 = z.mats
    args = [X1 @ np.linalg.matrix_power(X2, j) for j in range(k)]
    got = evaluate(luminet_term(k), z).value
    assert spectral_norm(got - _standard_polynomial(args)) < 1e-10


@pytest.mark.parametrize("k", range(1, 7))
def test_luminet_term_shape(k):
    t = luminet_term(k)
    assert {len(w) for w in t.coeffs} == {k * (k + 1) // 2}
    assert set(t.coeffs.values()) <= {1, -1}
    assert len(t.coeffs) == math.factorial(k)


def test_luminet_term_vanishing_pattern(rng):
    assert abs(evaluate(luminet_term(2), Point.scalars([0.3, 0.7])).value[0, 0]) < 1e-15
    # at level n the k > n arguments X1 X2^j are linearly dependent (Cayley-Hamilton)
    assert spectral_norm(evaluate(luminet_term(4), random_point(rng, 2, 3)).value) < 1e-9
    # with independent arguments S_4 does not vanish on 4 x 4 matrices
    assert spectral_norm(evaluate(luminet_term(4), random_point(rng, 2, 4)).value) > 1e-3


def test_luminet_radius_is_finite_estimate():
    est = radius(luminet(6))
    assert math.isfinite(est.value) and not est.exact
    assert est.value == pytest.approx(0.8525, abs=1e-3)


def test_series_json_roundtrip(rng):
    th = random_polynomial(rng, 3, 4)
    back = FreeSeries.from_json(json.loads(json.dumps(th.to_json())))
    assert back.max_coeff_diff(th) == 0.0
    g = FreeSeries.full(2, 0.3 + 0.1j)
    assert FreeSeries.from_json(json.loads(json.dumps(g.to_json()))).generator == g.generator


def test_series_json_errors():
    with pytest.raises(InputError):
        FreeSeries.from_json({"terms": []})
    with pytest.raises(InputError):
        FreeSeries.from_json({"d": 2, "generator": {"kind": "nope"}})
