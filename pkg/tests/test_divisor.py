from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from schlesinger import divisor
from schlesinger.checks import random_divisor
from schlesinger.divisor import ElementaryDivisor
from schlesinger.errors import EvalAtPole, EvalAtZero, InvalidDivisor
from schlesinger.sampling import random_complex


def _instance(seed, m=3):
    rng = np.random.default_rng(seed)
    R = random_divisor(rng, m)
    v, w = random_complex(rng, m), random_complex(rng, m)
    x = complex(2 + random_complex(rng))
    return R, v, w, x


def test_construction_errors():
    with pytest.raises(InvalidDivisor):
        ElementaryDivisor(0, 0, [1, 0], [1, 0])
    with pytest.raises(InvalidDivisor):
        ElementaryDivisor(0, 1, [1, 0], [0, 1])
    with pytest.raises(InvalidDivisor):
        ElementaryDivisor(0, 1, [1, 0], [1, 0, 0])


def test_evaluation_at_singular_points():
    R = ElementaryDivisor(0, 1, [1, 2], [1, 1])
    with pytest.raises(EvalAtPole):
        divisor.evaluate(R, 0)
    with pytest.raises(EvalAtPole):
        divisor.derivative(R, 0)
    with pytest.raises(EvalAtZero):
        divisor.evaluate_inverse(R, 1)


def test_identity_at_infinity():
    R, *_ = _instance(1)
    assert_allclose(divisor.evaluate(R, 1e8), np.eye(3), atol=1e-7)


def test_determinant_at_two():
    R = ElementaryDivisor(0, 1, [1, 2, 3], [0.5, -1, 2])
    assert np.linalg.det(divisor.evaluate(R, 2)) == pytest.approx(0.5)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10**6), m=st.integers(2, 4))
def test_inverse_and_determinants(seed, m):
    R, _, _, x = _instance(seed, m)
    r, r_inv = divisor.evaluate(R, x), divisor.evaluate_inverse(R, x)
    assert_allclose(r @ r_inv, np.eye(m), atol=1e-12)
    assert np.linalg.det(r) == pytest.approx((x - R.zeta) / (x - R.z), rel=1e-10)
    assert np.linalg.det(r_inv) == pytest.approx((x - R.z) / (x - R.zeta), rel=1e-10)


def test_inverse_is_swapped_divisor():
    R, _, _, x = _instance(2)
    swapped = ElementaryDivisor(R.zeta, R.z, R.f, R.g)
    assert_allclose(divisor.evaluate_inverse(R, x), divisor.evaluate(swapped, x), atol=1e-13)


def test_kernels_at_zero_and_pole():
    R, *_ = _instance(3)
    # R(zeta) kills f; the residue of R^-1 at zeta is proportional to f g
    assert_allclose(divisor.evaluate(R, R.zeta) @ R.f, 0, atol=1e-12)
    assert_allclose(R.g @ divisor.evaluate_inverse(R, R.z), 0, atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10**6))
def test_derivative_matches_central_differences(seed):
    R, _, _, x = _instance(seed)
    h = 1e-6
    fd = (divisor.evaluate(R, x + h) - divisor.evaluate(R, x - h)) / (2 * h)
    assert_allclose(divisor.derivative(R, x), fd, atol=1e-7)


def test_log_derivative_trace():
    R, _, _, x = _instance(4)
    lhs = np.trace(divisor.derivative(R, x) @ divisor.evaluate_inverse(R, x))
    assert lhs == pytest.approx(divisor.log_derivative_trace(R, x), rel=1e-12)
    assert lhs == pytest.approx(1 / (x - R.zeta) - 1 / (x - R.z), rel=1e-12)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10**6), m=st.integers(2, 4))
def test_vanishing_and_exchange_rules(seed, m):
    R, v, w, x = _instance(seed, m)
    assert divisor.check_vanishing_rule(R, v, w, x) < 1e-10
    assert divisor.check_exchange_rule(R, v, w, x) < 1e-10


def test_rules_with_aligned_vectors():
    R, _, _, x = _instance(5)
    assert divisor.check_vanishing_rule(R, R.f, R.g, x) < 1e-10
    assert divisor.check_exchange_rule(R, R.f, R.g, x) < 1e-12


def _pairing(f, g, v, w, z, zeta, x):
    return w @ divisor.evaluate(ElementaryDivisor(z, zeta, f, g), x) @ v


def test_pairing_gradients_match_finite_differences():
    R, v, w, x = _instance(6)
    grads = divisor.pairing_gradients(R, v, w, x)
    h = 1e-6
    args = {"f": R.f, "g": R.g, "v": v, "w": w}
    expected = {"v": grads.d_v, "w": grads.d_w, "f": grads.d_f, "g": grads.d_g}
    for name, vec in args.items():
        fd = np.zeros(vec.size, dtype=complex)
        for k in range(vec.size):
            e = np.zeros(vec.size)
            e[k] = h
            plus = dict(args, **{name: vec + e})
            minus = dict(args, **{name: vec - e})
            fd[k] = (_pairing(**plus, z=R.z, zeta=R.zeta, x=x) - _pairing(**minus, z=R.z, zeta=R.zeta, x=x)) / (2 * h)
        assert_allclose(expected[name], fd, atol=1e-7, err_msg=name)
