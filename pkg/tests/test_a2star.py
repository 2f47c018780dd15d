from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from schlesinger import a2star
from schlesinger.a2star import A2Parameters
from schlesinger.checks import scheme_action_gap
from schlesinger.errors import DegenerateFrame, Indeterminacy
from schlesinger.fuchsian import recompose, riemann_scheme
from schlesinger.sampling import random_a2, trial_rng
from schlesinger.transform import transform_decomposition

FIXED = A2Parameters.fuchs_consistent(0.3 + 0.2j, -0.4 + 0.1j, 0.25 - 0.3j, -0.6 + 0.5j, 0.2 + 0.7j, -0.5 - 0.2j)


def _sorted(values):
    return sorted((complex(v) for v in values), key=lambda z: (round(z.real, 8), z.imag))


def test_normalization_is_identically_diagonal():
    params, x, y = random_a2(trial_rng(0, 0))
    point = a2star.build_a2_point(params, x, y)
    assert_allclose(point.C[0] @ point.B[0], np.diag([params.theta11, params.theta12]), atol=1e-12)
    assert_allclose(point.C[1] @ point.B[1], np.diag([params.theta21, params.theta22]), atol=1e-12)


def test_infinity_spectrum():
    params, x, y = random_a2(trial_rng(1, 0))
    point = a2star.build_a2_point(params, x, y)
    assert_allclose(_sorted(np.linalg.eigvals(point.a_inf)), _sorted(params.kappa), atol=1e-9)


def test_alpha_beta_solve_and_negative_control():
    params, x, y = random_a2(trial_rng(2, 0))
    alpha, beta = a2star.solve_alpha_beta(params, x, y)
    assert np.max(np.abs(a2star._matching(params, x, y, alpha, beta))) < 1e-10
    assert np.max(np.abs(a2star._matching(params, x, y, alpha + 1e-3, beta))) > 1e-6


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10**6))
def test_xy_round_trip(seed):
    params, x, y = random_a2(np.random.default_rng(seed))
    point = a2star.build_a2_point(params, x, y)
    assert_allclose(a2star.xy_coordinates(point), [x, y], atol=1e-10)


def test_canonical_frame_idempotent_and_gauge_invariant():
    params, x, y = random_a2(trial_rng(3, 0))
    point = a2star.build_a2_point(params, x, y)
    framed = a2star.canonical_frame(point)
    again = a2star.canonical_frame(framed)
    for b1, b2 in zip(framed.B, again.B):
        assert_allclose(b1, b2, atol=1e-12)
    rng = np.random.default_rng(0)
    p = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    moved = point.conjugated(p).rescaled(0, [2.0, -0.5j]).rescaled(1, [1 + 1j, 3.0])
    assert_allclose(a2star.xy_coordinates(moved), [x, y], atol=1e-9)


def test_degenerate_frame():
    params, x, y = random_a2(trial_rng(4, 0))
    point = a2star.build_a2_point(params, x, y)
    B = list(point.B)
    B[1] = np.array([[0, 1], [0, 0], [1, 1]], dtype=complex)
    bad = type(point).create(point.poles, B, point.C, point.theta, point.a_inf)
    with pytest.raises(DegenerateFrame):
        a2star.canonical_frame(bad)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10**6))
def test_closed_form_matches_pipeline(seed):
    params, x, y = random_a2(np.random.default_rng(seed))
    new, xc, yc = a2star.a2_schlesinger_step(params, x, y)
    new2, xp, yp = a2star.schlesinger_step_pipeline(params, x, y)
    assert new == new2
    assert abs(xc - xp) <= 1e-8 * max(1, abs(xp))
    assert abs(yc - yp) <= 1e-8 * max(1, abs(yp))


def test_step_scheme_shift():
    params, x, y = random_a2(trial_rng(5, 0))
    new, _, _ = a2star.a2_schlesinger_step(params, x, y)
    assert new.theta11 == params.theta11 - 1 and new.theta21 == params.theta21 + 1
    assert new.theta12 == params.theta12 and new.kappa == params.kappa
    barred = transform_decomposition(a2star.build_a2_point(params, x, y), a2star.SCHLESINGER_INDEX)
    scheme = riemann_scheme(recompose(barred))
    assert_allclose(_sorted(scheme.finite[0]), _sorted([new.theta11, new.theta12]), atol=1e-9)
    assert_allclose(_sorted(scheme.finite[1]), _sorted([new.theta21, new.theta22]), atol=1e-9)


def test_step_indeterminacy():
    params = A2Parameters.fuchs_consistent(1.2, 0.2, 0.3, -0.4, 0.5, 0.1)
    with pytest.raises(Indeterminacy):
        a2star.a2_schlesinger_step(params, 0.3, 0.4)


def test_sigma13():
    params, x, y = random_a2(trial_rng(6, 0))
    point = a2star.build_a2_point(params, x, y)
    new_point, new_params = a2star.sigma13(point, params)
    assert_allclose(new_point.residue(1), point.residue(1), atol=0)
    assert_allclose(new_point.residue(0), point.residue(0) - params.theta11 * np.eye(3), atol=1e-10)
    t = params.theta11
    assert new_params == A2Parameters(-t, params.theta12 - t, params.theta21, params.theta22,
                                      params.kappa1 + t, params.kappa2 + t, params.kappa3 + t)
    assert new_point.normalization_residual() < 1e-10


def test_composite_trace_has_four_stages_with_fuchs():
    params, x, y = random_a2(trial_rng(7, 0), composite=True)
    trace = a2star.composite_trace(params, x, y)
    assert [label for label, _, _ in trace] == ["start", "1:{2 1; 1 1}", "2:sigma", "3:{2 1; 2 1}", "4:sigma"]
    for _, p, point in trace:
        assert abs(p.fuchs_sum) < 1e-12
        assert abs(riemann_scheme(recompose(point)).fuchs_sum) < 1e-9


def _exact(values):
    return A2Parameters.fuchs_consistent(*(Fraction(v) for v in values))


@settings(max_examples=100, deadline=None)
@given(st.lists(st.fractions(min_value=-5, max_value=5, max_denominator=40), min_size=6, max_size=6))
def test_composite_scheme_action_is_exact(values):
    params = _exact(values)
    std = a2star.standard_parameters(params)
    assert std.b4 == 0
    assert std.delta == -1
    stepped = a2star.standard_parameters(a2star.composite_parameters(params))
    assert stepped == std.stepped()
    assert stepped.delta == -1


def test_composite_parameters_match_trace():
    params, x, y = random_a2(trial_rng(8, 0), composite=True)
    *_, (_, final, _) = a2star.composite_trace(params, x, y)
    assert final == a2star.composite_parameters(params)
    assert scheme_action_gap(params) < 1e-14


def test_base_points_land_on_the_standard_chart():
    p = FIXED
    t11, t12, t21, t22 = p.theta11, p.theta12, p.theta21, p.theta22
    for k in p.kappa:
        X = (t12 + k) * (t11 + t21 + k) / (t12 - t11)
        Y = (t11 + k) * (t12 + t22 + k) / (t12 - t11)
        f, g = a2star.standard_coordinates_projective(p, X, Y, 1)
        assert f == pytest.approx(t12 + k)
        assert g == pytest.approx(-t12 - k)
    assert a2star.standard_coordinates_projective(p, 0, -t22, 1) == pytest.approx((0, 0))
    f, g = a2star.standard_coordinates_projective(p, 0, 1, 0)
    assert np.isinf(f) and g == pytest.approx(t21)
    f, g = a2star.standard_coordinates_projective(p, 1, 0, 0)
    assert np.isinf(f) and g == pytest.approx(t22)


def test_quadric_passes_through_six_points():
    p = FIXED
    t11, t12, t21, t22 = p.theta11, p.theta12, p.theta21, p.theta22

    def quadric(X, Y, Z):
        return ((t11 - t12) * (X - Y - t21 * Z) * (X - Y - t22 * Z)
                + (t21 - t22) * Z * (t22 * (t21 * Z - X) + t21 * Y))

    points = [(1, 1, 0), (t21, 0, 1), (0, -t22, 1)]
    for k in p.kappa:
        points.append(((t12 + k) * (t11 + t21 + k) / (t12 - t11), (t11 + k) * (t12 + t22 + k) / (t12 - t11), 1))
    for pt in points:
        assert abs(quadric(*pt)) < 1e-12


def test_to_standard_indeterminacy_line():
    with pytest.raises(Indeterminacy):
        a2star.to_standard(FIXED, FIXED.theta21 + 0.5, 0.5)


def test_standard_step_cases():
    std = a2star.standard_parameters(FIXED)
    # a vanishing numerator gives f_bar = -g, which sits on the line of the second equation
    with pytest.raises(Indeterminacy) as info:
        a2star.a2_standard_step(std, 0.4 + 0.1j, -std.b1)
    assert info.value.locus == "f_bar + g"
    with pytest.raises(Indeterminacy):
        a2star.a2_standard_step(std, 0.3, -0.3)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10**6))
def test_commuting_square(seed):
    params, x, y = random_a2(np.random.default_rng(seed), composite=True)
    try:
        new, x2, y2 = a2star.composite_step(params, x, y)
        _, f2, g2 = a2star.to_standard(new, x2, y2)
        std, f, g = a2star.to_standard(params, x, y)
        _, f_bar, g_bar = a2star.a2_standard_step(std, f, g)
    except Indeterminacy:
        return
    assert abs(f_bar - f2) <= 1e-8 * max(1, abs(f2))
    assert abs(g_bar - g2) <= 1e-8 * max(1, abs(g2))
