from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from schlesinger import dpv
from schlesinger.checks import DPV_MARGIN
from schlesinger.dpv import DPVParameters, DPVState, StandardDPVParameters
from schlesinger.errors import BadT, FrameMismatch, Indeterminacy, ZeroP
from schlesinger.fuchsian import continuous_hamiltonian, recompose, riemann_scheme
from schlesinger.sampling import random_dpv, trial_rng

PARAMS = DPVParameters.fuchs_consistent(0.3 + 0.1j, -0.2 + 0.4j, 0.5, -0.1 + 0.2j, 0.4 + 0.6j)


def test_residue_relations():
    params, state = random_dpv(trial_rng(0, 0))
    aux = dpv.residue_parameters(params, state)
    a0, at, a1 = aux["a"]
    _, beta_t, beta_1 = aux["beta"]
    assert abs(a0 + a1 + at) < 1e-12
    assert abs(a1 * beta_1 + at * beta_t + params.kappa2) < 1e-12


def test_point_has_the_right_scheme():
    params, state = random_dpv(trial_rng(1, 0))
    point = dpv.build_dpv_point(params, state)
    assert point.normalization_residual() < 1e-12
    scheme = riemann_scheme(recompose(point))
    assert_allclose(sorted(scheme.infinity, key=lambda z: z.real),
                    sorted([params.kappa1, params.kappa2], key=lambda z: z.real), atol=1e-10)


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 10**6))
def test_pq_round_trip(seed):
    params, state = random_dpv(np.random.default_rng(seed))
    back = dpv.pq_coordinates(dpv.build_dpv_point(params, state), params)
    assert abs(back.p - state.p) < 1e-10 * max(1, abs(state.p))
    assert abs(back.q - state.q) < 1e-10 * max(1, abs(state.q))


def test_beta1_zero_on_chart_boundary():
    p = 0.7 + 0.2j
    state = DPVState(p, PARAMS.kappa2 / p)
    aux = dpv.residue_parameters(PARAMS, state)
    assert abs(aux["beta"][2]) < 1e-14
    back = dpv.pq_coordinates(dpv.build_dpv_point(PARAMS, state))
    assert back.q == pytest.approx(state.q)


def test_swapped_kappa_is_a_frame_mismatch():
    params, state = random_dpv(trial_rng(2, 0))
    swapped = DPVParameters(params.theta0, params.theta1, params.thetat, params.kappa2, params.kappa1, params.t)
    with pytest.raises(FrameMismatch):
        dpv.pq_coordinates(dpv.build_dpv_point(params, state), swapped)


def test_extraction_is_gauge_invariant():
    params, state = random_dpv(trial_rng(3, 0))
    point = dpv.build_dpv_point(params, state)
    rescaled = point.rescaled(1, [2.5 - 1j])
    conjugated = point.conjugated(np.diag([1.0, 0.3 + 0.8j]))
    for other in (rescaled, conjugated, dpv.build_dpv_point(params, state, a1_gauge=-3 + 1j)):
        back = dpv.pq_coordinates(other, params)
        assert back.p == pytest.approx(state.p, rel=1e-10)
        assert back.q == pytest.approx(state.q, rel=1e-10)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10**6))
def test_closed_form_matches_pipeline(seed):
    params, state = random_dpv(np.random.default_rng(seed), 1, DPV_MARGIN)
    new, closed = dpv.dpv_step(params, state)
    new2, oracle = dpv.dpv_step_pipeline(params, state)
    assert new == new2
    assert abs(closed.p - oracle.p) <= 1e-9 * max(1, abs(oracle.p))
    assert abs(closed.q - oracle.q) <= 1e-9 * max(1, abs(oracle.q))
    assert abs(new.fuchs_sum) < 1e-14


def test_step_base_point():
    p = 1.0
    q = PARAMS.t + (PARAMS.theta1 + PARAMS.kappa2) / p
    with pytest.raises(Indeterminacy) as info:
        dpv.dpv_step(PARAMS, DPVState(p, q))
    assert "q - t" in info.value.locus


def test_standard_parameter_table():
    params = DPVParameters.fuchs_consistent(0.3, 0.4, 0.2, 0.5, 2.0)
    std, _, _ = dpv.to_standard(params, DPVState(1.0, 2.0))
    assert_allclose([std.a0, std.a1, std.a2, std.a3, std.a4], [-0.5, -0.6, 0.4, 0.5, -1.2], atol=1e-15)
    assert std.delta == pytest.approx(-1)
    assert std.s == params.t


def test_standard_coordinates():
    params = DPVParameters.fuchs_consistent(0.3, 0.4, 0.2, 0.2, 2.0)
    _, f, g = dpv.to_standard(params, DPVState(1.0, 2.0))
    assert f == pytest.approx(2)
    assert g == pytest.approx(-0.75)
    with pytest.raises(ZeroP):
        dpv.to_standard(params, DPVState(0.0, 2.0))


def test_blow_up_point_fixes_s():
    # q = 1 at p -> infinity lands on g = -1/s
    params = PARAMS
    _, _, g = dpv.to_standard(params, DPVState(1e12, 1.0))
    assert g == pytest.approx(-1 / params.t, rel=1e-10)


def test_standard_step_degenerate_cases():
    std = StandardDPVParameters(0, 0, 0.4, 0.5, -0.3, 2.0)
    _, f_bar, _ = dpv.dpv_standard_step(std, 0.7, 0.3)
    assert f_bar == pytest.approx(std.a3 - 0.7)
    with pytest.raises(Indeterminacy):
        dpv.dpv_standard_step(StandardDPVParameters(0.1, 0.2, 0.4, 0.5, -0.3, 2.0), 0.7, -1.0)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10**6))
def test_commuting_square(seed):
    params, state = random_dpv(np.random.default_rng(seed), 1, DPV_MARGIN)
    std, f, g = dpv.to_standard(params, state)
    new_std, f_bar, g_bar = dpv.dpv_standard_step(std, f, g)
    expected_std, f2, g2 = dpv.to_standard(*dpv.dpv_step(params, state))
    assert abs(f_bar - f2) <= 1e-8 * max(1, abs(f2))
    assert abs(g_bar - g2) <= 1e-8 * max(1, abs(g2))
    assert_allclose([new_std.a0, new_std.a1, new_std.a2], [expected_std.a0, expected_std.a1, expected_std.a2])


def test_hamiltonian_matches_trace_formula():
    params, state = random_dpv(trial_rng(4, 0))
    point = dpv.build_dpv_point(params, state)
    expected = continuous_hamiltonian(point, dpv.POLE_T) + state.p * state.q / params.t
    assert dpv.hamiltonian_pvi(params, state) == pytest.approx(expected, rel=1e-10)


def test_hamiltonian_special_values():
    params = PARAMS
    t = params.t
    q = 0.3 - 0.2j
    at_p0 = dpv.hamiltonian_pvi(params, DPVState(0, q))
    expected = (params.thetat * params.theta0 / t
                + (params.theta1 + params.kappa2) * (t * params.thetat + params.kappa2 * q) / (t * (t - 1)))
    assert at_p0 == pytest.approx(expected)
    with pytest.raises(BadT):
        dpv.hamiltonian_pvi(DPVParameters.fuchs_consistent(0.1, 0.2, 0.3, 0.4, 1), DPVState(1, 1))
