from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from schlesinger import a2star, dpv
from schlesinger.checks import random_indexed_system
from schlesinger.errors import GradientMismatch
from schlesinger.fuchsian import DecompositionPoint
from schlesinger.hamiltonian import (
    DiscreteHamiltonianInput,
    discrete_hamiltonian,
    hamiltonian_gradient,
    verify_generating,
)
from schlesinger.sampling import random_a2, random_dpv, trial_rng
from schlesinger.transform import transform_decomposition


def _pair(point, idx):
    barred = transform_decomposition(point, idx)
    return barred, DiscreteHamiltonianInput.from_points(point, barred, idx)


def _branch_gap(diff, coeffs) -> float:
    """Distance of ``diff`` from ``2 pi i (k . coeffs)`` for small integer ``k``."""
    best = float("inf")
    for ks in itertools.product(range(-3, 4), repeat=len(coeffs)):
        best = min(best, abs(diff - 2j * np.pi * sum(k * c for k, c in zip(ks, coeffs))))
    return best


@pytest.mark.parametrize("m,n", [(2, 3), (3, 2)])
@pytest.mark.parametrize("seed", range(5))
def test_generating_equations_hold(m, n, seed):
    _, point, idx = random_indexed_system(trial_rng(seed, m), m, n)
    barred = transform_decomposition(point, idx)
    report = verify_generating(point, barred, idx, fd_step=1e-7)
    assert report.passed


def test_perturbed_barred_point_is_rejected():
    _, point, idx = random_indexed_system(trial_rng(1, 0), 2, 3)
    barred = transform_decomposition(point, idx)
    C = [c.copy() for c in barred.C]
    C[idx.beta][idx.nu, 0] += 1e-3
    bad = DecompositionPoint.create(barred.poles, barred.B, C, barred.theta, barred.a_inf)
    with pytest.raises(GradientMismatch):
        verify_generating(point, bad, idx)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 10**6), lam=st.floats(0.2, 5.0))
def test_scaling_covariance(seed, lam):
    _, point, idx = random_indexed_system(np.random.default_rng(seed), 3, 3)
    barred, inp = _pair(point, idx)
    C = [c.copy() for c in barred.C]
    C[idx.beta][idx.nu] *= lam
    scaled = DiscreteHamiltonianInput(inp.poles, inp.B, tuple(C), inp.theta, idx)
    shift = discrete_hamiltonian(scaled) - discrete_hamiltonian(inp)
    expected = (point.theta[idx.beta][idx.nu] + 1) * np.log(lam)
    # a positive real factor never moves an argument across the branch cut
    assert abs(shift - expected) < 1e-10
    g0, g1 = hamiltonian_gradient(inp), hamiltonian_gradient(scaled)
    for key in g0:
        if key[0] == "b":
            assert_allclose(g1[key], g0[key], atol=1e-10)


def _display_gradient(fn, B, k, j, h=1e-6):
    """Central differences of ``fn`` in the entries of column ``j`` of ``B[k]``."""
    out = np.zeros(B[k].shape[0], dtype=complex)
    for e in range(B[k].shape[0]):
        plus = [b.copy() for b in B]
        minus = [b.copy() for b in B]
        plus[k][e, j] += h
        minus[k][e, j] -= h
        out[e] = (fn(plus) - fn(minus)) / (2 * h)
    return out


def test_dpv_display_form():
    params, state = random_dpv(trial_rng(2, 0))
    point = dpv.build_dpv_point(params, state)
    barred, inp = _pair(point, dpv.STEP_INDEX)

    def display(B):
        return dpv.display_hamiltonian(params, B, barred.C)

    diff = discrete_hamiltonian(inp) - display(list(point.B))
    assert _branch_gap(diff, [params.theta0, params.theta1, params.thetat]) < 1e-10
    grad = hamiltonian_gradient(inp)
    for k in range(3):
        assert_allclose(_display_gradient(display, list(point.B), k, 0), grad[("b", k, 0)], atol=1e-7)


def test_a2_display_form_needs_cross_term():
    params, x, y = random_a2(trial_rng(3, 0))
    point = a2star.build_a2_point(params, x, y)
    barred, inp = _pair(point, a2star.SCHLESINGER_INDEX)
    grad = hamiltonian_gradient(inp)

    def display(B, cross=True):
        return a2star.display_hamiltonian(params, B, barred.C, include_cross_term=cross)

    diff = discrete_hamiltonian(inp) - display(list(point.B))
    coeffs = [params.theta11, params.theta12, params.theta21, params.theta22]
    assert _branch_gap(diff, coeffs) < 1e-10
    for k, j in [(0, 0), (0, 1), (1, 0), (1, 1)]:
        assert_allclose(_display_gradient(display, list(point.B), k, j), grad[("b", k, j)], atol=1e-7)
    # dropping the cross term breaks the derivative in b_{1,1}
    without = _display_gradient(lambda B: display(B, cross=False), list(point.B), 0, 0)
    assert np.max(np.abs(without - grad[("b", 0, 0)])) > 1e-3
