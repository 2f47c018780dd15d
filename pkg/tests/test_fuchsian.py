from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from schlesinger.errors import DuplicatePoles, InfinityMismatch, InvalidPartition, NonSquareResidue, NotDiagonalizable
from schlesinger.fuchsian import (
    accessory_dimension,
    build_system,
    continuous_hamiltonian,
    decompose,
    eval_coefficient,
    recompose,
    riemann_scheme,
)
from schlesinger.sampling import random_residue, random_system, trial_rng

Z2 = np.zeros((2, 2))


def test_zero_residues_give_zero_infinity():
    system = build_system([0, 1], [Z2, Z2])
    assert_allclose(system.residue_at_infinity, Z2)
    assert_allclose(eval_coefficient(system, 0.3 + 2j), Z2)


def test_diagonal_residues_sum_to_minus_infinity():
    system = build_system([0, 1], [np.diag([1, 0]), np.diag([0, -1])])
    assert_allclose(system.residue_at_infinity, np.diag([-1, 1]))


def test_duplicate_poles_rejected():
    with pytest.raises(DuplicatePoles):
        build_system([0, 0], [Z2, Z2])


def test_shape_errors():
    with pytest.raises(NonSquareResidue):
        build_system([0, 1], [Z2, np.zeros((3, 3))])
    with pytest.raises(NonSquareResidue):
        build_system([0], [np.zeros((2, 3))])


def test_jordan_block_rejected_with_pole_index():
    with pytest.raises(NotDiagonalizable) as info:
        build_system([0, 1], [Z2, np.array([[1.0, 1.0], [0.0, 1.0]])])
    assert "1" in str(info.value)


def test_single_term_evaluation():
    system = build_system([0], [np.diag([1, 0])])
    assert_allclose(eval_coefficient(system, 2), np.diag([0.5, 0]))


def test_contour_integral_recovers_residue():
    system = random_system(trial_rng(7, 0), 3, 3)
    u = system.poles[1]
    n = 64
    angles = 2 * np.pi * np.arange(n) / n
    radius = 0.1
    # trapezoid rule on a circle is spectrally accurate for analytic integrands
    total = sum(eval_coefficient(system, u + radius * np.exp(1j * a)) * radius * np.exp(1j * a) for a in angles)
    assert_allclose(total / n, system.residues[1], atol=1e-8)


def test_scheme_of_diagonal_rank_one_system():
    residues = [np.diag([0.5, 0]), np.diag([-0.2, 0]), np.diag([0.3, 0])]
    scheme = riemann_scheme(build_system([0, 1, 2], residues))
    assert [t[0] for t in scheme.finite] == pytest.approx([0.5, -0.2, 0.3])
    assert sum(scheme.infinity) == pytest.approx(-0.6)
    assert scheme.satisfies_rank_assumption


def test_zero_system_scheme():
    scheme = riemann_scheme(build_system([0, 1], [Z2, Z2]))
    assert scheme.finite == ((), ())
    assert_allclose(scheme.infinity, [0, 0])


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10**6), m=st.integers(2, 4), n=st.integers(2, 4))
def test_random_scheme_satisfies_fuchs(seed, m, n):
    scheme = riemann_scheme(random_system(np.random.default_rng(seed), m, n))
    assert abs(scheme.fuchs_sum) < 1e-10


def test_decompose_diagonal_rank_one():
    point = decompose(build_system([0, 1], [np.diag([2, 0]), np.diag([-2, 0])]))
    assert_allclose(point.B[0], [[1], [0]])
    assert_allclose(point.C[0], [[2, 0]])
    assert_allclose(point.theta[0], [2])


def test_zero_eigenvalue_of_multiplicity_two_gives_rank_one_factors():
    rng = trial_rng(3, 0)
    a, _ = random_residue(rng, 3, 1)
    point = decompose(build_system([0, 1], [a, -a]))
    assert point.B[0].shape == (3, 1)
    assert point.C[0].shape == (1, 3)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10**6), m=st.integers(2, 4), n=st.integers(2, 4))
def test_decompose_recompose_round_trip(seed, m, n):
    rng = np.random.default_rng(seed)
    ranks = [int(r) for r in rng.integers(1, m + 1, n)]
    system = random_system(rng, m, n, ranks)
    point = decompose(system)
    assert point.normalization_residual() < 1e-10
    assert system.distance(recompose(point)) < 1e-10


def test_trivial_rescaling_keeps_system():
    system = random_system(trial_rng(11, 0), 3, 2)
    point = decompose(system)
    lam = [0.3 + 2j, -1.5, 4j]
    assert system.distance(recompose(point.rescaled(0, lam))) < 1e-12


def test_recompose_rejects_wrong_infinity():
    point = decompose(random_system(trial_rng(12, 0), 2, 3))
    bad = type(point).create(point.poles, point.B, point.C, point.theta, point.a_inf + np.eye(2))
    with pytest.raises(InfinityMismatch):
        recompose(bad)


def test_accessory_dimension_examples():
    assert accessory_dimension([[1, 1]] * 4, 3, 2) == 2
    assert accessory_dimension([[1, 1, 1]] * 3, 2, 3) == 2
    assert accessory_dimension([[1]] * 4, 3, 1) <= 0
    with pytest.raises(InvalidPartition):
        accessory_dimension([[1, 1]] * 3, 3, 2)
    with pytest.raises(InvalidPartition):
        accessory_dimension([[2, 1]] * 4, 3, 2)


def test_continuous_hamiltonian_cases():
    zero = decompose(build_system([0, 1], [Z2, np.diag([1, 0])]))
    assert continuous_hamiltonian(zero, 0) == 0
    a1, a2 = np.diag([1.0, 0]), np.diag([0.5, 0])
    two = decompose(build_system([0, 2], [a1, a2]))
    assert continuous_hamiltonian(two, 0) == pytest.approx(np.trace(a1 @ a2) / (0 - 2))


def test_continuous_hamiltonian_matches_trace_sum():
    system = random_system(trial_rng(13, 0), 3, 4)
    point = decompose(system)
    a, u = system.residues, system.poles
    expected = sum(np.trace(a[1] @ a[i]) / (u[1] - u[i]) for i in range(4) if i != 1)
    assert continuous_hamiltonian(point, 1) == pytest.approx(expected, rel=1e-10)
