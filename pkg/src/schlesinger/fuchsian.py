"""Fuchsian systems in Schlesinger normal form and their eigenvector factorizations.

A system is ``A(x) = sum_i A_i / (x - u_i)``. The residue at infinity is always
derived as ``-sum_i A_i`` and never stored. A *decomposition point* factors each
residue as ``A_i = B_i C_i`` with ``C_i B_i = diag(theta_i)``, keeping only the
nonzero eigenvalues.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    DuplicatePoles,
    EvaluationAtPole,
    FuchsViolation,
    InfinityMismatch,
    InvalidPartition,
    NonSquareResidue,
    NotDiagonalizable,
    RankMismatch,
    SinglePole,
)

CLUSTER_TOL = 1e-7
DEFAULT_TOL = 1e-9
POLE_TOL = 1e-12
# relative residual allowed when checking A = B C after a numerical eigensolve
DIAG_TOL = 1e-8


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=complex)
    arr.setflags(write=False)
    return arr


def _max_norm(a) -> float:
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


@dataclass(frozen=True)
class FuchsianSystem:
    poles: tuple[complex, ...]
    residues: tuple[np.ndarray, ...]

    @property
    def matrix_size(self) -> int:
        return self.residues[0].shape[0]

    @property
    def n_poles(self) -> int:
        return len(self.poles)

    @property
    def residue_at_infinity(self) -> np.ndarray:
        return -np.sum(self.residues, axis=0)

    def distance(self, other: FuchsianSystem) -> float:
        """Max-norm distance between residue lists (poles must agree)."""
        if len(self.poles) != len(other.poles):
            return float("inf")
        pole_gap = max(abs(a - b) for a, b in zip(self.poles, other.poles))
        return max(pole_gap, max(_max_norm(a - b) for a, b in zip(self.residues, other.residues)))


def build_system(poles: Sequence[complex], residues: Sequence, *, pole_tol: float = POLE_TOL,
                 cluster_tol: float = CLUSTER_TOL, check_diagonalizable: bool = True) -> FuchsianSystem:
    """Validate and freeze a Fuchsian system.

    Raises:
        DuplicatePoles: two poles closer than ``pole_tol``.
        NonSquareResidue: a residue is not square or sizes differ.
        NotDiagonalizable: some residue has a nontrivial Jordan block.
    """
    poles = tuple(complex(u) for u in poles)
    if len(poles) != len(residues):
        raise NonSquareResidue(f"{len(poles)} poles but {len(residues)} residues")
    if not poles:
        raise NonSquareResidue("a system needs at least one pole")
    for i in range(len(poles)):
        for j in range(i + 1, len(poles)):
            if abs(poles[i] - poles[j]) <= pole_tol:
                raise DuplicatePoles(f"poles {i} and {j} coincide at {poles[i]}")
    mats = []
    for i, a in enumerate(residues):
        a = np.asarray(a, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise NonSquareResidue(f"residue {i} has shape {a.shape}")
        if mats and a.shape != mats[0].shape:
            raise NonSquareResidue(f"residue {i} has shape {a.shape}, expected {mats[0].shape}")
        mats.append(_frozen(a))
    if check_diagonalizable:
        for i, a in enumerate(mats):
            spectral_factors(a, pole=i, cluster_tol=cluster_tol)
    return FuchsianSystem(poles, tuple(mats))


def eval_coefficient(system: FuchsianSystem, x: complex) -> np.ndarray:
    out = np.zeros((system.matrix_size,) * 2, dtype=complex)
    for u, a in zip(system.poles, system.residues):
        if x == u:
            raise EvaluationAtPole(f"x = {x} is a pole")
        out += a / (x - u)
    return out


# spectral helpers --------------------------------------------------------

def cluster_eigenvalues(values, tol: float = CLUSTER_TOL) -> list[tuple[complex, list[int]]]:
    """Greedy clustering. Returns ``(center, member indices)`` sorted by (re, im) of center."""
    order = sorted(range(len(values)), key=lambda k: (values[k].real, values[k].imag))
    clusters: list[list[int]] = []
    centers: list[complex] = []
    for k in order:
        for c, members in enumerate(clusters):
            if abs(values[k] - centers[c]) <= tol:
                members.append(k)
                centers[c] = complex(np.mean([values[j] for j in members]))
                break
        else:
            clusters.append([k])
            centers.append(complex(values[k]))
    out = list(zip(centers, clusters))
    out.sort(key=lambda cm: (cm[0].real, cm[0].imag))
    return out


def gauge_column(v: np.ndarray) -> np.ndarray:
    """Scale so the largest-magnitude entry is 1 (first such entry on ties)."""
    k = int(np.argmax(np.abs(v)))
    return v / v[k]


def _null_space(a: np.ndarray, dim: int) -> np.ndarray:
    _, s, vh = np.linalg.svd(a)
    return vh[a.shape[1] - dim:].conj().T


def spectral_factors(a: np.ndarray, *, pole: int = 0, cluster_tol: float = CLUSTER_TOL,
                     diag_tol: float = DIAG_TOL):
    """Factor ``a = B C`` over its nonzero eigenvalues with ``C B = diag(theta)``.

    Right eigenvectors follow the gauge convention of :func:`gauge_column`.
    """
    m = a.shape[0]
    values = np.linalg.eigvals(a)
    cols, thetas = [], []
    for center, members in cluster_eigenvalues(values, cluster_tol):
        if abs(center) <= cluster_tol:
            continue
        k = len(members)
        basis = _null_space(a - center * np.eye(m), k)
        for j in range(k):
            cols.append(gauge_column(basis[:, j]))
            thetas.append(center)
    scale = max(1.0, _max_norm(a))
    if not cols:
        if _max_norm(a) > diag_tol * scale:
            raise NotDiagonalizable(pole, "(nilpotent part present)")
        return np.zeros((m, 0), complex), np.zeros((0, m), complex), np.zeros(0, complex)
    b = np.column_stack(cols)
    c = np.linalg.lstsq(b, a, rcond=None)[0]
    if _max_norm(b @ c - a) > diag_tol * scale:
        raise NotDiagonalizable(pole)
    cb = c @ b
    theta = np.diag(cb).copy()
    if _max_norm(cb - np.diag(theta)) > diag_tol * scale:
        raise NotDiagonalizable(pole, "(eigenvectors not separated)")
    return b, c, theta


# Riemann scheme ------------------------------------------------------------

@dataclass(frozen=True)
class RiemannScheme:
    finite: tuple[tuple[complex, ...], ...]
    infinity: tuple[complex, ...]
    spectral_type: tuple[tuple[int, ...], ...]
    zero_multiplicities: tuple[int, ...]

    @property
    def fuchs_sum(self) -> complex:
        return sum(sum(t) for t in self.finite) + sum(self.infinity)

    @property
    def satisfies_rank_assumption(self) -> bool:
        """Zero carries the highest multiplicity at every finite pole."""
        return all(part[0] == max(part) and z == part[0]
                   for part, z in zip(self.spectral_type, self.zero_multiplicities) if z)

    def ranks(self) -> tuple[int, ...]:
        return tuple(len(t) for t in self.finite)


def _sorted_values(values):
    return tuple(sorted((complex(v) for v in values), key=lambda v: (v.real, v.imag)))


def riemann_scheme(system: FuchsianSystem, cluster_tol: float = CLUSTER_TOL,
                   tol: float = DEFAULT_TOL) -> RiemannScheme:
    finite, types, zeros = [], [], []
    for a in system.residues:
        values = np.linalg.eigvals(a)
        clusters = cluster_eigenvalues(values, cluster_tol)
        zero = [members for c, members in clusters if abs(c) <= cluster_tol]
        zero_mult = len(zero[0]) if zero else 0
        nonzero_parts = sorted((len(mem) for c, mem in clusters if abs(c) > cluster_tol), reverse=True)
        finite.append(_sorted_values(values[k] for c, mem in clusters if abs(c) > cluster_tol for k in mem))
        types.append(tuple(([zero_mult] if zero_mult else []) + nonzero_parts))
        zeros.append(zero_mult)
    inf_values = np.linalg.eigvals(system.residue_at_infinity)
    types.append(tuple(sorted((len(mem) for _, mem in cluster_eigenvalues(inf_values, cluster_tol)),
                              reverse=True)))
    scheme = RiemannScheme(tuple(finite), _sorted_values(inf_values), tuple(types), tuple(zeros))
    scale = max(1.0, sum(_max_norm(a) for a in system.residues)) * system.matrix_size
    # dropped near-zero eigenvalues may each contribute up to cluster_tol
    allowance = tol * scale + cluster_tol * sum(zeros)
    if abs(scheme.fuchs_sum) > allowance:
        raise FuchsViolation(f"sum of indices is {scheme.fuchs_sum}")
    return scheme


def accessory_dimension(spectral_type: Sequence[Sequence[int]], n: int, m: int) -> int:
    """Dimension of the accessory space for ``n`` finite poles plus infinity."""
    if len(spectral_type) != n + 1:
        raise InvalidPartition(f"expected {n + 1} partitions, got {len(spectral_type)}")
    total = 0
    for part in spectral_type:
        if any(int(k) <= 0 for k in part) or sum(part) != m:
            raise InvalidPartition(f"{tuple(part)} is not a partition of {m}")
        total += sum(int(k) ** 2 for k in part)
    return (n - 1) * m * m - total + 2


# decomposition space -------------------------------------------------------

@dataclass(frozen=True)
class DecompositionPoint:
    """Factor pairs ``(B_i, C_i)`` per pole plus the fixed residue at infinity.

    ``B[i]`` is m x r_i (columns b_{i,j}), ``C[i]`` is r_i x m (rows c_i^j),
    ``theta[i]`` holds the nonzero indices in slot order.
    """

    poles: tuple[complex, ...]
    B: tuple[np.ndarray, ...]
    C: tuple[np.ndarray, ...]
    theta: tuple[np.ndarray, ...]
    a_inf: np.ndarray = field(repr=False)

    @classmethod
    def create(cls, poles, B, C, theta, a_inf) -> DecompositionPoint:
        return cls(tuple(complex(u) for u in poles), tuple(_frozen(b) for b in B),
                   tuple(_frozen(c) for c in C), tuple(_frozen(t) for t in theta), _frozen(a_inf))

    @property
    def matrix_size(self) -> int:
        return self.a_inf.shape[0]

    def residue(self, i: int) -> np.ndarray:
        return self.B[i] @ self.C[i]

    def residues(self) -> list[np.ndarray]:
        return [self.residue(i) for i in range(len(self.poles))]

    def normalization_residual(self) -> float:
        return max(_max_norm(c @ b - np.diag(t)) for b, c, t in zip(self.B, self.C, self.theta))

    def infinity_residual(self) -> float:
        return _max_norm(np.sum(self.residues(), axis=0) + self.a_inf)

    def rescaled(self, pole: int, q) -> DecompositionPoint:
        """Trivial transformation ``(B_i, C_i) -> (B_i Q, Q^-1 C_i)`` with diagonal ``Q``."""
        q = np.asarray(q, dtype=complex)
        B = list(self.B)
        C = list(self.C)
        B[pole] = B[pole] * q[None, :]
        C[pole] = C[pole] / q[:, None]
        return DecompositionPoint.create(self.poles, B, C, self.theta, self.a_inf)

    def conjugated(self, s: np.ndarray) -> DecompositionPoint:
        """Global similarity ``A_i -> S A_i S^-1`` acting on the factors."""
        s_inv = np.linalg.inv(s)
        return DecompositionPoint.create(self.poles, [s @ b for b in self.B], [c @ s_inv for c in self.C],
                                         self.theta, s @ self.a_inf @ s_inv)


def decompose(system: FuchsianSystem, *, ranks: Sequence[int] | None = None,
              cluster_tol: float = CLUSTER_TOL) -> DecompositionPoint:
    B, C, T = [], [], []
    for i, a in enumerate(system.residues):
        b, c, theta = spectral_factors(a, pole=i, cluster_tol=cluster_tol)
        if ranks is not None and ranks[i] != b.shape[1]:
            raise RankMismatch(f"pole {i}: declared rank {ranks[i]}, numerical rank {b.shape[1]}")
        B.append(b)
        C.append(c)
        T.append(theta)
    return DecompositionPoint.create(system.poles, B, C, T, system.residue_at_infinity)


def recompose(point: DecompositionPoint, tol: float = DEFAULT_TOL) -> FuchsianSystem:
    residual = point.infinity_residual()
    if residual > tol * max(1.0, _max_norm(point.a_inf)):
        raise InfinityMismatch(f"sum of residues misses -A_inf by {residual:.3e}")
    return build_system(point.poles, point.residues(), check_diagonalizable=False)


def continuous_hamiltonian(point: DecompositionPoint, j: int) -> complex:
    """``H_j = sum_{i != j} tr(A_j A_i) / (u_j - u_i)``."""
    if len(point.poles) < 2:
        raise SinglePole("the Hamiltonian needs at least two finite poles")
    a_j = point.residue(j)
    u_j = point.poles[j]
    total = 0j
    for i, u in enumerate(point.poles):
        if i != j:
            total += np.trace(a_j @ point.residue(i)) / (u_j - u)
    return complex(total)
