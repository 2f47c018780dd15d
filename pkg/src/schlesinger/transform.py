"""Elementary Schlesinger transformations ``{alpha beta; mu nu}``.

The step shifts the index ``theta_alpha^mu`` by -1 and ``theta_beta^nu`` by +1
while preserving monodromy. Its multiplier is the elementary divisor with pole
``u_alpha``, zero ``u_beta``, image ``b_{beta,nu}`` and row ``c_alpha^mu``::

    A_new(x) R(x) = R(x) A(x) + R'(x)

Pole and slot indices are zero-based throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import divisor
from .divisor import ElementaryDivisor
from .errors import DegeneratePairing, InvalidIndex, NotDiagonalizable, SchlesingerError
from .fuchsian import (
    CLUSTER_TOL,
    DIAG_TOL,
    DecompositionPoint,
    FuchsianSystem,
    build_system,
    decompose,
    gauge_column,
    recompose,
)

# relative size of g f below which the step is undefined
PAIRING_RTOL = 1e-10


@dataclass(frozen=True)
class TransformationIndex:
    alpha: int
    beta: int
    mu: int
    nu: int

    def __post_init__(self):
        if self.alpha == self.beta:
            raise InvalidIndex("alpha and beta must be different poles")
        if min(self.alpha, self.beta, self.mu, self.nu) < 0:
            raise InvalidIndex("indices are zero-based and nonnegative")

    def inverse(self) -> TransformationIndex:
        return TransformationIndex(self.beta, self.alpha, self.nu, self.mu)

    def __str__(self) -> str:
        return f"{{{self.alpha} {self.beta}; {self.mu} {self.nu}}}"


def shifted_theta(theta: Sequence[np.ndarray], idx: TransformationIndex) -> list[np.ndarray]:
    out = [np.array(t, dtype=complex) for t in theta]
    out[idx.alpha][idx.mu] -= 1
    out[idx.beta][idx.nu] += 1
    return out


def _check_index(point: DecompositionPoint, idx: TransformationIndex, cluster_tol: float) -> None:
    n = len(point.poles)
    if idx.alpha >= n or idx.beta >= n:
        raise InvalidIndex(f"{idx} refers to a pole beyond {n - 1}")
    for pole, slot in ((idx.alpha, idx.mu), (idx.beta, idx.nu)):
        theta = point.theta[pole]
        if slot >= len(theta):
            raise InvalidIndex(f"slot {slot} exceeds rank {len(theta)} at pole {pole}")
        others = [t for k, t in enumerate(theta) if k != slot] + [0j]
        if any(abs(theta[slot] - t) <= cluster_tol for t in others):
            raise InvalidIndex(f"index {theta[slot]} at pole {pole} is not simple")


def elementary_multiplier(point: DecompositionPoint, barred_point: DecompositionPoint | None,
                          idx: TransformationIndex) -> ElementaryDivisor:
    """Multiplier of the step. Without a barred point the row is ``c_alpha^mu``."""
    f = point.B[idx.beta][:, idx.nu]
    if barred_point is None:
        g = point.C[idx.alpha][idx.mu]
    else:
        g = barred_point.C[idx.beta][idx.nu]
    if abs(g @ f) <= PAIRING_RTOL * np.linalg.norm(g) * np.linalg.norm(f):
        raise DegeneratePairing(f"g f = {g @ f} for {idx}")
    return ElementaryDivisor(point.poles[idx.alpha], point.poles[idx.beta], f, g)


def transformed_residues(poles: Sequence[complex], residues: Sequence[np.ndarray], R: ElementaryDivisor,
                         alpha: int, beta: int) -> list[np.ndarray]:
    """Residues of ``R A R^-1 + R' R^-1`` at every pole, by partial fractions.

    With ``s = z - zeta`` and ``P`` the projector of ``R``, a generic pole
    contributes ``R(u_i) A_i R(u_i)^-1`` at ``u_i`` plus simple-pole spill-over at
    ``z`` and ``zeta``. The double poles at ``z`` and ``zeta`` cancel because
    ``g`` is a left eigenvector of ``A_alpha`` and ``f`` a right eigenvector of
    ``A_beta``.
    """
    z, zeta = R.z, R.zeta
    s = z - zeta
    P = R.projector
    eye = np.eye(R.size)
    Q = eye - P
    at_z = -P
    at_zeta = P.copy()
    out: list[np.ndarray | None] = [None] * len(poles)
    for i, (u, a) in enumerate(zip(poles, residues)):
        if i == alpha:
            at_z = at_z + a @ Q + P @ a @ P
            at_zeta = at_zeta + Q @ a @ P
        elif i == beta:
            at_zeta = at_zeta + Q @ a + P @ a @ P
            at_z = at_z + P @ a @ Q
        else:
            out[i] = divisor.evaluate(R, u) @ a @ divisor.evaluate_inverse(R, u)
            at_z = at_z + s * P @ a @ Q / (z - u)
            at_zeta = at_zeta - s * Q @ a @ P / (zeta - u)
    out[alpha] = at_z
    out[beta] = at_zeta
    return out


def transform_system(system: FuchsianSystem, idx: TransformationIndex, *,
                     cluster_tol: float = CLUSTER_TOL) -> tuple[FuchsianSystem, ElementaryDivisor]:
    """Apply one step to a bare system.

    Slots ``mu``/``nu`` refer to the eigenvalue order produced by :func:`decompose`.
    """
    point = decompose(system, cluster_tol=cluster_tol)
    _check_index(point, idx, cluster_tol)
    R = elementary_multiplier(point, None, idx)
    residues = transformed_residues(system.poles, system.residues, R, idx.alpha, idx.beta)
    return build_system(system.poles, residues, cluster_tol=cluster_tol), R


def _right_null_vector(a: np.ndarray, pole: int, cluster_tol: float) -> np.ndarray:
    _, s, vh = np.linalg.svd(a)
    scale = max(1.0, float(s[0]))
    if len(s) > 1 and s[-2] <= cluster_tol * scale:
        raise InvalidIndex(f"shifted index at pole {pole} collides with another index")
    return vh[-1].conj()


def _check_factors(b, c, a, pole):
    scale = max(1.0, float(np.max(np.abs(a))))
    if np.max(np.abs(b @ c - a)) > DIAG_TOL * scale:
        raise NotDiagonalizable(pole, "(after transformation)")


def transform_decomposition(point: DecompositionPoint, idx: TransformationIndex, *,
                            cluster_tol: float = CLUSTER_TOL) -> DecompositionPoint:
    """Apply one step on the factor level, keeping every slot in place.

    Generic poles transport as ``B R(u_i)``-style products with unit
    proportionality. At ``beta`` the untouched columns are ``R(u_beta) b_{beta,j}``
    and at ``alpha`` the untouched rows are ``c_alpha^j R(u_alpha)^-1``; the two
    moved slots come from null vectors of the new residues, with the right
    vector gauge-fixed to unit largest entry.
    """
    _check_index(point, idx, cluster_tol)
    R = elementary_multiplier(point, None, idx)
    alpha, beta, mu, nu = idx.alpha, idx.beta, idx.mu, idx.nu
    residues = transformed_residues(point.poles, point.residues(), R, alpha, beta)
    theta = shifted_theta(point.theta, idx)
    m = point.matrix_size
    B, C = [], []
    for i, u in enumerate(point.poles):
        if i == beta:
            r_beta = divisor.evaluate(R, u)
            cols = [r_beta @ point.B[i][:, j] for j in range(point.B[i].shape[1])]
            shifted = residues[i] - theta[i][nu] * np.eye(m)
            cols[nu] = gauge_column(_right_null_vector(shifted, i, cluster_tol))
            b = np.column_stack(cols)
            c = np.linalg.lstsq(b, residues[i], rcond=None)[0]
        elif i == alpha:
            r_inv = divisor.evaluate_inverse(R, u)
            rows = [point.C[i][j] @ r_inv for j in range(point.C[i].shape[0])]
            shifted = residues[i] - theta[i][mu] * np.eye(m)
            rows[mu] = _right_null_vector(shifted.T, i, cluster_tol)
            c = np.vstack(rows)
            b = np.linalg.lstsq(c.T, residues[i].T, rcond=None)[0].T
            k = int(np.argmax(np.abs(b[:, mu])))
            lam = b[k, mu]
            b[:, mu] /= lam
            c[mu] *= lam
        else:
            b = divisor.evaluate(R, u) @ point.B[i]
            c = point.C[i] @ divisor.evaluate_inverse(R, u)
        _check_factors(b, c, residues[i], i)
        B.append(b)
        C.append(c)
    return DecompositionPoint.create(point.poles, B, C, theta, point.a_inf)


def orbit(system: FuchsianSystem, schedule: Sequence[TransformationIndex], steps: int, *,
          cluster_tol: float = CLUSTER_TOL) -> list[FuchsianSystem]:
    """Iterate the schedule cyclically; returns ``steps + 1`` systems.

    Slots are tracked on the factor level so that an index keeps naming the same
    eigenvalue even after shifts reorder the spectrum.
    """
    if not schedule:
        raise InvalidIndex("schedule is empty")
    point = decompose(system, cluster_tol=cluster_tol)
    out = [system]
    for k in range(steps):
        try:
            point = transform_decomposition(point, schedule[k % len(schedule)], cluster_tol=cluster_tol)
            out.append(recompose(point))
        except SchlesingerError as exc:
            exc.step = k + 1
            raise
    return out
