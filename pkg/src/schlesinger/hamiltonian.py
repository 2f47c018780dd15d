"""The right discrete Hamiltonian of an elementary step and its generating equations.

In mixed variables (old right vectors ``b``, new left rows ``cbar``) the step
is generated by

    H = (th_b - th_a + 1) log(cbar_bn b_bn) + th_a log(cbar_bn b_am)
        + (th_a - 1) log(cbar_am b_bn) + sum_I th_I log(cbar_I R_I b_I)

where ``(a, m) = (alpha, mu)``, ``(b, n) = (beta, nu)`` and the sum runs over
every other slot. ``R_I`` is the multiplier at the slot's pole, except at
``alpha`` where it is replaced by a two-projector correction. Then
``c = dH/db`` and ``bbar = dH/dcbar``.

Every term has the shape ``coeff * log(w (I + sum_k s_k f_k h_k/(h_k f_k)) v)``
with each vector one of the variables, which is what the gradient code relies on.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import GradientMismatch, LogOfZeroPairing
from .fuchsian import DecompositionPoint
from .transform import TransformationIndex

Key = tuple  # ("b" | "c", pole, slot)

ZERO_PAIRING_RTOL = 1e-14


@dataclass(frozen=True)
class DiscreteHamiltonianInput:
    poles: tuple[complex, ...]
    B: tuple[np.ndarray, ...]
    C_bar: tuple[np.ndarray, ...]
    theta: tuple[np.ndarray, ...]
    index: TransformationIndex

    @classmethod
    def from_points(cls, point: DecompositionPoint, barred: DecompositionPoint,
                    idx: TransformationIndex) -> DiscreteHamiltonianInput:
        return cls(point.poles, point.B, barred.C, point.theta, idx)

    def variables(self) -> dict[Key, np.ndarray]:
        out = {}
        for i, (b, c) in enumerate(zip(self.B, self.C_bar)):
            for j in range(b.shape[1]):
                out[("b", i, j)] = np.array(b[:, j], dtype=complex)
                out[("c", i, j)] = np.array(c[j], dtype=complex)
        return out


@dataclass(frozen=True)
class LogTerm:
    label: str
    coeff: complex
    w: Key
    v: Key
    projectors: tuple[tuple[complex, Key, Key], ...] = ()

    def argument(self, var: dict[Key, np.ndarray]) -> complex:
        w, v = var[self.w], var[self.v]
        total = w @ v
        for s, fk, hk in self.projectors:
            f, h = var[fk], var[hk]
            total += s * (w @ f) * (h @ v) / (h @ f)
        return complex(total)


def _slot(key: Key) -> str:
    return f"({key[1]},{key[2]})"


def hamiltonian_terms(inp: DiscreteHamiltonianInput) -> list[LogTerm]:
    idx = inp.index
    a, b, mu, nu = idx.alpha, idx.beta, idx.mu, idx.nu
    th_a = complex(inp.theta[a][mu])
    th_b = complex(inp.theta[b][nu])
    b_am, b_bn = ("b", a, mu), ("b", b, nu)
    c_am, c_bn = ("c", a, mu), ("c", b, nu)
    terms = [
        LogTerm(f"{_slot(c_bn)}.{_slot(b_bn)}", th_b - th_a + 1, c_bn, b_bn),
        LogTerm(f"{_slot(c_bn)}.{_slot(b_am)}", th_a, c_bn, b_am),
        LogTerm(f"{_slot(c_am)}.{_slot(b_bn)}", th_a - 1, c_am, b_bn),
    ]
    u_a, u_b = inp.poles[a], inp.poles[b]
    for i, theta in enumerate(inp.theta):
        for j, th in enumerate(theta):
            if (i, j) in ((a, mu), (b, nu)):
                continue
            if i == a:
                projectors = ((-1.0, b_am, c_bn), (-1.0, b_bn, c_am))
            else:
                projectors = (((u_a - u_b) / (inp.poles[i] - u_a), b_bn, c_bn),)
            terms.append(LogTerm(f"({i},{j})", complex(th), ("c", i, j), ("b", i, j), projectors))
    return terms


def discrete_hamiltonian(inp: DiscreteHamiltonianInput) -> complex:
    """Value of H with the principal branch of every logarithm."""
    var = inp.variables()
    total = 0j
    for term in hamiltonian_terms(inp):
        arg = term.argument(var)
        scale = np.linalg.norm(var[term.w]) * np.linalg.norm(var[term.v])
        if abs(arg) <= ZERO_PAIRING_RTOL * scale:
            raise LogOfZeroPairing(term.label)
        total += term.coeff * cmath.log(arg)
    return total


def hamiltonian_gradient(inp: DiscreteHamiltonianInput) -> dict[Key, np.ndarray]:
    """Analytic holomorphic gradient; rows for ``b`` keys, columns for ``c`` keys."""
    var = inp.variables()
    grad = {k: np.zeros_like(v) for k, v in var.items()}
    for term in hamiltonian_terms(inp):
        w, v = var[term.w], var[term.v]
        arg = term.argument(var)
        if arg == 0:
            raise LogOfZeroPairing(term.label)
        k = term.coeff / arg
        m = np.eye(w.size, dtype=complex)
        for s, fk, hk in term.projectors:
            m = m + s * np.outer(var[fk], var[hk]) / (var[hk] @ var[fk])
        grad[term.v] += k * (w @ m)
        grad[term.w] += k * (m @ v)
        for s, fk, hk in term.projectors:
            f, h = var[fk], var[hk]
            hf, wf, hv = h @ f, w @ f, h @ v
            grad[fk] += k * s * (hv / hf * w - wf * hv / hf**2 * h)
            grad[hk] += k * s * (wf / hf * v - wf * hv / hf**2 * f)
    return grad


def finite_difference_gradient(inp: DiscreteHamiltonianInput, step: float = 1e-7) -> dict[Key, np.ndarray]:
    """Central differences along each real coordinate direction.

    Differences of logarithms are taken as ``log(arg_plus / arg_minus)`` so a
    branch cut crossing between the two samples cannot leak into the result.
    """
    var = inp.variables()
    terms = hamiltonian_terms(inp)
    grad = {}
    for key, vec in var.items():
        out = np.zeros_like(vec)
        for e in range(vec.size):
            plus = dict(var)
            minus = dict(var)
            plus[key] = vec.copy()
            minus[key] = vec.copy()
            plus[key][e] += step
            minus[key][e] -= step
            out[e] = sum(t.coeff * cmath.log(t.argument(plus) / t.argument(minus)) for t in terms) / (2 * step)
        grad[key] = out
    return grad


@dataclass
class GeneratingReport:
    """Residuals of the generating equations; every field is a max-norm."""

    c_residuals: dict[tuple[int, int], float] = field(default_factory=dict)
    normalization_residuals: dict[int, float] = field(default_factory=dict)
    residue_residuals: dict[int, float] = field(default_factory=dict)
    fd_residual: float = 0.0
    orthogonality_residual: float = 0.0
    tol: float = 1e-8
    fd_rtol: float = 1e-6
    orth_tol: float = 1e-9

    @property
    def max_c(self) -> float:
        return max(self.c_residuals.values(), default=0.0)

    @property
    def max_b(self) -> float:
        return max([*self.normalization_residuals.values(), *self.residue_residuals.values()], default=0.0)

    @property
    def passed(self) -> bool:
        return (self.max_c <= self.tol and self.max_b <= self.tol and self.fd_residual <= self.fd_rtol
                and self.orthogonality_residual <= self.orth_tol)

    def summary(self) -> str:
        return (f"c {self.max_c:.2e}, bbar {self.max_b:.2e}, fd {self.fd_residual:.2e}, "
                f"orth {self.orthogonality_residual:.2e}")


def orthogonality_residual(point: DecompositionPoint, barred: DecompositionPoint, idx: TransformationIndex) -> float:
    """Largest relative ``|cbar_alpha^j b_bn|`` and ``|cbar_bn b_alpha,j|`` over ``j != mu``."""
    a, b = idx.alpha, idx.beta
    b_bn = point.B[b][:, idx.nu]
    c_bn = barred.C[b][idx.nu]
    worst = 0.0
    for j in range(len(point.theta[a])):
        if j == idx.mu:
            continue
        c_aj, b_aj = barred.C[a][j], point.B[a][:, j]
        worst = max(worst,
                    abs(c_aj @ b_bn) / (np.linalg.norm(c_aj) * np.linalg.norm(b_bn)),
                    abs(c_bn @ b_aj) / (np.linalg.norm(c_bn) * np.linalg.norm(b_aj)))
    return float(worst)


def _rel(a, b) -> float:
    return float(np.max(np.abs(a - b)) / max(1.0, float(np.max(np.abs(b)))))


def verify_generating(point: DecompositionPoint, barred: DecompositionPoint, idx: TransformationIndex,
                      fd_step: float = 1e-7, *, tol: float = 1e-8, fd_rtol: float = 1e-6,
                      orth_tol: float = 1e-9, raise_on_failure: bool = True) -> GeneratingReport:
    """Check ``c = dH/db`` and ``bbar = dH/dcbar`` plus a finite-difference audit.

    The ``bbar`` side is checked through the gauge-free contract
    ``cbar bbar' = theta_bar`` and ``sum bbar' cbar = A_bar`` per pole.
    """
    inp = DiscreteHamiltonianInput.from_points(point, barred, idx)
    grad = hamiltonian_gradient(inp)
    report = GeneratingReport(tol=tol, fd_rtol=fd_rtol, orth_tol=orth_tol)
    for i, theta in enumerate(point.theta):
        for j in range(len(theta)):
            report.c_residuals[(i, j)] = _rel(grad[("b", i, j)], point.C[i][j])
        if len(theta):
            b_new = np.column_stack([grad[("c", i, j)] for j in range(len(theta))])
            report.normalization_residuals[i] = _rel(barred.C[i] @ b_new, np.diag(barred.theta[i]))
            report.residue_residuals[i] = _rel(b_new @ barred.C[i], barred.residue(i))
    fd = finite_difference_gradient(inp, fd_step)
    scale = max(1.0, max(float(np.max(np.abs(g))) for g in grad.values()))
    report.fd_residual = max(float(np.max(np.abs(grad[k] - fd[k]))) for k in grad) / scale
    report.orthogonality_residual = orthogonality_residual(point, barred, idx)
    if raise_on_failure and not report.passed:
        raise GradientMismatch(report)
    return report


def theta_keys(theta: Sequence[np.ndarray]) -> list[tuple[int, int]]:
    return [(i, j) for i, t in enumerate(theta) for j in range(len(t))]
