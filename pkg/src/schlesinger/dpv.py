"""Rank-one 2x2 systems with poles ``(0, t, 1)`` and the difference Painleve V step.

Each residue is written as ``A_i = a_i (1, beta_i - w)^T (gamma_i + w, 1)``
with ``A_inf = diag(kappa1, kappa2)``. Once the global diagonal gauge is fixed,
two numbers are left:

    p = a_1 beta_t / t,    q = -t a_t / a_1

The step ``{1 t; 1 1}`` lowers ``theta_1`` and raises ``theta_t`` by one. In the
coordinates ``f = pq``, ``g = -(q - (theta_1 + kappa2)/p)/t`` it becomes the
standard d-P(D4) recursion with ``s = t``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import BadT, FrameMismatch, Indeterminacy, SingularParameterization, ZeroP
from .fuchsian import DecompositionPoint
from .transform import TransformationIndex, transform_decomposition

# pole order inside every point built here
POLE_ZERO, POLE_T, POLE_ONE = 0, 1, 2
STEP_INDEX = TransformationIndex(alpha=POLE_ONE, beta=POLE_T, mu=0, nu=0)

SINGULAR_TOL = 1e-12


@dataclass(frozen=True)
class DPVParameters:
    theta0: complex
    theta1: complex
    thetat: complex
    kappa1: complex
    kappa2: complex
    t: complex

    @classmethod
    def fuchs_consistent(cls, theta1, thetat, kappa1, kappa2, t) -> DPVParameters:
        return cls(-(theta1 + thetat + kappa1 + kappa2), theta1, thetat, kappa1, kappa2, t)

    @property
    def fuchs_sum(self) -> complex:
        return self.theta0 + self.theta1 + self.thetat + self.kappa1 + self.kappa2

    def stepped(self) -> DPVParameters:
        return replace(self, theta1=self.theta1 - 1, thetat=self.thetat + 1)


@dataclass(frozen=True)
class DPVState:
    p: complex
    q: complex


@dataclass(frozen=True)
class StandardDPVParameters:
    a0: complex
    a1: complex
    a2: complex
    a3: complex
    a4: complex
    s: complex

    @property
    def delta(self) -> complex:
        return self.a1 + 2 * self.a2 + self.a3 + self.a4 + self.a0

    def stepped(self) -> StandardDPVParameters:
        d = self.delta
        return replace(self, a0=self.a0 + d, a1=self.a1 + d, a2=self.a2 - d)


def _nonzero(value, name, exc=SingularParameterization):
    if abs(value) < SINGULAR_TOL:
        raise exc(f"{name} vanishes")
    return value


def residue_parameters(params: DPVParameters, state: DPVState, a1_gauge: complex = 1.0) -> dict:
    """The auxiliary numbers ``a_i, beta_i, gamma_i, w`` for the given chart point."""
    p, q, t = state.p, state.q, params.t
    a1 = _nonzero(a1_gauge, "a1")
    _nonzero(p, "p")
    pq = p * q
    at = _nonzero(-q * a1 / t, "a_t")
    a0 = _nonzero(-a1 - at, "a_0")
    beta_t = t * p / a1
    beta_1 = (pq - params.kappa2) / a1
    gamma_1 = (params.theta1 + params.kappa2 - pq) / a1
    gamma_t = (params.thetat + pq) / at
    gamma_0 = params.theta0 / a0
    kappa_gap = _nonzero(params.kappa1 - params.kappa2, "kappa1 - kappa2")
    w = -(a1 * beta_1 * gamma_1 + at * beta_t * gamma_t) / kappa_gap
    return {"a": (a0, at, a1), "beta": (0j, beta_t, beta_1), "gamma": (gamma_0, gamma_t, gamma_1), "w": w}


def build_dpv_point(params: DPVParameters, state: DPVState, a1_gauge: complex = 1.0) -> DecompositionPoint:
    """Rank-one factors ``b_i = (1, beta_i - w)^T`` and ``c_i = a_i (gamma_i + w, 1)``."""
    if params.t in (0, 1):
        raise BadT(f"t = {params.t} collides with a fixed pole")
    aux = residue_parameters(params, state, a1_gauge)
    w = aux["w"]
    B, C = [], []
    for a, beta, gamma in zip(aux["a"], aux["beta"], aux["gamma"]):
        B.append(np.array([[1.0], [beta - w]], dtype=complex))
        C.append(a * np.array([[gamma + w, 1.0]], dtype=complex))
    theta = [np.array([params.theta0]), np.array([params.thetat]), np.array([params.theta1])]
    a_inf = np.diag([params.kappa1, params.kappa2]).astype(complex)
    return DecompositionPoint.create((0, params.t, 1), B, C, theta, a_inf)


def pq_coordinates(point: DecompositionPoint, params: DPVParameters | None = None, *,
                   tol: float = 1e-9, scale: float = 1.0) -> DPVState:
    """Read ``(p, q)`` off the residues. Invariant under trivial and diagonal gauge.

    If ``params`` is given, the order of ``kappa1, kappa2`` on the diagonal of
    ``A_inf`` is checked as well. ``scale`` is a floor for the size the
    tolerance is measured against, for points produced from larger residues.
    """
    if point.matrix_size != 2 or len(point.poles) != 3:
        raise FrameMismatch("expected a 2x2 system with three poles")
    residues = point.residues()
    a_inf = -np.sum(residues, axis=0)
    # A_inf is a sum of residues that can be much larger than itself
    scale = max(1.0, scale, max(float(np.max(np.abs(r))) for r in residues))
    if abs(a_inf[0, 1]) > tol * scale or abs(a_inf[1, 0]) > tol * scale:
        raise FrameMismatch("residue at infinity is not diagonal")
    if params is not None:
        expected = np.array([params.kappa1, params.kappa2])
        if np.max(np.abs(np.diag(a_inf) - expected)) > tol * scale:
            raise FrameMismatch(f"diagonal of A_inf is {np.diag(a_inf)}, expected {expected}")
    t = point.poles[POLE_T]
    a0_res, at_res, a1_res = (point.residue(i) for i in (POLE_ZERO, POLE_T, POLE_ONE))
    a0, at, a1 = a0_res[0, 1], at_res[0, 1], a1_res[0, 1]
    for value, name in ((a0, "a_0"), (at, "a_t"), (a1, "a_1")):
        _nonzero(value, name, FrameMismatch)
    w = -a0_res[1, 1] / a0
    beta_t = at_res[1, 1] / at + w
    return DPVState(p=complex(a1 * beta_t / t), q=complex(-t * at / a1))


def _check(value, locus):
    if abs(value) < SINGULAR_TOL:
        raise Indeterminacy(locus)
    return value


def step_denominators(params: DPVParameters, state: DPVState) -> tuple[complex, complex]:
    """``q - t - (theta1 + kappa2)/p`` and ``q - 1 - (theta1 + kappa2)/p``; the step is singular where either vanishes."""
    _check(state.p, "p")
    shift = (params.theta1 + params.kappa2) / state.p
    return state.q - params.t - shift, state.q - 1 - shift


def dpv_step(params: DPVParameters, state: DPVState) -> tuple[DPVParameters, DPVState]:
    """Closed-form ``(p, q) -> (p_bar, q_bar)``: first ``p_bar q_bar``, then ``q_bar``, then ``p_bar``."""
    p, q, t = state.p, state.q, params.t
    th1, tht, k1, k2 = params.theta1, params.thetat, params.kappa1, params.kappa2
    _check(p, "p")
    shift = (th1 + k2) / p
    d_t = _check(q - t - shift, "q - t - (theta1 + kappa2)/p")
    d_1 = _check(q - 1 - shift, "q - 1 - (theta1 + kappa2)/p")
    pq = p * q
    # the second fraction enters with a minus sign; this is what the matrix step produces
    pq_bar = t * (tht + k1) / d_t - (th1 - 1 + k1) / d_1 - pq + k2
    denom = _check((th1 + k2 - pq) * (k2 - pq_bar), "(theta1 + kappa2 - pq)(kappa2 - pq_bar)")
    q_bar = t * p * (tht + 1 + pq_bar) / denom
    _check(q_bar, "q_bar")
    return params.stepped(), DPVState(p=pq_bar / q_bar, q=q_bar)


def balanced_gauge(params: DPVParameters, state: DPVState) -> float:
    """``a1`` that equalizes the largest upper and lower off-diagonal residue entries.

    Upper entries scale like ``a1`` and lower ones like ``1/a1``; balancing them
    keeps the residues small and limits cancellation in their sum.
    """
    residues = build_dpv_point(params, state).residues()
    upper = max(abs(r[0, 1]) for r in residues)
    lower = max(abs(r[1, 0]) for r in residues)
    if upper == 0 or lower == 0:
        return 1.0
    return float(np.sqrt(lower / upper))


def dpv_step_pipeline(params: DPVParameters, state: DPVState) -> tuple[DPVParameters, DPVState]:
    """The same step on the factor level, read back through :func:`pq_coordinates`."""
    gauge = balanced_gauge(params, state)
    start = build_dpv_point(params, state, gauge)
    point = transform_decomposition(start, STEP_INDEX)
    new = params.stepped()
    scale = max(float(np.max(np.abs(r))) for r in start.residues())
    return new, pq_coordinates(point, new, scale=scale)


def to_standard(params: DPVParameters, state: DPVState) -> tuple[StandardDPVParameters, complex, complex]:
    if abs(state.p) < SINGULAR_TOL:
        raise ZeroP("p = 0 has no image in the standard chart")
    th1, tht, k1, k2 = params.theta1, params.thetat, params.kappa1, params.kappa2
    std = StandardDPVParameters(a0=th1 - 1 + k1, a1=-tht - k1, a2=tht, a3=k2, a4=-th1 - tht - k2, s=params.t)
    f = state.p * state.q
    g = -(state.q - (th1 + k2) / state.p) / params.t
    return std, f, g


def dpv_standard_step(std: StandardDPVParameters, f: complex, g: complex) -> tuple[StandardDPVParameters, complex, complex]:
    """``f_bar = a3 + a1/(g+1) + a0/(s g+1) - f`` and the matching ``g_bar``."""
    _check(g + 1, "g + 1")
    _check(std.s * g + 1, "s g + 1")
    f_bar = std.a3 + std.a1 / (g + 1) + std.a0 / (std.s * g + 1) - f
    new = std.stepped()
    _check(f_bar, "f_bar")
    _check(f_bar - new.a3, "f_bar - a3")
    _check(g, "g")
    g_bar = (f_bar + new.a2) * (f_bar + new.a2 + new.a4) / (new.s * f_bar * (f_bar - new.a3) * g)
    return new, f_bar, g_bar


def hamiltonian_pvi(params: DPVParameters, state: DPVState) -> complex:
    """``H_t + pq/t`` where ``H_t`` is the isomonodromic Hamiltonian in ``t``."""
    t = params.t
    if t in (0, 1):
        raise BadT(f"t = {t}")
    p, q = state.p, state.q
    th0, th1, tht, k2 = params.theta0, params.theta1, params.thetat, params.kappa2
    h_t = ((tht + p * q) * (th0 + p * (q - t)) / t
           + (th1 + k2 - p * (q - t)) * (t * tht + k2 * q - p * q * (q - t)) / (t * (t - 1)))
    return h_t + p * q / t


def display_hamiltonian(params: DPVParameters, b, c_bar) -> complex:
    """Four-logarithm form of the discrete Hamiltonian for this system.

    ``b`` and ``c_bar`` are sequences of the rank-one vectors in pole order
    ``(0, t, 1)``. Equal to the general form up to ``2 pi i`` multiples of
    ``theta0`` from the logarithm branches.
    """
    b0, bt, b1 = (np.asarray(v).reshape(-1) for v in b)
    c0, ct, c1 = (np.asarray(v).reshape(-1) for v in c_bar)
    t = params.t
    th0, th1, tht = params.theta0, params.theta1, params.thetat
    return complex((tht + 1 - th1 - th0) * np.log(ct @ bt) + (th1 - 1) * np.log(c1 @ bt)
                   + th1 * np.log(ct @ b1)
                   + th0 * np.log((ct @ bt) * (c0 @ b0) - (1 - t) * (ct @ b0) * (c0 @ bt)))
