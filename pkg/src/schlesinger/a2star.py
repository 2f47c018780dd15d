"""Rank-two 3x3 systems with poles ``(0, 1)`` and the d-P(A2*) dynamic.

After a global similarity moves ``b_{1,1}, b_{1,2}, b_{2,1}`` to the standard
basis and ``b_{2,2}`` to ``(1, 1, 1)``, a point is described by two numbers:

    C_1 = [[theta11, 0, alpha], [0, theta12, beta]]
    C_2 = [[x - theta21, -x, theta21], [-y, y + theta22, 0]]

``alpha`` and ``beta`` are fixed by requiring ``A_inf = -B_1 C_1 - B_2 C_2`` to
have eigenvalues ``kappa``. The matching equations are affine in ``(alpha, beta)``
because both unknowns sit in the last column, so they are solved directly.

Pole and slot indices are zero-based: pole 0 sits at ``u = 0``, pole 1 at ``u = 1``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import transform
from .errors import (
    AlphaBetaUnsolvable,
    DegenerateCross,
    DegenerateFrame,
    FrameMismatch,
    InconsistentEntries,
    Indeterminacy,
    InfinitySpectrumMismatch,
    SchlesingerError,
)
from .fuchsian import DecompositionPoint
from .transform import TransformationIndex

SINGULAR_TOL = 1e-12

# {1 2; 1 1}: theta11 - 1, theta21 + 1
SCHLESINGER_INDEX = TransformationIndex(alpha=0, beta=1, mu=0, nu=0)
# composite stages, applied in this order
FIRST_INDEX = TransformationIndex(alpha=1, beta=0, mu=0, nu=0)   # {2 1; 1 1}
SECOND_INDEX = TransformationIndex(alpha=1, beta=0, mu=1, nu=0)  # {2 1; 2 1}


@dataclass(frozen=True)
class A2Parameters:
    theta11: complex
    theta12: complex
    theta21: complex
    theta22: complex
    kappa1: complex
    kappa2: complex
    kappa3: complex

    @classmethod
    def fuchs_consistent(cls, theta11, theta12, theta21, theta22, kappa1, kappa2) -> A2Parameters:
        kappa3 = -(theta11 + theta12 + theta21 + theta22 + kappa1 + kappa2)
        return cls(theta11, theta12, theta21, theta22, kappa1, kappa2, kappa3)

    @property
    def kappa(self) -> tuple[complex, complex, complex]:
        return (self.kappa1, self.kappa2, self.kappa3)

    @property
    def fuchs_sum(self) -> complex:
        return self.theta11 + self.theta12 + self.theta21 + self.theta22 + sum(self.kappa)

    def theta(self) -> list[np.ndarray]:
        return [np.array([self.theta11, self.theta12], dtype=complex),
                np.array([self.theta21, self.theta22], dtype=complex)]

    def shifted(self, idx: TransformationIndex) -> A2Parameters:
        values = [[self.theta11, self.theta12], [self.theta21, self.theta22]]
        values[idx.alpha][idx.mu] -= 1
        values[idx.beta][idx.nu] += 1
        (t11, t12), (t21, t22) = values
        return replace(self, theta11=t11, theta12=t12, theta21=t21, theta22=t22)

    def sigma(self) -> A2Parameters:
        """Scheme after swapping slot one with the kernel and shifting by ``-theta11``."""
        s = self.theta11
        return A2Parameters(-s, self.theta12 - s, self.theta21, self.theta22,
                            self.kappa1 + s, self.kappa2 + s, self.kappa3 + s)


@dataclass(frozen=True)
class A2State:
    x: complex
    y: complex
    alpha: complex
    beta: complex


@dataclass(frozen=True)
class StandardA2Parameters:
    b1: complex
    b2: complex
    b3: complex
    b4: complex
    b5: complex
    b6: complex
    b7: complex
    b8: complex

    @property
    def delta(self) -> complex:
        return self.b1 + self.b2 + self.b3 + self.b4 + self.b5 + self.b6 + self.b7 + self.b8

    def stepped(self) -> StandardA2Parameters:
        d = self.delta
        return replace(self, b5=self.b5 + d, b6=self.b6 + d, b7=self.b7 - d, b8=self.b8 - d)


# parameterization ----------------------------------------------------------

_B1 = np.array([[1, 0], [0, 1], [0, 0]], dtype=complex)
_B2 = np.array([[0, 1], [0, 1], [1, 1]], dtype=complex)


def _factors(params: A2Parameters, x, y, alpha, beta):
    c1 = np.array([[params.theta11, 0, alpha], [0, params.theta12, beta]], dtype=complex)
    c2 = np.array([[x - params.theta21, -x, params.theta21], [-y, y + params.theta22, 0]], dtype=complex)
    return c1, c2


def _infinity(params, x, y, alpha, beta) -> np.ndarray:
    c1, c2 = _factors(params, x, y, alpha, beta)
    return -(_B1 @ c1 + _B2 @ c2)


def _matching(params: A2Parameters, x, y, alpha, beta) -> np.ndarray:
    """Second and third elementary symmetric functions of ``A_inf`` minus their targets."""
    a = _infinity(params, x, y, alpha, beta)
    k1, k2, k3 = params.kappa
    e2 = (np.trace(a) ** 2 - np.trace(a @ a)) / 2
    return np.array([e2 - (k1 * k2 + k1 * k3 + k2 * k3), np.linalg.det(a) - k1 * k2 * k3])


def solve_alpha_beta(params: A2Parameters, x: complex, y: complex, *, tol: float = 1e-9) -> tuple[complex, complex]:
    base = _matching(params, x, y, 0, 0)
    jac = np.column_stack([_matching(params, x, y, 1, 0) - base, _matching(params, x, y, 0, 1) - base])
    if np.linalg.cond(jac) > 1e12:
        raise AlphaBetaUnsolvable(f"matching equations are degenerate at x={x}, y={y}")
    alpha, beta = np.linalg.solve(jac, -base)
    residual = np.max(np.abs(_matching(params, x, y, alpha, beta)))
    scale = max(1.0, float(np.max(np.abs(base))))
    if residual > tol * scale:
        raise AlphaBetaUnsolvable(f"coefficient residual {residual:.2e}")
    return complex(alpha), complex(beta)


def a2_state(params: A2Parameters, x: complex, y: complex) -> A2State:
    alpha, beta = solve_alpha_beta(params, x, y)
    return A2State(complex(x), complex(y), alpha, beta)


def _spectrum_gap(values, targets) -> float:
    remaining = list(targets)
    worst = 0.0
    for v in values:
        k = int(np.argmin([abs(v - t) for t in remaining]))
        worst = max(worst, abs(v - remaining.pop(k)))
    return worst


def build_a2_point(params: A2Parameters, x: complex, y: complex, *, tol: float = 1e-8) -> DecompositionPoint:
    alpha, beta = solve_alpha_beta(params, x, y)
    c1, c2 = _factors(params, x, y, alpha, beta)
    a_inf = -(_B1 @ c1 + _B2 @ c2)
    gap = _spectrum_gap(np.linalg.eigvals(a_inf), params.kappa)
    if gap > tol * max(1.0, float(np.max(np.abs(a_inf)))):
        raise InfinitySpectrumMismatch(f"eigenvalues of A_inf miss kappa by {gap:.2e}")
    return DecompositionPoint.create((0, 1), [_B1, _B2], [c1, c2], params.theta(), a_inf)


def canonical_frame(point: DecompositionPoint, *, tol: float = 1e-12) -> DecompositionPoint:
    """Similarity plus trivial rescalings putting ``B_1 = [e1, e2]``, ``B_2 = [e3, (1,1,1)]``."""
    frame = np.column_stack([point.B[0][:, 0], point.B[0][:, 1], point.B[1][:, 0]])
    if np.linalg.cond(frame) > 1 / tol:
        raise DegenerateFrame("b11, b12, b21 are linearly dependent")
    s0 = np.linalg.inv(frame)
    d = s0 @ point.B[1][:, 1]
    if np.min(np.abs(d)) <= tol * np.max(np.abs(d)):
        raise DegenerateFrame("b22 has a vanishing component in the frame")
    out = point.conjugated(np.diag(1 / d) @ s0)
    out = out.rescaled(0, [d[0], d[1]])
    return out.rescaled(1, [d[2], 1.0])


def in_canonical_frame(point: DecompositionPoint, tol: float = 1e-9) -> bool:
    return (np.max(np.abs(point.B[0] - _B1)) <= tol and np.max(np.abs(point.B[1] - _B2)) <= tol)


def xy_coordinates(point: DecompositionPoint, *, canonicalize: bool = True, tol: float = 1e-9) -> tuple[complex, complex]:
    """Read ``(x, y)`` from ``C_2``; redundant entries are cross-checked."""
    if canonicalize:
        point = canonical_frame(point)
    elif not in_canonical_frame(point, tol):
        raise FrameMismatch("point is not in the canonical frame")
    th21, th22 = point.theta[1]
    c2 = point.C[1]
    x = c2[0, 0] + th21
    y = -c2[1, 0]
    scale = max(1.0, abs(x), abs(y), abs(th21), abs(th22))
    gaps = (abs(-c2[0, 1] - x), abs(c2[1, 1] - th22 - y), abs(c2[0, 2] - th21), abs(c2[1, 2]))
    if max(gaps) > tol * scale:
        raise InconsistentEntries(f"C_2 entries disagree by {max(gaps):.2e}")
    return complex(x), complex(y)


# dynamics ------------------------------------------------------------------

def _check(value, locus, stage=None):
    if abs(value) < SINGULAR_TOL:
        raise Indeterminacy(locus, stage)
    return value


def a2_schlesinger_step(params: A2Parameters, x: complex, y: complex) -> tuple[A2Parameters, complex, complex]:
    """Closed form of ``{1 2; 1 1}`` in the chart, with ``alpha, beta`` solved numerically."""
    alpha, beta = solve_alpha_beta(params, x, y)
    t11, t12, t21, t22 = params.theta11, params.theta12, params.theta21, params.theta22
    gap = _check(t11 - t12 - 1, "theta11 - theta12 - 1")
    _check(alpha, "alpha")
    x_bar = (alpha - beta) * (t11 * (y + t22) - alpha * (x - y - t22)) / (alpha * gap)
    inner = _check((alpha - beta) * (y + t22) - alpha * (t21 + 1), "(alpha - beta)(y + theta22) - alpha(theta21 + 1)")
    y_bar = ((alpha - beta) * y - beta * t22) / gap * (
        1 + t11 / alpha + ((beta - alpha) * x + (t12 + 1 + alpha) * (t21 + 1)) / inner)
    return params.shifted(SCHLESINGER_INDEX), complex(x_bar), complex(y_bar)


def schlesinger_step_pipeline(params: A2Parameters, x: complex, y: complex) -> tuple[A2Parameters, complex, complex]:
    """The same step computed on the factor level."""
    point = transform.transform_decomposition(build_a2_point(params, x, y), SCHLESINGER_INDEX)
    x_bar, y_bar = xy_coordinates(point)
    return params.shifted(SCHLESINGER_INDEX), x_bar, y_bar


def _cross(a, b) -> np.ndarray:
    return np.cross(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def sigma13(point: DecompositionPoint, params: A2Parameters) -> tuple[DecompositionPoint, A2Parameters]:
    """Swap slot one at pole 0 with the kernel direction, then shift ``A_1`` by ``-theta11 I``.

    The surviving slot keeps ``b_{1,2}``; its row is rescaled by
    ``(theta12 - theta11)/theta12`` so that normalization holds for the new index.
    """
    t11 = params.theta11
    t12 = params.theta12
    b1, b2 = point.B[0][:, 0], point.B[0][:, 1]
    c1, c2 = point.C[0]
    kernel = _cross(c1, c2)
    co_kernel = _cross(b1, b2)
    pairing = kernel @ co_kernel
    scale = np.linalg.norm(kernel) * np.linalg.norm(co_kernel)
    if scale == 0 or abs(pairing) <= 1e-12 * scale:
        raise DegenerateCross("cross products are degenerate")
    if abs(t12) < SINGULAR_TOL:
        raise DegenerateCross("theta12 vanishes")
    new_b = np.column_stack([kernel, b2])
    new_c = np.vstack([-t11 * co_kernel / pairing, c2 * (t12 - t11) / t12])
    new_params = params.sigma()
    B = [new_b, point.B[1]]
    C = [new_c, point.C[1]]
    a_inf = point.a_inf + t11 * np.eye(3)
    return DecompositionPoint.create(point.poles, B, C, new_params.theta(), a_inf), new_params


def composite_parameters(params: A2Parameters) -> A2Parameters:
    """Scheme after one composite step, computed on the parameters alone.

    Exact for exact inputs such as :class:`fractions.Fraction`.
    """
    params = params.shifted(FIRST_INDEX).sigma()
    return params.shifted(SECOND_INDEX).sigma()


def composite_trace(params: A2Parameters, x: complex, y: complex) -> list[tuple[str, A2Parameters, DecompositionPoint]]:
    """Every intermediate stage of the composite, starting with the input point."""
    point = build_a2_point(params, x, y)
    out = [("start", params, point)]
    stages = [("{2 1; 1 1}", FIRST_INDEX), ("sigma", None), ("{2 1; 2 1}", SECOND_INDEX), ("sigma", None)]
    for k, (label, idx) in enumerate(stages):
        stage = f"{k + 1}:{label}"
        try:
            if idx is None:
                point, params = sigma13(point, params)
            else:
                point = transform.transform_decomposition(point, idx)
                params = params.shifted(idx)
        except Indeterminacy:
            raise
        except SchlesingerError as exc:
            raise Indeterminacy(str(exc), stage) from exc
        out.append((stage, params, point))
    return out


def composite_step(params: A2Parameters, x: complex, y: complex) -> tuple[A2Parameters, complex, complex]:
    """One d-P(A2*) step: sigma o {2 1; 2 1} o sigma o {2 1; 1 1}."""
    *_, (_, new_params, point) = composite_trace(params, x, y)
    try:
        x_bar, y_bar = xy_coordinates(point)
    except SchlesingerError as exc:
        raise Indeterminacy(str(exc), "reframe") from exc
    return new_params, x_bar, y_bar


# standard form -------------------------------------------------------------

def standard_parameters(params: A2Parameters) -> StandardA2Parameters:
    t11, t12 = params.theta11, params.theta12
    return StandardA2Parameters(
        b1=t12 + params.kappa1, b2=t12 + params.kappa2, b3=t12 + params.kappa3, b4=t12 - t12,
        b5=params.theta21, b6=params.theta22, b7=t11 - t12, b8=-t12 - 1)


def standard_coordinates_projective(params: A2Parameters, X, Y, Z) -> tuple[complex, complex]:
    """``(f, g)`` of a point ``[X : Y : Z]``; an infinite coordinate is returned as ``inf``."""
    t11, t12, t21, t22 = params.theta11, params.theta12, params.theta21, params.theta22
    f_num = (t11 - t12) * (X - Y - t22 * Z)
    f_den = (t22 - t21) * Z
    g_num = t22 * (X - t21 * Z) - t21 * Y
    g_den = X - Y - t21 * Z

    def ratio(num, den):
        if den == 0:
            return complex(np.inf) if num != 0 else complex(np.nan)
        return complex(num / den)

    return ratio(f_num, f_den), ratio(g_num, g_den)


def to_standard(params: A2Parameters, x: complex, y: complex) -> tuple[StandardA2Parameters, complex, complex]:
    _check(params.theta22 - params.theta21, "theta22 - theta21")
    _check(x - y - params.theta21, "x - y - theta21")
    f, g = standard_coordinates_projective(params, x, y, 1)
    return standard_parameters(params), f, g


def a2_standard_step(std: StandardA2Parameters, f: complex, g: complex) -> tuple[StandardA2Parameters, complex, complex]:
    """Solve ``(f+g)(f_bar+g) = N(g)`` then ``(f_bar+g)(f_bar+g_bar) = M(f_bar)``."""
    _check(f + g, "f + g")
    _check(g - std.b5, "g - b5")
    _check(g - std.b6, "g - b6")
    num = (g + std.b1) * (g + std.b2) * (g + std.b3) * (g + std.b4)
    f_bar = -g + num / ((g - std.b5) * (g - std.b6) * (f + g))
    new = std.stepped()
    _check(f_bar + g, "f_bar + g")
    _check(f_bar + new.b7, "f_bar + b7 - delta")
    _check(f_bar + new.b8, "f_bar + b8 - delta")
    num = (f_bar - std.b1) * (f_bar - std.b2) * (f_bar - std.b3) * (f_bar - std.b4)
    g_bar = -f_bar + num / ((f_bar + new.b7) * (f_bar + new.b8) * (f_bar + g))
    return new, complex(f_bar), complex(g_bar)


def standard_residuals(std: StandardA2Parameters, f, g, f_bar, g_bar) -> tuple[complex, complex]:
    """Residuals of both standard-form equations, cleared of denominators."""
    new = std.stepped()
    first = ((f + g) * (f_bar + g) * (g - std.b5) * (g - std.b6)
             - (g + std.b1) * (g + std.b2) * (g + std.b3) * (g + std.b4))
    second = ((f_bar + g) * (f_bar + g_bar) * (f_bar + new.b7) * (f_bar + new.b8)
              - (f_bar - std.b1) * (f_bar - std.b2) * (f_bar - std.b3) * (f_bar - std.b4))
    return complex(first), complex(second)


# discrete Hamiltonian in explicit form --------------------------------------

def display_hamiltonian(params: A2Parameters, B, C_bar, *, include_cross_term: bool = True) -> complex:
    """Closed form of the discrete Hamiltonian of ``{1 2; 1 1}`` via two determinants.

    ``include_cross_term`` adds ``(theta11 - theta12) log(cbar_2^1 b_{1,1})``. Without
    it the derivative in ``b_{1,1}`` misses ``c_1^1`` and the generating equations fail.
    """
    b11, b12 = B[0][:, 0], B[0][:, 1]
    b21, b22 = B[1][:, 0], B[1][:, 1]
    c11, c12 = C_bar[0]
    c21, c22 = C_bar[1]
    t11, t12, t21, t22 = params.theta11, params.theta12, params.theta21, params.theta22
    d1 = ((c11 @ b21) * (c12 @ b12) * (c21 @ b11) - (c11 @ b21) * (c12 @ b11) * (c21 @ b12)
          - (c11 @ b12) * (c12 @ b21) * (c21 @ b11))
    d2 = (c21 @ b21) * (c22 @ b22) - (c21 @ b22) * (c22 @ b21)
    value = ((t21 - t11 - t22 + 1) * np.log(c21 @ b21) + (t11 - t12 - 1) * np.log(c11 @ b21)
             + t12 * np.log(d1) + t22 * np.log(d2))
    if include_cross_term:
        value += (t11 - t12) * np.log(c21 @ b11)
    return complex(value)
