"""Rank-one multipliers ``R(x) = I + (z - zeta)/(x - z) * P`` with ``P = f g / (g f)``.

``f`` is a column vector and ``g`` a row vector; ``P`` is the rank-one projector
with image ``f`` and kernel ``ker g``. ``det R(x) = (x - zeta)/(x - z)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EvalAtPole, EvalAtZero, InvalidDivisor

PAIRING_TOL = 1e-12


@dataclass(frozen=True)
class ElementaryDivisor:
    z: complex
    zeta: complex
    f: np.ndarray
    g: np.ndarray

    def __post_init__(self):
        f = np.array(self.f, dtype=complex).reshape(-1)
        g = np.array(self.g, dtype=complex).reshape(-1)
        if f.shape != g.shape:
            raise InvalidDivisor(f"f has {f.size} entries, g has {g.size}")
        if self.z == self.zeta:
            raise InvalidDivisor("pole and zero coincide")
        if abs(g @ f) < PAIRING_TOL:
            raise InvalidDivisor(f"g f = {g @ f} is too small")
        f.setflags(write=False)
        g.setflags(write=False)
        object.__setattr__(self, "z", complex(self.z))
        object.__setattr__(self, "zeta", complex(self.zeta))
        object.__setattr__(self, "f", f)
        object.__setattr__(self, "g", g)

    @property
    def size(self) -> int:
        return self.f.size

    @property
    def pairing(self) -> complex:
        return complex(self.g @ self.f)

    @property
    def projector(self) -> np.ndarray:
        return np.outer(self.f, self.g) / self.pairing

    def _coefficient(self, x: complex) -> complex:
        if x == self.z:
            raise EvalAtPole(f"R has a pole at {self.z}")
        return (self.z - self.zeta) / (x - self.z)


def evaluate(R: ElementaryDivisor, x: complex) -> np.ndarray:
    return np.eye(R.size) + R._coefficient(x) * R.projector


def evaluate_inverse(R: ElementaryDivisor, x: complex) -> np.ndarray:
    if x == R.zeta:
        raise EvalAtZero(f"R^-1 has a pole at {R.zeta}")
    return np.eye(R.size) + (R.zeta - R.z) / (x - R.zeta) * R.projector


def derivative(R: ElementaryDivisor, x: complex) -> np.ndarray:
    if x == R.z:
        raise EvalAtPole(f"R has a pole at {R.z}")
    return -(R.z - R.zeta) / (x - R.z) ** 2 * R.projector


def log_derivative_trace(R: ElementaryDivisor, x: complex) -> complex:
    """``tr(R'(x) R(x)^-1) = 1/(x - zeta) - 1/(x - z)``."""
    return 1 / (x - R.zeta) - 1 / (x - R.z)


@dataclass(frozen=True)
class PairingGradients:
    """Partial derivatives of the scalar ``w R(x) v``.

    ``d_v`` and ``d_f`` are rows; ``d_w`` and ``d_g`` are columns, so that
    ``v d_v`` and ``d_w w`` are outer products of matching shapes.
    """

    d_v: np.ndarray
    d_w: np.ndarray
    d_f: np.ndarray
    d_g: np.ndarray


def pairing_gradients(R: ElementaryDivisor, v, w, x: complex) -> PairingGradients:
    v = np.asarray(v, dtype=complex).reshape(-1)
    w = np.asarray(w, dtype=complex).reshape(-1)
    c = R._coefficient(x)
    s = R.pairing
    wf = w @ R.f
    gv = R.g @ v
    r = evaluate(R, x)
    return PairingGradients(
        d_v=w @ r,
        d_w=r @ v,
        d_f=c * (gv / s * w - wf * gv / s**2 * R.g),
        d_g=c * (wf / s * v - wf * gv / s**2 * R.f),
    )


def check_vanishing_rule(R: ElementaryDivisor, v, w, x: complex) -> float:
    """Max of ``|d_f . f|`` and ``|g . d_g|``; both vanish identically."""
    grads = pairing_gradients(R, v, w, x)
    return max(abs(grads.d_f @ R.f), abs(R.g @ grads.d_g))


def check_exchange_rule(R: ElementaryDivisor, v, w, x: complex) -> float:
    """Max-norm of ``(v d_v - d_w w) - (d_g g - f d_f)``."""
    v = np.asarray(v, dtype=complex).reshape(-1)
    w = np.asarray(w, dtype=complex).reshape(-1)
    grads = pairing_gradients(R, v, w, x)
    left = np.outer(v, grads.d_v) - np.outer(grads.d_w, w)
    right = np.outer(grads.d_g, R.g) - np.outer(R.f, grads.d_f)
    return float(np.max(np.abs(left - right)))
