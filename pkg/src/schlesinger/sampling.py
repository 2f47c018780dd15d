"""Seeded random instances for checks and the CLI.

Every draw keeps real and imaginary parts in ``[-1, 1]``. Finite poles are at
least ``POLE_SEPARATION`` apart. Draws that hit a guard (close eigenvalues,
ill-conditioned eigenbases, degenerate charts) are thrown away and redrawn, so
a given seed always yields the same instance.
"""

from __future__ import annotations

import numpy as np

from .a2star import A2Parameters, build_a2_point, composite_trace
from .dpv import DPVParameters, DPVState, build_dpv_point, dpv_step, step_denominators
from .errors import SchlesingerError
from .fuchsian import FuchsianSystem, build_system

POLE_SEPARATION = 0.3
MAX_COND = 1e3
# eigenvalues of one residue, and zero, stay this far apart
SPECTRAL_GAP = 0.05
MAX_TRIES = 1000


class SamplingError(RuntimeError):
    pass


def random_complex(rng: np.random.Generator, size=None):
    re = rng.uniform(-1, 1, size)
    im = rng.uniform(-1, 1, size)
    return re + 1j * im


def _spread(values, gap: float) -> bool:
    values = list(values)
    return all(abs(a - b) >= gap for i, a in enumerate(values) for b in values[i + 1:])


def random_poles(rng: np.random.Generator, n: int, sep: float = POLE_SEPARATION) -> list[complex]:
    for _ in range(MAX_TRIES):
        poles = [complex(v) for v in random_complex(rng, n)]
        if _spread(poles, sep):
            return poles
    raise SamplingError(f"could not place {n} poles {sep} apart")


def random_spectrum(rng: np.random.Generator, rank: int, gap: float = SPECTRAL_GAP) -> np.ndarray:
    for _ in range(MAX_TRIES):
        theta = random_complex(rng, rank)
        if _spread([*theta, 0j], gap):
            return theta
    raise SamplingError("could not draw a separated spectrum")


def random_residue(rng: np.random.Generator, m: int, rank: int) -> tuple[np.ndarray, np.ndarray]:
    """``V diag(theta, 0) V^-1`` with ``cond(V) <= MAX_COND``; returns the matrix and ``theta``."""
    theta = random_spectrum(rng, rank)
    for _ in range(MAX_TRIES):
        v = random_complex(rng, (m, m))
        if np.linalg.cond(v) <= MAX_COND:
            d = np.zeros(m, dtype=complex)
            d[:rank] = theta
            return v @ np.diag(d) @ np.linalg.inv(v), theta
    raise SamplingError("could not draw a well-conditioned eigenbasis")


def random_system(rng: np.random.Generator, m: int, n: int, ranks=None) -> FuchsianSystem:
    """``n`` finite poles, residues of the given ranks (default: full rank ``m``)."""
    ranks = list(ranks) if ranks is not None else [m] * n
    for _ in range(MAX_TRIES):
        poles = random_poles(rng, n)
        residues = [random_residue(rng, m, r)[0] for r in ranks]
        try:
            return build_system(poles, residues)
        except SchlesingerError:
            continue
    raise SamplingError("could not draw a valid system")


def random_dpv(rng: np.random.Generator, steps: int = 0, margin: float = 0.0) -> tuple[DPVParameters, DPVState]:
    """Fuchs-consistent parameters and a chart point whose first ``steps`` steps are defined.

    With ``margin > 0`` every step of that orbit also keeps both step
    denominators at least ``margin`` away from zero.
    """
    for _ in range(MAX_TRIES):
        theta1, thetat, kappa1, kappa2 = random_complex(rng, 4)
        t = complex(random_complex(rng))
        if abs(t) < POLE_SEPARATION or abs(t - 1) < POLE_SEPARATION or abs(kappa1 - kappa2) < SPECTRAL_GAP:
            continue
        params = DPVParameters.fuchs_consistent(theta1, thetat, kappa1, kappa2, t)
        state = DPVState(*(complex(v) for v in random_complex(rng, 2)))
        try:
            build_dpv_point(params, state)
            p, s = params, state
            for _ in range(steps):
                if min(abs(d) for d in step_denominators(p, s)) < margin:
                    raise SamplingError("orbit passes close to a singular step")
                p, s = dpv_step(p, s)
                build_dpv_point(p, s)
        except (SchlesingerError, SamplingError):
            continue
        return params, state
    raise SamplingError("could not draw a d-P(D4) instance")


def random_a2(rng: np.random.Generator, composite: bool = False) -> tuple[A2Parameters, complex, complex]:
    """Parameters with separated indices and a chart point that builds (and composes, if asked)."""
    for _ in range(MAX_TRIES):
        t11, t12, t21, t22, k1, k2 = random_complex(rng, 6)
        params = A2Parameters.fuchs_consistent(t11, t12, t21, t22, k1, k2)
        if not (_spread([t11, t12, 0j], SPECTRAL_GAP) and _spread([t21, t22, 0j], SPECTRAL_GAP)
                and _spread(params.kappa, SPECTRAL_GAP)):
            continue
        x, y = (complex(v) for v in random_complex(rng, 2))
        try:
            build_a2_point(params, x, y)
            if composite:
                composite_trace(params, x, y)
        except SchlesingerError:
            continue
        return params, x, y
    raise SamplingError("could not draw a d-P(A2*) instance")


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Independent stream per trial, so trials can run in any order."""
    return np.random.default_rng([seed, trial])
