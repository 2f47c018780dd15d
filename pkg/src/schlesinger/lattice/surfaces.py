"""Static lattice data for the two Painleve surfaces and their blow-down charts.

Classes are written as short linear expressions such as ``"2H_f + H_g - E1 - E8"``
and parsed once at import time.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from ..errors import BasisMismatch
from .core import LatticeAction, LatticeBasis, LatticeClass, build_action, sum_classes

_TERM = re.compile(r"\s*([+-]?)\s*(\d*)\s*([A-Za-z][\w']*)\s*")


def parse_class(basis: LatticeBasis, text: str) -> LatticeClass:
    """Parse ``"5H_f + 2H_g - 2E1"``; ``"E1..E4"`` expands to ``E1 + E2 + E3 + E4``."""
    text = re.sub(r"([+-]?)\s*(\d*)\s*\(?([A-Za-z]+'?)(\d+)\.\.\3(\d+)\)?",
                  lambda m: " ".join(f"{m.group(1) or '+'} {m.group(2)}{m.group(3)}{k}"
                                     for k in range(int(m.group(4)), int(m.group(5)) + 1)), text)
    terms: dict[str, int] = {}
    pos = 0
    while pos < len(text):
        m = _TERM.match(text, pos)
        if not m or m.end() == pos:
            raise BasisMismatch(f"cannot parse {text[pos:]!r}")
        sign = -1 if m.group(1) == "-" else 1
        k = int(m.group(2)) if m.group(2) else 1
        terms[m.group(3)] = terms.get(m.group(3), 0) + sign * k
        pos = m.end()
    return basis.cls(terms)


@dataclass(frozen=True)
class Surface:
    name: str
    basis: LatticeBasis
    components: tuple[tuple[LatticeClass, int], ...]
    roots: tuple[LatticeClass, ...]
    actions: dict[str, LatticeAction] = field(default_factory=dict)
    translations: dict[str, tuple[int, ...]] = field(default_factory=dict)
    cartan_type: str = ""

    @property
    def minus_k(self) -> LatticeClass:
        return self.basis.anticanonical()

    @property
    def delta(self) -> LatticeClass:
        return sum_classes(m * d for d, m in self.components)


@dataclass(frozen=True)
class BlowdownChart:
    """Classes ``H_f, H_g, E_i`` of a ``P1 x P1`` chart written in another basis."""

    name: str
    basis: LatticeBasis
    h_f: LatticeClass
    h_g: LatticeClass
    exceptional: tuple[LatticeClass, ...]


def _action(basis: LatticeBasis, images: dict[str, str]) -> LatticeAction:
    return build_action([parse_class(basis, images[label]) for label in basis.labels])


def _parse_all(basis, texts):
    return tuple(parse_class(basis, t) for t in texts)


# d-P(D4) surface on P1 x P1

_DPV = LatticeBasis.quadric("H_f", "H_g", [f"E{i}" for i in range(1, 9)])

DPV_SURFACE = Surface(
    name="dpv",
    basis=_DPV,
    components=tuple(zip(_parse_all(_DPV, ["H_g - E1 - E2", "H_g - E3 - E4", "H_f - E5 - E6",
                                           "E5 - E7", "E6 - E8"]), (1, 1, 2, 1, 1))),
    roots=_parse_all(_DPV, ["E1 - E2", "E3 - E4", "H_f - E1 - E3", "H_g - E5 - E7", "H_g - E6 - E8"]),
    actions={"phi": _action(_DPV, {
        "H_f": "5H_f + 2H_g - 2E1..E4 - E5..E8",
        "H_g": "2H_f + H_g - E1..E4",
        "E1": "H_f - E2", "E2": "H_f - E1", "E3": "H_f - E4", "E4": "H_f - E3",
        "E5": "2H_f + H_g - E1..E4 - E8",
        "E6": "2H_f + H_g - E1..E4 - E7",
        "E7": "2H_f + H_g - E1..E4 - E6",
        "E8": "2H_f + H_g - E1..E4 - E5",
    })},
    translations={"phi": (0, 0, 1, -1, -1)},
    cartan_type="D4(1)",
)

# blow-down from the (p, q) chart, ten points on P1 x P1

_PQ = LatticeBasis.quadric("H_p", "H_q", ["F1", "F2", "F2'", "F3", "F4", "F4'", "F5", "F6", "F7", "F8"])

DPV_BLOWDOWN = BlowdownChart(
    name="dpv-pq",
    basis=_PQ,
    h_f=parse_class(_PQ, "H_p + H_q - F1 - F3"),
    h_g=parse_class(_PQ, "H_p + H_q - F3 - F4'"),
    exceptional=_parse_all(_PQ, ["H_p + H_q - F1 - F3 - F4'", "F2", "H_p - F3", "F4", "F5", "F6",
                                 "F7", "F8", "F2'", "H_q - F3"]),
)

# d-P(A2*) surface on P1 x P1

_A2 = LatticeBasis.quadric("H_f", "H_g", [f"E{i}" for i in range(1, 9)])

_A2_ROOTS = ["E3 - E4", "E2 - E3", "E1 - E2", "H_f - E1 - E7", "E7 - E8", "H_g - E1 - E5", "E5 - E6"]

A2_SURFACE = Surface(
    name="a2star",
    basis=_A2,
    components=tuple(zip(_parse_all(_A2, ["H_f + H_g - E1..E4", "H_f - E5 - E6", "H_g - E7 - E8"]),
                         (1, 1, 1))),
    roots=_parse_all(_A2, _A2_ROOTS),
    actions={"phi": _action(_A2, {
        "H_f": "6H_f + 3H_g - 2E1..E4 - E5 - E6 - 3E7 - 3E8",
        "H_g": "3H_f + H_g - E1..E4 - E7 - E8",
        "E1": "2H_f + H_g - E2 - E3 - E4 - E7 - E8",
        "E2": "2H_f + H_g - E1 - E3 - E4 - E7 - E8",
        "E3": "2H_f + H_g - E1 - E2 - E4 - E7 - E8",
        "E4": "2H_f + H_g - E1 - E2 - E3 - E7 - E8",
        "E5": "3H_f + H_g - E1..E4 - E6 - E7 - E8",
        "E6": "3H_f + H_g - E1..E4 - E5 - E7 - E8",
        "E7": "H_f - E8",
        "E8": "H_f - E7",
    })},
    translations={"phi": (0, 0, 0, 1, 0, -1, 0)},
    cartan_type="E6(1)",
)

# the Schlesinger dynamic acts on the blow-down basis of the matrix chart;
# that basis has the same intersection form, so it is its own surface object

_A2S = LatticeBasis.quadric("H'_f", "H'_g", [f"E'{i}" for i in range(1, 9)])


def _primed(text: str) -> str:
    return re.sub(r"(?<![A-Za-z_'])(H|E)(_?\w)", r"\1'\2", text)


A2_SCHLESINGER_SURFACE = Surface(
    name="a2star-schlesinger",
    basis=_A2S,
    components=tuple(zip(_parse_all(_A2S, [_primed(t) for t in
                                           ["H_f + H_g - E1..E4", "H_f - E5 - E6", "H_g - E7 - E8"]]),
                         (1, 1, 1))),
    roots=_parse_all(_A2S, [_primed(t) for t in _A2_ROOTS]),
    actions={"psi": _action(_A2S, {_primed(k): _primed(v) for k, v in {
        "H_f": "2H_f + 3H_g - E1..E4 - 2E5 - 2E8",
        "H_g": "3H_f + 5H_g - 2E1..E4 - 3E5 - E6 - 2E8",
        "E1": "H_f + 2H_g - E2 - E3 - E4 - E5 - E8",
        "E2": "H_f + 2H_g - E1 - E3 - E4 - E5 - E8",
        "E3": "H_f + 2H_g - E1 - E2 - E4 - E5 - E8",
        "E4": "H_f + 2H_g - E1 - E2 - E3 - E5 - E8",
        "E5": "E7",
        "E6": "2H_f + 2H_g - E1..E4 - 2E5 - E8",
        "E7": "2H_f + 3H_g - E1..E4 - 2E5 - E6 - 2E8",
        "E8": "H_g - E5",
    }.items()})},
    translations={"psi": (0, 0, 0, -1, 1, 1, -1)},
    cartan_type="E6(1)",
)

# the matrix chart of d-P(A2*) as P2 blown up at nine points

_P2 = LatticeBasis.plane("E", [f"E{i}" for i in range(1, 10)])

A2_PLANE_COMPONENTS = tuple(zip(_parse_all(_P2, ["2E - E1..E6", "E - E1 - E7 - E8", "E1 - E9"]), (1, 1, 1)))

A2_BLOWDOWN = BlowdownChart(
    name="a2star-plane",
    basis=_P2,
    h_f=parse_class(_P2, "E - E1"),
    h_g=parse_class(_P2, "E - E2"),
    exceptional=_parse_all(_P2, ["E3", "E4", "E5", "E6", "E7", "E8", "E - E1 - E2", "E9"]),
)

SURFACES = {s.name: s for s in (DPV_SURFACE, A2_SURFACE, A2_SCHLESINGER_SURFACE)}
BLOWDOWNS = {c.name: c for c in (DPV_BLOWDOWN, A2_BLOWDOWN)}
