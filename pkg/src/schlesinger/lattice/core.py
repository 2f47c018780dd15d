"""Exact integer algebra on Picard lattices of rational surfaces.

Classes are integer vectors over a labelled basis with an integer Gram matrix.
Everything stays in Python ints; values beyond the int64 range raise rather
than wrap, so the data can be handed to fixed-width code safely.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from ..errors import BasisMismatch, DeltaNotFixed, LatticeOverflow, NotIsometry, NotTranslation

INT_BOUND = 2**63 - 1


def _checked(value: int) -> int:
    value = int(value)
    if abs(value) > INT_BOUND:
        raise LatticeOverflow(f"{value} exceeds the 64-bit range")
    return value


@dataclass(frozen=True)
class LatticeBasis:
    labels: tuple[str, ...]
    gram: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        n = len(self.labels)
        gram = tuple(tuple(_checked(v) for v in row) for row in self.gram)
        if len(gram) != n or any(len(row) != n for row in gram):
            raise BasisMismatch(f"gram must be {n}x{n}")
        if any(gram[i][j] != gram[j][i] for i in range(n) for j in range(n)):
            raise BasisMismatch("gram is not symmetric")
        if len(set(self.labels)) != n:
            raise BasisMismatch("labels repeat")
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "gram", gram)

    @classmethod
    def quadric(cls, h1: str, h2: str, exceptional: Sequence[str]) -> LatticeBasis:
        """``P1 x P1`` blown up: ``h1.h2 = 1``, ``h^2 = 0``, ``E^2 = -1``."""
        labels = (h1, h2, *exceptional)
        n = len(labels)
        gram = [[0] * n for _ in range(n)]
        gram[0][1] = gram[1][0] = 1
        for i in range(2, n):
            gram[i][i] = -1
        return cls(labels, tuple(map(tuple, gram)))

    @classmethod
    def plane(cls, h: str, exceptional: Sequence[str]) -> LatticeBasis:
        """``P2`` blown up: ``E^2 = 1``, ``E_i^2 = -1``."""
        labels = (h, *exceptional)
        n = len(labels)
        gram = [[0] * n for _ in range(n)]
        gram[0][0] = 1
        for i in range(1, n):
            gram[i][i] = -1
        return cls(labels, tuple(map(tuple, gram)))

    @property
    def rank(self) -> int:
        return len(self.labels)

    def generator(self, label: str) -> LatticeClass:
        coeffs = [0] * self.rank
        coeffs[self.labels.index(label)] = 1
        return LatticeClass(self, tuple(coeffs))

    def cls(self, terms: Mapping[str, int] | None = None, **kwargs: int) -> LatticeClass:
        """Class from ``{label: coefficient}``; unknown labels raise BasisMismatch."""
        coeffs = [0] * self.rank
        for label, k in {**(terms or {}), **kwargs}.items():
            if label not in self.labels:
                raise BasisMismatch(f"{label} is not a generator of this basis")
            coeffs[self.labels.index(label)] += int(k)
        return LatticeClass(self, tuple(coeffs))

    def anticanonical(self) -> LatticeClass:
        """``2 H_1 + 2 H_2 - sum E`` on a quadric basis, ``3 E - sum E_i`` on a plane basis."""
        if self.gram[0][0] == 1:
            return LatticeClass(self, (3, *([-1] * (self.rank - 1))))
        return LatticeClass(self, (2, 2, *([-1] * (self.rank - 2))))


@dataclass(frozen=True)
class LatticeClass:
    basis: LatticeBasis
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if len(self.coeffs) != self.basis.rank:
            raise BasisMismatch(f"{len(self.coeffs)} coefficients for rank {self.basis.rank}")
        object.__setattr__(self, "coeffs", tuple(_checked(c) for c in self.coeffs))

    def _same(self, other: LatticeClass) -> None:
        if self.basis != other.basis:
            raise BasisMismatch("classes live on different bases")

    def __add__(self, other: LatticeClass) -> LatticeClass:
        self._same(other)
        return LatticeClass(self.basis, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: LatticeClass) -> LatticeClass:
        self._same(other)
        return LatticeClass(self.basis, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> LatticeClass:
        return LatticeClass(self.basis, tuple(-a for a in self.coeffs))

    def __mul__(self, k: int) -> LatticeClass:
        return LatticeClass(self.basis, tuple(int(k) * a for a in self.coeffs))

    __rmul__ = __mul__

    def __str__(self) -> str:
        parts = []
        for label, c in zip(self.basis.labels, self.coeffs):
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            mag = "" if abs(c) == 1 else str(abs(c))
            parts.append(f"{sign} {mag}{label}")
        if not parts:
            return "0"
        text = " ".join(parts)
        return text[2:] if text.startswith("+ ") else "-" + text[2:]


def pair(a: LatticeClass, b: LatticeClass) -> int:
    """Intersection number ``a^T G b``."""
    a._same(b)
    g = a.basis.gram
    return _checked(sum(a.coeffs[i] * g[i][j] * b.coeffs[j]
                        for i in range(len(g)) for j in range(len(g)) if a.coeffs[i] and b.coeffs[j]))


def genus(c: LatticeClass, minus_k: LatticeClass) -> int:
    """Arithmetic genus from ``2g - 2 = C^2 + C.K``."""
    twice = pair(c, c) - pair(c, minus_k) + 2
    if twice % 2:
        raise BasisMismatch(f"odd adjunction value for {c}")
    return twice // 2


@dataclass
class CheckResult:
    """Boolean verdict plus the reasons behind a negative one."""

    ok: bool
    problems: list[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


def verify_anticanonical_decomposition(minus_k: LatticeClass,
                                       components: Sequence[tuple[LatticeClass, int]]) -> CheckResult:
    problems = []
    total = LatticeClass(minus_k.basis, (0,) * minus_k.basis.rank)
    for i, (d, mult) in enumerate(components):
        if d.basis != minus_k.basis:
            problems.append(f"D{i} lives on another basis")
            continue
        total = total + mult * d
        if (sq := pair(d, d)) != -2:
            problems.append(f"D{i}^2 = {sq}, expected -2")
    if total.basis == minus_k.basis and total != minus_k:
        problems.append(f"sum of components is {total}, expected {minus_k}")
    return CheckResult(not problems, problems)


def verify_blowdown_structure(h_f: LatticeClass, h_g: LatticeClass, exceptional: Sequence[LatticeClass],
                              minus_k: LatticeClass | None = None) -> CheckResult:
    """Pairings of a ``P1 x P1`` blow-down plus genus zero for every class."""
    named = [("H_f", h_f), ("H_g", h_g)] + [(f"E{i + 1}", e) for i, e in enumerate(exceptional)]
    basis = h_f.basis
    if any(c.basis != basis for _, c in named):
        return CheckResult(False, ["classes live on different bases"])
    minus_k = minus_k if minus_k is not None else basis.anticanonical()
    problems = []
    for (na, a), (nb, b) in itertools.combinations_with_replacement(named, 2):
        expected = 0
        if na == nb:
            expected = -1 if na.startswith("E") else 0
        elif {na, nb} == {"H_f", "H_g"}:
            expected = 1
        if (value := pair(a, b)) != expected:
            problems.append(f"{na}.{nb} = {value}, expected {expected}")
    for name, c in named:
        if (g := genus(c, minus_k)) != 0:
            problems.append(f"{name} has genus {g}")
    return CheckResult(not problems, problems)


@dataclass(frozen=True)
class LatticeAction:
    """Push-forward on generators; column ``j`` is the image of generator ``j``."""

    basis: LatticeBasis
    matrix: tuple[tuple[int, ...], ...]

    def __call__(self, c: LatticeClass) -> LatticeClass:
        if c.basis != self.basis:
            raise BasisMismatch("class and action live on different bases")
        n = self.basis.rank
        return LatticeClass(self.basis, tuple(sum(self.matrix[i][j] * c.coeffs[j] for j in range(n))
                                              for i in range(n)))

    def image(self, label: str) -> LatticeClass:
        j = self.basis.labels.index(label)
        return LatticeClass(self.basis, tuple(row[j] for row in self.matrix))


def is_isometry(basis: LatticeBasis, matrix) -> bool:
    """Exact check that ``matrix^T G matrix = G`` for the Gram matrix ``G``."""
    n = basis.rank
    g = basis.gram
    for a in range(n):
        for b in range(a, n):
            value = sum(matrix[i][a] * g[i][j] * matrix[j][b] for i in range(n) for j in range(n))
            if value != g[a][b]:
                return False
    return True


def build_action(images: Sequence[LatticeClass]) -> LatticeAction:
    if not images:
        raise NotIsometry("no images given")
    basis = images[0].basis
    if len(images) != basis.rank:
        raise NotIsometry(f"{len(images)} images for rank {basis.rank}")
    if any(im.basis != basis for im in images):
        raise BasisMismatch("images live on different bases")
    n = basis.rank
    matrix = tuple(tuple(images[j].coeffs[i] for j in range(n)) for i in range(n))
    if not is_isometry(basis, matrix):
        raise NotIsometry("images do not preserve the intersection form")
    return LatticeAction(basis, matrix)


def translation_vector(action: LatticeAction, roots: Sequence[LatticeClass], delta: LatticeClass) -> tuple[int, ...]:
    """``(k_i)`` with ``action(a_i) = a_i + k_i delta``, checked exactly."""
    if action(delta) != delta:
        raise DeltaNotFixed(f"delta maps to {action(delta)}")
    nonzero = [i for i, c in enumerate(delta.coeffs) if c]
    out = []
    for i, root in enumerate(roots):
        diff = action(root) - root
        j = nonzero[0]
        if diff.coeffs[j] % delta.coeffs[j]:
            raise NotTranslation(f"image of root {i} is not a shift by delta")
        k = diff.coeffs[j] // delta.coeffs[j]
        if diff != k * delta:
            raise NotTranslation(f"image of root {i} differs from root + k delta by {diff - k * delta}")
        out.append(k)
    return tuple(out)


def cartan_matrix(roots: Sequence[LatticeClass]) -> list[list[int]]:
    """``2 (a_i.a_j)/(a_j.a_j)``; roots of square ``-2`` give a ``+2`` diagonal."""
    out = []
    for a in roots:
        row = []
        for b in roots:
            num, den = 2 * pair(a, b), pair(b, b)
            if num % den:
                raise BasisMismatch("Cartan entry is not an integer")
            row.append(num // den)
        out.append(row)
    return out


def affine_cartan(kind: str) -> list[list[int]]:
    """Generalized Cartan matrix of ``D4^(1)`` or ``E6^(1)`` from its Dynkin graph."""
    edges = {
        "D4(1)": (5, [(0, 2), (1, 2), (3, 2), (4, 2)]),
        "E6(1)": (7, [(0, 1), (1, 2), (2, 3), (3, 4), (2, 5), (5, 6)]),
    }
    if kind not in edges:
        raise ValueError(f"unknown type {kind}")
    n, graph = edges[kind]
    out = [[2 if i == j else 0 for j in range(n)] for i in range(n)]
    for i, j in graph:
        out[i][j] = out[j][i] = -1
    return out


def same_type(cartan: Sequence[Sequence[int]], reference: Sequence[Sequence[int]]) -> bool:
    """True when the matrices agree up to a relabelling of the nodes."""
    n = len(cartan)
    if len(reference) != n:
        return False
    for perm in itertools.permutations(range(n)):
        if all(cartan[perm[i]][perm[j]] == reference[i][j] for i in range(n) for j in range(n)):
            return True
    return False


def to_json(basis: LatticeBasis, classes: Mapping[str, LatticeClass] | None = None,
            actions: Mapping[str, LatticeAction] | None = None) -> str:
    payload = {
        "basis": list(basis.labels),
        "gram": [list(row) for row in basis.gram],
        "classes": {k: list(v.coeffs) for k, v in (classes or {}).items()},
        "actions": {k: [list(row) for row in v.matrix] for k, v in (actions or {}).items()},
    }
    return json.dumps(payload, indent=2)


def from_json(text: str) -> tuple[LatticeBasis, dict[str, LatticeClass], dict[str, LatticeAction]]:
    data = json.loads(text)
    basis = LatticeBasis(tuple(data["basis"]), tuple(tuple(r) for r in data["gram"]))
    classes = {k: LatticeClass(basis, tuple(v)) for k, v in data.get("classes", {}).items()}
    actions = {}
    for name, rows in data.get("actions", {}).items():
        matrix = tuple(tuple(r) for r in rows)
        n = basis.rank
        build_action([LatticeClass(basis, tuple(matrix[i][j] for i in range(n))) for j in range(n)])
        actions[name] = LatticeAction(basis, matrix)
    return basis, classes, actions


def sum_classes(items: Iterable[LatticeClass]) -> LatticeClass:
    items = list(items)
    total = items[0]
    for c in items[1:]:
        total = total + c
    return total
