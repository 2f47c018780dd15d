"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class SchlesingerError(Exception):
    """Base class. ``step`` is filled in by orbit drivers when a step fails."""

    step: int | None = None


# fuchsian core
class DuplicatePoles(SchlesingerError):
    pass


class NonSquareResidue(SchlesingerError):
    pass


class NotDiagonalizable(SchlesingerError):
    def __init__(self, pole: int, detail: str = ""):
        self.pole = pole
        super().__init__(f"residue at pole index {pole} is not diagonalizable {detail}".rstrip())


class EvaluationAtPole(SchlesingerError):
    pass


class FuchsViolation(SchlesingerError):
    pass


class RankMismatch(SchlesingerError):
    pass


class InfinityMismatch(SchlesingerError):
    pass


class InvalidPartition(SchlesingerError):
    pass


class SinglePole(SchlesingerError):
    pass


# elementary divisor
class InvalidDivisor(SchlesingerError):
    pass


class EvalAtPole(SchlesingerError):
    pass


class EvalAtZero(SchlesingerError):
    pass


# transformations
class InvalidIndex(SchlesingerError):
    pass


class DegeneratePairing(SchlesingerError):
    pass


class LogOfZeroPairing(SchlesingerError):
    def __init__(self, label: str):
        self.label = label
        super().__init__(f"pairing inside logarithm vanishes at {label}")


class GradientMismatch(SchlesingerError):
    def __init__(self, report):
        self.report = report
        super().__init__(f"generating equations fail: {report.summary()}")


# case studies
class Indeterminacy(SchlesingerError):
    """A base point of a birational map was hit. ``locus`` names the vanishing factor."""

    def __init__(self, locus: str, stage: str | None = None):
        self.locus = locus
        self.stage = stage
        where = f" (stage {stage})" if stage else ""
        super().__init__(f"indeterminacy: {locus} vanishes{where}")


class SingularParameterization(SchlesingerError):
    pass


class FrameMismatch(SchlesingerError):
    pass


class ZeroP(SchlesingerError):
    pass


class BadT(SchlesingerError):
    pass


class AlphaBetaUnsolvable(SchlesingerError):
    pass


class InfinitySpectrumMismatch(SchlesingerError):
    pass


class DegenerateFrame(SchlesingerError):
    pass


class InconsistentEntries(SchlesingerError):
    pass


class DegenerateCross(SchlesingerError):
    pass


# lattice
class BasisMismatch(SchlesingerError):
    pass


class NotIsometry(SchlesingerError):
    pass


class DeltaNotFixed(SchlesingerError):
    pass


class NotTranslation(SchlesingerError):
    pass


class LatticeOverflow(SchlesingerError):
    pass
