"""
Errors

Exception hierarchy for specification, circuit, permutation, feasibility
and file-format failures. The CLI maps each family to an exit code.
"""


class SparsePrepError(Exception):
    """Base class for every error raised by this package."""


class InvariantViolation(SparsePrepError):
    """An internal construction invariant broke (a bug, not bad input)."""


# Specification errors

class SpecError(SparsePrepError):
    pass


class DuplicateBasis(SpecError):
    pass


class NotNormalized(SpecError):
    pass


class BadWidth(SpecError):
    pass


class BadBlockSize(SpecError):
    pass


class DomainError(SpecError):
    pass


# Circuit errors

class CircuitError(SparsePrepError):
    pass


class WidthMismatch(CircuitError):
    pass


class WidthTooLarge(CircuitError):
    pass


class OverlappingQubits(CircuitError):
    pass


class NotUnitary(CircuitError):
    pass


class NotClassical(CircuitError):
    pass


# Permutation errors

class PermutationError(SparsePrepError):
    pass


class NotPowerOfTwo(PermutationError):
    pass


class NotDisjoint(PermutationError):
    pass


class BatchTooLarge(PermutationError):
    pass


class NoSparePoints(PermutationError):
    pass


# Feasibility

class FeasibilityError(SparsePrepError):
    pass


class TooFewAncillas(FeasibilityError):
    pass


# Files

class FormatError(SparsePrepError):
    """A state or circuit file could not be parsed."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
