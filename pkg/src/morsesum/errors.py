"""Exception hierarchy.

Every error carries the name of the module that raised it so the CLI can
report provenance and pick an exit code.
"""
from __future__ import annotations


class MorseSumError(Exception):
    module = "morsesum"
    exit_code = 6

    def __init__(self, message: str = "", **details):
        super().__init__(message)
        self.details = details


# cellcomplex
class ComplexError(MorseSumError):
    module = "cellcomplex"
    exit_code = 3


class DanglingFace(ComplexError):
    pass


class SignError(ComplexError):
    pass


class DuplicateCell(ComplexError):
    pass


class UnknownCell(ComplexError):
    pass


class NonOrientable(ComplexError):
    pass


class NotAnEdge(ComplexError):
    pass


class ChordEndpointsInvalid(ComplexError):
    pass


class BoundaryMismatch(ComplexError):
    pass


class SubdivisionError(ComplexError):
    pass


# homology
class HomologyError(MorseSumError):
    module = "homology"


class NotACycle(HomologyError):
    pass


# morse
class MorseError(MorseSumError):
    module = "morse"
    exit_code = 3


class InvalidField(MorseError):
    pass


class InvalidFunction(MorseError):
    pass


class CyclicField(MorseError):
    pass


class NoPath(MorseError):
    pass


class MultiplePaths(MorseError):
    pass


class NotPerfect(MorseError):
    pass


# grouping
class GroupingError(MorseSumError):
    module = "grouping"


class PathNotUnique(GroupingError):
    pass


class NotATorus(GroupingError):
    pass


class NotSeparable(GroupingError):
    exit_code = 4


class AmbiguousGrouping(GroupingError):
    exit_code = 4


# separation
class SeparationError(MorseSumError):
    module = "separation"


class PreconditionFailed(SeparationError):
    pass


class PairingConflict(SeparationError):
    pass


class RepairLoopLimit(SeparationError):
    exit_code = 5


class DisconnectedBoundary(SeparationError):
    pass


class ChiNotTwo(SeparationError):
    pass


# splitting
class SplittingError(MorseSumError):
    module = "splitting"


class NotASphere(SplittingError):
    pass


class NoCollapse(SplittingError):
    pass


class BoundaryCriticalCell(SplittingError):
    pass


class InwardArrow(SplittingError):
    pass


# fixtures
class FixtureError(MorseSumError):
    module = "fixtures"


class GluingObstructed(FixtureError):
    pass


class SearchExhausted(FixtureError):
    pass


# io
class ParseError(MorseSumError):
    module = "io"
    exit_code = 2

    def __init__(self, message: str = "", line: int | None = None, **details):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message, line=line, **details)
        self.line = line
