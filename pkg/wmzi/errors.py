"""Exception hierarchy shared by every wmzi module.

ValidationError means the input was wrong (exit code 2), PhysicsError means the
input was fine but the requested quantity does not exist (exit code 3).
"""
from __future__ import annotations

from typing import Optional


class WmziError(Exception):
    exit_code = 1


class ValidationError(WmziError, ValueError):
    exit_code = 2


class PhysicsError(WmziError):
    exit_code = 3


class ConfigError(ValidationError):
    pass


# interferometer model


class LayoutSyntaxError(ValidationError):
    def __init__(self, message: str, line: int, column: int = 1):
        self.message = message
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}")


class CycleError(ValidationError):
    pass


class DanglingEdgeError(ValidationError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DuplicateLabelError(ValidationError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NoSourceError(ValidationError):
    pass


class TopologyError(ValidationError):
    pass


class InvalidPathError(ValidationError):
    pass


# epsilon expansion


class UnknownMirrorSymbolError(ValidationError):
    pass


class OrderMismatchError(ValidationError):
    pass


class OrderOutOfRangeError(ValidationError):
    pass


class MissingAssignmentError(ValidationError):
    pass


# two-state vectors


class UnknownDetectorError(ValidationError):
    pass


class IncompleteCutError(ValidationError):
    pass


class ZeroOverlapError(PhysicsError):
    pass


# pointers and spectra


class ZeroNormError(PhysicsError):
    pass


class DarkPortZeroNormError(ZeroNormError):
    pass


class NegativePhotonNumberError(ValidationError):
    pass


class NyquistError(ValidationError):
    pass


class OscillationConfigError(ValidationError):
    pass


class EmptySignalError(ValidationError):
    pass


# propagators


class NonPositiveTimeError(ValidationError):
    pass


class UnorderedEventsError(ValidationError):
    pass


class PotentialError(ValidationError):
    pass


class QuadratureNonconvergenceError(PhysicsError):
    pass


class GridResolutionError(ValidationError):
    pass
