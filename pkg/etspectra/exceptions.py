# -*- coding: utf-8 -*-
"""Errors raised by et-spectra.

Every error's class name doubles as its machine-readable name on the CLI
error stream. ``ValidationError`` subclasses mean the request was rejected
before any numerical work; ``NumericalFailure`` subclasses mean the work ran
and did not produce a trustworthy result.
"""

__all__ = [
    "EtSpectraError",
    "ValidationError",
    "NumericalFailure",
    "UsageError",
    "UnknownModel",
    "InvalidParameter",
    "NonPositiveBias",
    "InvalidModel",
    "UnsupportedModel",
    "EmptyGrid",
    "NonMonotoneGrid",
    "DomainViolation",
    "InvalidGrid",
    "TooManyLevels",
    "NoBoundState",
    "LevelNotSupported",
    "RootNotBracketed",
    "NoConvergence",
    "SingularPotentialOnGrid",
    "EigensolverFailure",
    "QuadratureFailure",
    "MinimizerNotBracketed",
    "GridTooNarrow",
]


class EtSpectraError(Exception):
    exit_code = 1

    @property
    def name(self) -> str:
        return type(self).__name__


class ValidationError(EtSpectraError):
    exit_code = 2


class NumericalFailure(EtSpectraError):
    exit_code = 3


class UsageError(ValidationError):
    pass


class UnknownModel(ValidationError):
    pass


class InvalidParameter(ValidationError):
    pass


class NonPositiveBias(InvalidParameter):
    pass


class InvalidModel(ValidationError):
    pass


class UnsupportedModel(ValidationError):
    pass


class EmptyGrid(ValidationError):
    pass


class NonMonotoneGrid(ValidationError):
    pass


class DomainViolation(ValidationError):
    pass


class InvalidGrid(ValidationError):
    pass


class TooManyLevels(ValidationError):
    pass


class NoBoundState(ValidationError):
    def __init__(self, n: int, message: str = None):
        self.n = n
        super().__init__(message or "Level {} is not bound".format(n))


class LevelNotSupported(ValidationError):
    pass


class RootNotBracketed(NumericalFailure):
    pass


class NoConvergence(NumericalFailure):
    def __init__(self, iterations: int, message: str = None):
        self.iterations = iterations
        super().__init__(
            message or "No convergence after {} iterations".format(iterations)
        )


class SingularPotentialOnGrid(NumericalFailure):
    pass


class EigensolverFailure(NumericalFailure):
    pass


class QuadratureFailure(NumericalFailure):
    pass


class MinimizerNotBracketed(NumericalFailure):
    pass


class GridTooNarrow(NumericalFailure):
    pass
