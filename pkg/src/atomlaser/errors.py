"""Exception hierarchy.

Every error raised on purpose by the toolkit derives from ``AtomLaserError``
so callers (the CLI in particular) can map failures onto exit codes.
"""


class AtomLaserError(Exception):
    """Base class for all toolkit errors."""

    exit_code = 1


class InvalidDimension(AtomLaserError, ValueError):
    pass


class DimensionMismatch(AtomLaserError, ValueError):
    pass


class TruncationTooSmall(AtomLaserError):
    """Probability mass leaks past the top number state."""

    exit_code = 3


class NotInvertible(AtomLaserError, ValueError):
    pass


class NotHermitian(AtomLaserError, ValueError):
    pass


class InvalidState(AtomLaserError, ValueError):
    pass


class MissingParameter(AtomLaserError, ValueError):
    pass


class TooLarge(AtomLaserError):
    exit_code = 3


class SolverFailure(AtomLaserError):
    exit_code = 4


class NonUniqueSteadyState(SolverFailure):
    pass


class StiffnessFailure(SolverFailure):
    pass


class BudgetExceeded(SolverFailure):
    pass


class NoConvergence(SolverFailure):
    pass


class UndefinedNormalization(AtomLaserError, ValueError):
    pass


class StepTooCoarse(AtomLaserError, ValueError):
    pass


class IncompleteDescriptor(AtomLaserError, ValueError):
    pass


class NotApplicable(AtomLaserError, ValueError):
    pass


class IncompleteInput(AtomLaserError):
    """Raised by the criteria gate; ``report`` holds whatever could be evaluated."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class ConfigInvalid(AtomLaserError, ValueError):
    exit_code = 2
