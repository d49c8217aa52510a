"""
Domain exceptions.

Every error raised by the numerical core derives from QMacroError and carries
the process exit code the management commands report for it.
"""

from utils.enums import ExitCode


class QMacroError(Exception):
    exit_code = ExitCode.BAD_INPUT

    def __init__(self, message: str = "", **context):
        super().__init__(message)
        self.message = message
        self.context = context


class DimensionError(QMacroError):
    """Operands disagree on d, N or matrix shape."""


class DomainError(QMacroError):
    """An argument lies outside the domain of the operation."""


class NoInverseError(DomainError):
    pass


class UnsupportedDimensionError(DomainError):
    pass


class SingularFiducialError(QMacroError):
    """A fiducial matrix element vanishes, so the dual kernel does not exist."""


class MissingPointsError(QMacroError):
    pass


class EmptyClassError(QMacroError):
    """The weight vector is not realized by any (alpha, beta) pair."""


class IncompleteDataError(QMacroError):
    pass


class FitError(QMacroError):
    pass


class UndefinedEstimateError(QMacroError):
    pass


class CapacityError(QMacroError):
    exit_code = ExitCode.CAPACITY


class UsageError(QMacroError):
    exit_code = ExitCode.USAGE
