"""
Error types for the Pythagorean Weibull toolkit.

Every error derives from ValueError so that pydantic validators and callers
that already catch ValueError keep working. Errors with extra attributes
define __reduce__ so the attributes survive the process pool.
"""
from typing import Optional


class PythagoreanError(ValueError):
    """Base class for all toolkit errors."""


class DomainError(PythagoreanError):
    """A numeric argument lies outside the domain of the operation."""


class MismatchedParametersError(PythagoreanError):
    """Scored and allowed distributions disagree on beta or gamma."""


class BinIndexError(PythagoreanError):
    """A bin index or score does not belong to the scheme."""


class HistogramMismatchError(PythagoreanError):
    """Two histograms do not share a scheme or a total."""


class DegenerateModelError(PythagoreanError):
    """The model assigns zero mass to a bin that needs positive mass."""

    def __init__(self, message: str, bin_index: Optional[int] = None):
        super().__init__(message)
        self.bin_index = bin_index

    def __reduce__(self):
        return self.__class__, (self.args[0], self.bin_index)


class FitFailedError(PythagoreanError):
    """A fit did not converge, or an unconverged fit was used."""

    def __init__(self, message: str, team: Optional[str] = None):
        super().__init__(message)
        self.team = team

    def __reduce__(self):
        return self.__class__, (self.args[0], self.team)


class StructuralZeroError(PythagoreanError):
    """An observation landed on a structurally zero cell."""

    def __init__(self, message: str, row: int, col: int):
        super().__init__(message)
        self.row = row
        self.col = col

    def __reduce__(self):
        return self.__class__, (self.args[0], self.row, self.col)


class EmptyMarginError(PythagoreanError):
    """A contingency-table row or column has no observations."""


class IPFConvergenceError(PythagoreanError):
    """Iterative proportional fitting did not reach its tolerance."""

    def __init__(self, message: str, residual: float, iterations: int):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations

    def __reduce__(self):
        return self.__class__, (self.args[0], self.residual, self.iterations)


class GameLogError(PythagoreanError):
    """A game-log file could not be parsed."""

    def __init__(self, message: str, line: Optional[int] = None):
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)
        self.line = line


class ArchiveError(PythagoreanError):
    """Base class for result-archive problems."""


class ArchiveCorruptError(ArchiveError):
    """The archive file is truncated or not a valid archive document."""


class ArchiveVersionError(ArchiveError):
    """The archive was written with an unsupported format version."""
