"""Exception hierarchy shared by all modules."""


class DSICheckError(Exception):
    """Base class for every error raised by this package."""


class ConstraintViolation(DSICheckError, ValueError):
    pass


class UnknownFamily(DSICheckError, KeyError):
    def __str__(self) -> str:  # KeyError quotes its argument otherwise
        return str(self.args[0]) if self.args else ""


class OutOfDomain(DSICheckError, ValueError):
    pass


class PoleEncountered(DSICheckError, ArithmeticError):
    pass


class NotFlat(DSICheckError):
    """V - V_minus is not constant: a formula transcription problem."""


class GridTooCoarse(DSICheckError, ValueError):
    pass


class ExplicitHbarModel(DSICheckError):
    """The ħ-power reductions only apply to ħ-independent superpotentials."""


class WrongModel(DSICheckError, ValueError):
    pass


class DivergentSeries(DSICheckError, ArithmeticError):
    pass


class LevelOutOfRange(DSICheckError, ValueError):
    pass


class TableMismatch(DSICheckError):
    """Closed-form energy disagrees with the g-difference form."""

    def __init__(self, message: str, *, model: str, n: int, g_difference: float, closed_form: float):
        super().__init__(message)
        self.model = model
        self.n = n
        self.g_difference = g_difference
        self.closed_form = closed_form


class TruncationUnsafe(DSICheckError):
    pass


class NonConvergent(DSICheckError):
    pass


class NonNormalizable(DSICheckError):
    pass


class ConfigError(DSICheckError, ValueError):
    pass


class ReportIOError(DSICheckError, OSError):
    pass
