class UnistoqError(Exception):
    """Base class for errors raised by this package."""


class UnknownTimeError(UnistoqError, KeyError):
    def __init__(self, t, grid=()):
        self.time = t
        self.grid = tuple(grid)
        super().__init__(t)

    def __str__(self):
        return f"time {self.time!r} is not a grid point (grid: {list(self.grid)})"


class DimensionError(UnistoqError, ValueError):
    pass


class UndefinedVariableError(UnistoqError, KeyError):
    pass


class InvalidSystemError(UnistoqError, ValueError):
    def __init__(self, report):
        self.report = report
        super().__init__("; ".join(str(v) for v in report.violations))


class NotDoublyStochasticError(UnistoqError, ValueError):
    pass


class NumericalInvariantError(UnistoqError, ArithmeticError):
    """A quantity that is provably exact (real, normalized, ...) drifted past tolerance."""


class CompletionError(UnistoqError, ArithmeticError):
    """Unitary completion could not find enough orthogonal columns."""


class SizeLimitError(UnistoqError, ValueError):
    pass
