"""Exception hierarchy.

Errors fall in two families so that callers (and the command line tool)
can map them onto exit codes: bad inputs are :class:`InputError`, solver
failures are :class:`NumericalError`.
"""


class ContagionError(Exception):
    """Base class for every error raised by this package."""


class InputError(ContagionError, ValueError):
    """Inputs violate a documented precondition."""


class NumericalError(ContagionError, ArithmeticError):
    """A numerical routine failed on otherwise valid inputs."""


class DimensionMismatch(InputError):
    pass


class NonHollow(InputError):
    pass


class ColumnOverflow(InputError):
    """Interbank liabilities of a bank reach or exceed its total value."""

    def __init__(self, columns, sums, totals):
        self.columns = list(columns)
        super().__init__(
            "column sums reach total value for banks "
            + ", ".join(f"{j} ({s:g} >= {t:g})" for j, s, t in zip(self.columns, sums, totals))
        )


class Insolvent(InputError):
    """Calibration yields a non-positive capital ratio."""

    def __init__(self, banks, ratios):
        self.banks = list(banks)
        super().__init__(
            "non-positive capital ratio for banks "
            + ", ".join(f"{i} ({r:g})" for i, r in zip(self.banks, ratios))
        )


class InfeasibleMarginals(InputError):
    """No hollow nonnegative matrix has the requested row and column sums."""

    def __init__(self, reason, a=None, l=None):
        self.a = a
        self.l = l
        super().__init__(reason)


class ParseError(InputError):
    def __init__(self, line, column, reason):
        self.line = line
        self.column = column
        self.reason = reason
        super().__init__(f"line {line}, column {column!r}: {reason}")


class ValidationError(InputError):
    def __init__(self, bank_id, invariant):
        self.bank_id = bank_id
        self.invariant = invariant
        super().__init__(f"bank {bank_id!r}: {invariant}")


class SingularSystem(NumericalError):
    pass


class NotConverged(NumericalError):
    def __init__(self, residual, iterations):
        self.residual = residual
        self.iterations = iterations
        super().__init__(
            f"no convergence after {iterations} iterations (residual {residual:.3e})"
        )
