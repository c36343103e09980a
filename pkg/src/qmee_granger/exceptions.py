"""Exception hierarchy for qmee_granger."""


class GrangerError(Exception):
    """Base class for all package errors."""


class NonFiniteError(GrangerError, ValueError):
    """Input contains NaN or Inf."""


class LengthMismatchError(GrangerError, ValueError):
    pass


class OrderTooLargeError(GrangerError, ValueError):
    """Not enough samples left after lag embedding."""


class InvalidParamsError(GrangerError, ValueError):
    pass


class InvalidSpecError(GrangerError, ValueError):
    pass


class EmptySampleError(GrangerError, ValueError):
    pass


class SingularDesignError(GrangerError, ArithmeticError):
    """Normal-equation matrix not invertible, even after ridge regularization."""


class DivergedError(GrangerError, ArithmeticError):
    """Fixed-point weights became non-finite."""


class BicUndefinedError(GrangerError, ValueError):
    """Literal BIC needs log of a non-positive entropy estimate."""


class DegenerateSeriesError(GrangerError, ValueError):
    """A channel is constant."""


class ReferenceUndefinedError(GrangerError, ZeroDivisionError):
    """Reference causality index is zero, so the variation ratio is undefined."""


class ParseError(GrangerError, ValueError):
    def __init__(self, message, row=None, column=None):
        loc = []
        if row is not None:
            loc.append(f"row {row}")
        if column is not None:
            loc.append(f"column {column}")
        if loc:
            message = f"{message} ({', '.join(loc)})"
        super().__init__(message)
        self.row = row
        self.column = column


class RaggedRowsError(ParseError):
    pass


class NonNumericCellError(ParseError):
    pass


class ReportIOError(GrangerError, OSError):
    pass
