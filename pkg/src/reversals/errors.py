"""Exception hierarchy shared by every module in the package."""


class ReversalError(Exception):
    """Base class for all errors raised by :mod:`reversals`."""


class InputError(ReversalError):
    """Problems with the caller's input (bad files, labels, shapes)."""


class DegenerateDataError(ReversalError):
    """The data are valid but the requested quantity is undefined for them."""


class DimensionMismatch(InputError):
    pass


class ParseError(InputError):
    def __init__(self, message, row=None, column=None):
        self.row = row
        self.column = column
        where = []
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column!r}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)


class EmptyFile(InputError):
    pass


class SubsetCeilingExceeded(InputError):
    pass


class RankDeficient(DegenerateDataError):
    pass


class ZeroVariance(DegenerateDataError):
    def __init__(self, label=None, message=None):
        self.label = label
        if message is None:
            message = "column has zero variance" if label is None else f"column {label!r} has zero variance"
        super().__init__(message)


class DegenerateBaseline(DegenerateDataError):
    """The unadjusted association is (numerically) zero, so its sign is undefined."""


class DomainError(DegenerateDataError, ValueError):
    pass


class EmptyCell(DegenerateDataError):
    pass
