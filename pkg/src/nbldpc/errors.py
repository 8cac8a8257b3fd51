"""Exception types raised across the package."""


class NbLdpcError(Exception):
    """Base class for all package errors."""


class ZeroInverse(NbLdpcError, ZeroDivisionError):
    pass


class ZeroCoefficient(NbLdpcError, ValueError):
    pass


class OutOfDomain(NbLdpcError, ValueError):
    pass


class ShapeMismatch(NbLdpcError, ValueError):
    pass


class DegreeMismatch(NbLdpcError, ValueError):
    pass


class InfeasibleDegrees(NbLdpcError, ValueError):
    """No edge placement satisfies the requested degree/capacity constraints."""


class RankDeficient(NbLdpcError, ValueError):
    """The check matrix has rank below its row count; rebuild with another seed."""


class ParseError(NbLdpcError, ValueError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)


class ChecksumMismatch(NbLdpcError, ValueError):
    pass
