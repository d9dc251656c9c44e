"""Exception types raised across the package."""


class KWError(Exception):
    """Base class for all library errors."""


class InputError(KWError):
    """Bad user input (spec text, expression, arguments)."""


class SpecSyntaxError(InputError):
    def __init__(self, message, line=None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


class ExprSyntaxError(InputError):
    def __init__(self, message, column=None):
        self.column = column
        prefix = f"column {column}: " if column is not None else ""
        super().__init__(prefix + message)


class InvariantViolation(InputError):
    pass


class UnknownLabel(InputError):
    pass


class SpecMismatch(InputError):
    """Operator kind or statistics does not fit the mode table."""


class GridMismatch(InputError):
    pass


class NyquistViolation(InputError):
    pass


class MixedParity(KWError):
    pass


class DimensionCap(KWError):
    pass


class TruncationError(KWError):
    pass


class TieAtEqualTime(KWError):
    pass


class DegreeCap(KWError):
    pass


class OrderCap(KWError):
    pass


class OverlappingPairs(KWError):
    pass
