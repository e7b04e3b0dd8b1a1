"""Exception hierarchy shared by all jordanlab modules."""


class JordanLabError(Exception):
    """Base class for domain errors raised by the toolkit."""


class InvalidColorGraph(JordanLabError):
    """The cell matrix does not describe a valid color graph."""


class DimensionMismatch(JordanLabError):
    """Two matrices of different order were combined."""


class OverflowRisk(JordanLabError):
    """An integer product could exceed the 64-bit range."""


class PreconditionError(JordanLabError):
    """An operation was called on an input that violates its precondition."""


class NotAJordanScheme(PreconditionError):
    """Raised by properness tests when the input is not a Jordan scheme."""


class NotCoherent(PreconditionError):
    """Raised when a coherent configuration was required."""


class SearchGuard(JordanLabError):
    """A combinatorial search would exceed its configured size guard."""


class TableError(JordanLabError):
    """A rank-2l scheme failed the cyclic multiplication-table check."""


class ParseError(JordanLabError):
    """A color graph file could not be parsed."""

    def __init__(self, message, line=None, column=None):
        self.message = message
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)
