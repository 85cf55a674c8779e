"""Exception hierarchy shared across the package."""


class PrevisionError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(PrevisionError):
    """Malformed input text.

    ``position`` is a 0-based character offset into the parsed string;
    ``line`` and ``column`` are 1-based and filled in by the document
    reader when the string came from a file.
    """

    def __init__(self, message: str, position: int, line: int | None = None,
                 column: int | None = None):
        super().__init__(message)
        self.message = message
        self.position = position
        self.line = line
        self.column = column

    def __str__(self) -> str:
        if self.line is not None:
            return f"line {self.line}, column {self.column}: {self.message}"
        return f"column {self.position + 1}: {self.message}"


class DomainError(PrevisionError):
    """A precondition on the mathematical objects was violated."""


class UnresolvedParameterError(DomainError):
    """A value expression refers to a prevision that the family does not assess."""

    def __init__(self, message: str, keys=()):
        super().__init__(message)
        self.keys = tuple(keys)


class IncoherentPremisesError(DomainError):
    """An operation that requires a coherent base assessment received an incoherent one."""


class EngineError(PrevisionError):
    """An internal consistency check of the coherence engine failed."""
