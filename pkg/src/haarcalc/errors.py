"""Exception hierarchy shared by every haarcalc module."""


class HaarcalcError(Exception):
    """Base class for all library errors."""


class DomainError(HaarcalcError, ValueError):
    """An argument lies outside the domain of an operation."""


class BaseMismatchError(HaarcalcError, TypeError):
    """Operands live over different bases or different groups."""


class UnsupportedError(HaarcalcError, ValueError):
    """The request is well-formed but outside what the catalog can model,
    e.g. asking for a compact open subgroup of a real line."""


class InvariantError(HaarcalcError, AssertionError):
    """An internal invariant failed. Never expected; surfaced loudly."""


class GuardError(HaarcalcError, ValueError):
    """An enumeration guard (size cap) was exceeded."""


class ParseError(HaarcalcError, ValueError):
    def __init__(self, message: str, position: int | None = None, text: str | None = None):
        self.position = position
        self.text = text
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
