"""Exception hierarchy.

Two families matter to callers: :class:`ETRSyntaxError` (malformed input
text, scheme or data files) and :class:`SemanticError` (well-formed input
that does not type-check against the catalog or violates an operation's
precondition). The CLI maps them to distinct exit codes.
"""

from __future__ import annotations


class ETRError(Exception):
    """Base class for every error raised by this package."""


class SemanticError(ETRError):
    pass


class ETRSyntaxError(ETRError):
    """Malformed query text; carries the 0-based character offset."""

    def __init__(self, message: str, text: str = "", pos: int | None = None):
        self.text = text
        self.pos = pos
        if pos is not None:
            message = f"{message} at position {pos}"
        super().__init__(message)

    def caret(self) -> str:
        if self.pos is None or not self.text:
            return ""
        return f"{self.text}\n{' ' * self.pos}^"


class ParseError(ETRSyntaxError):
    """Malformed scheme or data file."""


# core

class NotSummable(SemanticError):
    def __init__(self, index, left, right):
        self.index, self.left, self.right = index, left, right
        super().__init__(f"not summable at index {index!r}: {left!r} != {right!r}")


class ComposeKeyMissing(SemanticError):
    def __init__(self, key):
        self.key = key
        super().__init__(f"composition undefined: {key!r} is not a key of the outer map")


class UnknownLiteral(SemanticError):
    def __init__(self, literal):
        self.literal = literal
        super().__init__(f"literal {literal!r} belongs to no registered domain")


class UnknownDomain(SemanticError):
    def __init__(self, domain):
        self.domain = domain
        super().__init__(f"unknown domain {domain!r}")


class OverlappingDomains(SemanticError):
    def __init__(self, literal, first, second):
        self.literal = literal
        super().__init__(f"literal {literal!r} occurs in both {first!r} and {second!r}")


class EmptyDomain(SemanticError):
    pass


# relation

class SignatureMismatch(SemanticError):
    pass


class IncompatiblePattern(SemanticError):
    pass


class NotBijective(SemanticError):
    pass


class InvalidRelation(SemanticError):
    """A tuple in the extent is not sorted by the signature."""


# logic

class UnboundVariable(SemanticError):
    pass


class UnknownPredicate(SemanticError):
    pass


class UnknownConstant(SemanticError):
    pass


class ArityMismatch(SemanticError):
    pass


# catalog

class UnknownDomainRef(SemanticError):
    pass


class DuplicateRelation(SemanticError):
    pass


class UnknownRelation(SemanticError):
    pass


class HeaderMismatch(SemanticError):
    pass


class ValueOutOfDomain(SemanticError):
    def __init__(self, row: int, column: str, literal: str):
        self.row, self.column, self.literal = row, column, literal
        super().__init__(f"row {row}, column {column!r}: {literal!r} is not in the attribute's domain")


class NonIntegerDomain(SemanticError):
    pass


class MixedDomains(SemanticError):
    pass
