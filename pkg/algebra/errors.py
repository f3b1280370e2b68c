"""Exception hierarchy shared by every package of the engine."""
from __future__ import annotations

from typing import Iterable, Tuple

__all__ = [
    "SemiSuperError",
    "AlgebraMismatch",
    "NotInvertible",
    "ParityViolation",
    "SignatureMismatch",
    "OddBlockSingular",
    "NoSolution",
    "NonlinearUnknown",
    "MissingMap",
    "NotNice",
    "NotBasePreserving",
    "ParityMismatch",
    "BodyNotZero",
    "FormatSyntaxError",
    "FormatSemanticError",
]


class SemiSuperError(ValueError):
    """Base class; a ``ValueError`` so callers may treat it as bad input."""


class AlgebraMismatch(SemiSuperError):
    """Operands live in Grassmann algebras with different generator counts."""


class NotInvertible(SemiSuperError):
    pass


class ParityViolation(SemiSuperError):
    """A map component does not have the parity of its target coordinate."""


class SignatureMismatch(SemiSuperError):
    pass


class OddBlockSingular(SemiSuperError):
    """The odd-odd Jacobian block has a determinant with zero body."""


class NoSolution(SemiSuperError):
    pass


class NonlinearUnknown(SemiSuperError):
    pass


class MissingMap(SemiSuperError):
    def __init__(self, role: str, key: Tuple[str, ...]):
        self.role = role
        self.key = tuple(key)
        super().__init__(f"missing {role} map for {','.join(self.key)}")


class NotNice(SemiSuperError):
    pass


class NotBasePreserving(SemiSuperError):
    pass


class ParityMismatch(SemiSuperError):
    pass


class BodyNotZero(SemiSuperError):
    pass


class FormatSyntaxError(SemiSuperError):
    """Parse failure with a 1-based position and the set of expected tokens."""

    def __init__(self, line: int, column: int, found: str, expected: Iterable[str]):
        self.line = line
        self.column = column
        self.found = found
        self.expected = tuple(sorted(set(expected)))
        super().__init__(
            f"{line}:{column}: expected {' | '.join(self.expected)}, found {found}"
        )


class FormatSemanticError(SemiSuperError):
    def __init__(self, line: int, column: int, message: str):
        self.line = line
        self.column = column
        self.message = message
        super().__init__(f"{line}:{column}: {message}")
