"""Exception types shared across the package."""

from __future__ import annotations


class InvalidInstance(ValueError):
    """The market description is malformed (bad graph, bad choice function)."""


class ParseError(InvalidInstance):
    """An instance file failed to parse; carries a 1-based line number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class CapExceeded(RuntimeError):
    """An exhaustive computation would exceed its configured size cap."""


class InvariantViolation(RuntimeError):
    """A structural guarantee of the model failed at runtime.

    Raised when a computation detects a state that valid choice functions
    cannot produce (non-unique swap partners, an unstable image of a closed
    function, disagreeing weight criteria, ...).  It almost always means a
    supplied choice function violates the axioms it was assumed to satisfy.
    """
