"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class BundleSingError(Exception):
    """Base class for all errors raised by bundlesing."""


class ParseError(BundleSingError):
    """Malformed formula. ``position`` is the 0-based offset into the source text."""

    def __init__(self, message: str, position: int, text: str = ""):
        self.message = message
        self.position = position
        self.text = text
        super().__init__(f"{message} (at position {position})")


class DomainError(BundleSingError, ArithmeticError):
    """An operation was evaluated outside its domain (log of x <= 0, 1/0, ...)."""


class JetOrderError(BundleSingError, ValueError):
    """Jet orders or variable counts do not match, or the order budget was exceeded."""


class FrameDegenerateError(BundleSingError):
    """The frame vectors are linearly dependent at the evaluation point."""


class RankZeroError(BundleSingError):
    """The homomorphism has corank >= 2 at the point (no null section exists)."""


class NotOnSingularSetError(BundleSingError):
    """A singular-point operation was called at a point off S = {lambda = 0}."""


class ConvergenceError(BundleSingError):
    """A Newton-type iteration failed to converge."""


class DegenerateError(BundleSingError):
    """A gradient or Jacobian needed by an iteration vanished."""


class PreconditionError(BundleSingError, ValueError):
    """An operation's documented precondition does not hold for the given input."""


class ConfigError(BundleSingError):
    """Invalid scene configuration (unknown key, wrong type, bad preset, ...)."""
