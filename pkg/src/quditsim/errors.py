"""Exception hierarchy shared by the library, CLI and HTTP service.

Every error carries a stable ``code`` (the class name) and an optional JSON
``path`` locating the offending field of a circuit document, so it can be
rendered as a ``{code, message, path}`` object.
"""

from __future__ import annotations


class QuditError(ValueError):
    """Base class for all validation errors raised by quditsim."""

    def __init__(self, message: str, path: str | None = None):
        super().__init__(message)
        self.message = message
        self.path = path

    @property
    def code(self) -> str:
        return type(self).__name__

    def to_dict(self) -> dict:
        return {"code": self.code, "message": self.message, "path": self.path}


class BadDimension(QuditError):
    pass


class WrongLength(QuditError):
    pass


class ZeroVector(QuditError):
    pass


class IndexOutOfRange(QuditError):
    pass


class DimensionMismatch(QuditError):
    pass


class NotSquare(QuditError):
    pass


class NotUnitary(QuditError):
    pass


class SizeMismatch(QuditError):
    pass


class SizeOverflow(QuditError):
    pass


class WireOutOfRange(QuditError):
    pass


class DuplicateWire(QuditError):
    pass


class ControlTargetOverlap(QuditError):
    pass


class BadShotCount(QuditError):
    pass


class AmbiguousMeasurement(QuditError):
    pass


class MalformedJson(QuditError):
    pass


class UnknownGate(QuditError):
    pass


class SchemaViolation(QuditError):
    pass


class NormDrift(RuntimeError):
    """The state vector lost normalization beyond tolerance (internal error)."""
