"""Shared exception types."""

from __future__ import annotations


class TorstabError(Exception):
    pass


class ZeroVectorError(TorstabError):
    pass


class NotStableError(TorstabError):
    """Raised when an operation requires a stable vector; carries the
    classification certificate of the offending input."""

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class StratifyInternalError(TorstabError):
    """Internal assertion failure of the stratification iteration (empty ray
    slice, non-increasing c_n, vertex face, failed polystability check).
    These indicate an input violating the preconditions, never ignored."""

    def __init__(self, kind, message):
        super().__init__(f"{kind}: {message}")
        self.kind = kind


class ValidationError(TorstabError):
    """Carries the complete list of schema/semantic violations."""

    def __init__(self, errors):
        super().__init__("; ".join(errors))
        self.errors = list(errors)
