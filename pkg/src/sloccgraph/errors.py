"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class SloccGraphError(Exception):
    """Base class for all errors raised by sloccgraph."""


class DimensionError(SloccGraphError, ValueError):
    """Operand sizes (qubit counts, vector lengths) do not agree."""


class CapacityError(SloccGraphError):
    """A request exceeds a configured size limit (dense limit, enumeration cap)."""


class GraphParseError(SloccGraphError, ValueError):
    """Malformed graph description; ``position`` locates the offending input."""

    def __init__(self, message: str, position: int | None = None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class FormatError(SloccGraphError, ValueError):
    """Malformed state, operator or certificate file."""


class SingularOperatorError(SloccGraphError, ValueError):
    """A local 2x2 matrix is (numerically) singular; ``site`` names it."""

    def __init__(self, message: str, site: int | None = None):
        self.site = site
        super().__init__(message)


class ReconstructionError(SloccGraphError):
    """A transformed Z block is defective, so the local operator cannot be rebuilt."""

    def __init__(self, message: str, site: int | None = None):
        self.site = site
        super().__init__(message)


class FactorizationError(SloccGraphError):
    """A dense operator failed to factor into single-site matrices."""
