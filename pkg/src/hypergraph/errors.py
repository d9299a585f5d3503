"""
Error types shared across the toolkit.
"""
from typing import Any, Optional


class OctaError(Exception):
    """Base class for all toolkit errors"""


class ShapeError(OctaError, ValueError):
    """Class sizes are invalid for the requested operation"""


class DomainError(OctaError, ValueError):
    """Arguments fall outside a formula's domain"""


class PreconditionError(OctaError):
    """An operation's documented precondition does not hold"""


class ResourceLimitError(OctaError):
    """An enumeration would exceed a configured budget"""

    def __init__(self, message: str, required: Optional[int] = None, limit: Optional[int] = None):
        super().__init__(message)
        self.required = required
        self.limit = limit


class NotGeneralPositionError(OctaError):
    """A colourful selection is affinely degenerate or has the origin on its boundary"""

    def __init__(self, message: str, selection: Any = None):
        super().__init__(message)
        self.selection = selection


class SamplingBudgetError(OctaError):
    """Random sampling failed to produce a valid configuration"""
