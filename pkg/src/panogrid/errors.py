"""Exception types shared across the toolkit.

Every error carries a stable ``code`` string so callers embedding the
library (or driving the CLI) can dispatch on the failure class without
parsing human-readable messages.  ``exit_code`` separates bad inputs
(2) from failures that arise during computation (3).
"""

from __future__ import annotations


class PanogridError(Exception):
    """Base class for all toolkit errors."""

    code = "error"
    exit_code = 2


class DomainError(PanogridError):
    """Argument outside the mathematical domain of an operation."""

    code = "domain"


class HemisphereError(DomainError):
    """Point not in the open hemisphere around a projection center."""

    code = "hemisphere"


class DimensionError(PanogridError):
    """Array shape or image dimensions violate a structural requirement."""

    code = "dimension"


class RangeError(PanogridError):
    """Value outside its permitted numeric range."""

    code = "range"


class LayoutError(PanogridError):
    """Grid layout inconsistent with the tiles it is asked to hold."""

    code = "layout"


class CountError(PanogridError):
    """Collection has the wrong number of members."""

    code = "count"


class EmptyInput(PanogridError):
    """Operation received no data."""

    code = "empty"


class InsufficientSamples(PanogridError):
    """Too few samples to estimate the requested statistic."""

    code = "samples"


class CoverageError(PanogridError):
    """Output pixels received no contribution from any source plane."""

    code = "coverage"
    exit_code = 3

    def __init__(self, message: str, uncovered: int = 0):
        super().__init__(message)
        self.uncovered = uncovered


class FormatError(PanogridError):
    """Malformed binary tensor file.  ``offset`` is the failing byte."""

    code = "format"

    def __init__(self, message: str, offset: int = 0):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


class ChecksumError(PanogridError):
    """Payload checksum mismatch in a tensor file."""

    code = "checksum"


class IoError(PanogridError):
    """File could not be read or written."""

    code = "io"


class BackendUnavailable(PanogridError):
    """Optional feature-extraction backend is not installed."""

    code = "backend"
