"""Exception hierarchy shared by every mcpc module.

The CLI maps these onto exit codes: argument errors exit 1, data and format
errors exit 2, integrity errors exit 3.
"""


class McpcError(Exception):
    """Base class for all library errors."""


class ArgumentError(McpcError, ValueError):
    """An argument is outside its documented domain."""


class ShapeError(McpcError, ValueError):
    """Two fields (or a field and an operator) disagree on dimensions."""


class DataError(McpcError, ValueError):
    """Input data violates a content precondition, e.g. a non-finite value."""


class FormatError(McpcError):
    """A file or payload is malformed or truncated."""


class IntegrityError(FormatError):
    """A checksum did not match the bytes it covers."""


class SequencingError(McpcError):
    """Components were supplied out of order or are missing."""


class RangeError(McpcError, ValueError):
    """A scalar lies outside the representable range of the target precision."""
