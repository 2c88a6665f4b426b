"""Exception types shared across the package."""


class StegoError(Exception):
    """Base class for all errors raised by this package."""


class FormatError(StegoError):
    """Malformed BMP file, trailer, directory, or token stream."""


class CapacityExceeded(StegoError):
    """Payload does not fit in the container's free LSB slots."""


class KeyMismatch(StegoError):
    """Supplied key does not match the recorded tag or delimiters."""


class DelimiterMismatch(KeyMismatch):
    """In-stream key delimiters did not survive deciphering."""


class StructuralMismatch(StegoError):
    """Structural reuse requested but no identical structural part exists."""


class IndexOutOfRange(StegoError):
    """Requested sink index is not present in the directory."""
