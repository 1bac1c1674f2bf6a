"""Exception types shared across the package."""


class FingerpaintError(Exception):
    """Base class for all package errors."""


class InvalidFrameError(FingerpaintError):
    """Frame fails dimension or layout sanity checks."""


class EmptyMaskError(FingerpaintError):
    """Operation requires at least one set mask pixel."""


class OutOfFrameError(FingerpaintError):
    """Point lies outside the source frame bounds."""


class UnsupportedFormatError(FingerpaintError):
    """Requested export format is not one of json/svg/png."""


class ConfigError(FingerpaintError):
    """Pipeline configuration is malformed or out of range."""


class HandSpecError(FingerpaintError):
    """Synthetic hand does not fit the requested frame."""
