"""Exception hierarchy shared by all pipeline stages."""


class SeisalError(Exception):
    """Base class for every error raised by this package."""


class DimensionTooSmallError(SeisalError, ValueError):
    pass


class OverlapViolationError(SeisalError, ValueError):
    pass


class BoundsError(SeisalError, IndexError):
    pass


class DimsMismatchError(SeisalError, ValueError):
    pass


class VolumeFormatError(SeisalError, ValueError):
    pass


class SegyError(SeisalError, ValueError):
    """Malformed or unsupported SEG-Y input."""


class TruncatedStreamError(SegyError):
    pass


class UnsupportedFormatError(SegyError):
    pass


class IncompleteGridError(SegyError):
    pass


class DuplicateTraceError(SegyError):
    pass


class UnsupportedSizeError(SeisalError, ValueError):
    pass


class ConfigError(SeisalError, ValueError):
    pass
