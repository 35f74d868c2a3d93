"""Exception hierarchy. Each family maps onto one CLI exit code."""


class PPLBError(Exception):
    exit_code = 1


class ConfigError(PPLBError, ValueError):
    """Invalid configuration or arguments, detected before any sieving."""

    exit_code = 2


class InvalidSpecError(ConfigError):
    pass


class RangeError(PPLBError):
    """A request needs primes beyond the sieved range."""

    exit_code = 3


class CoverageError(RangeError):
    """A prime window does not contain the indices an evaluation needs."""


class SumOverflowError(RangeError, OverflowError):
    pass


class CacheFormatError(RangeError):
    pass


class PreconditionError(PPLBError, ValueError):
    exit_code = 2


class SearchExhaustedError(PPLBError):
    exit_code = 4


class CertificationFailedError(PPLBError):
    exit_code = 4

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index
