"""Exception types shared across the package."""


class RangelabError(Exception):
    """Base class for package errors."""


class InvalidKeyError(RangelabError, ValueError):
    """A key is NaN or infinite and cannot be order-mapped."""


class EmptyInputError(RangelabError, ValueError):
    """An operation that needs at least one element got none."""


class UnsortedInputError(RangelabError, ValueError):
    """Keys fed to a single-pass build were not in ascending order."""


class InvalidBoxError(RangelabError, ValueError):
    """A rectangle has min > max on some axis or a non-finite corner."""


class ParseError(RangelabError, ValueError):
    """A dataset or workload file is malformed."""


class ChecksumMismatchError(RangelabError):
    """Result checksums disagree across modes that must return identical rows."""
