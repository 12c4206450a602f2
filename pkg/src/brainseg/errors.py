"""Exception types shared across the package.

Every error carries a stable machine-readable ``code`` (its class name) that the
CLI prints to stderr as ``error[CODE]: message``.
"""


class BrainsegError(Exception):
    """Base class for all package errors."""

    @property
    def code(self) -> str:
        return type(self).__name__


class MissingFile(BrainsegError):
    pass


class UnsupportedFormat(BrainsegError):
    pass


class CorruptHeader(BrainsegError):
    pass


class OutOfRangeLabel(BrainsegError):
    pass


class DuplicateId(BrainsegError):
    pass


class DimensionMismatch(BrainsegError):
    pass


class EmptyDataset(BrainsegError):
    pass


class InsufficientPixels(BrainsegError):
    pass


class InvalidConfig(BrainsegError):
    pass


class InvalidK(InvalidConfig):
    pass


class UnknownClass(BrainsegError):
    pass


class ModelLoadError(BrainsegError):
    pass


class MissingCell(BrainsegError):
    pass


class SegmentationError(BrainsegError):
    pass


class ConvergenceWarning(UserWarning):
    """SMO hit its pass budget before satisfying the KKT tolerance."""
