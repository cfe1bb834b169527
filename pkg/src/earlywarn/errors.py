from __future__ import annotations


class EarlyWarnError(Exception):
    """Base class for fatal pipeline errors."""


class IngestError(EarlyWarnError):
    pass


class GazetteerError(EarlyWarnError):
    pass


class FetchError(EarlyWarnError):
    def __init__(self, message: str, retryable: bool = True):
        super().__init__(message)
        self.retryable = retryable


class DetectionError(EarlyWarnError):
    pass
