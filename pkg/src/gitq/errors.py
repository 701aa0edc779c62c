"""Exception types shared across the analysis engine."""

from __future__ import annotations


class GitqError(Exception):
    """Base class for every error raised by this package."""


# --- repository acquisition ---

class InvalidLocator(GitqError):
    """The repository locator is neither a valid URL nor a usable local path."""


class CloneFailed(GitqError):
    """The remote could not be cloned or queried; carries the remote message."""


class NotARepository(GitqError):
    """A local path exists but does not contain git metadata."""


class EmptyRepository(GitqError):
    """The repository has no commits, so there is no head to analyze."""


class DisposeFailed(GitqError):
    """Workspace removal was blocked; deletion is deferred or must be retried."""


# --- source model ---

class ParseError(GitqError):
    """A source file could not be parsed; the file is skipped, not fatal."""


class ModelError(GitqError):
    """The corpus is structurally invalid (e.g. an inheritance cycle)."""


class UnknownClass(GitqError):
    """A qualified class name is not present in the corpus."""


# --- history metrics ---

class EmptyLog(GitqError):
    """A history computation was asked to run over zero commits."""


class DegenerateSnapshot(GitqError):
    """The head tree has no files or no lines, so impact ratios are undefined."""


# --- issue metrics ---

class RateLimited(GitqError):
    """The issue API refused the request; retry after ``retry_after`` seconds."""

    def __init__(self, message: str, retry_after: float | None = None):
        super().__init__(message)
        self.retry_after = retry_after


class AuthFailed(GitqError):
    """The issue API rejected the supplied credentials."""


class UnsupportedHost(GitqError):
    """The repository host has no supported issue API; fall back to a snapshot."""


class NetworkError(GitqError):
    """Transport-level failure while talking to the issue API."""


class SnapshotFormatError(GitqError):
    """An offline issue snapshot file is malformed."""


# --- badges ---

class UnknownMetric(GitqError):
    """A metric id is not in the badge registry."""


# --- pipeline / cache ---

class CacheCorrupt(GitqError):
    """A cache entry failed its integrity check."""


class StorageFull(GitqError):
    """The cache device is full and eviction did not free enough space."""
