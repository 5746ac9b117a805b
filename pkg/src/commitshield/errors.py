"""Exception hierarchy shared across the pipeline stages."""
from __future__ import annotations


class CommitShieldError(Exception):
    """Base class for all errors raised by this package."""


class MalformedSha(CommitShieldError):
    pass


class MalformedSlug(CommitShieldError):
    pass


class MalformedUrl(CommitShieldError):
    pass


class MalformedDiff(CommitShieldError):
    """Unified diff text that cannot be parsed; carries the byte offset."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


class NotFound(CommitShieldError):
    pass


class RateLimited(CommitShieldError):
    def __init__(self, message: str, retry_after: float | None = None):
        super().__init__(message)
        self.retry_after = retry_after


class OfflineMiss(CommitShieldError):
    """Offline mode requested a resource that is not in the cache."""


class PatchTooLarge(CommitShieldError):
    """The forge omitted the diff body for a changed file."""


class NetworkAttempted(CommitShieldError):
    """Raised by test transports when a network call escapes offline mode."""


class CloneFailed(CommitShieldError):
    pass


class DiskFull(CommitShieldError):
    pass


class UnknownCommit(CommitShieldError):
    pass


class RootCommit(CommitShieldError):
    """The commit has no parent."""


class PathAbsentAtRevision(CommitShieldError):
    pass


class RangeOutOfBounds(CommitShieldError):
    pass


class ParseFailed(CommitShieldError):
    """Source analysis could not build a usable structure for a file."""


class NameNotFound(CommitShieldError):
    pass


class BudgetImpossible(CommitShieldError):
    """Non-truncatable prompt sections alone exceed the token budget."""


class Unparseable(CommitShieldError):
    """Backend response did not contain the required JSON object."""


class StageFailed(CommitShieldError):
    def __init__(self, stage: str, cause: Exception | str):
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage
        self.cause = cause


class SchemaError(CommitShieldError):
    def __init__(self, message: str, lineno: int | None = None):
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
        self.lineno = lineno


class MissingPrediction(CommitShieldError):
    pass


class MissingReport(CommitShieldError):
    pass


class ConfigError(CommitShieldError):
    """Invalid or inconsistent configuration."""
