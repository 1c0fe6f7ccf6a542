"""Exception types shared across the toolkit."""

from __future__ import annotations


class WinsummError(Exception):
    """Base class for every error this package raises on purpose."""


class CorpusLoadError(WinsummError):
    """A corpus, chains, dataset, or report file failed parsing or validation."""

    def __init__(self, message: str, *, path=None, line: int | None = None):
        loc = ""
        if path is not None:
            loc = f"{path}:" if line is None else f"{path}:{line}:"
        super().__init__(f"{loc} {message}".strip() if loc else message)
        self.path = path
        self.line = line


class ConfigurationError(WinsummError):
    """A run parameter is unusable for the given data (e.g. window too small)."""


class BackendError(WinsummError):
    """Base class for summarizer-backend failures."""


class BackendTimeout(BackendError):
    """The backend did not answer within the configured timeout."""


class RemoteFailure(BackendError):
    """The remote backend answered with a non-success status or was unreachable."""


class MalformedResponse(BackendError):
    """The remote backend answered with a body the wire protocol does not allow."""
