"""Exception hierarchy shared across the package.

Validation problems (bad input files, bad config, empty documents) and
scorer failures are kept in separate branches so callers can map them to
distinct exit codes / HTTP statuses.
"""

from __future__ import annotations


class ChunkforgeError(Exception):
    """Base class for all package errors."""


class InputError(ChunkforgeError):
    """Malformed input data: bad file contents, mismatched lengths, bad ids."""


class EmptyDocumentError(InputError):
    """Document contains no content sentences."""


class ConfigError(ChunkforgeError):
    """Invalid or inconsistent configuration."""


class DimensionMismatchError(InputError):
    """Vector dimensionality differs from what the index/fusion expects."""


class ScorerError(ChunkforgeError):
    """Base class for boundary-scorer failures."""


class ScorerTransportError(ScorerError):
    """Remote scorer unreachable or the request failed in transit. Retryable."""


class ScorerProtocolError(ScorerError):
    """Remote scorer violated the wire contract (e.g. wrong prob count). Not retryable."""


class CapacityExceededError(ScorerError):
    """Input exceeds the scorer's declared token capacity. Caller bug, hard error."""
