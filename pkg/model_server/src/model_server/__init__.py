"""HTTP summarizer backend speaking the sliding-window engine's wire protocol.

The package is deliberately independent of the engine: the only contract
between the two is the versioned JSON exchanged over POST /summarize and
the dataset files produced by the engine's convert step.
"""

__version__ = "0.1.0"

PROTOCOL_VERSION = 1


class ModelServerError(Exception):
    """Configuration or data problem the caller can fix."""
