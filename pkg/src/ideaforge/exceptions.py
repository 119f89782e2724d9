"""Exception hierarchy shared across the ideaforge package."""


class IdeaForgeError(Exception):
    """Base class for all ideaforge-specific errors."""


class SchemaViolation(IdeaForgeError):
    """A node or edge does not satisfy the graph schema."""


class UnknownNode(IdeaForgeError, LookupError):
    """A referenced node id does not exist in the graph."""


class CorruptSnapshot(IdeaForgeError):
    """A snapshot file failed version or checksum validation."""


class EmptyIdea(IdeaForgeError, ValueError):
    """The idea text contains no informative tokens."""


class EmptyClaimSet(IdeaForgeError, ValueError):
    """An operation that requires at least one claim found none."""


class BrokenTrace(IdeaForgeError):
    """A draft claim references a node that no longer exists."""


class ProviderUnavailable(IdeaForgeError):
    """The configured embedding provider cannot produce a vector."""


class DimensionMismatch(IdeaForgeError, ValueError):
    """Two vectors with different lengths were compared."""


class ZeroVector(IdeaForgeError, ValueError):
    """Cosine similarity is undefined for an all-zero vector."""
