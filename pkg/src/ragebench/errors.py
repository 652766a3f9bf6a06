"""Exception hierarchy shared across the harness."""


class RageBenchError(Exception):
    """Base class for all harness errors."""


class ConfigParseError(RageBenchError):
    """Malformed configuration payload; carries the byte offset of the failure."""

    def __init__(self, message: str, offset: int | None = None):
        super().__init__(message)
        self.offset = offset


class ConfigValidationError(RageBenchError):
    """Structurally valid payload that violates a config invariant."""

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field


class IngestError(RageBenchError):
    """Dataset row rejected during load; carries offending row numbers."""

    def __init__(self, message: str, rows: list[int] | None = None):
        super().__init__(message)
        self.rows = rows or []


class EmptyCorpusError(RageBenchError):
    pass


class EmptyEmbeddingError(RageBenchError):
    """Input text produced no tokens to embed."""


class ProviderError(RageBenchError):
    """Transport or contract failure talking to an external provider."""

    def __init__(self, message: str, retries: int = 0):
        super().__init__(message)
        self.retries = retries


class IndexError_(RageBenchError):
    """Vector index contract violation (dimension mismatch, duplicate ids)."""


class UnsupportedOperationError(RageBenchError):
    """Operation not supported by this storage kind."""


class NotFoundError(RageBenchError):
    pass


class UndefinedMetricError(RageBenchError):
    """Metric has no defined value for the given inputs."""


class RecommendationError(RageBenchError):
    pass
