"""Exception types shared across the pipeline."""


class CfgroundError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(CfgroundError):
    """A value violates a type invariant (bad box, empty text, zero vector, ...)."""


class DimensionError(CfgroundError):
    """Vector or sequence dimensions do not match."""


class InsufficientItems(CfgroundError):
    """Too few items for the requested operation."""


class DegenerateDistribution(CfgroundError):
    """Quantile edges are tied; the distribution cannot support K distinct bins."""


class ParseError(CfgroundError):
    """A line of an input file could not be decoded."""


class DuplicateKeyError(CfgroundError):
    """An input file repeats a key that must be unique."""


class JoinError(CfgroundError):
    """Records from two inputs could not be matched one-to-one."""


class SpanError(CfgroundError):
    """A character span does not fit inside its caption."""


class ProviderError(CfgroundError):
    """The embedding backend failed or violated its protocol."""


class MissingEmbeddingError(CfgroundError):
    """A fixture backend has no vector for the requested text."""


class EmptyCache(CfgroundError):
    """Refusing to write an embedding cache with no entries."""


class IoError(CfgroundError):
    """Reading or writing a cache file failed."""


class EmptyVocabulary(CfgroundError):
    """A vocabulary cannot be built from empty inputs."""


class GenerationError(CfgroundError):
    """Dataset generation aborted; message carries partial progress."""


class MissingPredictionError(CfgroundError):
    """A manifest sample has no prediction record."""


class MissingCategoryBoxes(CfgroundError):
    """No annotated boxes exist for the category a context sample refers to."""


class DegenerateCorrelation(CfgroundError):
    """Correlation is undefined because one variable has zero variance."""
