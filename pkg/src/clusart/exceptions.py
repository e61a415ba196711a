"""Exception hierarchy shared by every pipeline stage."""


class ClusartError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(ClusartError, ValueError):
    """A parameter is outside its valid range."""


class DomainError(ClusartError, ValueError):
    """An input vector violates a numeric precondition."""


class EmptyCorpusError(ClusartError):
    pass


class EmptyVocabularyError(ClusartError):
    pass


class DegenerateVocabularyError(ClusartError):
    """Fewer than two distinct words are available for a Huffman tree."""


class InferenceError(ClusartError):
    """A document has no in-vocabulary tokens and cannot be embedded."""
