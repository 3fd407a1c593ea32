"""Exception hierarchy for the toolkit.

Every error raised on a data or configuration path derives from
:class:`LexComplexError`. The CLI maps configuration problems (bad flags,
missing resources, bad config keys) to exit code 2 and everything else to
exit code 1.
"""


class LexComplexError(Exception):
    """Base class for all toolkit errors."""


class DataFormatError(LexComplexError):
    """Malformed file content (bad header, wrong column count, bad number)."""


class ScoreRangeError(LexComplexError):
    """A score or complexity value outside [0, 1], or non-finite."""


class DuplicateIdError(LexComplexError):
    """The same instance id appears more than once."""


class UnknownCorpusError(LexComplexError):
    """Corpus tag outside the fixed vocabulary {bible, europarl, biomed}."""


class AlignmentError(LexComplexError):
    """A prediction set does not cover exactly the gold id set."""


class UnlabeledDatasetError(LexComplexError):
    """Gold labels required but absent."""


class InputError(LexComplexError, ValueError):
    """Invalid direct input to an operation (empty target, shape mismatch,
    non-finite values)."""


class DegenerateInputError(InputError):
    """Statistically degenerate input, e.g. zero variance in a Pearson
    correlation argument."""


class ResourceError(LexComplexError):
    """A feature resource (frequency table, embeddings, scorer) is missing
    or unusable for the requested feature set. CLI exit code 2."""


class ConfigError(LexComplexError):
    """Bad configuration file or manifest: unknown key, duplicate entry,
    unreadable path. CLI exit code 2."""


class SidecarLookupError(LexComplexError, LookupError):
    """A sidecar probability file has no entry for a queried
    (instance id, token position) key."""


class ModelIOError(LexComplexError):
    """A serialized model file is truncated, malformed, or has an
    unsupported version tag."""


class UnknownModelError(LexComplexError):
    """An ensemble member name is not present in the prediction matrix."""


class SearchSizeError(LexComplexError):
    """Exhaustive subset search requested over more models than the
    configured cap allows."""
