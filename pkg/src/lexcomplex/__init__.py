"""Lexical complexity prediction toolkit.

Parses CompLex-format datasets and external prediction files, extracts
the hand-crafted baseline feature sets, trains a from-scratch
gradient-boosted tree regressor, aggregates model predictions over all
member subsets (sample-wise average or maximum), and evaluates with
Pearson correlation and mean squared error.
"""

from .corpus import (
    Corpus,
    Dataset,
    Instance,
    PredictionMatrix,
    PredictionSet,
    Split,
    Subtask,
    align,
    parse_dataset,
    parse_predictions,
    write_dataset,
    write_predictions,
)
from .ensemble import (
    AggregationMode,
    EnsembleSpec,
    SearchResult,
    aggregate,
    search,
)
from .features import (
    ComplexityFeaturizer,
    EmbeddingTable,
    FrequencyTable,
)
from .gbdt import GbdtRegressor
from .lm import MaskedQuery, SidecarScorer, UnigramScorer
from .metrics import EvalReport, evaluate, mse, pearson

__version__ = "0.1.0"

__all__ = [
    "AggregationMode",
    "ComplexityFeaturizer",
    "Corpus",
    "Dataset",
    "EmbeddingTable",
    "EnsembleSpec",
    "EvalReport",
    "FrequencyTable",
    "GbdtRegressor",
    "Instance",
    "MaskedQuery",
    "PredictionMatrix",
    "PredictionSet",
    "SearchResult",
    "SidecarScorer",
    "Split",
    "Subtask",
    "UnigramScorer",
    "__version__",
    "aggregate",
    "align",
    "evaluate",
    "mse",
    "parse_dataset",
    "parse_predictions",
    "pearson",
    "search",
    "write_dataset",
    "write_predictions",
]
