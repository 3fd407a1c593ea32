"""Transformer fine-tuning harness for lexical complexity scoring.

Fine-tunes an encoder with a linear + sigmoid head under MSE loss,
selects the checkpoint with the best validation Pearson correlation, and
emits prediction CSVs and masked-probability sidecars in the core
toolkit's wire formats.
"""

from .config import FineTuneConfig, load_config, write_config
from .data import Row, locate_span, read_rows
from .emit import emit_masked_probabilities, emit_predictions
from .encoders import (
    StubEncoder,
    StubMaskedScorer,
    build_encoder,
    build_masked_scorer,
)
from .trainer import (
    CheckpointRecord,
    ComplexityHead,
    FineTuneResult,
    fine_tune,
    restore,
    select_best,
)

__version__ = "0.1.0"

__all__ = [
    "CheckpointRecord",
    "ComplexityHead",
    "FineTuneConfig",
    "FineTuneResult",
    "Row",
    "StubEncoder",
    "StubMaskedScorer",
    "__version__",
    "build_encoder",
    "build_masked_scorer",
    "emit_masked_probabilities",
    "emit_predictions",
    "fine_tune",
    "load_config",
    "locate_span",
    "read_rows",
    "restore",
    "select_best",
    "write_config",
]
