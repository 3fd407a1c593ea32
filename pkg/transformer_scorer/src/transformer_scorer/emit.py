"""File emission in the core toolkit's wire formats.

Predictions: CSV ``id,score``; masked probabilities: CSV
``id,position,token,probability`` with one row per (instance id, span
position), masking one span token at a time. Floats serialize with the
shortest round-trip representation, so the core parser reads back the
exact values and re-serializes byte-identically. Writes are atomic
(temp file + rename).
"""

from __future__ import annotations

import logging
import os
from pathlib import Path
from typing import Sequence

from .data import Row, locate_span, tokenize
from .encoders import MaskedTokenScorer
from .trainer import ComplexityHead

log = logging.getLogger(__name__)


def _atomic_write(path, text: str) -> None:
    path = Path(path)
    tmp = path.with_name(path.name + f".tmp{os.getpid()}")
    tmp.write_text(text, encoding="utf-8", newline="")
    os.replace(tmp, path)


def _fmt(value: float) -> str:
    return repr(float(value))


def emit_predictions(
    model: ComplexityHead, rows: Sequence[Row], path
) -> int:
    """Score every row with the fine-tuned head and write ``id,score``."""
    scores = model.predict_rows(rows)
    lines = ["id,score"]
    for row, score in zip(rows, scores):
        lines.append(f"{row.id},{_fmt(score)}")
    _atomic_write(path, "\n".join(lines) + "\n")
    return len(rows)


def emit_masked_probabilities(
    scorer: MaskedTokenScorer, rows: Sequence[Row], path
) -> int:
    """One probability per (id, span position), one token masked at a
    time.

    A target that never occurs in its sentence gets a single row with
    position -1 and probability 0 (the core's span location fails the
    same way, so the placeholder is never queried).
    """
    lines = ["id,position,token,probability"]
    emitted = 0
    for row in rows:
        span = locate_span(row.sentence, row.target)
        if span is None:
            log.warning(
                "instance %s: target %r not found in sentence; emitting a "
                "zero-probability placeholder row",
                row.id,
                row.target,
            )
            lines.append(f"{row.id},-1,{row.target},0.0")
            emitted += 1
            continue
        tokens = tokenize(row.sentence)
        for position in range(span[0], span[1]):
            probability = scorer.token_probability(
                tokens, position, tokens[position]
            )
            if not 0.0 <= probability <= 1.0:
                raise ValueError(
                    f"scorer {scorer.name!r} returned probability "
                    f"{probability!r} outside [0, 1]"
                )
            lines.append(
                f"{row.id},{position},{tokens[position]},{_fmt(probability)}"
            )
            emitted += 1
    _atomic_write(path, "\n".join(lines) + "\n")
    return emitted
