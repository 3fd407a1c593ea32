"""Evaluation metrics: Pearson correlation and mean squared error.

Both metrics accumulate with :func:`math.fsum` (exact summation of
doubles) and the correlation uses the two-pass mean-centered formula for
numerical stability. Zero-variance input raises instead of returning
NaN or 0 so that downstream ranking never silently scores a broken
prediction vector.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .corpus import Dataset, PredictionSet, align
from .errors import DegenerateInputError, InputError
from .text import fmt_float
from .validation import check_equal_length


@dataclass(frozen=True)
class EvalReport:
    pearson: float
    mse: float
    n: int


def pearson(x: Sequence[float], y: Sequence[float]) -> float:
    """Sample Pearson correlation of two equal-length vectors."""
    n = check_equal_length(x, y)
    if n < 2:
        raise InputError(f"pearson requires at least 2 samples, got {n}")
    xs = [float(v) for v in x]
    ys = [float(v) for v in y]
    if not all(math.isfinite(v) for v in xs + ys):
        raise InputError("pearson input contains non-finite values")
    if min(xs) == max(xs):
        raise DegenerateInputError("first argument has zero variance")
    if min(ys) == max(ys):
        raise DegenerateInputError("second argument has zero variance")
    x_mean = math.fsum(xs) / n
    y_mean = math.fsum(ys) / n
    xc = [v - x_mean for v in xs]
    yc = [v - y_mean for v in ys]
    x_ss = math.fsum(v * v for v in xc)
    y_ss = math.fsum(v * v for v in yc)
    if x_ss == 0.0 or y_ss == 0.0:
        raise DegenerateInputError("an argument has zero variance")
    r = math.fsum(a * b for a, b in zip(xc, yc)) / math.sqrt(x_ss * y_ss)
    # rounding can push |r| a few ulp past 1
    return max(-1.0, min(1.0, r))


def mse(pred: Sequence[float], gold: Sequence[float]) -> float:
    """Mean squared difference of two equal-length vectors."""
    n = check_equal_length(pred, gold, names=("pred", "gold"))
    if n < 1:
        raise InputError("mse requires at least 1 sample")
    diffs = [float(p) - float(g) for p, g in zip(pred, gold)]
    if not all(math.isfinite(d) for d in diffs):
        raise InputError("mse input contains non-finite values")
    return math.fsum(d * d for d in diffs) / n


def evaluate(pred: PredictionSet, dataset: Dataset) -> EvalReport:
    """Score one prediction set against a labeled dataset, aligned by id."""
    matrix = align([pred], dataset)
    gold = dataset.gold_vector()
    scores = matrix.scores[0]
    return EvalReport(
        pearson=pearson(scores, gold),
        mse=mse(scores, gold),
        n=len(gold),
    )


def format_report(report: EvalReport, fmt: str = "text") -> str:
    """Render a report as ``text`` (human-readable) or ``csv``."""
    if fmt == "csv":
        return (
            "pearson,mse,n\n"
            f"{fmt_float(report.pearson)},{fmt_float(report.mse)},{report.n}\n"
        )
    if fmt == "text":
        return (
            f"pearson: {fmt_float(report.pearson)}\n"
            f"mse:     {fmt_float(report.mse)}\n"
            f"n:       {report.n}\n"
        )
    raise InputError(f"unknown report format {fmt!r}; use 'text' or 'csv'")
