"""Sample-wise aggregation of model predictions and exhaustive
best-combination search.

Aggregation is order-invariant, so "all combinations" collapses to all
non-empty member subsets, each evaluated under sample-wise average and
sample-wise maximum. The leaderboard sorts by Pearson correlation
descending; ties break toward the smaller subset, then the
lexicographically smaller sorted member list, then average before
maximum. A spec whose aggregated vector has zero variance cannot be
ranked and is skipped with a logged warning.
"""

from __future__ import annotations

import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .corpus import PredictionMatrix
from .errors import (
    DegenerateInputError,
    InputError,
    SearchSizeError,
    UnknownModelError,
    UnlabeledDatasetError,
)
from .metrics import mse, pearson
from .text import fmt_float

log = logging.getLogger(__name__)

DEFAULT_MODEL_CAP = 20
LEADERBOARD_COLUMNS = ("rank", "members", "mode", "pearson", "mse")


class AggregationMode(Enum):
    AVERAGE = "average"
    MAXIMUM = "maximum"


@dataclass(frozen=True)
class EnsembleSpec:
    """A non-empty set of member models plus an aggregation mode.

    Members are stored sorted, so aggregation order never depends on how
    the spec was written.
    """

    members: tuple[str, ...]
    mode: AggregationMode

    def __post_init__(self) -> None:
        if not self.members:
            raise InputError("ensemble spec needs at least one member")
        if len(set(self.members)) != len(self.members):
            raise InputError(f"duplicate ensemble members in {self.members!r}")
        object.__setattr__(self, "members", tuple(sorted(self.members)))

    @property
    def label(self) -> str:
        return "+".join(self.members)


@dataclass(frozen=True)
class SearchRow:
    spec: EnsembleSpec
    pearson: float
    mse: float


@dataclass(frozen=True)
class SearchResult:
    leaderboard: tuple[SearchRow, ...]

    @property
    def best(self) -> SearchRow:
        if not self.leaderboard:
            raise InputError("empty leaderboard: every spec was degenerate")
        return self.leaderboard[0]


def aggregate(matrix: PredictionMatrix, spec: EnsembleSpec) -> np.ndarray:
    """Aggregate member rows per instance: mean or max."""
    index = {name: i for i, name in enumerate(matrix.model_names)}
    try:
        rows = [index[name] for name in spec.members]
    except KeyError as exc:
        raise UnknownModelError(
            f"ensemble member {exc.args[0]!r} is not a registered model"
        ) from None
    member_scores = matrix.scores[rows]
    if spec.mode is AggregationMode.AVERAGE:
        mean = member_scores.mean(axis=0)
        # float rounding may push the mean 1 ulp past the member envelope;
        # clamp so the [min, max] containment contract holds exactly
        return np.clip(
            mean, member_scores.min(axis=0), member_scores.max(axis=0)
        )
    return member_scores.max(axis=0)


def _mode_rank(mode: AggregationMode) -> int:
    return 0 if mode is AggregationMode.AVERAGE else 1


def _evaluate_spec(
    matrix: PredictionMatrix, gold: np.ndarray, spec: EnsembleSpec
) -> SearchRow | None:
    scores = aggregate(matrix, spec)
    try:
        r = pearson(scores, gold)
    except DegenerateInputError:
        log.warning(
            "skipping degenerate spec %s (%s): aggregated scores have "
            "zero variance",
            spec.label,
            spec.mode.value,
        )
        return None
    return SearchRow(spec=spec, pearson=r, mse=mse(scores, gold))


def enumerate_specs(
    model_names: Sequence[str],
    modes: Iterable[AggregationMode],
) -> list[EnsembleSpec]:
    """All non-empty member subsets crossed with the requested modes."""
    modes = tuple(modes)
    if not modes:
        raise InputError("at least one aggregation mode is required")
    names = sorted(model_names)
    specs: list[EnsembleSpec] = []
    for size in range(1, len(names) + 1):
        for members in itertools.combinations(names, size):
            for mode in modes:
                specs.append(EnsembleSpec(members=members, mode=mode))
    return specs


def search(
    matrix: PredictionMatrix,
    modes: Iterable[AggregationMode] = (
        AggregationMode.AVERAGE,
        AggregationMode.MAXIMUM,
    ),
    model_cap: int = DEFAULT_MODEL_CAP,
    threads: int = 1,
) -> SearchResult:
    """Evaluate every spec against the matrix's gold vector.

    The result is independent of model registry order and of the thread
    count; only the documented tie-break orders equal-Pearson rows.
    """
    if len(matrix.model_names) < 1:
        raise InputError("search requires at least one model")
    if matrix.gold is None:
        raise UnlabeledDatasetError(
            "search requires gold labels in the aligned matrix"
        )
    if len(matrix.model_names) > model_cap:
        raise SearchSizeError(
            f"{len(matrix.model_names)} models exceed the exhaustive search "
            f"cap of {model_cap}; pass explicit member lists instead"
        )
    specs = enumerate_specs(matrix.model_names, modes)
    gold = matrix.gold
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(
                pool.map(lambda s: _evaluate_spec(matrix, gold, s), specs)
            )
    else:
        rows = [_evaluate_spec(matrix, gold, spec) for spec in specs]
    kept = [row for row in rows if row is not None]
    kept.sort(
        key=lambda row: (
            -row.pearson,
            len(row.spec.members),
            row.spec.members,
            _mode_rank(row.spec.mode),
        )
    )
    return SearchResult(leaderboard=tuple(kept))


def write_leaderboard(result: SearchResult, path) -> None:
    """Write the leaderboard as ``rank,members,mode,pearson,mse`` CSV."""
    lines = [",".join(LEADERBOARD_COLUMNS)]
    for rank, row in enumerate(result.leaderboard, start=1):
        lines.append(
            f"{rank},{row.spec.label},{row.spec.mode.value},"
            f"{fmt_float(row.pearson)},{fmt_float(row.mse)}"
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="")
