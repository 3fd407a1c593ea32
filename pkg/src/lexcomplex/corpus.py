"""CompLex-format dataset and prediction-file ingestion.

Datasets are tab-separated text with a mandatory header row
``id<TAB>corpus<TAB>sentence<TAB>token`` plus a trailing ``complexity``
column when labeled. Prediction files are two-column CSV (``id,score``).
Both formats re-serialize with a stable column order and LF newlines, so
``parse -> write -> parse`` is the identity.

All types are immutable after construction and safe to share across
threads.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .errors import (
    AlignmentError,
    DataFormatError,
    DuplicateIdError,
    InputError,
    ScoreRangeError,
    UnknownCorpusError,
    UnlabeledDatasetError,
)
from .text import fmt_float, tokenize

log = logging.getLogger(__name__)

DATASET_COLUMNS = ("id", "corpus", "sentence", "token")
GOLD_COLUMN = "complexity"
PREDICTION_COLUMNS = ("id", "score")


class Corpus(Enum):
    BIBLE = "bible"
    EUROPARL = "europarl"
    BIOMED = "biomed"

    @classmethod
    def from_tag(cls, tag: str) -> "Corpus":
        try:
            return cls(tag.strip().lower())
        except ValueError:
            raise UnknownCorpusError(
                f"unknown corpus tag {tag!r}; expected one of "
                + ", ".join(c.value for c in cls)
            ) from None


class Subtask(Enum):
    SINGLE = "single"
    MWE = "mwe"


class Split(Enum):
    TRAIN = "train"
    TRIAL = "trial"
    TEST = "test"


def _check_score(value: float, what: str) -> float:
    value = float(value)
    if not math.isfinite(value) or not 0.0 <= value <= 1.0:
        raise ScoreRangeError(f"{what} {value!r} outside [0, 1]")
    return value


@dataclass(frozen=True)
class Instance:
    """One dataset row: a target word or expression in sentence context."""

    id: str
    corpus: Corpus
    sentence: str
    target: str
    subtask: Subtask
    gold: float | None = None

    def __post_init__(self) -> None:
        if not self.sentence.strip():
            raise InputError(f"instance {self.id!r}: empty sentence")
        if not self.target.strip():
            raise InputError(f"instance {self.id!r}: empty target")
        if self.gold is not None:
            _check_score(self.gold, f"instance {self.id!r}: complexity")
        n_tokens = len(tokenize(self.target))
        if self.subtask is Subtask.SINGLE and n_tokens != 1:
            raise InputError(
                f"instance {self.id!r}: single-word target {self.target!r} "
                f"splits into {n_tokens} tokens"
            )
        if self.subtask is Subtask.MWE and n_tokens < 2:
            raise InputError(
                f"instance {self.id!r}: multi-word target {self.target!r} "
                f"has fewer than 2 tokens"
            )


@dataclass(frozen=True)
class Dataset:
    """An ordered, id-unique collection of instances for one subtask."""

    instances: tuple[Instance, ...]
    subtask: Subtask
    split: Split = Split.TRAIN

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for inst in self.instances:
            if inst.id in seen:
                raise DuplicateIdError(f"duplicate instance id {inst.id!r}")
            seen.add(inst.id)
            if inst.subtask is not self.subtask:
                raise InputError(
                    f"instance {inst.id!r} has subtask {inst.subtask.value}, "
                    f"dataset declares {self.subtask.value}"
                )

    def __len__(self) -> int:
        return len(self.instances)

    def ids(self) -> tuple[str, ...]:
        return tuple(inst.id for inst in self.instances)

    @property
    def labeled(self) -> bool:
        return len(self.instances) > 0 and all(
            inst.gold is not None for inst in self.instances
        )

    def gold_vector(self) -> np.ndarray:
        if not self.labeled:
            raise UnlabeledDatasetError(
                "dataset carries no gold complexity labels"
            )
        vec = np.array([inst.gold for inst in self.instances], dtype=np.float64)
        vec.flags.writeable = False
        return vec


@dataclass(frozen=True)
class PredictionSet:
    """Per-instance scores in [0, 1] from one named model."""

    model_name: str
    scores: Mapping[str, float]

    def __post_init__(self) -> None:
        for id_, score in self.scores.items():
            _check_score(score, f"model {self.model_name!r}, id {id_!r}: score")

    def __len__(self) -> int:
        return len(self.scores)


@dataclass(frozen=True)
class PredictionMatrix:
    """Model x instance score matrix aligned to one dataset's id order."""

    model_names: tuple[str, ...]
    ids: tuple[str, ...]
    scores: np.ndarray  # shape (n_models, n_instances)
    gold: np.ndarray | None = None


def _read_lines(path) -> list[str]:
    text = Path(path).read_text(encoding="utf-8")
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    return [line.rstrip("\r") for line in lines]


def parse_dataset(
    path,
    subtask: Subtask,
    labeled: bool,
    split: Split = Split.TRAIN,
) -> Dataset:
    """Parse a tab-separated dataset file.

    The subtask is declared by the caller, not inferred; rows violating the
    declared subtask's token-count rule are format errors with a line
    number. Text is kept verbatim (no case folding or trimming).
    """
    lines = _read_lines(path)
    columns = DATASET_COLUMNS + ((GOLD_COLUMN,) if labeled else ())
    expected_header = "\t".join(columns)
    if not lines:
        raise DataFormatError(f"{path}: empty file; header row required")
    if lines[0] != expected_header:
        raise DataFormatError(
            f"{path}: line 1: bad header {lines[0]!r}; "
            f"expected {expected_header!r}"
        )
    instances: list[Instance] = []
    seen: set[str] = set()
    for lineno, line in enumerate(lines[1:], start=2):
        fields = line.split("\t")
        if len(fields) != len(columns):
            raise DataFormatError(
                f"{path}: line {lineno}: expected {len(columns)} "
                f"tab-separated fields, got {len(fields)}"
            )
        id_, tag, sentence, target = fields[:4]
        if id_ in seen:
            raise DuplicateIdError(
                f"{path}: line {lineno}: duplicate id {id_!r}"
            )
        seen.add(id_)
        if not sentence.strip():
            raise DataFormatError(f"{path}: line {lineno}: empty sentence")
        if not target.strip():
            raise DataFormatError(f"{path}: line {lineno}: empty token")
        try:
            corpus = Corpus.from_tag(tag)
        except UnknownCorpusError as exc:
            raise UnknownCorpusError(f"{path}: line {lineno}: {exc}") from None
        gold: float | None = None
        if labeled:
            try:
                gold = float(fields[4])
            except ValueError:
                raise DataFormatError(
                    f"{path}: line {lineno}: bad complexity value "
                    f"{fields[4]!r}"
                ) from None
            try:
                _check_score(gold, "complexity")
            except ScoreRangeError as exc:
                raise ScoreRangeError(
                    f"{path}: line {lineno}: {exc}"
                ) from None
        n_tokens = len(tokenize(target))
        if subtask is Subtask.SINGLE and n_tokens != 1:
            raise DataFormatError(
                f"{path}: line {lineno}: token {target!r} splits into "
                f"{n_tokens} tokens; single-word subtask requires exactly 1"
            )
        if subtask is Subtask.MWE and n_tokens < 2:
            raise DataFormatError(
                f"{path}: line {lineno}: token {target!r} has fewer than 2 "
                f"tokens; multi-word subtask requires at least 2"
            )
        instances.append(
            Instance(
                id=id_,
                corpus=corpus,
                sentence=sentence,
                target=target,
                subtask=subtask,
                gold=gold,
            )
        )
    return Dataset(tuple(instances), subtask=subtask, split=split)


def _check_field(value: str, what: str, seps: str) -> str:
    for ch in seps:
        if ch in value:
            raise DataFormatError(
                f"{what} {value!r} contains the reserved character {ch!r}"
            )
    return value


def write_dataset(dataset: Dataset, path) -> None:
    """Serialize a dataset back to the tab-separated format, byte-stable."""
    if dataset.instances and not dataset.labeled:
        if any(inst.gold is not None for inst in dataset.instances):
            raise InputError(
                "cannot serialize a dataset with partially labeled rows"
            )
    columns = DATASET_COLUMNS + ((GOLD_COLUMN,) if dataset.labeled else ())
    rows = ["\t".join(columns)]
    for inst in dataset.instances:
        fields = [
            _check_field(inst.id, "id", "\t\n\r"),
            inst.corpus.value,
            _check_field(inst.sentence, "sentence", "\t\n\r"),
            _check_field(inst.target, "token", "\t\n\r"),
        ]
        if dataset.labeled:
            fields.append(fmt_float(inst.gold))
        rows.append("\t".join(fields))
    Path(path).write_text("\n".join(rows) + "\n", encoding="utf-8", newline="")


def parse_predictions(path) -> PredictionSet:
    """Parse an ``id,score`` CSV; the model name is the file stem."""
    lines = _read_lines(path)
    expected_header = ",".join(PREDICTION_COLUMNS)
    if not lines:
        raise DataFormatError(f"{path}: empty file; header row required")
    if lines[0] != expected_header:
        raise DataFormatError(
            f"{path}: line 1: bad header {lines[0]!r}; "
            f"expected {expected_header!r}"
        )
    scores: dict[str, float] = {}
    for lineno, line in enumerate(lines[1:], start=2):
        fields = line.split(",")
        if len(fields) != 2:
            raise DataFormatError(
                f"{path}: line {lineno}: expected 2 comma-separated fields, "
                f"got {len(fields)}"
            )
        id_, raw = fields
        if id_ in scores:
            raise DuplicateIdError(
                f"{path}: line {lineno}: duplicate id {id_!r}"
            )
        try:
            score = float(raw)
        except ValueError:
            raise DataFormatError(
                f"{path}: line {lineno}: bad score value {raw!r}"
            ) from None
        try:
            _check_score(score, "score")
        except ScoreRangeError as exc:
            raise ScoreRangeError(f"{path}: line {lineno}: {exc}") from None
        scores[id_] = score
    if not scores:
        log.warning("prediction file %s has a header but no rows", path)
    return PredictionSet(model_name=Path(path).stem, scores=scores)


def write_predictions(pred_set: PredictionSet, path) -> None:
    """Serialize a prediction set to ``id,score`` CSV, byte-stable."""
    rows = [",".join(PREDICTION_COLUMNS)]
    for id_, score in pred_set.scores.items():
        _check_field(id_, "id", ",\n\r")
        rows.append(f"{id_},{fmt_float(score)}")
    Path(path).write_text("\n".join(rows) + "\n", encoding="utf-8", newline="")


def align(
    pred_sets: Sequence[PredictionSet], gold: Dataset
) -> PredictionMatrix:
    """Stack prediction sets into a matrix aligned to the dataset id order.

    Rows follow the order in which the sets are given (registry order);
    columns follow dataset order. Every set must cover exactly the gold id
    set. Input file row order never affects the aligned values.
    """
    ids = gold.ids()
    id_set = set(ids)
    names: list[str] = []
    rows: list[list[float]] = []
    for ps in pred_sets:
        if ps.model_name in names:
            raise InputError(f"duplicate model name {ps.model_name!r}")
        for id_ in ids:
            if id_ not in ps.scores:
                raise AlignmentError(
                    f"model {ps.model_name!r} is missing id {id_!r}"
                )
        for id_ in ps.scores:
            if id_ not in id_set:
                raise AlignmentError(
                    f"model {ps.model_name!r} has extra id {id_!r}"
                )
        names.append(ps.model_name)
        rows.append([ps.scores[id_] for id_ in ids])
    scores = np.array(rows, dtype=np.float64).reshape(len(names), len(ids))
    scores.flags.writeable = False
    gold_vec = gold.gold_vector() if gold.labeled else None
    return PredictionMatrix(
        model_names=tuple(names), ids=ids, scores=scores, gold=gold_vec
    )
