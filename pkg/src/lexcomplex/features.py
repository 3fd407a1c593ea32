"""Hand-crafted feature extraction for the boosted-tree baselines.

Three nested feature sets over a target word or expression:

* ``a`` - word length, syllable count, corpus frequency, and a 3-slot
  corpus one-hot (6 features);
* ``b`` - set ``a`` plus 50- and 100-dimensional word vectors of the
  target (156 features);
* ``c`` - set ``b`` plus one masked-probability slot per registered
  language-model scorer.

For a multi-word expression, length and syllables sum over tokens,
frequency averages, and word vectors add component-wise; an
out-of-vocabulary token contributes 0 (scalar) or the zero vector. The
sets are prefixes of one another for the same instance and resources, and
every extractor is pure: identical inputs give bit-identical outputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .corpus import Corpus, Instance, Subtask
from .errors import DataFormatError, InputError, ResourceError
from .lm import LmScorer, instance_probability
from .text import fmt_float, tokenize

FEATURE_SETS = ("a", "b", "c")
CORPUS_ORDER = (Corpus.BIBLE, Corpus.EUROPARL, Corpus.BIOMED)
BASE_SLOTS = (
    "length",
    "syllables",
    "frequency",
    "corpus_bible",
    "corpus_europarl",
    "corpus_biomed",
)

_VOWELS = frozenset("aeiouy")


@dataclass(frozen=True)
class FrequencyTable:
    """Lowercased word -> Zipf-scale frequency (log10 per billion)."""

    zipf: Mapping[str, float]

    def __post_init__(self) -> None:
        for word, value in self.zipf.items():
            if word != word.lower():
                raise InputError(f"frequency key {word!r} is not lowercase")
            if not math.isfinite(value) or value < 0:
                raise InputError(
                    f"frequency for {word!r} must be finite and >= 0, "
                    f"got {value!r}"
                )

    def lookup(self, word: str) -> float:
        return float(self.zipf.get(word.lower(), 0.0))

    @classmethod
    def read(cls, path) -> "FrequencyTable":
        """Read a ``word<TAB>zipf`` table."""
        table: dict[str, float] = {}
        lines = Path(path).read_text(encoding="utf-8").split("\n")
        for lineno, line in enumerate(lines, start=1):
            if not line.strip():
                continue
            fields = line.rstrip("\r").split("\t")
            if len(fields) != 2:
                raise DataFormatError(
                    f"{path}: line {lineno}: expected 2 tab-separated "
                    f"fields, got {len(fields)}"
                )
            try:
                value = float(fields[1])
            except ValueError:
                raise DataFormatError(
                    f"{path}: line {lineno}: bad frequency {fields[1]!r}"
                ) from None
            table[fields[0].lower()] = value
        return cls(zipf=table)


@dataclass(frozen=True)
class EmbeddingTable:
    """Lowercased word -> d-dimensional vector."""

    dimension: int
    vectors: Mapping[str, np.ndarray]

    def __post_init__(self) -> None:
        if self.dimension < 1:
            raise InputError("embedding dimension must be positive")
        for word, vec in self.vectors.items():
            if vec.shape != (self.dimension,):
                raise InputError(
                    f"vector for {word!r} has shape {vec.shape}, "
                    f"expected ({self.dimension},)"
                )
            if not np.all(np.isfinite(vec)):
                raise InputError(f"vector for {word!r} has non-finite values")

    def lookup(self, word: str) -> np.ndarray:
        vec = self.vectors.get(word.lower())
        if vec is None:
            return np.zeros(self.dimension, dtype=np.float64)
        return vec

    @classmethod
    def read(cls, path) -> "EmbeddingTable":
        """Read the standard text distribution format: one line per word,
        ``word v1 v2 ... vd`` space-separated."""
        vectors: dict[str, np.ndarray] = {}
        dimension: int | None = None
        lines = Path(path).read_text(encoding="utf-8").split("\n")
        for lineno, line in enumerate(lines, start=1):
            if not line.strip():
                continue
            fields = line.rstrip("\r").split(" ")
            if dimension is None:
                dimension = len(fields) - 1
                if dimension < 1:
                    raise DataFormatError(
                        f"{path}: line {lineno}: no vector components"
                    )
            if len(fields) != dimension + 1:
                raise DataFormatError(
                    f"{path}: line {lineno}: expected {dimension} "
                    f"components, got {len(fields) - 1}"
                )
            try:
                vec = np.array([float(v) for v in fields[1:]], dtype=np.float64)
            except ValueError:
                raise DataFormatError(
                    f"{path}: line {lineno}: bad vector component"
                ) from None
            vec.flags.writeable = False
            vectors[fields[0].lower()] = vec
        if dimension is None:
            raise DataFormatError(f"{path}: empty embedding file")
        return cls(dimension=dimension, vectors=vectors)


def _target_tokens(target: str) -> list[str]:
    tokens = tokenize(target)
    if not tokens:
        raise InputError("empty target")
    return tokens


def word_length(target: str, subtask: Subtask) -> int:
    """Character count of the target; for an MWE, the sum of the token
    lengths with separators excluded."""
    tokens = _target_tokens(target)
    if subtask is Subtask.SINGLE:
        return len(tokens[0])
    return sum(len(tok) for tok in tokens)


def _token_syllables(token: str) -> int:
    word = token.lower()
    runs = 0
    previous_vowel = False
    for ch in word:
        vowel = ch in _VOWELS
        if vowel and not previous_vowel:
            runs += 1
        previous_vowel = vowel
    if len(word) > 2 and word.endswith("e") and not word.endswith("le"):
        runs -= 1
    return max(runs, 1)


def syllable_count(target: str, subtask: Subtask) -> int:
    """Heuristic syllable count, summed over tokens for an MWE.

    Per token: count maximal vowel runs (a, e, i, o, u, y) in the
    lowercased form, subtract one for a terminal silent 'e' (length > 2,
    ends with 'e' but not 'le'), floor at 1.
    """
    tokens = _target_tokens(target)
    if subtask is Subtask.SINGLE:
        return _token_syllables(tokens[0])
    return sum(_token_syllables(tok) for tok in tokens)


def frequency_feature(
    target: str, subtask: Subtask, table: FrequencyTable
) -> float:
    """Zipf frequency of the target; the token mean for an MWE.

    Out-of-vocabulary tokens contribute 0.0 (absence signals rarity).
    """
    tokens = _target_tokens(target)
    values = [table.lookup(tok) for tok in tokens]
    if subtask is Subtask.SINGLE:
        return values[0]
    return math.fsum(values) / len(values)


def corpus_onehot(corpus: Corpus) -> np.ndarray:
    """3-slot indicator in the fixed order (bible, europarl, biomed)."""
    vec = np.zeros(len(CORPUS_ORDER), dtype=np.float64)
    vec[CORPUS_ORDER.index(corpus)] = 1.0
    return vec


def embedding_feature(
    target: str, subtask: Subtask, table: EmbeddingTable
) -> np.ndarray:
    """Word vector of the target; the component-wise token sum for an MWE.

    Out-of-vocabulary tokens contribute the zero vector.
    """
    tokens = _target_tokens(target)
    if subtask is Subtask.SINGLE:
        return table.lookup(tokens[0]).copy()
    total = np.zeros(table.dimension, dtype=np.float64)
    for tok in tokens:
        total += table.lookup(tok)
    return total


class ComplexityFeaturizer(TransformerMixin, BaseEstimator):
    """Turn dataset instances into the numeric feature matrix of one set.

    Parameters
    ----------
    feature_set : {'a', 'b', 'c'}
        Which nested feature set to emit.
    frequency_table : FrequencyTable
        Required for every set.
    embeddings_50, embeddings_100 : EmbeddingTable
        Required for sets 'b' and 'c'; dimensions must be exactly 50
        and 100.
    lm_scorers : sequence of scorer objects
        Required (at least one) for set 'c'; each contributes one
        masked-probability slot, in the given order.
    """

    def __init__(
        self,
        feature_set: str = "a",
        frequency_table: FrequencyTable | None = None,
        embeddings_50: EmbeddingTable | None = None,
        embeddings_100: EmbeddingTable | None = None,
        lm_scorers: Sequence[LmScorer] = (),
    ):
        self.feature_set = feature_set
        self.frequency_table = frequency_table
        self.embeddings_50 = embeddings_50
        self.embeddings_100 = embeddings_100
        self.lm_scorers = lm_scorers

    def fit(self, X=None, y=None):
        """Validate resources for the requested set; no statistics are
        learned."""
        if self.feature_set not in FEATURE_SETS:
            raise ResourceError(
                f"unknown feature set {self.feature_set!r}; "
                f"expected one of {', '.join(FEATURE_SETS)}"
            )
        if self.frequency_table is None:
            raise ResourceError(
                "feature slot 'frequency' needs a frequency table"
            )
        names = list(BASE_SLOTS)
        if self.feature_set in ("b", "c"):
            for attr, dim in (("embeddings_50", 50), ("embeddings_100", 100)):
                table = getattr(self, attr)
                slot = f"emb{dim}"
                if table is None:
                    raise ResourceError(
                        f"feature slot {slot!r} needs a {dim}-dimensional "
                        f"embedding table"
                    )
                if table.dimension != dim:
                    raise ResourceError(
                        f"feature slot {slot!r} needs dimension {dim}, "
                        f"got {table.dimension}"
                    )
            names += [f"emb50_{i:02d}" for i in range(50)]
            names += [f"emb100_{i:03d}" for i in range(100)]
        if self.feature_set == "c":
            if not self.lm_scorers:
                raise ResourceError(
                    "feature slot 'lm' needs at least one language-model "
                    "scorer"
                )
            seen: set[str] = set()
            for scorer in self.lm_scorers:
                if scorer.name in seen:
                    raise ResourceError(
                        f"duplicate scorer name {scorer.name!r}"
                    )
                seen.add(scorer.name)
            names += [f"lm_{scorer.name}" for scorer in self.lm_scorers]
        self.feature_names_ = tuple(names)
        self.n_features_out_ = len(names)
        return self

    def _check_fitted(self) -> None:
        if not hasattr(self, "feature_names_"):
            raise NotFittedError(
                "this ComplexityFeaturizer is not fitted yet; call fit first"
            )

    def get_feature_names_out(self, input_features=None) -> np.ndarray:
        self._check_fitted()
        return np.asarray(self.feature_names_, dtype=object)

    def transform_one(self, instance: Instance) -> np.ndarray:
        self._check_fitted()
        parts = [
            float(word_length(instance.target, instance.subtask)),
            float(syllable_count(instance.target, instance.subtask)),
            frequency_feature(
                instance.target, instance.subtask, self.frequency_table
            ),
        ]
        row = np.concatenate(
            [np.array(parts, dtype=np.float64), corpus_onehot(instance.corpus)]
        )
        if self.feature_set in ("b", "c"):
            row = np.concatenate(
                [
                    row,
                    embedding_feature(
                        instance.target, instance.subtask, self.embeddings_50
                    ),
                    embedding_feature(
                        instance.target, instance.subtask, self.embeddings_100
                    ),
                ]
            )
        if self.feature_set == "c":
            probs = [
                instance_probability(scorer, instance)
                for scorer in self.lm_scorers
            ]
            row = np.concatenate([row, np.array(probs, dtype=np.float64)])
        return row

    def transform(self, X: Sequence[Instance]) -> np.ndarray:
        self._check_fitted()
        rows = [self.transform_one(inst) for inst in X]
        if not rows:
            return np.zeros((0, self.n_features_out_), dtype=np.float64)
        return np.vstack(rows)


def write_feature_csv(
    path, ids: Sequence[str], names: Sequence[str], matrix: np.ndarray
) -> None:
    """Write the feature matrix as CSV with an id column and one named
    column per slot; byte-stable for identical inputs."""
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.shape != (len(ids), len(names)):
        raise InputError(
            f"matrix shape {matrix.shape} does not match {len(ids)} ids "
            f"x {len(names)} slots"
        )
    lines = ["id," + ",".join(names)]
    for id_, row in zip(ids, matrix):
        lines.append(id_ + "," + ",".join(fmt_float(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="")


def read_feature_csv(path) -> tuple[tuple[str, ...], tuple[str, ...], np.ndarray]:
    """Read a feature CSV back into (ids, slot names, matrix)."""
    lines = Path(path).read_text(encoding="utf-8").split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    lines = [line.rstrip("\r") for line in lines]
    if not lines or not lines[0].startswith("id,"):
        raise DataFormatError(f"{path}: missing feature CSV header")
    names = tuple(lines[0].split(",")[1:])
    ids: list[str] = []
    rows: list[list[float]] = []
    for lineno, line in enumerate(lines[1:], start=2):
        fields = line.split(",")
        if len(fields) != len(names) + 1:
            raise DataFormatError(
                f"{path}: line {lineno}: expected {len(names) + 1} fields, "
                f"got {len(fields)}"
            )
        ids.append(fields[0])
        try:
            rows.append([float(v) for v in fields[1:]])
        except ValueError:
            raise DataFormatError(
                f"{path}: line {lineno}: bad feature value"
            ) from None
    matrix = np.array(rows, dtype=np.float64).reshape(len(ids), len(names))
    return tuple(ids), names, matrix
