"""Masked-token probability scorers.

Two scorer kinds share one protocol: a built-in unigram model (relative
corpus frequency with add-k smoothing, context ignored) and a file-backed
scorer that injects probabilities produced by an external masked language
model, keyed by (instance id, token position).

For a multi-word target the probability is the product of per-token
probabilities, masking one span token at a time while the others stay in
place; a single-token span degenerates to the plain token probability.
Scorers are read-only after construction and safe to query concurrently.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Protocol, Sequence, runtime_checkable

from .corpus import Dataset, Instance, _check_score
from .errors import (
    DataFormatError,
    DuplicateIdError,
    InputError,
    ScoreRangeError,
    SidecarLookupError,
)
from .text import tokenize

log = logging.getLogger(__name__)

SIDECAR_COLUMNS = ("id", "position", "token", "probability")


@dataclass(frozen=True)
class MaskedQuery:
    """A target span inside a whitespace-tokenized sentence.

    ``start``/``stop`` index the sentence tokens half-open; the span's
    tokens must equal the target's tokens case-insensitively (guaranteed
    by :func:`locate_target`).
    """

    sentence: str
    start: int
    stop: int

    def __post_init__(self) -> None:
        n = len(tokenize(self.sentence))
        if not 0 <= self.start < self.stop <= n:
            raise InputError(
                f"span [{self.start}, {self.stop}) out of bounds for a "
                f"{n}-token sentence"
            )


def locate_target(sentence: str, target: str) -> MaskedQuery | None:
    """First case-insensitive token-sequence match of target in sentence.

    Returns None when the target tokens never occur contiguously;
    punctuation attached to sentence tokens counts as a mismatch.
    """
    sent_tokens = [tok.lower() for tok in tokenize(sentence)]
    tgt_tokens = [tok.lower() for tok in tokenize(target)]
    if not tgt_tokens:
        raise InputError("empty target")
    width = len(tgt_tokens)
    for start in range(len(sent_tokens) - width + 1):
        if sent_tokens[start : start + width] == tgt_tokens:
            return MaskedQuery(sentence=sentence, start=start, stop=start + width)
    return None


@runtime_checkable
class LmScorer(Protocol):
    """Anything that can score one masked token position."""

    name: str
    kind: str

    def token_probability(
        self,
        instance_id: str,
        tokens: Sequence[str],
        mask_index: int,
        expected: str,
    ) -> float: ...


class UnigramScorer:
    """Relative corpus frequency with add-k smoothing; context is ignored.

    Probabilities over the scorer's vocabulary sum to 1 for any fixed
    ``k >= 0``; an out-of-vocabulary token receives k / (N + k * V).
    """

    kind = "unigram"

    def __init__(self, name: str, counts: Mapping[str, int], k: float = 1.0):
        if k < 0:
            raise InputError(f"smoothing constant k must be >= 0, got {k}")
        if not counts:
            raise InputError(f"unigram scorer {name!r}: empty count table")
        self.name = name
        self.k = float(k)
        self._counts = {word.lower(): int(c) for word, c in counts.items()}
        if any(c < 0 for c in self._counts.values()):
            raise InputError(f"unigram scorer {name!r}: negative count")
        self._total = sum(self._counts.values())
        self._vocab_size = len(self._counts)

    @property
    def vocabulary(self) -> tuple[str, ...]:
        return tuple(self._counts)

    def token_probability(
        self,
        instance_id: str,
        tokens: Sequence[str],
        mask_index: int,
        expected: str,
    ) -> float:
        if not 0 <= mask_index < len(tokens):
            raise InputError(
                f"mask index {mask_index} out of range for "
                f"{len(tokens)} tokens"
            )
        count = self._counts.get(expected.lower(), 0)
        denom = self._total + self.k * self._vocab_size
        if denom == 0.0:
            return 0.0
        return (count + self.k) / denom


class SidecarScorer:
    """Probabilities supplied by an external model via a sidecar file.

    The sidecar is CSV ``id,position,token,probability`` with one row per
    (instance id, absolute token position); a missing key is a lookup
    error rather than a silent zero.
    """

    kind = "sidecar"

    def __init__(self, name: str, table: Mapping[tuple[str, int], float]):
        self.name = name
        self._table = dict(table)
        for (id_, pos), prob in self._table.items():
            _check_score(prob, f"sidecar {name!r}, id {id_!r}, position {pos}:"
                               " probability")

    @classmethod
    def read(cls, path, name: str | None = None) -> "SidecarScorer":
        lines = Path(path).read_text(encoding="utf-8").split("\n")
        if lines and lines[-1] == "":
            lines.pop()
        lines = [line.rstrip("\r") for line in lines]
        expected_header = ",".join(SIDECAR_COLUMNS)
        if not lines or lines[0] != expected_header:
            raise DataFormatError(
                f"{path}: bad or missing sidecar header; "
                f"expected {expected_header!r}"
            )
        table: dict[tuple[str, int], float] = {}
        for lineno, line in enumerate(lines[1:], start=2):
            fields = line.split(",")
            if len(fields) < 4:
                raise DataFormatError(
                    f"{path}: line {lineno}: expected 4 comma-separated "
                    f"fields, got {len(fields)}"
                )
            # the token column is informational and may itself contain commas
            id_, pos_raw, prob_raw = fields[0], fields[1], fields[-1]
            try:
                pos = int(pos_raw)
            except ValueError:
                raise DataFormatError(
                    f"{path}: line {lineno}: bad position {pos_raw!r}"
                ) from None
            if (id_, pos) in table:
                raise DuplicateIdError(
                    f"{path}: line {lineno}: duplicate key ({id_!r}, {pos})"
                )
            try:
                prob = float(prob_raw)
                _check_score(prob, "probability")
            except ValueError:
                raise DataFormatError(
                    f"{path}: line {lineno}: bad probability {prob_raw!r}"
                ) from None
            except ScoreRangeError as exc:
                raise ScoreRangeError(f"{path}: line {lineno}: {exc}") from None
            table[(id_, pos)] = prob
        return cls(name=name or Path(path).stem, table=table)

    def token_probability(
        self,
        instance_id: str,
        tokens: Sequence[str],
        mask_index: int,
        expected: str,
    ) -> float:
        key = (instance_id, mask_index)
        if key not in self._table:
            raise SidecarLookupError(
                f"sidecar {self.name!r} has no probability for id "
                f"{instance_id!r} at position {mask_index}"
            )
        return self._table[key]


def expression_probability(
    scorer: LmScorer, instance_id: str, query: MaskedQuery
) -> float:
    """Product of per-position token probabilities over the target span.

    Each factor masks exactly one span token; the remaining span tokens
    stay in place, so a two-token span yields P1 * P2.
    """
    tokens = tokenize(query.sentence)
    product = 1.0
    for position in range(query.start, query.stop):
        p = scorer.token_probability(
            instance_id, tokens, position, tokens[position]
        )
        if not math.isfinite(p) or not 0.0 <= p <= 1.0:
            raise ScoreRangeError(
                f"scorer {scorer.name!r} returned probability {p!r} "
                f"outside [0, 1]"
            )
        product *= p
    return product


def instance_probability(scorer: LmScorer, instance: Instance) -> float:
    """Masked-expression probability for one dataset instance.

    When the target tokens never occur contiguously in the sentence the
    feature value is 0 and a warning is logged.
    """
    query = locate_target(instance.sentence, instance.target)
    if query is None:
        log.warning(
            "instance %s: target %r not found in sentence; "
            "probability feature set to 0",
            instance.id,
            instance.target,
        )
        return 0.0
    return expression_probability(scorer, instance.id, query)


def read_unigram_counts(path) -> dict[str, int]:
    """Read a ``token<TAB>count`` table for the built-in unigram scorer."""
    lines = Path(path).read_text(encoding="utf-8").split("\n")
    counts: dict[str, int] = {}
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        fields = line.rstrip("\r").split("\t")
        if len(fields) != 2:
            raise DataFormatError(
                f"{path}: line {lineno}: expected 2 tab-separated fields, "
                f"got {len(fields)}"
            )
        word, raw = fields
        try:
            count = int(raw)
        except ValueError:
            raise DataFormatError(
                f"{path}: line {lineno}: bad count {raw!r}"
            ) from None
        if count < 0:
            raise DataFormatError(
                f"{path}: line {lineno}: negative count {count}"
            )
        key = word.lower()
        counts[key] = counts.get(key, 0) + count
    return counts


def write_sidecar_template(dataset: Dataset, path) -> int:
    """Emit a sidecar skeleton: one row per (id, span position), empty
    probability field, for an external scorer to fill. Returns the row
    count."""
    rows = [",".join(SIDECAR_COLUMNS)]
    emitted = 0
    for inst in dataset.instances:
        query = locate_target(inst.sentence, inst.target)
        if query is None:
            log.warning(
                "instance %s: target %r not found in sentence; "
                "no template rows emitted",
                inst.id,
                inst.target,
            )
            continue
        tokens = tokenize(inst.sentence)
        for position in range(query.start, query.stop):
            rows.append(f"{inst.id},{position},{tokens[position]},")
            emitted += 1
    Path(path).write_text("\n".join(rows) + "\n", encoding="utf-8", newline="")
    return emitted
