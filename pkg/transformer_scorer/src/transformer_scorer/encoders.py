"""Encoders: pooled sentence/target representations and masked-token
scorers.

Two families ship:

* ``StubEncoder`` / ``StubMaskedScorer`` - tiny deterministic stand-ins
  with no pre-trained weights, for tests and dry runs;
* HuggingFace adapters that wrap a real pre-trained checkpoint (imported
  lazily so the heavy dependency stays optional).

Every encoder consumes a (sentence, target) pair separated by special
tokens and exposes ``dim`` (representation width) and ``pooling`` (which
representation feeds the regression head; recorded in the run manifest).
"""

from __future__ import annotations

import logging
import zlib
from typing import Protocol, Sequence

import torch
from torch import nn

from .data import tokenize

log = logging.getLogger(__name__)


class MaskedTokenScorer(Protocol):
    """Scores one masked token position in a whitespace-tokenized
    sentence."""

    name: str

    def token_probability(
        self, tokens: Sequence[str], position: int, expected: str
    ) -> float: ...


class StubEncoder(nn.Module):
    """Hashed bag-of-tokens features under a single learnable scale.

    One trainable parameter; the hashing is stable across runs and
    platforms, so outputs depend only on the text and the weights.
    """

    dim = 16
    pooling = "hashed-bag"

    def __init__(self):
        super().__init__()
        self.scale = nn.Parameter(torch.ones(1))

    def _features(self, sentence: str, target: str) -> torch.Tensor:
        vec = torch.zeros(self.dim)
        tokens = tokenize(sentence) + ["[SEP]"] + tokenize(target)
        for tok in tokens:
            slot = zlib.crc32(tok.lower().encode("utf-8")) % self.dim
            vec[slot] += 1.0
        return vec / max(len(tokens), 1)

    def forward(self, pairs: Sequence[tuple[str, str]]) -> torch.Tensor:
        feats = torch.stack(
            [self._features(sentence, target) for sentence, target in pairs]
        )
        return feats * self.scale


class StubMaskedScorer:
    """Deterministic pseudo-probabilities in (0, 1); no context model."""

    def __init__(self, name: str = "stub"):
        self.name = name

    def token_probability(
        self, tokens: Sequence[str], position: int, expected: str
    ) -> float:
        digest = zlib.crc32(f"{expected.lower()}|{position}".encode("utf-8"))
        return ((digest % 900) + 50) / 1000.0


class HuggingFaceEncoder(nn.Module):
    """Pre-trained encoder with its conventional classification pooling.

    The tokenizer's native pair encoding supplies the special-token
    separation between sentence and target; inputs are padded or
    truncated to ``max_length``.
    """

    pooling = "first-token"

    def __init__(self, model_name: str, max_length: int = 256):
        super().__init__()
        from transformers import AutoModel, AutoTokenizer

        self.tokenizer = AutoTokenizer.from_pretrained(model_name)
        self.model = AutoModel.from_pretrained(model_name)
        self.max_length = max_length
        self.dim = int(self.model.config.hidden_size)

    def forward(self, pairs: Sequence[tuple[str, str]]) -> torch.Tensor:
        sentences = [s for s, _ in pairs]
        targets = [t for _, t in pairs]
        batch = self.tokenizer(
            sentences,
            targets,
            truncation=True,
            padding=True,
            max_length=self.max_length,
            return_tensors="pt",
        )
        output = self.model(**batch)
        return output.last_hidden_state[:, 0]


class HuggingFaceMaskedScorer:
    """Masked-token probabilities from a pre-trained MLM checkpoint.

    One sentence token is replaced with the mask token; the probability
    of the expected token at that position comes from the softmax over
    the vocabulary. A multi-wordpiece expected token is scored by its
    first piece (with a warning) since the mask covers one position.
    """

    def __init__(self, model_name: str, name: str | None = None):
        from transformers import AutoModelForMaskedLM, AutoTokenizer

        self.name = name or model_name
        self.tokenizer = AutoTokenizer.from_pretrained(model_name)
        self.model = AutoModelForMaskedLM.from_pretrained(model_name)
        self.model.eval()

    def token_probability(
        self, tokens: Sequence[str], position: int, expected: str
    ) -> float:
        masked = list(tokens)
        masked[position] = self.tokenizer.mask_token
        text = " ".join(masked)
        batch = self.tokenizer(text, return_tensors="pt", truncation=True)
        mask_positions = (
            batch["input_ids"][0] == self.tokenizer.mask_token_id
        ).nonzero(as_tuple=True)[0]
        with torch.no_grad():
            logits = self.model(**batch).logits[0, mask_positions[0]]
        pieces = self.tokenizer.tokenize(expected)
        if len(pieces) > 1:
            log.warning(
                "expected token %r spans %d wordpieces; scoring the first",
                expected,
                len(pieces),
            )
        token_id = self.tokenizer.convert_tokens_to_ids(pieces[0])
        return float(torch.softmax(logits, dim=-1)[token_id])


def build_encoder(name: str, max_length: int = 256) -> nn.Module:
    if name == "stub":
        return StubEncoder()
    return HuggingFaceEncoder(name, max_length=max_length)


def build_masked_scorer(name: str) -> MaskedTokenScorer:
    if name == "stub":
        return StubMaskedScorer()
    return HuggingFaceMaskedScorer(name)
