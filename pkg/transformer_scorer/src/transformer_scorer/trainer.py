"""Fine-tuning loop: encoder, linear head, sigmoid, MSE loss.

The sigmoid keeps every prediction inside (0, 1). After each epoch the
Pearson correlation on the trial (validation) rows is recorded; the
checkpoint with the highest value wins, earliest epoch on ties. Batch
order is drawn from a seeded generator, so a fixed config reproduces the
same model bit-for-bit on CPU.
"""

from __future__ import annotations

import copy
import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import torch
from torch import nn

from .config import FineTuneConfig
from .data import Row
from .encoders import build_encoder

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class CheckpointRecord:
    epoch: int  # 1-based
    val_pearson: float
    weights: dict


@dataclass(frozen=True)
class FineTuneResult:
    records: tuple[CheckpointRecord, ...]
    best: CheckpointRecord
    train_losses: tuple[float, ...]
    pooling: str


class ComplexityHead(nn.Module):
    """Encoder followed by a linear layer and a sigmoid activation."""

    def __init__(self, encoder: nn.Module):
        super().__init__()
        self.encoder = encoder
        self.linear = nn.Linear(encoder.dim, 1)

    def forward(self, pairs: Sequence[tuple[str, str]]) -> torch.Tensor:
        return torch.sigmoid(self.linear(self.encoder(pairs))).squeeze(-1)

    @torch.no_grad()
    def predict_rows(self, rows: Sequence[Row]) -> list[float]:
        self.eval()
        pairs = [(row.sentence, row.target) for row in rows]
        return [float(v) for v in self(pairs)]


def _pearson_or_nan(pred: Sequence[float], gold: Sequence[float]) -> float:
    pred = np.asarray(pred, dtype=float)
    gold = np.asarray(gold, dtype=float)
    if len(pred) < 2 or pred.std() == 0.0 or gold.std() == 0.0:
        return float("nan")
    return float(np.corrcoef(pred, gold)[0, 1])


def select_best(records: Sequence[CheckpointRecord]) -> CheckpointRecord:
    """Argmax of validation Pearson; ties resolve to the earliest epoch.

    NaN values (degenerate validation predictions) never win over a
    finite value.
    """
    if not records:
        raise ValueError("no checkpoint records")
    best = records[0]
    for record in records[1:]:
        better = record.val_pearson > best.val_pearson
        replace_nan = math.isnan(best.val_pearson) and not math.isnan(
            record.val_pearson
        )
        if better or replace_nan:
            best = record
    return best


def fine_tune(
    train_rows: Sequence[Row],
    trial_rows: Sequence[Row],
    config: FineTuneConfig,
    encoder: nn.Module | None = None,
) -> FineTuneResult:
    """Train for the configured epochs and pick the best checkpoint."""
    for name, rows in (("train", train_rows), ("trial", trial_rows)):
        if any(row.gold is None for row in rows):
            raise ValueError(f"{name} rows must carry complexity labels")
    torch.manual_seed(config.seed)
    if encoder is None:
        encoder = build_encoder(config.encoder, max_length=config.max_length)
    model = ComplexityHead(encoder)
    optimizer = torch.optim.AdamW(
        model.parameters(),
        lr=config.learning_rate,
        weight_decay=config.weight_decay,
    )
    loss_fn = nn.MSELoss()
    pairs = [(row.sentence, row.target) for row in train_rows]
    targets = torch.tensor([row.gold for row in train_rows],
                           dtype=torch.float32)
    trial_gold = [row.gold for row in trial_rows]
    generator = torch.Generator().manual_seed(config.seed)

    records: list[CheckpointRecord] = []
    train_losses: list[float] = []
    for epoch in range(1, config.epochs + 1):
        model.train()
        order = torch.randperm(len(pairs), generator=generator)
        epoch_loss = 0.0
        for start in range(0, len(pairs), config.batch_size):
            index = order[start : start + config.batch_size]
            batch_pairs = [pairs[i] for i in index]
            batch_targets = targets[index]
            optimizer.zero_grad()
            prediction = model(batch_pairs)
            loss = loss_fn(prediction, batch_targets)
            loss.backward()
            optimizer.step()
            epoch_loss += float(loss.detach()) * len(index)
        train_losses.append(epoch_loss / len(pairs))
        val_pearson = _pearson_or_nan(
            model.predict_rows(trial_rows), trial_gold
        )
        if math.isnan(val_pearson):
            log.warning(
                "epoch %d: validation predictions are degenerate; "
                "checkpoint cannot win selection", epoch,
            )
        records.append(
            CheckpointRecord(
                epoch=epoch,
                val_pearson=val_pearson,
                weights=copy.deepcopy(model.state_dict()),
            )
        )
        log.info(
            "epoch %d: train mse %.6f, trial pearson %s",
            epoch,
            train_losses[-1],
            val_pearson,
        )
    best = select_best(records)
    model.load_state_dict(best.weights)
    return FineTuneResult(
        records=tuple(records),
        best=best,
        train_losses=tuple(train_losses),
        pooling=getattr(encoder, "pooling", "unknown"),
    )


def restore(result: FineTuneResult, config: FineTuneConfig,
            encoder: nn.Module | None = None) -> ComplexityHead:
    """Rebuild the best-checkpoint model from a fine-tune result."""
    if encoder is None:
        encoder = build_encoder(config.encoder, max_length=config.max_length)
    model = ComplexityHead(encoder)
    model.load_state_dict(result.best.weights)
    model.eval()
    return model
