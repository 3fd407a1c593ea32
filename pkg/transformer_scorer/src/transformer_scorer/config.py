"""Fine-tuning configuration.

Defaults follow the published recipe: input sequences capped at 256
tokens, learning rate 2e-5, batch size 32, 4 epochs, weighted-decay Adam.
Everything is overridable, either in code or through a flat
``key = value`` config file (same format as the core toolkit's).
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from pathlib import Path


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class FineTuneConfig:
    encoder: str = "stub"
    max_length: int = 256
    learning_rate: float = 2e-5
    batch_size: int = 32
    epochs: int = 4
    optimizer: str = "adamw"
    weight_decay: float = 0.01
    seed: int = 0
    train: str | None = None
    trial: str | None = None

    def __post_init__(self) -> None:
        if self.max_length < 1 or self.batch_size < 1 or self.epochs < 1:
            raise ConfigError(
                "max_length, batch_size and epochs must be positive"
            )
        if self.learning_rate <= 0:
            raise ConfigError("learning_rate must be positive")
        if self.optimizer != "adamw":
            raise ConfigError(
                f"unsupported optimizer {self.optimizer!r}; only the "
                f"weighted-decay Adam variant ('adamw') is implemented"
            )


_CASTS = {
    "encoder": str,
    "max_length": int,
    "learning_rate": float,
    "batch_size": int,
    "epochs": int,
    "optimizer": str,
    "weight_decay": float,
    "seed": int,
    "train": str,
    "trial": str,
}


def load_config(path) -> FineTuneConfig:
    """Read a flat key=value file; unknown or duplicate keys are errors."""
    values: dict = {}
    for lineno, raw in enumerate(
        Path(path).read_text(encoding="utf-8").split("\n"), start=1
    ):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(
                f"{path}: line {lineno}: expected 'key = value'"
            )
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in _CASTS:
            raise ConfigError(f"{path}: line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"{path}: line {lineno}: duplicate key {key!r}")
        try:
            values[key] = _CASTS[key](value.strip())
        except ValueError:
            raise ConfigError(
                f"{path}: line {lineno}: bad value for {key!r}"
            ) from None
    return FineTuneConfig(**values)


def write_config(config: FineTuneConfig, path) -> None:
    lines = []
    for f in fields(FineTuneConfig):
        value = getattr(config, f.name)
        if value is None:
            continue
        lines.append(f"{f.name} = {value}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
