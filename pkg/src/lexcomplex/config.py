"""Run configuration, model registry, and experiment manifests.

The config file is flat ``key = value`` text, one setting per line, with
``#`` comments. Recognized keys:

    subtask             single | mwe
    train, trial, test  dataset paths
    feature_set         a | b | c
    freq_table          path to the word<TAB>zipf frequency table
    emb50, emb100       paths to 50- and 100-dimensional embedding files
    rounds              boosting rounds (int)
    max_depth           tree depth (int)
    learning_rate       shrinkage in (0, 1]
    reg_lambda          L2 leaf penalty (>= 0)
    gamma               minimum split gain (>= 0)
    min_child_weight    minimum child hessian sum (>= 0)
    base_score          initial prediction
    seed                global random seed (int)
    select_on           trial | test  (ensemble selection split)
    modes               comma-joined subset of {average, maximum}
    search_cap          exhaustive search model cap (int)
    model.<name>.predictions   prediction CSV path (registers a model)
    model.<name>.arch          free-text encoder tag
    model.<name>.domain        general | biomedical | europarl | bible |
                               finance | legal | scientific

Unknown keys are rejected. Manifests record every input path with a
content digest so a finished run can be re-checked and re-run
bit-identically.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from .errors import ConfigError

PRETRAINING_DOMAINS = (
    "general",
    "biomedical",
    "europarl",
    "bible",
    "finance",
    "legal",
    "scientific",
)

_SCALAR_KEYS = {
    "subtask": str,
    "train": str,
    "trial": str,
    "test": str,
    "feature_set": str,
    "freq_table": str,
    "emb50": str,
    "emb100": str,
    "rounds": int,
    "max_depth": int,
    "learning_rate": float,
    "reg_lambda": float,
    "gamma": float,
    "min_child_weight": float,
    "base_score": float,
    "seed": int,
    "select_on": str,
    "modes": str,
    "search_cap": int,
}

_PATH_KEYS = ("train", "trial", "test", "freq_table", "emb50", "emb100")
_MODEL_SUBKEYS = ("predictions", "arch", "domain")


@dataclass(frozen=True)
class ModelEntry:
    """Registry metadata for one external prediction source."""

    name: str
    predictions: str
    arch: str = ""
    domain: str = "general"

    def __post_init__(self) -> None:
        if self.domain not in PRETRAINING_DOMAINS:
            raise ConfigError(
                f"model {self.name!r}: unknown pretraining domain "
                f"{self.domain!r}; expected one of "
                + ", ".join(PRETRAINING_DOMAINS)
            )


@dataclass(frozen=True)
class RunConfig:
    subtask: str | None = None
    train: str | None = None
    trial: str | None = None
    test: str | None = None
    feature_set: str = "a"
    freq_table: str | None = None
    emb50: str | None = None
    emb100: str | None = None
    rounds: int = 100
    max_depth: int = 6
    learning_rate: float = 0.3
    reg_lambda: float = 1.0
    gamma: float = 0.0
    min_child_weight: float = 1.0
    base_score: float = 0.5
    seed: int = 0
    select_on: str = "trial"
    modes: str = "average,maximum"
    search_cap: int = 20
    models: tuple[ModelEntry, ...] = ()


def _parse_lines(path) -> list[tuple[int, str, str]]:
    entries: list[tuple[int, str, str]] = []
    text = Path(path).read_text(encoding="utf-8")
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(
                f"{path}: line {lineno}: expected 'key = value', got "
                f"{line!r}"
            )
        key, _, value = line.partition("=")
        entries.append((lineno, key.strip(), value.strip()))
    return entries


def load_config(path, check_paths: bool = True) -> RunConfig:
    """Read and validate a run configuration file."""
    seen: set[str] = set()
    scalars: dict[str, object] = {}
    model_raw: dict[str, dict[str, str]] = {}
    for lineno, key, value in _parse_lines(path):
        if key in seen:
            raise ConfigError(f"{path}: line {lineno}: duplicate key {key!r}")
        seen.add(key)
        if key.startswith("model."):
            parts = key.split(".")
            if len(parts) != 3 or parts[2] not in _MODEL_SUBKEYS:
                raise ConfigError(
                    f"{path}: line {lineno}: unknown key {key!r}; model keys "
                    f"are model.<name>.<"
                    + "|".join(_MODEL_SUBKEYS)
                    + ">"
                )
            model_raw.setdefault(parts[1], {})[parts[2]] = value
            continue
        if key not in _SCALAR_KEYS:
            raise ConfigError(f"{path}: line {lineno}: unknown key {key!r}")
        caster = _SCALAR_KEYS[key]
        try:
            scalars[key] = caster(value)
        except ValueError:
            raise ConfigError(
                f"{path}: line {lineno}: bad value {value!r} for {key!r}"
            ) from None
    models = []
    for name, sub in model_raw.items():
        if "predictions" not in sub:
            raise ConfigError(
                f"{path}: model {name!r} lacks model.{name}.predictions"
            )
        models.append(
            ModelEntry(
                name=name,
                predictions=sub["predictions"],
                arch=sub.get("arch", ""),
                domain=sub.get("domain", "general"),
            )
        )
    config = RunConfig(models=tuple(models), **scalars)
    if config.subtask is not None and config.subtask not in ("single", "mwe"):
        raise ConfigError(f"{path}: subtask must be single or mwe")
    if config.feature_set not in ("a", "b", "c"):
        raise ConfigError(f"{path}: feature_set must be a, b, or c")
    if config.select_on not in ("trial", "test"):
        raise ConfigError(f"{path}: select_on must be trial or test")
    for mode in config.modes.split(","):
        if mode not in ("average", "maximum"):
            raise ConfigError(f"{path}: unknown aggregation mode {mode!r}")
    if check_paths:
        for key in _PATH_KEYS:
            value = getattr(config, key)
            if value is not None and not Path(value).exists():
                raise ConfigError(f"{path}: {key} path {value!r} not found")
        for entry in config.models:
            if not Path(entry.predictions).exists():
                raise ConfigError(
                    f"{path}: model {entry.name!r} predictions path "
                    f"{entry.predictions!r} not found"
                )
    return config


def write_config(config: RunConfig, path) -> None:
    """Serialize a configuration so that load(write(c)) == c."""
    lines: list[str] = []
    for f in fields(RunConfig):
        if f.name == "models":
            continue
        value = getattr(config, f.name)
        if value is None:
            continue
        lines.append(f"{f.name} = {value}")
    for entry in config.models:
        lines.append(f"model.{entry.name}.predictions = {entry.predictions}")
        if entry.arch:
            lines.append(f"model.{entry.name}.arch = {entry.arch}")
        lines.append(f"model.{entry.name}.domain = {entry.domain}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="")


def file_digest(path) -> str:
    """sha256 content digest, hex, prefixed with the algorithm name."""
    digest = hashlib.sha256(Path(path).read_bytes()).hexdigest()
    return f"sha256:{digest}"


@dataclass(frozen=True)
class ResourceDigest:
    path: str
    sha256: str


@dataclass(frozen=True)
class RunManifest:
    """Reproducibility envelope: inputs, digests, parameters, seed."""

    command: str
    subtask: str | None = None
    splits: tuple[str, ...] = ()
    feature_set: str | None = None
    resources: dict[str, ResourceDigest] = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    settings: dict = field(default_factory=dict)
    seed: int = 0

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True) + "\n"


def digest_resources(paths: dict[str, str]) -> dict[str, ResourceDigest]:
    return {
        label: ResourceDigest(path=str(p), sha256=file_digest(p))
        for label, p in paths.items()
    }


def write_manifest(manifest: RunManifest, path) -> None:
    Path(path).write_text(manifest.to_json(), encoding="utf-8", newline="")


def load_manifest(path) -> RunManifest:
    """Read a manifest back, validating that every resource has a digest."""
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: malformed manifest: {exc}") from None
    resources: dict[str, ResourceDigest] = {}
    for label, entry in raw.get("resources", {}).items():
        if not entry.get("sha256"):
            raise ConfigError(
                f"{path}: resource {label!r} lacks a content digest"
            )
        resources[label] = ResourceDigest(
            path=entry["path"], sha256=entry["sha256"]
        )
    try:
        return RunManifest(
            command=raw["command"],
            subtask=raw.get("subtask"),
            splits=tuple(raw.get("splits", ())),
            feature_set=raw.get("feature_set"),
            resources=resources,
            params=raw.get("params", {}),
            settings=raw.get("settings", {}),
            seed=int(raw.get("seed", 0)),
        )
    except KeyError as exc:
        raise ConfigError(f"{path}: manifest lacks {exc}") from None
