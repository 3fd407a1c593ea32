"""Command-line surface: fine-tune and emit files for the core toolkit."""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import logging
import math
import sys
from pathlib import Path

from .config import ConfigError, FineTuneConfig, load_config
from .data import DataError, read_rows
from .emit import emit_masked_probabilities, emit_predictions
from .encoders import build_masked_scorer
from .trainer import fine_tune, restore

log = logging.getLogger("transformer_scorer")


def _digest(path) -> str:
    return "sha256:" + hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _write_manifest(out, payload: dict) -> None:
    Path(f"{out}.manifest.json").write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )


def cmd_finetune(args) -> int:
    config = load_config(args.config) if args.config else FineTuneConfig()
    overrides = {}
    if args.encoder:
        overrides["encoder"] = args.encoder
    if args.train:
        overrides["train"] = str(args.train)
    if args.trial:
        overrides["trial"] = str(args.trial)
    if args.seed is not None:
        overrides["seed"] = args.seed
    if overrides:
        config = dataclasses.replace(config, **overrides)
    if not config.train or not config.trial:
        raise ConfigError("finetune needs --train and --trial datasets")
    train_rows = read_rows(config.train)
    trial_rows = read_rows(config.trial)
    result = fine_tune(train_rows, trial_rows, config)
    score_rows = read_rows(args.data) if args.data else trial_rows
    count = emit_predictions(restore(result, config), score_rows, args.out)
    _write_manifest(
        args.out,
        {
            "command": "finetune",
            "config": dataclasses.asdict(config),
            "pooling": result.pooling,
            "epochs": [
                {
                    "epoch": r.epoch,
                    "val_pearson": (
                        None if math.isnan(r.val_pearson) else r.val_pearson
                    ),
                }
                for r in result.records
            ],
            "best_epoch": result.best.epoch,
            "resources": {
                "train": {"path": str(config.train),
                          "sha256": _digest(config.train)},
                "trial": {"path": str(config.trial),
                          "sha256": _digest(config.trial)},
                **(
                    {"data": {"path": str(args.data),
                              "sha256": _digest(args.data)}}
                    if args.data
                    else {}
                ),
            },
        },
    )
    log.info(
        "best checkpoint: epoch %d (trial pearson %s); wrote %d scores -> %s",
        result.best.epoch,
        result.best.val_pearson,
        count,
        args.out,
    )
    return 0


def cmd_mask_probs(args) -> int:
    rows = read_rows(args.data)
    scorer = build_masked_scorer(args.encoder)
    count = emit_masked_probabilities(scorer, rows, args.out)
    _write_manifest(
        args.out,
        {
            "command": "mask-probs",
            "encoder": args.encoder,
            "resources": {
                "data": {"path": str(args.data), "sha256": _digest(args.data)}
            },
        },
    )
    log.info("wrote %d probability rows -> %s", count, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="transformer-scorer",
        description="Fine-tune encoders for complexity scoring and emit "
                    "prediction / masked-probability files",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("finetune", help="fine-tune and emit predictions")
    p.add_argument("--config", default=None, help="key = value config file")
    p.add_argument("--train", default=None, help="labeled training TSV")
    p.add_argument("--trial", default=None, help="labeled validation TSV")
    p.add_argument("--data", default=None,
                   help="dataset to score with the best checkpoint "
                        "(default: the trial set)")
    p.add_argument("--encoder", default=None,
                   help="'stub' or a pre-trained checkpoint name")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True, help="prediction CSV output path")
    p.set_defaults(func=cmd_finetune)

    p = sub.add_parser("mask-probs",
                       help="emit a masked-probability sidecar")
    p.add_argument("--data", required=True, help="dataset TSV")
    p.add_argument("--encoder", default="stub",
                   help="'stub' or a pre-trained MLM checkpoint name")
    p.add_argument("--out", required=True, help="sidecar CSV output path")
    p.set_defaults(func=cmd_mask_probs)

    return parser


def main(argv=None) -> int:
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.INFO,
        format="%(levelname)s %(message)s",
    )
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        log.error("%s", exc)
        return 2
    except (DataError, ValueError) as exc:
        log.error("%s", exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
