"""Command-line surface.

Subcommands orchestrate the library modules and never contain logic of
their own. Logs go to standard error; data goes to files or standard
output. Exit codes: 0 success, 1 runtime error, 2 usage or configuration
error. Every command that writes an output file also writes a
``<out>.manifest.json`` run manifest next to it.
"""

from __future__ import annotations

import argparse
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import config as config_mod
from . import corpus, ensemble, features, gbdt, lm, metrics
from .errors import ConfigError, InputError, LexComplexError, ResourceError

log = logging.getLogger("lexcomplex")


def _subtask(value: str) -> corpus.Subtask:
    return corpus.Subtask(value)


def _split(value: str) -> corpus.Split:
    return corpus.Split(value)


def _parse_lm_flag(raw: str, k: float) -> lm.LmScorer:
    head, sep, path = raw.partition("=")
    if not sep or ":" not in head:
        raise ResourceError(
            f"bad --lm value {raw!r}; expected KIND:NAME=PATH with KIND "
            f"unigram or sidecar"
        )
    kind, _, name = head.partition(":")
    if not name:
        raise ResourceError(f"bad --lm value {raw!r}: empty scorer name")
    if kind == "unigram":
        return lm.UnigramScorer(
            name=name, counts=lm.read_unigram_counts(path), k=k
        )
    if kind == "sidecar":
        return lm.SidecarScorer.read(path, name=name)
    raise ResourceError(
        f"bad --lm value {raw!r}: unknown kind {kind!r}; "
        f"expected unigram or sidecar"
    )


def _write_manifest(out_path: str, manifest: config_mod.RunManifest) -> None:
    config_mod.write_manifest(manifest, f"{out_path}.manifest.json")


def _load_config_arg(args) -> config_mod.RunConfig | None:
    if getattr(args, "config", None):
        return config_mod.load_config(args.config)
    return None


def cmd_featurize(args) -> int:
    cfg = _load_config_arg(args)
    freq_path = args.freq or (cfg.freq_table if cfg else None)
    emb50_path = args.emb50 or (cfg.emb50 if cfg else None)
    emb100_path = args.emb100 or (cfg.emb100 if cfg else None)
    if freq_path is None:
        raise ResourceError("featurize requires --freq (or freq_table in "
                            "--config)")
    dataset = corpus.parse_dataset(
        args.data, subtask=args.subtask, labeled=not args.unlabeled,
        split=args.split,
    )
    scorers = [_parse_lm_flag(raw, args.lm_k) for raw in args.lm]
    featurizer = features.ComplexityFeaturizer(
        feature_set=args.set,
        frequency_table=features.FrequencyTable.read(freq_path),
        embeddings_50=(
            features.EmbeddingTable.read(emb50_path) if emb50_path else None
        ),
        embeddings_100=(
            features.EmbeddingTable.read(emb100_path) if emb100_path else None
        ),
        lm_scorers=tuple(scorers),
    ).fit(dataset.instances)
    if args.threads > 1:
        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            rows = list(pool.map(featurizer.transform_one, dataset.instances))
        matrix = (
            np.vstack(rows)
            if rows
            else np.zeros((0, featurizer.n_features_out_))
        )
    else:
        matrix = featurizer.transform(dataset.instances)
    features.write_feature_csv(
        args.out, dataset.ids(), featurizer.feature_names_, matrix
    )
    resources = {"data": args.data, "freq": freq_path}
    if emb50_path:
        resources["emb50"] = emb50_path
    if emb100_path:
        resources["emb100"] = emb100_path
    for raw in args.lm:
        _, _, path = raw.partition("=")
        resources[f"lm:{raw.split('=')[0]}"] = path
    _write_manifest(
        args.out,
        config_mod.RunManifest(
            command="featurize",
            subtask=args.subtask.value,
            splits=(args.split.value,),
            feature_set=args.set,
            resources=config_mod.digest_resources(resources),
            params={"lm_k": args.lm_k},
            settings={"threads": args.threads, "labeled": not args.unlabeled},
            seed=args.seed,
        ),
    )
    log.info(
        "featurized %d instances into %d slots -> %s",
        len(dataset),
        featurizer.n_features_out_,
        args.out,
    )
    return 0


def _gbdt_params(args, cfg: config_mod.RunConfig | None) -> dict:
    defaults = cfg or config_mod.RunConfig()
    return {
        "n_estimators": args.rounds if args.rounds is not None else defaults.rounds,
        "max_depth": args.max_depth if args.max_depth is not None else defaults.max_depth,
        "learning_rate": args.learning_rate if args.learning_rate is not None else defaults.learning_rate,
        "reg_lambda": args.reg_lambda if args.reg_lambda is not None else defaults.reg_lambda,
        "gamma": args.gamma if args.gamma is not None else defaults.gamma,
        "min_child_weight": args.min_child_weight if args.min_child_weight is not None else defaults.min_child_weight,
        "base_score": args.base_score if args.base_score is not None else defaults.base_score,
    }


def cmd_train(args) -> int:
    cfg = _load_config_arg(args)
    ids, _names, matrix = features.read_feature_csv(args.features)
    dataset = corpus.parse_dataset(args.data, subtask=args.subtask, labeled=True)
    if ids != dataset.ids():
        raise InputError(
            "feature CSV ids do not match the dataset ids in order; "
            "regenerate the features from this dataset"
        )
    params = _gbdt_params(args, cfg)
    model = gbdt.GbdtRegressor(**params).fit(matrix, dataset.gold_vector())
    model.save(args.out)
    _write_manifest(
        args.out,
        config_mod.RunManifest(
            command="train",
            subtask=args.subtask.value,
            splits=("train",),
            resources=config_mod.digest_resources(
                {"features": args.features, "data": args.data}
            ),
            params=params,
            seed=args.seed,
        ),
    )
    log.info(
        "trained %d rounds (final training mse %s) -> %s",
        params["n_estimators"],
        model.training_mse_[-1],
        args.out,
    )
    return 0


def cmd_predict(args) -> int:
    model = gbdt.GbdtRegressor.load(args.model)
    ids, _names, matrix = features.read_feature_csv(args.features)
    scores = model.predict(matrix)
    pred_set = corpus.PredictionSet(
        model_name=Path(args.out).stem,
        scores=dict(zip(ids, (float(s) for s in scores))),
    )
    corpus.write_predictions(pred_set, args.out)
    _write_manifest(
        args.out,
        config_mod.RunManifest(
            command="predict",
            resources=config_mod.digest_resources(
                {"model": args.model, "features": args.features}
            ),
            seed=args.seed,
        ),
    )
    log.info("wrote %d predictions -> %s", len(ids), args.out)
    return 0


def cmd_evaluate(args) -> int:
    pred = corpus.parse_predictions(args.pred)
    dataset = corpus.parse_dataset(args.data, subtask=args.subtask, labeled=True)
    report = metrics.evaluate(pred, dataset)
    rendered = metrics.format_report(report, fmt=args.format)
    if args.out:
        Path(args.out).write_text(rendered, encoding="utf-8", newline="")
        _write_manifest(
            args.out,
            config_mod.RunManifest(
                command="evaluate",
                subtask=args.subtask.value,
                resources=config_mod.digest_resources(
                    {"pred": args.pred, "data": args.data}
                ),
                settings={"format": args.format},
                seed=args.seed,
            ),
        )
    else:
        sys.stdout.write(rendered)
    log.info("pearson %.6f mse %.6f over %d samples", report.pearson,
             report.mse, report.n)
    return 0


def _load_pred_sets(args, cfg: config_mod.RunConfig | None):
    paths = list(args.pred)
    if not paths and cfg is not None:
        paths = [entry.predictions for entry in cfg.models]
    if not paths:
        raise ResourceError(
            "no prediction files: pass --pred or a --config with model "
            "entries"
        )
    return paths, [corpus.parse_predictions(p) for p in paths]


def cmd_ensemble(args) -> int:
    cfg = _load_config_arg(args)
    paths, pred_sets = _load_pred_sets(args, cfg)
    dataset = corpus.parse_dataset(
        args.data, subtask=args.subtask, labeled=not args.unlabeled
    )
    matrix = corpus.align(pred_sets, dataset)
    spec = ensemble.EnsembleSpec(
        members=tuple(args.members.split("+")),
        mode=ensemble.AggregationMode(args.mode),
    )
    scores = ensemble.aggregate(matrix, spec)
    pred_set = corpus.PredictionSet(
        model_name=Path(args.out).stem,
        scores={id_: float(s) for id_, s in zip(matrix.ids, scores)},
    )
    corpus.write_predictions(pred_set, args.out)
    _write_manifest(
        args.out,
        config_mod.RunManifest(
            command="ensemble",
            subtask=args.subtask.value,
            resources=config_mod.digest_resources(
                {"data": args.data, **{f"pred:{p}": p for p in paths}}
            ),
            settings={"members": spec.label, "mode": spec.mode.value},
            seed=args.seed,
        ),
    )
    log.info("aggregated %s (%s) -> %s", spec.label, spec.mode.value, args.out)
    return 0


def cmd_search(args) -> int:
    cfg = _load_config_arg(args)
    paths, pred_sets = _load_pred_sets(args, cfg)
    select_on = args.select_on or (cfg.select_on if cfg else "trial")
    if select_on == "test":
        log.warning(
            "selecting the best combination on the test split leaks test "
            "labels into model choice; this mirrors the original protocol"
        )
    dataset = corpus.parse_dataset(
        args.data, subtask=args.subtask, labeled=True,
        split=corpus.Split(select_on),
    )
    matrix = corpus.align(pred_sets, dataset)
    mode_csv = args.modes or (cfg.modes if cfg else "average,maximum")
    modes = tuple(
        ensemble.AggregationMode(m) for m in mode_csv.split(",") if m
    )
    cap = args.cap if args.cap is not None else (
        cfg.search_cap if cfg else ensemble.DEFAULT_MODEL_CAP
    )
    result = ensemble.search(
        matrix, modes=modes, model_cap=cap, threads=args.threads
    )
    ensemble.write_leaderboard(result, args.out)
    best = result.best
    _write_manifest(
        args.out,
        config_mod.RunManifest(
            command="search",
            subtask=args.subtask.value,
            splits=(select_on,),
            resources=config_mod.digest_resources(
                {"data": args.data, **{f"pred:{p}": p for p in paths}}
            ),
            settings={
                "select_on": select_on,
                "modes": [m.value for m in modes],
                "cap": cap,
                "threads": args.threads,
            },
            seed=args.seed,
        ),
    )
    log.info(
        "best combination: %s (%s) pearson %.6f mse %.6f",
        best.spec.label,
        best.spec.mode.value,
        best.pearson,
        best.mse,
    )
    return 0


def cmd_sidecar_template(args) -> int:
    dataset = corpus.parse_dataset(
        args.data, subtask=args.subtask, labeled=not args.unlabeled
    )
    emitted = lm.write_sidecar_template(dataset, args.out)
    _write_manifest(
        args.out,
        config_mod.RunManifest(
            command="sidecar-template",
            subtask=args.subtask.value,
            resources=config_mod.digest_resources({"data": args.data}),
            seed=args.seed,
        ),
    )
    log.info("emitted %d template rows -> %s", emitted, args.out)
    return 0


def _add_data_flags(p, unlabeled_flag=True):
    p.add_argument("--data", required=True, help="dataset TSV path")
    p.add_argument(
        "--subtask",
        required=True,
        type=_subtask,
        choices=list(corpus.Subtask),
        metavar="{single,mwe}",
        help="declared subtask of the dataset",
    )
    if unlabeled_flag:
        p.add_argument(
            "--unlabeled",
            action="store_true",
            help="parse the dataset without a complexity column",
        )


def _add_common(p):
    p.add_argument("--seed", type=int, default=0,
                   help="global seed, recorded in the manifest")
    p.add_argument("--config", default=None,
                   help="run configuration file supplying defaults")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lexcomplex",
        description="Lexical complexity prediction toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("featurize", help="extract a feature CSV")
    _add_data_flags(p)
    p.add_argument("--set", choices=features.FEATURE_SETS, default="a",
                   help="feature set to emit")
    p.add_argument("--freq", default=None, help="word<TAB>zipf table")
    p.add_argument("--emb50", default=None, help="50-d embedding text file")
    p.add_argument("--emb100", default=None, help="100-d embedding text file")
    p.add_argument("--lm", action="append", default=[],
                   metavar="KIND:NAME=PATH",
                   help="language-model scorer (unigram counts TSV or "
                        "sidecar CSV); repeatable")
    p.add_argument("--lm-k", type=float, default=1.0,
                   help="add-k smoothing constant for unigram scorers")
    p.add_argument("--split", type=_split, choices=list(corpus.Split),
                   default=corpus.Split.TRAIN, metavar="{train,trial,test}",
                   help="split tag recorded in the manifest")
    p.add_argument("--threads", type=int, default=1,
                   help="worker threads; output is independent of this")
    p.add_argument("--out", required=True, help="feature CSV output path")
    _add_common(p)
    p.set_defaults(func=cmd_featurize)

    p = sub.add_parser("train", help="train the boosted-tree model")
    p.add_argument("--features", required=True, help="feature CSV path")
    _add_data_flags(p, unlabeled_flag=False)
    p.add_argument("--rounds", type=int, default=None)
    p.add_argument("--max-depth", type=int, default=None)
    p.add_argument("--learning-rate", type=float, default=None)
    p.add_argument("--reg-lambda", type=float, default=None)
    p.add_argument("--gamma", type=float, default=None)
    p.add_argument("--min-child-weight", type=float, default=None)
    p.add_argument("--base-score", type=float, default=None)
    p.add_argument("--out", required=True, help="model JSON output path")
    _add_common(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="score a feature CSV with a model")
    p.add_argument("--model", required=True, help="model JSON path")
    p.add_argument("--features", required=True, help="feature CSV path")
    p.add_argument("--out", required=True, help="prediction CSV output path")
    _add_common(p)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", help="Pearson and MSE of one prediction "
                                        "file")
    p.add_argument("--pred", required=True, help="prediction CSV path")
    _add_data_flags(p, unlabeled_flag=False)
    p.add_argument("--format", choices=("text", "csv"), default="text")
    p.add_argument("--out", default=None,
                   help="report output path (default: stdout)")
    _add_common(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("ensemble", help="aggregate member predictions")
    p.add_argument("--pred", action="append", default=[],
                   help="prediction CSV; repeatable")
    _add_data_flags(p)
    p.add_argument("--members", required=True,
                   help="+-joined member model names")
    p.add_argument("--mode", choices=[m.value for m in
                                      ensemble.AggregationMode],
                   required=True)
    p.add_argument("--out", required=True, help="aggregated CSV output path")
    _add_common(p)
    p.set_defaults(func=cmd_ensemble)

    p = sub.add_parser("search", help="exhaustive best-combination search")
    p.add_argument("--pred", action="append", default=[],
                   help="prediction CSV; repeatable")
    _add_data_flags(p, unlabeled_flag=False)
    p.add_argument("--modes", default=None,
                   help="comma-joined aggregation modes "
                        "(default average,maximum)")
    p.add_argument("--select-on", choices=("trial", "test"), default=None,
                   help="which split the gold data represents "
                        "(default trial; test reproduces the leaky protocol)")
    p.add_argument("--cap", type=int, default=None,
                   help="exhaustive search model cap (default "
                        "20)")
    p.add_argument("--threads", type=int, default=1,
                   help="worker threads; output is independent of this")
    p.add_argument("--out", required=True, help="leaderboard CSV output path")
    _add_common(p)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("sidecar-template",
                       help="emit a masked-probability sidecar skeleton")
    _add_data_flags(p)
    p.add_argument("--out", required=True, help="sidecar CSV output path")
    _add_common(p)
    p.set_defaults(func=cmd_sidecar_template)

    return parser


def main(argv=None) -> int:
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.INFO,
        format="%(levelname)s %(message)s",
    )
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ResourceError) as exc:
        log.error("%s", exc)
        return 2
    except LexComplexError as exc:
        log.error("%s", exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
