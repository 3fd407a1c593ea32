import json
import subprocess
import sys

import pytest

from lexcomplex.cli import build_parser, main
from lexcomplex.corpus import parse_predictions


def run(*argv):
    return main([str(a) for a in argv])


@pytest.fixture()
def single_tsv(data_dir):
    return data_dir / "mini_single.tsv"


@pytest.fixture()
def gold_pred(tmp_path, single_dataset):
    """Predictions equal to the gold labels."""
    path = tmp_path / "gold_model.csv"
    rows = ["id,score"] + [
        f"{inst.id},{inst.gold!r}" for inst in single_dataset.instances
    ]
    path.write_text("\n".join(rows) + "\n")
    return path


@pytest.fixture()
def other_pred(tmp_path, single_dataset):
    path = tmp_path / "other_model.csv"
    scores = [0.3, 0.35, 0.25, 0.5, 0.65, 0.4]
    rows = ["id,score"] + [
        f"{inst.id},{s!r}"
        for inst, s in zip(single_dataset.instances, scores)
    ]
    path.write_text("\n".join(rows) + "\n")
    return path


class TestFeaturize:
    def test_set_a_shape(self, tmp_path, data_dir, single_tsv):
        out = tmp_path / "f.csv"
        assert run(
            "featurize", "--data", single_tsv, "--subtask", "single",
            "--set", "a", "--freq", data_dir / "freq.tsv", "--out", out,
        ) == 0
        lines = out.read_text().strip().split("\n")
        assert len(lines) == 7  # header + 6 rows
        assert lines[0].count(",") == 6  # id + 6 slots
        assert (tmp_path / "f.csv.manifest.json").exists()

    def test_set_b_without_emb50_is_config_error(self, tmp_path, data_dir,
                                                 single_tsv):
        code = run(
            "featurize", "--data", single_tsv, "--subtask", "single",
            "--set", "b", "--freq", data_dir / "freq.tsv",
            "--emb100", data_dir / "emb100.txt",
            "--out", tmp_path / "f.csv",
        )
        assert code == 2

    def test_set_c_single_scorer_width(self, tmp_path, data_dir, single_tsv):
        out = tmp_path / "f.csv"
        assert run(
            "featurize", "--data", single_tsv, "--subtask", "single",
            "--set", "c", "--freq", data_dir / "freq.tsv",
            "--emb50", data_dir / "emb50.txt",
            "--emb100", data_dir / "emb100.txt",
            "--lm", f"unigram:uni={data_dir / 'unigram_counts.tsv'}",
            "--out", out,
        ) == 0
        header = out.read_text().split("\n", 1)[0]
        assert len(header.split(",")) == 158  # id + 157 slots

    def test_idempotent_across_runs_and_threads(self, tmp_path, data_dir,
                                                single_tsv):
        outputs = []
        for name, threads in (("a.csv", 1), ("b.csv", 1), ("c.csv", 4)):
            out = tmp_path / name
            assert run(
                "featurize", "--data", single_tsv, "--subtask", "single",
                "--set", "a", "--freq", data_dir / "freq.tsv",
                "--threads", threads, "--out", out,
            ) == 0
            outputs.append(out.read_bytes())
        assert outputs[0] == outputs[1] == outputs[2]

    def test_bad_lm_flag(self, tmp_path, data_dir, single_tsv):
        assert run(
            "featurize", "--data", single_tsv, "--subtask", "single",
            "--set", "a", "--freq", data_dir / "freq.tsv",
            "--lm", "nonsense", "--out", tmp_path / "f.csv",
        ) == 2


class TestTrainPredictEvaluate:
    def _featurize(self, tmp_path, data_dir, single_tsv):
        out = tmp_path / "feat.csv"
        assert run(
            "featurize", "--data", single_tsv, "--subtask", "single",
            "--set", "a", "--freq", data_dir / "freq.tsv", "--out", out,
        ) == 0
        return out

    def test_full_pipeline_deterministic(self, tmp_path, data_dir,
                                         single_tsv):
        feats = self._featurize(tmp_path, data_dir, single_tsv)
        digests = []
        for tag in ("one", "two"):
            model = tmp_path / f"model_{tag}.json"
            preds = tmp_path / f"preds_{tag}.csv"
            assert run(
                "train", "--features", feats, "--data", single_tsv,
                "--subtask", "single", "--rounds", 10, "--max-depth", 3,
                "--out", model,
            ) == 0
            assert run(
                "predict", "--model", model, "--features", feats,
                "--out", preds,
            ) == 0
            digests.append(preds.read_bytes())
        assert digests[0] == digests[1]
        scores = parse_predictions(tmp_path / "preds_one.csv")
        assert all(0.0 <= s <= 1.0 for s in scores.scores.values())

    def test_train_id_mismatch(self, tmp_path, data_dir, single_tsv):
        feats = self._featurize(tmp_path, data_dir, single_tsv)
        text = feats.read_text().replace("S01", "WRONG")
        feats.write_text(text)
        assert run(
            "train", "--features", feats, "--data", single_tsv,
            "--subtask", "single", "--out", tmp_path / "m.json",
        ) == 1

    def test_evaluate_gold_equals_pred(self, capsys, single_tsv, gold_pred):
        assert run(
            "evaluate", "--pred", gold_pred, "--data", single_tsv,
            "--subtask", "single",
        ) == 0
        out = capsys.readouterr().out
        assert "pearson: 1.0" in out
        assert "mse:     0.0" in out

    def test_evaluate_csv_to_file(self, tmp_path, single_tsv, gold_pred):
        report = tmp_path / "report.csv"
        assert run(
            "evaluate", "--pred", gold_pred, "--data", single_tsv,
            "--subtask", "single", "--format", "csv", "--out", report,
        ) == 0
        assert report.read_text() == "pearson,mse,n\n1.0,0.0,6\n"
        assert (tmp_path / "report.csv.manifest.json").exists()


class TestEnsembleSearch:
    def test_ensemble_average(self, tmp_path, single_tsv, gold_pred,
                              other_pred):
        out = tmp_path / "agg.csv"
        assert run(
            "ensemble", "--pred", gold_pred, "--pred", other_pred,
            "--data", single_tsv, "--subtask", "single",
            "--members", "gold_model+other_model", "--mode", "average",
            "--out", out,
        ) == 0
        agg = parse_predictions(out)
        assert agg.scores["S01"] == pytest.approx((0.25 + 0.3) / 2, abs=1e-12)

    def test_search_two_models_six_rows(self, tmp_path, single_tsv,
                                        gold_pred, other_pred):
        out = tmp_path / "leaderboard.csv"
        assert run(
            "search", "--pred", gold_pred, "--pred", other_pred,
            "--data", single_tsv, "--subtask", "single", "--out", out,
        ) == 0
        lines = out.read_text().strip().split("\n")
        assert len(lines) == 7  # header + 3 subsets x 2 modes
        assert lines[0] == "rank,members,mode,pearson,mse"
        # gold_model alone correlates perfectly
        assert lines[1].split(",")[1] == "gold_model"
        assert lines[1].split(",")[3] == "1.0"

    def test_search_from_config_registry(self, tmp_path, single_tsv,
                                         gold_pred, other_pred):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(
            f"model.gold_model.predictions = {gold_pred}\n"
            f"model.other_model.predictions = {other_pred}\n"
        )
        out = tmp_path / "lb.csv"
        assert run(
            "search", "--config", cfg, "--data", single_tsv,
            "--subtask", "single", "--out", out,
        ) == 0
        assert len(out.read_text().strip().split("\n")) == 7

    def test_search_missing_preds_is_usage_error(self, tmp_path, single_tsv):
        assert run(
            "search", "--data", single_tsv, "--subtask", "single",
            "--out", tmp_path / "lb.csv",
        ) == 2

    def test_alignment_failure_is_runtime_error(self, tmp_path, single_tsv,
                                                gold_pred):
        broken = tmp_path / "broken.csv"
        lines = gold_pred.read_text().strip().split("\n")
        broken.write_text("\n".join(lines[:-1]) + "\n")
        assert run(
            "search", "--pred", broken, "--data", single_tsv,
            "--subtask", "single", "--out", tmp_path / "lb.csv",
        ) == 1


class TestSidecarTemplate:
    def test_emits_rows(self, tmp_path, data_dir):
        out = tmp_path / "template.csv"
        assert run(
            "sidecar-template", "--data", data_dir / "mini_mwe.tsv",
            "--subtask", "mwe", "--out", out,
        ) == 0
        lines = out.read_text().strip().split("\n")
        assert len(lines) == 13  # header + 2 rows per MWE


class TestCliSurface:
    def test_help_lists_every_flag(self, capsys):
        parser = build_parser()
        expected = {
            "featurize": ["--data", "--subtask", "--set", "--freq",
                          "--emb50", "--emb100", "--lm", "--lm-k", "--out",
                          "--threads", "--split", "--unlabeled", "--seed",
                          "--config"],
            "train": ["--features", "--data", "--subtask", "--rounds",
                      "--max-depth", "--learning-rate", "--reg-lambda",
                      "--gamma", "--min-child-weight", "--base-score",
                      "--out"],
            "predict": ["--model", "--features", "--out"],
            "evaluate": ["--pred", "--data", "--subtask", "--format",
                         "--out"],
            "ensemble": ["--pred", "--data", "--members", "--mode", "--out"],
            "search": ["--pred", "--data", "--modes", "--select-on", "--cap",
                       "--threads", "--out"],
            "sidecar-template": ["--data", "--subtask", "--out"],
        }
        sub_actions = [
            a for a in parser._actions
            if hasattr(a, "choices") and isinstance(a.choices, dict)
        ][0]
        for command, flags in expected.items():
            text = sub_actions.choices[command].format_help()
            for flag in flags:
                assert flag in text, f"{command} --help lacks {flag}"

    def test_module_entrypoint(self, tmp_path, data_dir):
        result = subprocess.run(
            [sys.executable, "-m", "lexcomplex", "featurize",
             "--data", str(data_dir / "mini_single.tsv"),
             "--subtask", "single", "--set", "a",
             "--freq", str(data_dir / "freq.tsv"),
             "--out", str(tmp_path / "f.csv")],
            capture_output=True, text=True,
        )
        assert result.returncode == 0, result.stderr
        assert (tmp_path / "f.csv").exists()
        assert result.stdout == ""  # data to files, logs to stderr

    def test_search_select_on_test_warns(self, tmp_path, single_tsv,
                                         gold_pred, other_pred, caplog):
        out = tmp_path / "lb.csv"
        assert run(
            "search", "--pred", gold_pred, "--pred", other_pred,
            "--data", single_tsv, "--subtask", "single",
            "--select-on", "test", "--out", out,
        ) == 0
        manifest = json.loads(
            (tmp_path / "lb.csv.manifest.json").read_text()
        )
        assert manifest["settings"]["select_on"] == "test"
        assert any("leak" in r.message for r in caplog.records)

    def test_manifest_records_inputs(self, tmp_path, data_dir, single_tsv):
        out = tmp_path / "f.csv"
        run(
            "featurize", "--data", single_tsv, "--subtask", "single",
            "--set", "a", "--freq", data_dir / "freq.tsv", "--out", out,
            "--seed", "7",
        )
        manifest = json.loads((tmp_path / "f.csv.manifest.json").read_text())
        assert manifest["seed"] == 7
        assert manifest["command"] == "featurize"
        assert set(manifest["resources"]) == {"data", "freq"}
        for entry in manifest["resources"].values():
            assert entry["sha256"].startswith("sha256:")
