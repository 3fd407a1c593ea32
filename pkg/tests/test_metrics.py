import math

import numpy as np
import pytest
import scipy.stats

from lexcomplex.corpus import Corpus, Dataset, Instance, PredictionSet, Subtask
from lexcomplex.errors import (
    DegenerateInputError,
    InputError,
    UnlabeledDatasetError,
)
from lexcomplex.metrics import evaluate, format_report, mse, pearson


class TestPearson:
    def test_perfect_correlation(self):
        assert pearson([1, 2, 3], [1, 2, 3]) == 1.0

    def test_perfect_anticorrelation(self):
        assert pearson([1, 2, 3], [3, 2, 1]) == -1.0

    def test_hand_computed_point_eight(self):
        # covariance 4.0, both centered sums of squares 5 -> 4/sqrt(25)
        r = pearson([1, 2, 3, 4], [1, 3, 2, 4])
        assert r == pytest.approx(0.8, abs=1e-12)
        oracle, _ = scipy.stats.pearsonr([1, 2, 3, 4], [1, 3, 2, 4])
        assert r == pytest.approx(oracle, abs=1e-12)

    def test_matches_reference_oracle_randomized(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            n = int(rng.integers(2, 40))
            x = rng.normal(size=n)
            y = rng.normal(size=n)
            oracle, _ = scipy.stats.pearsonr(x, y)
            assert pearson(x, y) == pytest.approx(oracle, abs=1e-12)

    def test_zero_variance_raises(self):
        with pytest.raises(DegenerateInputError):
            pearson([1, 1, 1], [1, 2, 3])
        with pytest.raises(DegenerateInputError):
            pearson([1, 2, 3], [5, 5, 5])

    def test_length_mismatch(self):
        with pytest.raises(InputError):
            pearson([1, 2], [1, 2, 3])

    def test_too_few_samples(self):
        with pytest.raises(InputError):
            pearson([1], [2])

    def test_symmetry_and_bounds(self):
        rng = np.random.default_rng(5)
        for _ in range(25):
            x = rng.uniform(0, 1, size=12)
            y = rng.uniform(0, 1, size=12)
            r = pearson(x, y)
            assert r == pearson(y, x)
            assert -1.0 <= r <= 1.0

    def test_affine_invariance(self):
        rng = np.random.default_rng(9)
        x = rng.uniform(0, 1, size=20)
        y = rng.uniform(0, 1, size=20)
        base = pearson(x, y)
        for _ in range(50):
            a = rng.uniform(0.01, 10)
            b = rng.uniform(-5, 5)
            assert pearson(a * x + b, y) == pytest.approx(base, abs=1e-9)


class TestMse:
    def test_equal_vectors(self):
        assert mse([0.1, 0.2], [0.1, 0.2]) == 0.0

    def test_unit_error(self):
        assert mse([0, 1], [1, 0]) == 1.0

    def test_hand_computed(self):
        # (0.01 + 0.01 + 0.01) / 3
        assert mse([0.2, 0.4, 0.6], [0.3, 0.3, 0.5]) == pytest.approx(
            0.01, abs=1e-15
        )

    def test_symmetric_nonnegative(self):
        rng = np.random.default_rng(13)
        for _ in range(25):
            p = rng.uniform(0, 1, size=9)
            g = rng.uniform(0, 1, size=9)
            assert mse(p, g) == mse(g, p) >= 0.0

    def test_zero_iff_equal(self):
        rng = np.random.default_rng(14)
        p = rng.uniform(0, 1, size=9)
        assert mse(p, p) == 0.0
        q = p.copy()
        q[3] += 1e-6
        assert mse(p, q) > 0.0

    def test_constant_minimizer_is_gold_mean(self):
        # grid-search oracle over constant predictions
        rng = np.random.default_rng(15)
        gold = rng.uniform(0, 1, size=11)
        grid = np.linspace(0, 1, 2001)
        losses = [mse(np.full_like(gold, c), gold) for c in grid]
        best_constant = grid[int(np.argmin(losses))]
        assert best_constant == pytest.approx(gold.mean(), abs=1e-3)

    def test_length_mismatch(self):
        with pytest.raises(InputError):
            mse([1.0], [1.0, 2.0])


def _dataset(golds):
    insts = tuple(
        Instance(f"i{k}", Corpus.BIOMED, "a cell", "cell", Subtask.SINGLE,
                 gold=g)
        for k, g in enumerate(golds)
    )
    return Dataset(insts, subtask=Subtask.SINGLE)


class TestEvaluate:
    def test_predictions_equal_gold(self):
        ds = _dataset([0.1, 0.5, 0.9])
        pred = PredictionSet("m", {"i0": 0.1, "i1": 0.5, "i2": 0.9})
        report = evaluate(pred, ds)
        assert report.pearson == 1.0
        assert report.mse == 0.0
        assert report.n == 3

    def test_constant_predictions_degenerate(self):
        ds = _dataset([0.1, 0.5, 0.9])
        pred = PredictionSet("m", {"i0": 0.4, "i1": 0.4, "i2": 0.4})
        with pytest.raises(DegenerateInputError):
            evaluate(pred, ds)

    def test_two_sample_case(self):
        ds = _dataset([0.2, 0.8])
        pred = PredictionSet("m", {"i0": 0.3, "i1": 0.7})
        report = evaluate(pred, ds)
        oracle, _ = scipy.stats.pearsonr([0.3, 0.7], [0.2, 0.8])
        assert report.pearson == pytest.approx(oracle, abs=1e-12)
        assert report.mse == pytest.approx(0.01, abs=1e-15)

    def test_unlabeled_dataset(self):
        inst = Instance("i0", Corpus.BIBLE, "a lawn", "lawn", Subtask.SINGLE)
        ds = Dataset((inst,), subtask=Subtask.SINGLE)
        with pytest.raises(UnlabeledDatasetError):
            evaluate(PredictionSet("m", {"i0": 0.5}), ds)


class TestFormatReport:
    def test_csv(self):
        ds = _dataset([0.1, 0.5, 0.9])
        report = evaluate(
            PredictionSet("m", {"i0": 0.1, "i1": 0.5, "i2": 0.9}), ds
        )
        assert format_report(report, "csv") == "pearson,mse,n\n1.0,0.0,3\n"

    def test_text_mentions_both_metrics(self):
        ds = _dataset([0.1, 0.5, 0.9])
        report = evaluate(
            PredictionSet("m", {"i0": 0.1, "i1": 0.5, "i2": 0.9}), ds
        )
        text = format_report(report, "text")
        assert "pearson" in text and "mse" in text

    def test_unknown_format(self):
        ds = _dataset([0.1, 0.5, 0.9])
        report = evaluate(
            PredictionSet("m", {"i0": 0.1, "i1": 0.5, "i2": 0.9}), ds
        )
        with pytest.raises(InputError):
            format_report(report, "yaml")
