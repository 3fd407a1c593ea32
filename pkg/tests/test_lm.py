import logging
import math

import pytest

from lexcomplex.corpus import Corpus, Dataset, Instance, Subtask, parse_dataset
from lexcomplex.errors import (
    DataFormatError,
    InputError,
    ScoreRangeError,
    SidecarLookupError,
)
from lexcomplex.lm import (
    MaskedQuery,
    SidecarScorer,
    UnigramScorer,
    expression_probability,
    instance_probability,
    locate_target,
    read_unigram_counts,
    write_sidecar_template,
)
from lexcomplex.text import tokenize


class TestUnigramScorer:
    def test_relative_frequency_no_smoothing(self):
        scorer = UnigramScorer("u", {"lawn": 10, "the": 90}, k=0.0)
        tokens = ["the", "lawn", "hums"]
        for position in range(3):
            assert scorer.token_probability("x", tokens, position, "lawn") \
                == 0.1

    def test_add_k_for_absent_token(self):
        scorer = UnigramScorer("u", {"a": 60, "b": 40}, k=1.0)
        # (0 + 1) / (100 + 2)
        assert scorer.token_probability("x", ["a"], 0, "zzz") == 1 / 102

    def test_vocabulary_probabilities_sum_to_one(self):
        scorer = UnigramScorer("u", {"a": 3, "b": 5, "c": 11}, k=0.7)
        total = math.fsum(
            scorer.token_probability("x", ["a"], 0, word)
            for word in scorer.vocabulary
        )
        assert total == pytest.approx(1.0, abs=1e-9)

    def test_case_insensitive_lookup(self):
        scorer = UnigramScorer("u", {"Lawn": 10, "the": 90}, k=0.0)
        assert scorer.token_probability("x", ["x"], 0, "LAWN") == 0.1

    def test_mask_index_bounds(self):
        scorer = UnigramScorer("u", {"a": 1}, k=1.0)
        with pytest.raises(InputError):
            scorer.token_probability("x", ["a"], 5, "a")

    def test_negative_k_rejected(self):
        with pytest.raises(InputError):
            UnigramScorer("u", {"a": 1}, k=-0.5)


class TestSidecarScorer:
    def test_lookup(self, sidecar_scorer):
        p = sidecar_scorer.token_probability("S01", ["x"] * 6, 2, "lawn")
        assert p == 0.603

    def test_missing_key_raises(self, sidecar_scorer):
        with pytest.raises(SidecarLookupError, match="S01"):
            sidecar_scorer.token_probability("S01", ["x"] * 6, 5, "temple")

    def test_out_of_range_probability_rejected(self, tmp_path):
        path = tmp_path / "s.csv"
        path.write_text("id,position,token,probability\na,0,w,1.5\n")
        with pytest.raises(ScoreRangeError, match="line 2"):
            SidecarScorer.read(path)

    def test_bad_position_rejected(self, tmp_path):
        path = tmp_path / "s.csv"
        path.write_text("id,position,token,probability\na,two,w,0.5\n")
        with pytest.raises(DataFormatError, match="line 2"):
            SidecarScorer.read(path)


class TestLocateTarget:
    def test_single_token(self):
        q = locate_target("Behold the lawn before the temple", "lawn")
        assert (q.start, q.stop) == (2, 3)

    def test_case_insensitive(self):
        q = locate_target("The LAWN is green", "lawn")
        assert (q.start, q.stop) == (1, 2)

    def test_first_match_wins(self):
        q = locate_target("lawn here and lawn there", "lawn")
        assert q.start == 0

    def test_multi_token_span(self):
        sentence = "I just love mowing the lawn with a lawn mower"
        q = locate_target(sentence, "lawn mower")
        tokens = tokenize(sentence)
        assert tokens[q.start:q.stop] == ["lawn", "mower"]
        assert q.start == 8

    def test_punctuation_blocks_match(self):
        assert locate_target("behold the lawn.", "lawn") is None

    def test_no_match(self):
        assert locate_target("nothing to see", "lawn") is None

    def test_span_bounds_validated(self):
        with pytest.raises(InputError):
            MaskedQuery(sentence="two words", start=1, stop=3)


class TestExpressionProbability:
    def test_single_token_span_equals_token_probability(self):
        scorer = UnigramScorer("u", {"lawn": 10, "the": 90}, k=0.0)
        query = locate_target("the lawn", "lawn")
        p = expression_probability(scorer, "x", query)
        assert p == scorer.token_probability("x", ["the", "lawn"], 1, "lawn")

    def test_product_of_two_factors(self):
        # P1 = 0.1, P2 = 0.01 -> 0.001
        class Fixed:
            name = "fixed"
            kind = "test"

            def token_probability(self, instance_id, tokens, position,
                                  expected):
                return {"lawn": 0.1, "mower": 0.01}[expected]

        query = locate_target("a lawn mower hums", "lawn mower")
        assert expression_probability(Fixed(), "x", query) == pytest.approx(
            0.001, abs=1e-18
        )

    def test_zero_factor_absorbs(self):
        class Zeroish:
            name = "z"
            kind = "test"

            def token_probability(self, instance_id, tokens, position,
                                  expected):
                return 0.0 if expected == "mower" else 0.9

        query = locate_target("a lawn mower hums", "lawn mower")
        assert expression_probability(Zeroish(), "x", query) == 0.0

    def test_product_at_most_min_factor(self, unigram_scorer, mwe_dataset):
        for inst in mwe_dataset.instances:
            query = locate_target(inst.sentence, inst.target)
            tokens = tokenize(inst.sentence)
            factors = [
                unigram_scorer.token_probability(inst.id, tokens, i, tokens[i])
                for i in range(query.start, query.stop)
            ]
            p = expression_probability(unigram_scorer, inst.id, query)
            assert p <= min(factors) + 1e-15

    def test_invariant_under_scorer_rename(self, data_dir):
        counts = read_unigram_counts(data_dir / "unigram_counts.tsv")
        a = UnigramScorer("first", counts, k=1.0)
        b = UnigramScorer("second", counts, k=1.0)
        query = locate_target("the lawn mower hums", "lawn mower")
        assert expression_probability(a, "x", query) == \
            expression_probability(b, "x", query)


class TestInstanceProbability:
    def test_unmatched_target_warns_and_returns_zero(self, unigram_scorer,
                                                     caplog):
        inst = Instance("q1", Corpus.BIBLE, "behold the lawn.", "lawn",
                        Subtask.SINGLE)
        with caplog.at_level(logging.WARNING, logger="lexcomplex.lm"):
            assert instance_probability(unigram_scorer, inst) == 0.0
        assert any("not found" in r.message for r in caplog.records)

    def test_matched_target(self, unigram_scorer, single_dataset):
        inst = single_dataset.instances[0]
        p = instance_probability(unigram_scorer, inst)
        assert 0.0 < p < 1.0


class TestSidecarTemplate:
    def test_single_word_rows(self, tmp_path, single_dataset):
        out = tmp_path / "t.csv"
        count = write_sidecar_template(single_dataset, out)
        lines = out.read_text().strip().split("\n")
        assert count == 6
        assert lines[0] == "id,position,token,probability"
        assert len(lines) == 7
        assert lines[1] == "S01,2,lawn,"

    def test_mwe_two_rows_each(self, tmp_path, mwe_dataset):
        out = tmp_path / "t.csv"
        count = write_sidecar_template(mwe_dataset, out)
        assert count == 12  # 6 two-token expressions

    def test_empty_dataset_header_only(self, tmp_path):
        ds = Dataset((), subtask=Subtask.SINGLE)
        out = tmp_path / "t.csv"
        assert write_sidecar_template(ds, out) == 0
        assert out.read_text() == "id,position,token,probability\n"

    def test_filled_template_is_consumable(self, tmp_path, single_dataset):
        out = tmp_path / "t.csv"
        write_sidecar_template(single_dataset, out)
        lines = out.read_text().strip().split("\n")
        filled = [lines[0]] + [line + "0.25" for line in lines[1:]]
        fpath = tmp_path / "filled.csv"
        fpath.write_text("\n".join(filled) + "\n")
        scorer = SidecarScorer.read(fpath)
        for inst in single_dataset.instances:
            assert instance_probability(scorer, inst) == 0.25
