from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from clcts_workbench.corpus import MetricScoreTable, ScoreRow, ingest_scores
from clcts_workbench.errors import ValidationError
from clcts_workbench.metrics import (
    MENLI_WEIGHTS,
    RougeScore,
    menli_combine,
    menli_name,
    rouge1,
    rougeL,
    score_systems,
)

from conftest import fixture_path


class TestRouge1:
    def test_hand_computed(self):
        score = rouge1("the cat sat".split(), "the cat was here".split())
        assert score.precision == pytest.approx(2 / 3)
        assert score.recall == pytest.approx(1 / 2)
        assert score.f1 == pytest.approx(4 / 7)

    def test_clipped_repetitions(self):
        score = rouge1(["a", "a", "b"], ["a", "b", "b"])
        assert score.precision == pytest.approx(2 / 3)
        assert score.recall == pytest.approx(2 / 3)

    def test_identical_sequences(self):
        score = rouge1(["x", "y"], ["x", "y"])
        assert score == RougeScore(1.0, 1.0, 1.0)

    def test_empty_candidate(self):
        assert rouge1([], ["a"]) == RougeScore(0.0, 0.0, 0.0)

    def test_empty_reference_rejected(self):
        with pytest.raises(ValidationError, match="reference"):
            rouge1(["a"], [])


class TestRougeL:
    def test_subsequence_not_substring(self):
        score = rougeL(["a", "b", "c", "d"], ["a", "c", "b", "d"])
        assert score.f1 == pytest.approx(3 / 4)

    def test_order_sensitivity(self):
        forward = rougeL(["a", "b", "c"], ["a", "b", "c"])
        reversed_ = rougeL(["c", "b", "a"], ["a", "b", "c"])
        assert forward.f1 == 1.0
        assert reversed_.f1 == pytest.approx(1 / 3)

    def test_disjoint(self):
        assert rougeL(["a"], ["b"]).f1 == 0.0

    @given(
        st.lists(st.sampled_from("abc"), max_size=10),
        st.lists(st.sampled_from("abc"), min_size=1, max_size=10),
    )
    def test_bounded_by_rouge1(self, candidate, reference):
        # an LCS is a clipped-overlap subset, so ROUGE-L never beats ROUGE-1
        assert rougeL(candidate, reference).f1 <= rouge1(candidate, reference).f1 + 1e-12


class TestMenli:
    def test_names(self):
        assert [menli_name(w) for w in MENLI_WEIGHTS] == \
            ["MENLI-W1", "MENLI-W.8", "MENLI-W.3", "MENLI-W.2"]

    def test_combine_hand_computed(self):
        assert menli_combine(0.5, 0.9, 0.8) == pytest.approx(0.8 * 0.5 + 0.2 * 0.9)

    def test_weight_one_is_pure_nli(self):
        assert menli_combine(0.42, 0.99, 1.0) == pytest.approx(0.42)

    def test_weight_zero_is_pure_bertscore(self):
        assert menli_combine(0.42, 0.99, 0.0) == pytest.approx(0.99)

    def test_non_finite_rejected(self):
        with pytest.raises(ValidationError, match="finite"):
            menli_combine(float("nan"), 0.5, 0.8)

    def test_weight_out_of_range(self):
        with pytest.raises(ValidationError, match="weight"):
            menli_combine(0.5, 0.5, 1.2)

    @given(
        st.floats(min_value=0, max_value=1, allow_nan=False),
        st.floats(min_value=0, max_value=1, allow_nan=False),
    )
    def test_combination_stays_between_inputs(self, nli, bert):
        for w in MENLI_WEIGHTS:
            value = menli_combine(nli, bert, w)
            assert min(nli, bert) - 1e-12 <= value <= max(nli, bert) + 1e-12


class TestScoreSystems:
    def _candidates(self, mini_corpus, system_id="gpt-x"):
        return {
            (pair.id, system_id): pair.summary.replace("promise", "vow")
            for pair in mini_corpus.pairs
        }

    def test_native_rows_and_menli_synthesis(self, mini_corpus):
        ingested = ingest_scores(fixture_path("neural_scores.csv"))
        table = score_systems(mini_corpus, self._candidates(mini_corpus), ingested)
        metrics = table.metrics()
        assert metrics == [
            "BERTScore-F1", "MENLI-W.2", "MENLI-W.3", "MENLI-W.8", "MENLI-W1",
            "NLI-D", "ROUGE-1", "ROUGE-L",
        ]
        # 5 docs x (2 native + 2 ingested + 4 combined)
        assert len(table.rows) == 40

    def test_menli_values_follow_formula(self, mini_corpus):
        ingested = ingest_scores(fixture_path("neural_scores.csv"))
        table = score_systems(mini_corpus, self._candidates(mini_corpus), ingested)
        by_key = {r.key: r.value for r in table.rows}
        nli = by_key[("tale-001", "gpt-x", "NLI-D")]
        bert = by_key[("tale-001", "gpt-x", "BERTScore-F1")]
        assert by_key[("tale-001", "gpt-x", "MENLI-W.8")] == \
            pytest.approx(0.8 * nli + 0.2 * bert, abs=1e-12)

    def test_provenance_tags(self, mini_corpus):
        ingested = ingest_scores(fixture_path("neural_scores.csv"))
        table = score_systems(mini_corpus, self._candidates(mini_corpus), ingested)
        tags = {r.metric_name: r.provenance for r in table.rows}
        assert tags["ROUGE-1"].startswith("native:")
        assert tags["NLI-D"] == "ingested"
        assert tags["MENLI-W1"] == "derived"

    def test_ingested_conflict_rejected(self, mini_corpus):
        candidates = self._candidates(mini_corpus)
        native = score_systems(mini_corpus, candidates)
        target = native.rows[0]
        clashing = MetricScoreTable(rows=(
            ScoreRow(target.doc_id, target.system_id, target.metric_name,
                     target.value + 0.25, provenance="ingested"),
        ))
        with pytest.raises(ValidationError, match="conflicting"):
            score_systems(mini_corpus, candidates, clashing)

    def test_equal_ingested_value_is_not_a_conflict(self, mini_corpus):
        candidates = self._candidates(mini_corpus)
        native = score_systems(mini_corpus, candidates)
        target = native.rows[0]
        duplicate = MetricScoreTable(rows=(
            ScoreRow(target.doc_id, target.system_id, target.metric_name,
                     target.value, provenance="ingested"),
        ))
        table = score_systems(mini_corpus, candidates, duplicate)
        assert len(table.rows) == len(native.rows)

    def test_ingested_combination_row_wins_over_synthesis(self, mini_corpus):
        rows = [
            ScoreRow("tale-001", "gpt-x", "NLI-D", 0.5, provenance="ingested"),
            ScoreRow("tale-001", "gpt-x", "BERTScore-F1", 0.9, provenance="ingested"),
            ScoreRow("tale-001", "gpt-x", "MENLI-W1", 0.123, provenance="ingested"),
        ]
        table = score_systems(
            mini_corpus, self._candidates(mini_corpus), MetricScoreTable(rows=tuple(rows))
        )
        by_key = {r.key: r for r in table.rows}
        assert by_key[("tale-001", "gpt-x", "MENLI-W1")].value == 0.123
        # the unclaimed weights are still synthesized
        assert by_key[("tale-001", "gpt-x", "MENLI-W.8")].provenance == "derived"

    def test_unknown_candidate_doc_rejected(self, mini_corpus):
        with pytest.raises(ValidationError, match="ghost"):
            score_systems(mini_corpus, {("ghost", "s"): "text"})
