from __future__ import annotations

import warnings

import numpy as np
import pytest
import scipy.stats
from hypothesis import given, strategies as st

from clcts_workbench.corpus import AnnotationRecord, ingest_annotations, ingest_scores
from clcts_workbench.errors import ValidationError
from clcts_workbench.metaeval import (
    cohens_kappa,
    format_rating_table,
    interannotator_agreement,
    metric_human_correlation,
    rating_means,
    significance_stars,
    spearman,
)

from conftest import fixture_path


def _record(doc_id, rater_id, rater_kind="human", system_id="gpt-x", **ratings):
    values = {"coherence": 3.0, "consistency": 3.0, "fluency": 3.0, "relevance": 3.0}
    values.update(ratings)
    return AnnotationRecord(
        doc_id=doc_id, system_id=system_id, rater_id=rater_id, rater_kind=rater_kind,
        coherence=values["coherence"], consistency=values["consistency"],
        fluency=values["fluency"], relevance=values["relevance"],
    )


class TestSpearman:
    def test_perfect_monotone(self):
        result = spearman([1, 2, 3, 4], [10, 20, 30, 40])
        assert result.rho == pytest.approx(1.0)
        assert result.p_value == 0.0
        assert result.stars == 3

    def test_perfect_inverse(self):
        result = spearman([1, 2, 3], [3, 2, 1])
        assert result.rho == pytest.approx(-1.0)
        assert result.p_value == 0.0

    def test_matches_scipy_with_ties(self):
        x = [1.0, 2.0, 2.0, 3.0, 4.0, 4.0, 5.0]
        y = [2.0, 1.0, 3.0, 3.0, 5.0, 4.0, 4.0]
        expected = scipy.stats.spearmanr(x, y)
        result = spearman(x, y)
        assert result.rho == pytest.approx(expected.statistic, abs=1e-12)
        assert result.p_value == pytest.approx(expected.pvalue, abs=1e-12)

    @given(st.integers(min_value=0, max_value=10_000))
    def test_matches_scipy_on_random_data(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(4, 12))
        x = rng.integers(0, 6, size=n).astype(float)
        y = rng.integers(0, 6, size=n).astype(float)
        if len(set(x)) < 2 or len(set(y)) < 2:
            return
        expected = scipy.stats.spearmanr(x, y)
        result = spearman(x, y)
        assert result.rho == pytest.approx(expected.statistic, abs=1e-12)
        if abs(result.rho) < 1.0:
            assert result.p_value == pytest.approx(expected.pvalue, abs=1e-12)

    def test_length_mismatch(self):
        with pytest.raises(ValidationError, match="length"):
            spearman([1, 2, 3], [1, 2])

    def test_too_few_points(self):
        with pytest.raises(ValidationError, match="3"):
            spearman([1, 2], [2, 1])

    def test_constant_input_rejected(self):
        with pytest.raises(ValidationError, match="variance"):
            spearman([1, 1, 1], [1, 2, 3])

    def test_formatted_output(self):
        result = spearman([1, 2, 3, 4], [10, 20, 30, 40])
        assert result.formatted() == "1.00***"
        assert result.stars_str == "***"


class TestSignificanceStars:
    @pytest.mark.parametrize("p,expected", [
        (0.2, 0), (0.051, 0),
        (0.049, 1), (0.011, 1),
        (0.009, 2), (0.0011, 2),
        (0.0009, 3), (0.0, 3),
    ])
    def test_thresholds(self, p, expected):
        assert significance_stars(p) == expected

    def test_exact_boundaries_are_not_significant(self):
        # strict inequality at each cut
        assert significance_stars(0.05) == 0
        assert significance_stars(0.01) == 1
        assert significance_stars(0.001) == 2


class TestInterannotatorAgreement:
    def test_fixture_matches_scipy_mean(self):
        records = ingest_annotations(fixture_path("annotations.csv"))
        by_rater = {}
        for r in records:
            by_rater.setdefault(r.rater_id, {})[(r.doc_id, r.system_id)] = r.coherence
        raters = sorted(by_rater)
        rhos = []
        for i, a in enumerate(raters):
            for b in raters[i + 1:]:
                common = sorted(set(by_rater[a]) & set(by_rater[b]))
                rhos.append(scipy.stats.spearmanr(
                    [by_rater[a][k] for k in common],
                    [by_rater[b][k] for k in common],
                ).statistic)
        expected = sum(rhos) / len(rhos)
        assert interannotator_agreement(records, "coherence") == pytest.approx(expected)

    def test_constant_rater_skipped_with_warning(self):
        records = [
            _record("d1", "h1", coherence=4.0), _record("d2", "h1", coherence=2.0),
            _record("d3", "h1", coherence=3.0),
            _record("d1", "h2", coherence=4.5), _record("d2", "h2", coherence=2.5),
            _record("d3", "h2", coherence=3.5),
            _record("d1", "h3", coherence=3.0), _record("d2", "h3", coherence=3.0),
            _record("d3", "h3", coherence=3.0),
        ]
        with pytest.warns(UserWarning, match="h3"):
            value = interannotator_agreement(records, "coherence")
        assert value == pytest.approx(1.0)   # h1 vs h2 is perfectly concordant

    def test_no_usable_pairs_rejected(self):
        records = [
            _record("d1", "h1"), _record("d2", "h1"), _record("d3", "h1"),
            _record("d1", "h2"), _record("d2", "h2"), _record("d3", "h2"),
        ]
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            with pytest.raises(ValidationError):
                interannotator_agreement(records, "coherence")

    def test_min_overlap_respected(self):
        records = [
            _record("d1", "h1", coherence=4.0), _record("d2", "h1", coherence=2.0),
            _record("d3", "h1", coherence=3.0), _record("d4", "h1", coherence=5.0),
            _record("d1", "h2", coherence=4.0), _record("d2", "h2", coherence=2.5),
            _record("d3", "h2", coherence=3.5), _record("d4", "h2", coherence=4.5),
            # h3 shares only two items with the others
            _record("d1", "h3", coherence=1.0), _record("d2", "h3", coherence=5.0),
        ]
        value = interannotator_agreement(records, "coherence", min_overlap=3)
        oracle = scipy.stats.spearmanr([4, 2, 3, 5], [4, 2.5, 3.5, 4.5]).statistic
        assert value == pytest.approx(oracle)


class TestRatingMeans:
    def test_fixture_means(self):
        records = ingest_annotations(fixture_path("annotations.csv"))
        means = rating_means(records, "coherence")
        assert means["gpt-x"]["human"] == pytest.approx(3.55)
        assert means["gpt-x"]["llm"] == pytest.approx(3.9)

    def test_formatted_table(self):
        records = ingest_annotations(fixture_path("annotations.csv"))
        table = format_rating_table(rating_means(records, "coherence"))
        assert table["gpt-x"] == "3.55/3.90"

    def test_missing_kind_shows_dash(self):
        records = [_record("d1", "h1", coherence=4.0)]
        table = format_rating_table(rating_means(records, "coherence"))
        assert table["gpt-x"] == "4.00/-"

    def test_unknown_dimension(self):
        with pytest.raises(ValidationError, match="dimension"):
            rating_means([_record("d1", "h1")], "beauty")


class TestMetricHumanCorrelation:
    def test_fixture_against_scipy(self):
        scores = ingest_scores(fixture_path("neural_scores.csv"))
        records = ingest_annotations(fixture_path("annotations.csv"))
        results = metric_human_correlation(scores, records, "coherence")
        human_mean = {
            "tale-001": (4.0 + 4.5 + 4.0) / 3,
            "tale-002": (3.5 + 3.5 + 4.5) / 3,
            "tale-003": (2.0 + 2.5 + 3.0) / 3,
            "tale-004": (5.0 + 4.5 + 4.5) / 3,
            "tale-005": (3.0 + 3.0 + 3.5) / 3,
        }
        nli = {r.doc_id: r.value for r in scores.rows if r.metric_name == "NLI-D"}
        items = sorted(human_mean)
        expected = scipy.stats.spearmanr(
            [nli[i] for i in items], [human_mean[i] for i in items]
        )
        assert results["NLI-D"].rho == pytest.approx(expected.statistic, abs=1e-12)
        assert results["NLI-D"].n == 5

    def test_pool_raters_changes_n(self):
        scores = ingest_scores(fixture_path("neural_scores.csv"))
        records = ingest_annotations(fixture_path("annotations.csv"))
        pooled = metric_human_correlation(scores, records, "coherence", pool_raters=True)
        assert pooled["NLI-D"].n == 15    # 5 items x 3 raters

    def test_degenerate_metric_warned_and_omitted(self, tmp_path):
        path = tmp_path / "flat.csv"
        path.write_text(
            "doc_id,system_id,metric_name,value\n"
            + "".join(f"tale-00{i},gpt-x,Flat,0.5\n" for i in range(1, 6))
        )
        scores = ingest_scores(str(path))
        records = ingest_annotations(fixture_path("annotations.csv"))
        with pytest.warns(UserWarning, match="Flat"):
            results = metric_human_correlation(scores, records, "coherence")
        assert "Flat" not in results


class TestCohensKappa:
    def test_hand_computed(self):
        result = cohens_kappa([1, 1, 2, 2], [1, 1, 2, 1])
        assert result.accuracy == pytest.approx(0.75)
        # p_e = 0.5*0.75 + 0.5*0.25 = 0.5 -> kappa = (0.75 - 0.5) / 0.5
        assert result.kappa == pytest.approx(0.5)

    def test_perfect_agreement(self):
        result = cohens_kappa(["a", "b", "a"], ["a", "b", "a"])
        assert result.kappa == pytest.approx(1.0)

    def test_chance_only_agreement_is_undefined(self):
        result = cohens_kappa([1, 1], [1, 1])
        assert result.kappa is None
        assert result.accuracy == 1.0

    def test_length_mismatch(self):
        with pytest.raises(ValidationError):
            cohens_kappa([1, 2], [1])

    def test_empty(self):
        with pytest.raises(ValidationError):
            cohens_kappa([], [])
