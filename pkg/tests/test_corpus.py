from __future__ import annotations

import json

import pytest
from hypothesis import given, strategies as st

from clcts_workbench.corpus import (
    EmbeddingTable,
    MetricScoreTable,
    ScoreRow,
    ingest_annotations,
    ingest_embeddings,
    ingest_scores,
    load_corpus,
    match_summaries,
    normalize_title,
    save_corpus,
    validate_rating,
    write_scores_csv,
)
from clcts_workbench.errors import ValidationError

from conftest import fixture_path


def _write_jsonl(path, rows):
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")


def _valid_pair(idx: int = 1) -> dict:
    return {
        "id": f"doc-{idx}", "title": f"Titel {idx}", "author": "A. B.", "year": 1820,
        "lang_src": "historical-de", "lang_tgt": "en",
        "document": "Ein Satz. Noch ein Satz.", "summary": "One sentence about it.",
        "summary_translated": False, "provenance": "test",
    }


class TestLoadCorpus:
    def test_loads_fixture(self, mini_corpus):
        assert len(mini_corpus.pairs) == 5
        first = mini_corpus.pairs[0]
        assert first.id == "tale-001"
        assert first.lang_src == "historical-de"
        assert first.lang_tgt == "en"
        assert first.year == 1812

    def test_missing_key_names_line(self, tmp_path):
        row = _valid_pair()
        del row["author"]
        path = tmp_path / "bad.jsonl"
        _write_jsonl(path, [row])
        with pytest.raises(ValidationError, match="line 1.*author"):
            load_corpus(str(path), "hDe-En")

    def test_duplicate_id_cites_both_lines(self, tmp_path):
        path = tmp_path / "dup.jsonl"
        _write_jsonl(path, [_valid_pair(1), _valid_pair(2), _valid_pair(1)])
        with pytest.raises(ValidationError, match="doc-1.*lines 1 and 3"):
            load_corpus(str(path), "hDe-En")

    def test_empty_file_rejected(self, tmp_path):
        path = tmp_path / "empty.jsonl"
        path.write_text("")
        with pytest.raises(ValidationError, match="empty corpus"):
            load_corpus(str(path), "hDe-En")

    def test_direction_mismatch(self, tmp_path):
        path = tmp_path / "c.jsonl"
        _write_jsonl(path, [_valid_pair()])
        with pytest.raises(ValidationError, match="hEn-De"):
            load_corpus(str(path), "hEn-De")

    def test_bad_json_names_line(self, tmp_path):
        path = tmp_path / "broken.jsonl"
        path.write_text(json.dumps(_valid_pair()) + "\n{not json\n")
        with pytest.raises(ValidationError, match="line 2"):
            load_corpus(str(path), "hDe-En")

    def test_year_must_be_int(self, tmp_path):
        row = _valid_pair()
        row["year"] = "1820ish"
        path = tmp_path / "year.jsonl"
        _write_jsonl(path, [row])
        with pytest.raises(ValidationError, match="year"):
            load_corpus(str(path), "hDe-En")

    def test_save_round_trip(self, tmp_path, mini_corpus):
        out = tmp_path / "again.jsonl"
        save_corpus(mini_corpus, str(out))
        again = load_corpus(str(out), "hDe-En")
        assert again.pairs == mini_corpus.pairs


class TestNormalizeTitle:
    def test_lowercases_and_strips_punctuation(self):
        assert normalize_title("Der goldene Vogel!", "de") == "der goldene vogel"

    def test_strips_diacritics(self):
        assert normalize_title("Die Türme", "de") == "die turme"

    def test_digraph_th(self):
        assert normalize_title("Die Thürme", "de") == "die turme"

    def test_historical_verb_forms(self):
        assert normalize_title("Er gieng heim", "de") == "er ging heim"

    def test_whitespace_collapsed(self):
        assert normalize_title("  Das   Lied  ", "de") == "das lied"

    def test_english_has_no_substitutions(self):
        # punctuation becomes a space before collapsing, so the apostrophe splits
        assert normalize_title("The Mill's Tale", "en") == "the mill s tale"

    def test_blank_title_rejected(self):
        with pytest.raises(ValidationError):
            normalize_title("   ", "de")

    @given(st.text(alphabet=st.characters(categories=("L", "N")), min_size=1, max_size=40))
    def test_idempotent(self, title):
        once = normalize_title(title, "de")
        assert normalize_title(once, "de") == once


class TestMatchSummaries:
    DOCS = [
        ("Der goldene Vogel", "de", {}),
        ("Die Thürme der Stadt", "de", {}),
        ("Das vergessene Lied", "de", {}),
        ("Die  Insel.", "de", {}),
    ]
    WIKI = [
        ("Der goldene Vogel", "summary a"),
        ("Die Türme der Stadt", "summary b"),
        ("Die Insel", "summary c"),
        ("Die Insel!", "summary d"),
        ("Der ferne Berg", "summary e"),
    ]

    def test_exact_and_normalized_matching(self):
        result = match_summaries(self.DOCS, self.WIKI)
        matched_titles = {doc[0]: entry[0] for doc, entry in result.matched}
        assert matched_titles["Der goldene Vogel"] == "Der goldene Vogel"
        assert matched_titles["Die Thürme der Stadt"] == "Die Türme der Stadt"
        assert matched_titles["Die  Insel."] == "Die Insel"

    def test_unmatched_are_reported(self):
        result = match_summaries(self.DOCS, self.WIKI)
        assert [d[0] for d in result.unmatched_documents] == ["Das vergessene Lied"]
        assert {e[0] for e in result.unmatched_wiki} == {"Die Insel!", "Der ferne Berg"}

    def test_ambiguity_recorded_not_raised(self):
        result = match_summaries(self.DOCS, self.WIKI)
        assert len(result.ambiguities) == 1
        amb = result.ambiguities[0]
        assert amb["document_title"] == "Die  Insel."
        assert set(amb["wiki_titles"]) == {"Die Insel", "Die Insel!"}

    def test_exact_match_wins_over_normalization(self):
        # the raw-equal entry is claimed even when a normalized twin comes first
        docs = [("Die Insel", "de", {})]
        wiki = [("Die Insel!", "x"), ("Die Insel", "y")]
        result = match_summaries(docs, wiki)
        assert result.matched[0][1] == ("Die Insel", "y")

    def test_empty_inputs_rejected(self):
        with pytest.raises(ValidationError, match="non-empty"):
            match_summaries([], self.WIKI)


class TestIngestEmbeddings:
    def test_fixture_header_and_counts(self):
        table = ingest_embeddings(fixture_path("embeddings_hDe-En.jsonl"))
        assert table.model == "test-encoder-v1"
        assert table.dimension == 4
        assert len(table.vectors("tale-001", "document")) == 3
        assert len(table.vectors("tale-001", "summary")) == 2

    def test_dimension_mismatch_names_offender(self, tmp_path):
        path = tmp_path / "emb.jsonl"
        _write_jsonl(path, [
            {"doc_id": "d", "side": "document", "sent_idx": 0, "vector": [1.0, 0.0]},
            {"doc_id": "d", "side": "summary", "sent_idx": 0, "vector": [1.0, 0.0, 0.0]},
        ])
        with pytest.raises(ValidationError, match="d.*summary.*0"):
            ingest_embeddings(str(path))

    def test_non_contiguous_indices_rejected(self, tmp_path):
        path = tmp_path / "emb.jsonl"
        _write_jsonl(path, [
            {"doc_id": "d", "side": "document", "sent_idx": 0, "vector": [1.0]},
            {"doc_id": "d", "side": "document", "sent_idx": 2, "vector": [0.5]},
        ])
        with pytest.raises(ValidationError, match="contiguous"):
            ingest_embeddings(str(path))

    def test_duplicate_key_rejected(self, tmp_path):
        path = tmp_path / "emb.jsonl"
        _write_jsonl(path, [
            {"doc_id": "d", "side": "document", "sent_idx": 0, "vector": [1.0]},
            {"doc_id": "d", "side": "document", "sent_idx": 0, "vector": [2.0]},
        ])
        with pytest.raises(ValidationError, match="duplicate"):
            ingest_embeddings(str(path))

    def test_bad_side_rejected(self, tmp_path):
        path = tmp_path / "emb.jsonl"
        _write_jsonl(path, [
            {"doc_id": "d", "side": "body", "sent_idx": 0, "vector": [1.0]},
        ])
        with pytest.raises(ValidationError, match="side"):
            ingest_embeddings(str(path))


class TestIngestScores:
    def test_fixture_loads(self):
        table = ingest_scores(fixture_path("neural_scores.csv"))
        assert len(table.rows) == 10
        assert table.metrics() == ["BERTScore-F1", "NLI-D"]

    def test_round_trip_through_writer(self, tmp_path):
        table = ingest_scores(fixture_path("neural_scores.csv"))
        out = tmp_path / "scores.csv"
        write_scores_csv(table, str(out))
        again = ingest_scores(str(out))
        assert [(r.doc_id, r.system_id, r.metric_name, r.value) for r in again.rows] == \
               [(r.doc_id, r.system_id, r.metric_name, r.value) for r in table.rows]

    def test_duplicate_key_cites_both_lines(self, tmp_path):
        path = tmp_path / "dup.csv"
        path.write_text(
            "doc_id,system_id,metric_name,value\n"
            "d,s,ROUGE-1,0.5\n"
            "d,s,ROUGE-1,0.6\n"
        )
        with pytest.raises(ValidationError, match="lines 2 and 3"):
            ingest_scores(str(path))

    def test_extra_columns_tolerated(self, tmp_path):
        path = tmp_path / "extra.csv"
        path.write_text(
            "doc_id,system_id,metric_name,value,manifest\n"
            "d,s,ROUGE-1,0.5,abc123\n"
        )
        table = ingest_scores(str(path))
        assert table.rows[0].value == 0.5

    def test_non_numeric_value_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("doc_id,system_id,metric_name,value\nd,s,ROUGE-1,high\n")
        with pytest.raises(ValidationError, match="value"):
            ingest_scores(str(path))

    def test_in_memory_duplicate_guard(self):
        rows = (
            ScoreRow("d", "s", "ROUGE-1", 0.5),
            ScoreRow("d", "s", "ROUGE-1", 0.6),
        )
        with pytest.raises(ValidationError, match="duplicate"):
            MetricScoreTable(rows=rows)


class TestIngestAnnotations:
    def test_fixture_loads(self):
        records = ingest_annotations(fixture_path("annotations.csv"))
        assert len(records) == 15
        kinds = {r.rater_kind for r in records}
        assert kinds == {"human", "llm"}

    def test_rating_grid_enforced(self, tmp_path):
        path = tmp_path / "a.csv"
        path.write_text(
            "doc_id,system_id,rater_id,rater_kind,coherence,consistency,fluency,relevance\n"
            "d,s,r,human,4.25,4,4,4\n"
        )
        with pytest.raises(ValidationError, match="4.25"):
            ingest_annotations(str(path))

    def test_out_of_range_rating(self):
        with pytest.raises(ValidationError, match="5.5"):
            validate_rating(5.5)

    def test_valid_grid_values(self):
        for value in (1.0, 1.5, 3.0, 4.5, 5.0):
            assert validate_rating(value) == value

    def test_duplicate_rater_row_rejected(self, tmp_path):
        path = tmp_path / "a.csv"
        path.write_text(
            "doc_id,system_id,rater_id,rater_kind,coherence,consistency,fluency,relevance\n"
            "d,s,r,human,4,4,4,4\n"
            "d,s,r,human,3,3,3,3\n"
        )
        with pytest.raises(ValidationError, match="duplicate"):
            ingest_annotations(str(path))

    def test_unknown_rater_kind_rejected(self, tmp_path):
        path = tmp_path / "a.csv"
        path.write_text(
            "doc_id,system_id,rater_id,rater_kind,coherence,consistency,fluency,relevance\n"
            "d,s,r,bot,4,4,4,4\n"
        )
        with pytest.raises(ValidationError, match="rater_kind"):
            ingest_annotations(str(path))


class TestEmbeddingTableConstruction:
    def test_sides_listing(self):
        table = EmbeddingTable(
            entries={("d", "document", 0): (1.0,), ("d", "summary", 0): (0.5,)},
            dimension=1, model="m",
        )
        assert table.sides("d") == ("document", "summary")
