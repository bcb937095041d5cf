"""Corpus data model, file formats, and title-based document/summary matching.

File formats handled here:

- corpus JSONL: one pair per line, UTF-8, no BOM; keys id, title, author,
  year, lang_src, lang_tgt, document, summary, summary_translated, provenance.
- embeddings JSONL: optional first-line header {"model", "dimension"},
  then one record per sentence vector: {doc_id, side, sent_idx, vector}.
- scores CSV: header doc_id,system_id,metric_name,value.
- annotations CSV: header doc_id,system_id,rater_id,rater_kind,
  coherence,consistency,fluency,relevance.

Readers are tolerant of extra keys/columns (downstream producers may attach
their own bookkeeping) but never of missing or malformed required fields:
bad rows are rejected with the line number, not repaired.
"""

from __future__ import annotations

import json
import re
import unicodedata
from dataclasses import dataclass
from importlib import resources
from typing import Any, Iterable, Sequence

from .errors import ValidationError

DIRECTIONS = ("hDe-En", "hEn-De", "hDe-De", "hEn-En", "external")

CORPUS_KEYS = (
    "id", "title", "author", "year", "lang_src", "lang_tgt",
    "document", "summary", "summary_translated", "provenance",
)

SIDES = ("document", "summary")

SCORE_COLUMNS = ("doc_id", "system_id", "metric_name", "value")
ANNOTATION_COLUMNS = (
    "doc_id", "system_id", "rater_id", "rater_kind",
    "coherence", "consistency", "fluency", "relevance",
)
RATING_DIMENSIONS = ("coherence", "consistency", "fluency", "relevance")


@dataclass(frozen=True)
class SummaryPair:
    """One historical document with its modern reference summary."""

    id: str
    title: str
    author: str
    year: int                   # publication year, CE; must be > 0
    lang_src: str               # language code, possibly era-tagged ("historical-German")
    lang_tgt: str
    document: str
    summary: str
    summary_translated: bool    # reference was machine-translated
    provenance: str


@dataclass(frozen=True)
class Corpus:
    name: str
    direction: str
    pairs: tuple[SummaryPair, ...]

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)


# Language-code parsing for direction checks.  lang_src values may carry an
# era tag in several spellings; all of these reduce to a (code, historical)
# pair.  Unknown codes pass through lowercased so "external" corpora stay open.
_LANG_NAMES = {"german": "de", "deutsch": "de", "english": "en"}


def _parse_lang(tag: str) -> tuple[str, bool]:
    t = tag.strip().lower()
    historical = False
    for prefix in ("historical-", "historical ", "hist-"):
        if t.startswith(prefix):
            historical = True
            t = t[len(prefix):]
            break
    else:
        if t in ("hde", "hen"):
            historical = True
            t = t[1:]
    return _LANG_NAMES.get(t, t), historical


# direction tag -> (source code, source must be historical, target code)
_DIRECTION_SHAPE = {
    "hDe-En": ("de", True, "en"),
    "hEn-De": ("en", True, "de"),
    "hDe-De": ("de", True, "de"),
    "hEn-En": ("en", True, "en"),
}


def _check_direction(pair: SummaryPair, direction: str, line_no: int) -> None:
    src_code, src_hist = _parse_lang(pair.lang_src)
    tgt_code, _ = _parse_lang(pair.lang_tgt)
    if direction == "external":
        return
    want_src, want_hist, want_tgt = _DIRECTION_SHAPE[direction]
    if src_code != want_src or tgt_code != want_tgt or (want_hist and not src_hist):
        raise ValidationError(
            f"line {line_no}: pair {pair.id!r} has languages "
            f"{pair.lang_src!r} -> {pair.lang_tgt!r}, which do not match "
            f"corpus direction {direction!r}"
        )


def _coerce_pair(obj: dict[str, Any], line_no: int) -> SummaryPair:
    missing = [k for k in CORPUS_KEYS if k not in obj]
    if missing:
        raise ValidationError(f"line {line_no}: missing keys {missing}")
    if not isinstance(obj["year"], int) or isinstance(obj["year"], bool):
        raise ValidationError(f"line {line_no}: year must be an integer")
    if obj["year"] <= 0:
        raise ValidationError(f"line {line_no}: year must be > 0, got {obj['year']}")
    if not isinstance(obj["summary_translated"], bool):
        raise ValidationError(f"line {line_no}: summary_translated must be a boolean")
    for key in ("id", "title", "author", "lang_src", "lang_tgt",
                "document", "summary", "provenance"):
        if not isinstance(obj[key], str):
            raise ValidationError(f"line {line_no}: {key} must be a string")
    if not obj["document"].strip():
        raise ValidationError(f"line {line_no}: empty document for id {obj['id']!r}")
    if not obj["summary"].strip():
        raise ValidationError(f"line {line_no}: empty summary for id {obj['id']!r}")
    return SummaryPair(**{k: obj[k] for k in CORPUS_KEYS})


def load_corpus(path: str, direction: str, name: str | None = None) -> Corpus:
    """Read and validate a corpus JSONL file.

    Rejects rather than repairs: any malformed row aborts the load with its
    line number.  Duplicate ids are reported with both offending lines.
    """
    if direction not in DIRECTIONS:
        raise ValidationError(f"unknown direction {direction!r}, expected one of {DIRECTIONS}")
    pairs: list[SummaryPair] = []
    seen: dict[str, int] = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValidationError(f"{path}: line {line_no}: not valid JSON ({exc.msg})") from exc
            if not isinstance(obj, dict):
                raise ValidationError(f"{path}: line {line_no}: expected a JSON object")
            pair = _coerce_pair(obj, line_no)
            if pair.id in seen:
                raise ValidationError(
                    f"{path}: duplicate id {pair.id!r} on lines {seen[pair.id]} and {line_no}"
                )
            seen[pair.id] = line_no
            _check_direction(pair, direction, line_no)
            pairs.append(pair)
    if not pairs:
        raise ValidationError(f"{path}: empty corpus")
    return Corpus(name=name or path, direction=direction, pairs=tuple(pairs))


def save_corpus(corpus: Corpus, path: str) -> None:
    """Serialize a corpus back to JSONL; load(save(c)) preserves all fields."""
    with open(path, "w", encoding="utf-8") as fh:
        for pair in corpus.pairs:
            row = {k: getattr(pair, k) for k in CORPUS_KEYS}
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")


# --------------------------------------------------------------------------
# Title normalization and matching.
#
# The substitution table ships as a versioned data file
# (data/title_normalization.json) so it can be extended without code
# changes.  The rules are a best-effort reconstruction for matching
# historical spellings to modern ones, not a claim of philological fidelity.

_PUNCT_RE = re.compile(r"[^\w\s]|_", re.UNICODE)   # keep letters/digits/whitespace
_WS_RE = re.compile(r"\s+")

_NORM_TABLE: dict[str, Any] | None = None


def _normalization_table() -> dict[str, Any]:
    global _NORM_TABLE
    if _NORM_TABLE is None:
        ref = resources.files("clcts_workbench").joinpath("data/title_normalization.json")
        _NORM_TABLE = json.loads(ref.read_text(encoding="utf-8"))
    return _NORM_TABLE


def _strip_diacritics(text: str) -> str:
    decomposed = unicodedata.normalize("NFD", text)
    return "".join(ch for ch in decomposed if not unicodedata.combining(ch))


def normalize_title(title: str, lang: str) -> str:
    """Normalize a title to a matching key: casefold, strip punctuation and
    diacritics, apply the language's substitution table, collapse whitespace.

    Casefolding maps German eszett to "ss"; digraph substitutions (de:
    "th" -> "t") run to a fixed point so the function is idempotent; the
    "ie" -> "i" rewrite applies only to a closed word list.  Unknown
    patterns pass through unchanged.
    """
    if not title.strip():
        raise ValidationError("empty title")
    code, _ = _parse_lang(lang)
    table = _normalization_table().get(code, {})
    # Diacritics are stripped before punctuation so that combining marks in
    # already-decomposed input are removed as marks, not as "punctuation".
    text = _strip_diacritics(title.casefold())
    text = _PUNCT_RE.sub(" ", text)
    for old, new in table.get("digraph_substitutions", {}).items():
        while old in text:
            text = text.replace(old, new)
    word_map = table.get("word_substitutions", {})
    if word_map:
        text = " ".join(word_map.get(w, w) for w in text.split())
    return _WS_RE.sub(" ", text).strip()


@dataclass(frozen=True)
class MatchResult:
    """Outcome of document/summary matching; nothing is dropped silently."""

    matched: tuple[tuple[tuple, tuple], ...]       # (document, wiki_entry) pairs
    unmatched_documents: tuple[tuple, ...]
    unmatched_wiki: tuple[tuple, ...]
    ambiguities: tuple[dict[str, Any], ...]        # normalized key -> competing wiki titles


def match_summaries(
    documents: Sequence[tuple],
    wiki_entries: Sequence[tuple],
) -> MatchResult:
    """Match documents (title, lang, metadata) to wiki entries (title, summary).

    A document matches an entry iff their normalized titles are equal.
    Matching is one-to-one: exact raw-title matches are claimed first, the
    rest fall back to normalized equality in first-seen order.  Entries
    whose normalized titles collide are reported as ambiguities, not errors.
    """
    if not documents or not wiki_entries:
        raise ValidationError("both document and wiki collections must be non-empty")
    wiki_used = [False] * len(wiki_entries)
    doc_matched: list[tuple | None] = [None] * len(documents)
    ambiguities: list[dict[str, Any]] = []

    # Pass 1: exact raw titles win before any normalization is applied.
    raw_index: dict[str, list[int]] = {}
    for j, entry in enumerate(wiki_entries):
        raw_index.setdefault(entry[0], []).append(j)
    for i, doc in enumerate(documents):
        for j in raw_index.get(doc[0], ()):
            if not wiki_used[j]:
                wiki_used[j] = True
                doc_matched[i] = wiki_entries[j]
                break

    # Pass 2: normalized-title equality, first-seen order.
    norm_cache: dict[tuple[str, str], str] = {}

    def norm(title: str, lang: str) -> str:
        key = (title, lang)
        if key not in norm_cache:
            norm_cache[key] = normalize_title(title, lang)
        return norm_cache[key]

    for i, doc in enumerate(documents):
        if doc_matched[i] is not None:
            continue
        title, lang = doc[0], doc[1]
        wanted = norm(title, lang)
        candidates = [
            j for j in range(len(wiki_entries))
            if not wiki_used[j] and norm(wiki_entries[j][0], lang) == wanted
        ]
        if len(candidates) > 1:
            ambiguities.append({
                "document_title": title,
                "normalized": wanted,
                "wiki_titles": [wiki_entries[j][0] for j in candidates],
            })
        if candidates:
            j = candidates[0]
            wiki_used[j] = True
            doc_matched[i] = wiki_entries[j]

    matched = tuple(
        (doc, hit) for doc, hit in zip(documents, doc_matched) if hit is not None
    )
    unmatched_docs = tuple(
        doc for doc, hit in zip(documents, doc_matched) if hit is None
    )
    unmatched_wiki = tuple(
        entry for entry, used in zip(wiki_entries, wiki_used) if not used
    )
    return MatchResult(matched, unmatched_docs, unmatched_wiki, tuple(ambiguities))


# --------------------------------------------------------------------------
# Ingestion: embeddings, scores, annotations.


@dataclass(frozen=True)
class EmbeddingTable:
    entries: dict[tuple[str, str, int], tuple[float, ...]]
    dimension: int
    model: str | None = None

    def sides(self, doc_id: str) -> tuple[str, ...]:
        return tuple(sorted({side for (d, side, _) in self.entries if d == doc_id}))

    def vectors(self, doc_id: str, side: str) -> list[tuple[float, ...]]:
        picked = [
            (idx, vec) for (d, s, idx), vec in self.entries.items()
            if d == doc_id and s == side
        ]
        picked.sort()
        return [vec for _, vec in picked]


def ingest_embeddings(path: str) -> EmbeddingTable:
    """Read an embeddings JSONL file into a validated table.

    An optional first line {"model": ..., "dimension": ...} pins the
    expected dimension; otherwise the first vector sets it.  All vectors
    must share the dimension, keys must be unique, and sentence indices
    must be contiguous from 0 per (doc_id, side).
    """
    entries: dict[tuple[str, str, int], tuple[float, ...]] = {}
    model: str | None = None
    dimension: int | None = None
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValidationError(f"{path}: line {line_no}: not valid JSON ({exc.msg})") from exc
            if line_no == 1 and "doc_id" not in obj and "model" in obj:
                model = str(obj["model"])
                if "dimension" in obj:
                    dimension = int(obj["dimension"])
                continue
            for key in ("doc_id", "side", "sent_idx", "vector"):
                if key not in obj:
                    raise ValidationError(f"{path}: line {line_no}: missing key {key!r}")
            side = obj["side"]
            if side not in SIDES:
                raise ValidationError(
                    f"{path}: line {line_no}: side must be one of {SIDES}, got {side!r}"
                )
            key = (str(obj["doc_id"]), side, int(obj["sent_idx"]))
            if key in entries:
                raise ValidationError(f"{path}: line {line_no}: duplicate key {key}")
            vector = obj["vector"]
            if not isinstance(vector, list) or not vector:
                raise ValidationError(f"{path}: line {line_no}: vector must be a non-empty array")
            vec = tuple(float(v) for v in vector)
            if dimension is None:
                dimension = len(vec)
            elif len(vec) != dimension:
                raise ValidationError(
                    f"{path}: line {line_no}: dimension mismatch for {key}: "
                    f"expected {dimension}, got {len(vec)}"
                )
            entries[key] = vec
    if not entries:
        raise ValidationError(f"{path}: no embedding records")
    by_side: dict[tuple[str, str], list[int]] = {}
    for (doc_id, side, idx) in entries:
        by_side.setdefault((doc_id, side), []).append(idx)
    for (doc_id, side), indices in by_side.items():
        indices.sort()
        if indices != list(range(len(indices))):
            raise ValidationError(
                f"{path}: sentence indices for ({doc_id!r}, {side!r}) are not "
                f"contiguous from 0: {indices}"
            )
    assert dimension is not None
    return EmbeddingTable(entries=entries, dimension=dimension, model=model)


@dataclass(frozen=True)
class ScoreRow:
    doc_id: str
    system_id: str
    metric_name: str
    value: float
    provenance: str = "ingested"    # native | ingested | derived; in-memory only

    @property
    def key(self) -> tuple[str, str, str]:
        return (self.doc_id, self.system_id, self.metric_name)


@dataclass(frozen=True)
class MetricScoreTable:
    rows: tuple[ScoreRow, ...]

    def __post_init__(self) -> None:
        seen: dict[tuple[str, str, str], ScoreRow] = {}
        for row in self.rows:
            if row.key in seen:
                raise ValidationError(f"duplicate score row for key {row.key}")
            seen[row.key] = row

    def by_key(self) -> dict[tuple[str, str, str], float]:
        return {row.key: row.value for row in self.rows}

    def metrics(self) -> list[str]:
        return sorted({row.metric_name for row in self.rows})


def _read_csv_rows(path: str, required: Sequence[str]) -> Iterable[tuple[int, dict[str, str]]]:
    import csv

    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in required if c not in header]
        if missing:
            raise ValidationError(f"{path}: header is missing columns {missing}")
        for line_no, row in enumerate(reader, start=2):
            yield line_no, row


def ingest_scores(path: str) -> MetricScoreTable:
    rows: list[ScoreRow] = []
    seen: dict[tuple[str, str, str], int] = {}
    for line_no, raw in _read_csv_rows(path, SCORE_COLUMNS):
        try:
            value = float(raw["value"])
        except (TypeError, ValueError):
            raise ValidationError(f"{path}: line {line_no}: value {raw['value']!r} is not a number")
        row = ScoreRow(raw["doc_id"], raw["system_id"], raw["metric_name"], value)
        if row.key in seen:
            raise ValidationError(
                f"{path}: duplicate key {row.key} on lines {seen[row.key]} and {line_no}"
            )
        seen[row.key] = line_no
        rows.append(row)
    return MetricScoreTable(rows=tuple(rows))


def write_scores_csv(table: MetricScoreTable, path: str) -> None:
    import csv

    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SCORE_COLUMNS)
        for row in table.rows:
            writer.writerow([row.doc_id, row.system_id, row.metric_name, repr(row.value)])


@dataclass(frozen=True)
class AnnotationRecord:
    doc_id: str
    system_id: str
    rater_id: str
    rater_kind: str             # human | llm
    coherence: float
    consistency: float
    fluency: float
    relevance: float

    def rating(self, dimension: str) -> float:
        if dimension not in RATING_DIMENSIONS:
            raise ValidationError(f"unknown rating dimension {dimension!r}")
        return getattr(self, dimension)


def validate_rating(value: float, context: str = "rating") -> float:
    """Ratings live on the 1.0..5.0 grid in 0.5 steps; anything else is rejected."""
    doubled = value * 2
    if abs(doubled - round(doubled)) > 1e-9:
        raise ValidationError(f"{context}: {value} is not a multiple of 0.5")
    if not 1.0 <= value <= 5.0:
        raise ValidationError(f"{context}: {value} is outside [1, 5]")
    return float(value)


def ingest_annotations(path: str) -> tuple[AnnotationRecord, ...]:
    records: list[AnnotationRecord] = []
    seen: dict[tuple[str, str, str], int] = {}
    for line_no, raw in _read_csv_rows(path, ANNOTATION_COLUMNS):
        kind = raw["rater_kind"]
        if kind not in ("human", "llm"):
            raise ValidationError(
                f"{path}: line {line_no}: rater_kind must be 'human' or 'llm', got {kind!r}"
            )
        ratings = {}
        for dim in RATING_DIMENSIONS:
            try:
                value = float(raw[dim])
            except (TypeError, ValueError):
                raise ValidationError(f"{path}: line {line_no}: {dim} {raw[dim]!r} is not a number")
            ratings[dim] = validate_rating(value, context=f"{path}: line {line_no}: {dim}")
        key = (raw["doc_id"], raw["system_id"], raw["rater_id"])
        if key in seen:
            raise ValidationError(
                f"{path}: duplicate annotation for {key} on lines {seen[key]} and {line_no}"
            )
        seen[key] = line_no
        records.append(AnnotationRecord(
            doc_id=raw["doc_id"], system_id=raw["system_id"],
            rater_id=raw["rater_id"], rater_kind=kind, **ratings,
        ))
    return tuple(records)
