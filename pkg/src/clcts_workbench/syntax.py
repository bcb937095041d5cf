"""CoNLL-U ingestion and mean dependency distance (MDD).

MDD here is the mean absolute difference between the linear positions of
a dependent and its head, over all edges except the root edge and except
edges touching a PUNCT token.  Both exclusions are toggles: the defaults
are documented choices, since dependency-distance conventions vary.
Parsing itself is somebody else's job; this module only reads the
standard 10-column format.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ValidationError

# CoNLL-U column indices.
ID, FORM, LEMMA, UPOS, XPOS, FEATS, HEAD, DEPREL, DEPS, MISC = range(10)

DOC_COMMENT = "# doc_id ="


@dataclass(frozen=True)
class Token:
    index: int      # 1-based position
    form: str
    upos: str
    head: int       # 0 = root
    deprel: str


@dataclass(frozen=True)
class ParsedSentence:
    tokens: tuple[Token, ...]

    def __len__(self) -> int:
        return len(self.tokens)


@dataclass(frozen=True)
class MddReport:
    corpus_mdd: float
    per_document: dict[str, float]
    edge_count: int

    def to_dict(self) -> dict:
        return {
            "corpus_mdd": self.corpus_mdd,
            "edge_count": self.edge_count,
            "per_document": dict(sorted(self.per_document.items())),
        }


def _finish_sentence(rows: list[tuple[int, list[str]]], path: str) -> ParsedSentence:
    tokens: list[Token] = []
    for line_no, cols in rows:
        try:
            index = int(cols[ID])
            head = int(cols[HEAD])
        except ValueError:
            raise ValidationError(
                f"{path}: line {line_no}: non-integer ID or HEAD ({cols[ID]!r}, {cols[HEAD]!r})"
            )
        tokens.append(Token(index=index, form=cols[FORM], upos=cols[UPOS],
                            head=head, deprel=cols[DEPREL]))
    n = len(tokens)
    first_line = rows[0][0]
    if [t.index for t in tokens] != list(range(1, n + 1)):
        raise ValidationError(
            f"{path}: sentence at line {first_line}: token ids are not contiguous 1..{n}"
        )
    roots = [t for t in tokens if t.head == 0]
    if len(roots) != 1:
        raise ValidationError(
            f"{path}: sentence at line {first_line}: expected exactly one root, found {len(roots)}"
        )
    for t in tokens:
        if t.head > n or t.head < 0:
            raise ValidationError(
                f"{path}: sentence at line {first_line}: token {t.index} has "
                f"dangling head {t.head} (sentence has {n} tokens)"
            )
        if t.head == t.index:
            raise ValidationError(
                f"{path}: sentence at line {first_line}: token {t.index} is its own head"
            )
    return ParsedSentence(tokens=tuple(tokens))


def parse_conllu(path: str) -> list[tuple[str, list[ParsedSentence]]]:
    """Read a CoNLL-U file grouped by '# doc_id =' comments.

    Multiword-token ranges ("3-4") and empty nodes ("5.1") are skipped;
    everything else must be a well-formed 10-column line.
    """
    docs: list[tuple[str, list[ParsedSentence]]] = []
    current_doc = ""
    current_sentences: list[ParsedSentence] = []
    pending: list[tuple[int, list[str]]] = []

    def flush_sentence() -> None:
        if pending:
            current_sentences.append(_finish_sentence(pending, path))
            pending.clear()

    def flush_doc() -> None:
        nonlocal current_sentences
        flush_sentence()
        if current_sentences:
            docs.append((current_doc, current_sentences))
            current_sentences = []

    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip():
                flush_sentence()
                continue
            if line.startswith("#"):
                if line.startswith(DOC_COMMENT):
                    flush_doc()
                    current_doc = line[len(DOC_COMMENT):].strip()
                continue
            cols = line.split("\t")
            if len(cols) != 10:
                raise ValidationError(
                    f"{path}: line {line_no}: expected 10 tab-separated columns, got {len(cols)}"
                )
            token_id = cols[ID]
            if "-" in token_id or "." in token_id:
                continue    # multiword range or empty node
            pending.append((line_no, cols))
    flush_doc()
    if not docs:
        raise ValidationError(f"{path}: no sentences found")
    return docs


def _eligible_distances(
    sentence: ParsedSentence,
    exclude_punct: bool,
    include_root: bool,
) -> list[int]:
    upos_by_index = {t.index: t.upos for t in sentence.tokens}
    distances: list[int] = []
    for t in sentence.tokens:
        if exclude_punct and t.upos == "PUNCT":
            continue
        if t.head == 0:
            if include_root:
                # The root has no linear position; with the toggle on, the
                # virtual head sits at position 0.
                distances.append(t.index)
            continue
        if exclude_punct and upos_by_index[t.head] == "PUNCT":
            continue
        distances.append(abs(t.head - t.index))
    return distances


def sentence_mdd(
    sentence: ParsedSentence,
    exclude_punct: bool = True,
    include_root: bool = False,
) -> float | None:
    """MDD of one sentence, or None when no edge survives the exclusions
    (a single-token sentence has no defined distance, not a zero one)."""
    distances = _eligible_distances(sentence, exclude_punct, include_root)
    if not distances:
        return None
    return sum(distances) / len(distances)


def corpus_mdd(
    parsed: list[tuple[str, list[ParsedSentence]]],
    exclude_punct: bool = True,
    include_root: bool = False,
    macro: bool = False,
) -> MddReport:
    """Aggregate MDD over a parsed corpus.

    Default is a micro-average over all eligible edges; macro=True averages
    per-sentence MDDs instead.  Documents without eligible edges are absent
    from per_document rather than reported as 0.
    """
    per_document: dict[str, float] = {}
    total_sum = 0.0
    total_edges = 0
    macro_values: list[float] = []
    for doc_id, sentences in parsed:
        doc_sum = 0.0
        doc_edges = 0
        doc_macro: list[float] = []
        for sentence in sentences:
            distances = _eligible_distances(sentence, exclude_punct, include_root)
            if not distances:
                continue
            doc_sum += sum(distances)
            doc_edges += len(distances)
            doc_macro.append(sum(distances) / len(distances))
        total_sum += doc_sum
        total_edges += doc_edges
        macro_values.extend(doc_macro)
        if doc_edges:
            per_document[doc_id] = (
                sum(doc_macro) / len(doc_macro) if macro else doc_sum / doc_edges
            )
    if total_edges == 0:
        raise ValidationError("no eligible edges")
    overall = sum(macro_values) / len(macro_values) if macro else total_sum / total_edges
    return MddReport(corpus_mdd=overall, per_document=per_document, edge_count=total_edges)
