"""Document/summary semantic divergence from ingested sentence embeddings.

The core never computes embeddings.  Vectors arrive in the embeddings
JSONL format (see corpus module) and the similarity of a pair is the mean
cosine over all (document sentence, summary sentence) combinations, then
averaged unweighted over documents for the corpus number.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .corpus import Corpus, EmbeddingTable
from .errors import ValidationError


@dataclass(frozen=True)
class SimilarityReport:
    per_document: dict[str, float]
    corpus_mean: float
    model: str | None = None

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "corpus_mean": self.corpus_mean,
            "per_document": dict(sorted(self.per_document.items())),
        }


def _norm(vector: tuple[float, ...], key) -> float:
    value = math.sqrt(sum(v * v for v in vector))
    if value == 0.0:
        raise ValidationError(f"zero vector for {key}: cosine is undefined")
    return value


def document_similarity(doc_id: str, table: EmbeddingTable) -> float:
    """Mean pairwise cosine similarity between the two sides of one document."""
    doc_vecs = table.vectors(doc_id, "document")
    summ_vecs = table.vectors(doc_id, "summary")
    if not doc_vecs:
        raise ValidationError(f"no document-side embeddings for {doc_id!r}")
    if not summ_vecs:
        raise ValidationError(f"no summary-side embeddings for {doc_id!r}")
    doc_norms = [_norm(v, (doc_id, "document", i)) for i, v in enumerate(doc_vecs)]
    summ_norms = [_norm(v, (doc_id, "summary", i)) for i, v in enumerate(summ_vecs)]
    total = 0.0
    for dv, dn in zip(doc_vecs, doc_norms):
        for sv, sn in zip(summ_vecs, summ_norms):
            total += sum(a * b for a, b in zip(dv, sv)) / (dn * sn)
    return total / (len(doc_vecs) * len(summ_vecs))


def corpus_similarity(corpus: Corpus, table: EmbeddingTable) -> SimilarityReport:
    """Per-document similarities plus their unweighted mean.

    Every corpus pair must have embeddings on both sides; missing documents
    abort with the full list of missing ids, not just the first.
    """
    missing = [
        pair.id for pair in corpus.pairs
        if not table.vectors(pair.id, "document") or not table.vectors(pair.id, "summary")
    ]
    if missing:
        raise ValidationError(f"embeddings missing for documents: {missing}")
    per_document = {pair.id: document_similarity(pair.id, table) for pair in corpus.pairs}
    corpus_mean = sum(per_document.values()) / len(per_document)
    return SimilarityReport(per_document=per_document, corpus_mean=corpus_mean, model=table.model)
