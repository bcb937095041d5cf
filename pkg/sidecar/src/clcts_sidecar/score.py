"""Candidate scoring against corpus reference summaries.

Emits the core's scores CSV shape (doc_id, system_id, metric_name, value)
plus a sidecar_manifest column carrying the configuration digest.  Metric
rows are named exactly as the core's registry expects.
"""

from __future__ import annotations

import csv

from .corpusio import read_candidates, read_corpus
from .errors import SidecarError
from .manifest import SidecarManifest

METRIC_NAMES = (
    "BERTScore-P",
    "BERTScore-R",
    "BERTScore-F1",
    "MoverScore",
    "BARTScore",
    "NLI-D",
    "DiscoScore",
)


def score_neural(
    candidates_path: str,
    corpus_path: str,
    out_path: str,
    metrics,
    manifest: SidecarManifest,
) -> int:
    """Score every candidate against its reference; return the row count."""
    references = {doc.id: doc.summary for doc in read_corpus(corpus_path)}
    triples = read_candidates(candidates_path)
    unknown = sorted({doc_id for doc_id, _, _ in triples if doc_id not in references})
    if unknown:
        raise SidecarError(
            f"{candidates_path}: candidates reference documents not in the "
            f"corpus: {unknown}"
        )
    digest = manifest.digest()
    rows = 0
    with open(out_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["doc_id", "system_id", "metric_name", "value", "sidecar_manifest"])
        for doc_id, system_id, summary in sorted(triples):
            scores = metrics.score(summary, references[doc_id])
            for name in METRIC_NAMES:
                writer.writerow([doc_id, system_id, name, repr(scores[name]), digest])
                rows += 1
    manifest.write(out_path + ".manifest.json")
    return rows
