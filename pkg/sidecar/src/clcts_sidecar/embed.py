"""Corpus to sentence-embedding JSONL export.

First line is the header record with the model id, dimension, and manifest
digest; then one record per (document, side, sentence) in corpus order,
document side first.  Sides with no sentences simply contribute no lines.
"""

from __future__ import annotations

import json

from .corpusio import read_corpus, split_sentences
from .manifest import SidecarManifest


def embed_corpus(
    corpus_path: str,
    out_path: str,
    encoder,
    manifest: SidecarManifest,
) -> int:
    """Write vectors for every sentence on both sides; return the line count."""
    docs = read_corpus(corpus_path)
    lines = 0
    with open(out_path, "w", encoding="utf-8") as fh:
        header = {
            "model": encoder.model_id,
            "dimension": encoder.dimension,
            "sidecar_manifest": manifest.digest(),
        }
        fh.write(json.dumps(header, ensure_ascii=False) + "\n")
        for doc in docs:
            for side, text in (("document", doc.document), ("summary", doc.summary)):
                for idx, sentence in enumerate(split_sentences(text)):
                    record = {
                        "doc_id": doc.id,
                        "side": side,
                        "sent_idx": idx,
                        "vector": encoder.encode(sentence),
                    }
                    fh.write(json.dumps(record, ensure_ascii=False) + "\n")
                    lines += 1
    manifest.write(out_path + ".manifest.json")
    return lines
