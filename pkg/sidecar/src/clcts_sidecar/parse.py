"""Corpus to CoNLL-U export.

One document block per corpus record, introduced by a '# doc_id =' comment;
the manifest digest rides in a leading comment line.  Documents the parser
cannot handle are listed in a skip report next to the output, never dropped
silently.
"""

from __future__ import annotations

import json

from .corpusio import read_corpus
from .manifest import SidecarManifest

_COLUMNS = 10


def _sentence_block(rows: list[tuple[str, str, int, str]]) -> list[str]:
    lines = []
    for i, (form, upos, head, deprel) in enumerate(rows, start=1):
        cols = [str(i), form, "_", upos, "_", "_", str(head), deprel, "_", "_"]
        assert len(cols) == _COLUMNS
        lines.append("\t".join(cols))
    return lines


def parse_corpus(
    corpus_path: str,
    out_path: str,
    parser,
    manifest: SidecarManifest,
) -> tuple[int, list[dict[str, str]]]:
    """Write CoNLL-U for every parse-able document; return (written, skipped).

    The skip report (out_path + '.skips.json') is always written, with an
    empty list when nothing was skipped.
    """
    docs = read_corpus(corpus_path)
    skipped: list[dict[str, str]] = []
    written = 0
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write(f"# sidecar_manifest = {manifest.digest()}\n")
        for doc in docs:
            if not doc.document.strip():
                skipped.append({"doc_id": doc.id, "reason": "empty document field"})
                continue
            sentences = parser.parse(doc.document)
            if not sentences:
                skipped.append({"doc_id": doc.id, "reason": "no parseable sentences"})
                continue
            fh.write(f"# doc_id = {doc.id}\n")
            for rows in sentences:
                fh.write("\n".join(_sentence_block(rows)))
                fh.write("\n\n")
            written += 1
    with open(out_path + ".skips.json", "w", encoding="utf-8") as fh:
        json.dump({"skipped": skipped}, fh, ensure_ascii=False, indent=1, sort_keys=True)
        fh.write("\n")
    manifest.write(out_path + ".manifest.json")
    return written, skipped
