"""Minimal readers for the corpus and candidate JSONL formats.

The sidecar deliberately re-reads these files with its own small parser
instead of importing the core: the file formats are the interface, and the
two packages must stay independently installable.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

from .errors import SidecarError

_SENTENCE_END = re.compile(r"(?<=[.!?])\s+")
_TOKEN = re.compile(r"\w+|[^\w\s]", re.UNICODE)


@dataclass(frozen=True)
class CorpusDoc:
    id: str
    document: str
    summary: str
    lang_src: str
    lang_tgt: str


def split_sentences(text: str) -> list[str]:
    """Terminator-based splitting; good enough for export granularity."""
    return [part.strip() for part in _SENTENCE_END.split(text) if part.strip()]


def tokenize(text: str) -> list[str]:
    """Words and punctuation marks as separate tokens, case preserved."""
    return _TOKEN.findall(text)


def _require(obj: dict, keys: tuple[str, ...], path: str, line_no: int) -> None:
    for key in keys:
        if key not in obj:
            raise SidecarError(f"{path}: line {line_no}: missing key {key!r}")


def read_corpus(path: str) -> list[CorpusDoc]:
    docs: list[CorpusDoc] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SidecarError(f"{path}: line {line_no}: not valid JSON ({exc.msg})") from exc
            _require(obj, ("id", "document", "summary"), path, line_no)
            doc_id = str(obj["id"])
            if doc_id in seen:
                raise SidecarError(f"{path}: line {line_no}: duplicate id {doc_id!r}")
            seen.add(doc_id)
            docs.append(CorpusDoc(
                id=doc_id,
                document=str(obj["document"]),
                summary=str(obj["summary"]),
                lang_src=str(obj.get("lang_src", "de")),
                lang_tgt=str(obj.get("lang_tgt", "en")),
            ))
    if not docs:
        raise SidecarError(f"{path}: no corpus records")
    return docs


def read_candidates(path: str) -> list[tuple[str, str, str]]:
    """(doc_id, system_id, summary) triples, unique per (doc_id, system_id)."""
    triples: list[tuple[str, str, str]] = []
    seen: set[tuple[str, str]] = set()
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SidecarError(f"{path}: line {line_no}: not valid JSON ({exc.msg})") from exc
            _require(obj, ("doc_id", "system_id", "summary"), path, line_no)
            key = (str(obj["doc_id"]), str(obj["system_id"]))
            if key in seen:
                raise SidecarError(f"{path}: line {line_no}: duplicate candidate {key}")
            seen.add(key)
            triples.append((key[0], key[1], str(obj["summary"])))
    if not triples:
        raise SidecarError(f"{path}: no candidate records")
    return triples
