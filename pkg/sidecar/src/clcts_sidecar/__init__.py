"""Preprocessing exporter for the clcts-workbench ingestion formats.

The workbench core ingests three artifact kinds it never computes itself:
CoNLL-U dependency parses, sentence-embedding JSONL files, and neural-metric
score tables.  This package produces all three from a corpus JSONL file and
hands them over as plain files; it shares no code or state with the core.

Every emitted file references the digest of the SidecarManifest that
describes the exact backend configuration, so downstream reports can name
the models their numbers came from.
"""

from .errors import BackendUnavailable, SidecarError
from .manifest import SidecarManifest
from .parse import parse_corpus
from .embed import embed_corpus
from .score import METRIC_NAMES, score_neural

__version__ = "0.1.0"

__all__ = [
    "BackendUnavailable",
    "SidecarError",
    "SidecarManifest",
    "parse_corpus",
    "embed_corpus",
    "score_neural",
    "METRIC_NAMES",
    "__version__",
]
