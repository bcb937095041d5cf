"""Backend provenance carried by every emitted artifact.

The manifest names the exact parser, encoder, and metric configurations a
file was produced with; its digest is embedded in the artifact (comment
line, header field, or CSV column) and the full manifest is written next to
the artifact as JSON.  No timestamps: identical configuration must mean
identical bytes.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field


@dataclass(frozen=True)
class SidecarManifest:
    parser_model: str
    embedding_model: str
    embedding_dimension: int
    metric_models: dict[str, str] = field(default_factory=dict)
    tool_version: str = ""

    def to_dict(self) -> dict:
        return {
            "parser_model": self.parser_model,
            "embedding_model": self.embedding_model,
            "embedding_dimension": self.embedding_dimension,
            "metric_models": dict(sorted(self.metric_models.items())),
            "tool_version": self.tool_version,
        }

    def digest(self) -> str:
        payload = json.dumps(self.to_dict(), sort_keys=True).encode("utf-8")
        return hashlib.sha256(payload).hexdigest()

    def write(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, ensure_ascii=False, indent=1, sort_keys=True)
            fh.write("\n")
