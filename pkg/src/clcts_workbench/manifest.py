"""Run manifests: the reproducibility stamp embedded in every report.

A manifest records the subcommand, SHA-256 digests of every input file,
the tool version, the tokenization policy id, the seeds in play, and a
timestamp.  Reports carry their manifest so a verifier can re-hash the
inputs later and confirm that a report still describes the files on disk.

The timestamp honours the SOURCE_DATE_EPOCH convention: when that
environment variable is set, it is used instead of the wall clock, which
makes transport-free runs byte-reproducible.
"""

from __future__ import annotations

import hashlib
import os
import time
from dataclasses import dataclass, field

from . import __version__


def file_digest(path: str) -> str:
    """SHA-256 hex digest of a file's bytes."""
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _timestamp() -> str:
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    when = int(epoch) if epoch is not None else int(time.time())
    return time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime(when))


@dataclass(frozen=True)
class RunManifest:
    subcommand: str
    inputs: dict[str, str]          # path -> sha256 hex digest
    tool_version: str
    policy_id: str | None = None
    seeds: dict[str, int] = field(default_factory=dict)
    timestamp: str = ""

    def to_dict(self) -> dict:
        return {
            "subcommand": self.subcommand,
            "inputs": dict(sorted(self.inputs.items())),
            "tool_version": self.tool_version,
            "policy_id": self.policy_id,
            "seeds": dict(sorted(self.seeds.items())),
            "timestamp": self.timestamp,
        }


def build_manifest(
    subcommand: str,
    input_paths: list[str],
    policy_id: str | None = None,
    seeds: dict[str, int] | None = None,
) -> RunManifest:
    digests = {p: file_digest(p) for p in input_paths}
    return RunManifest(
        subcommand=subcommand,
        inputs=digests,
        tool_version=__version__,
        policy_id=policy_id,
        seeds=dict(seeds or {}),
        timestamp=_timestamp(),
    )


def verify_manifest(manifest: dict) -> list[str]:
    """Re-hash the manifest's inputs; return a list of human-readable mismatches."""
    problems: list[str] = []
    for path, recorded in manifest.get("inputs", {}).items():
        if not os.path.exists(path):
            problems.append(f"{path}: missing")
            continue
        actual = file_digest(path)
        if actual != recorded:
            problems.append(f"{path}: digest changed ({recorded[:12]}… -> {actual[:12]}…)")
    return problems
