from __future__ import annotations

import hashlib
import json

from clcts_workbench.manifest import build_manifest, file_digest, verify_manifest


class TestFileDigest:
    def test_matches_hashlib(self, tmp_path):
        path = tmp_path / "data.txt"
        path.write_bytes(b"payload bytes")
        assert file_digest(str(path)) == hashlib.sha256(b"payload bytes").hexdigest()

    def test_differs_on_content_change(self, tmp_path):
        path = tmp_path / "data.txt"
        path.write_text("one")
        before = file_digest(str(path))
        path.write_text("two")
        assert file_digest(str(path)) != before


class TestBuildManifest:
    def test_fields(self, tmp_path, monkeypatch):
        monkeypatch.setenv("SOURCE_DATE_EPOCH", "1700000000")
        path = tmp_path / "input.jsonl"
        path.write_text("{}")
        manifest = build_manifest(
            "stats", [str(path)], policy_id="unicode-word-lower-v1", seeds={"master": 7}
        )
        payload = manifest.to_dict()
        assert payload["subcommand"] == "stats"
        assert payload["inputs"] == {str(path): file_digest(str(path))}
        assert payload["policy_id"] == "unicode-word-lower-v1"
        assert payload["seeds"] == {"master": 7}
        assert payload["timestamp"] == "2023-11-14T22:13:20Z"

    def test_serialization_is_deterministic(self, tmp_path, monkeypatch):
        monkeypatch.setenv("SOURCE_DATE_EPOCH", "1700000000")
        path = tmp_path / "input.jsonl"
        path.write_text("{}")
        a = json.dumps(build_manifest("stats", [str(path)]).to_dict(), sort_keys=True)
        b = json.dumps(build_manifest("stats", [str(path)]).to_dict(), sort_keys=True)
        assert a == b


class TestVerifyManifest:
    def test_clean_verification(self, tmp_path):
        path = tmp_path / "input.jsonl"
        path.write_text("{}")
        manifest = build_manifest("stats", [str(path)]).to_dict()
        assert verify_manifest(manifest) == []

    def test_detects_modified_input(self, tmp_path):
        path = tmp_path / "input.jsonl"
        path.write_text("{}")
        manifest = build_manifest("stats", [str(path)]).to_dict()
        path.write_text("{tampered}")
        problems = verify_manifest(manifest)
        assert len(problems) == 1
        assert "input.jsonl" in problems[0]

    def test_detects_missing_input(self, tmp_path):
        path = tmp_path / "input.jsonl"
        path.write_text("{}")
        manifest = build_manifest("stats", [str(path)]).to_dict()
        path.unlink()
        problems = verify_manifest(manifest)
        assert len(problems) == 1
        assert "missing" in problems[0]
