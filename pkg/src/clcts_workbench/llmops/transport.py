"""Chat-model transports: live HTTP, recording, replay, and a scripted
double for tests.

A transport turns a ChatRequest into raw response text and nothing else;
prompting, validation, and bookkeeping all live above this layer.  The
recording/replay pair makes every interaction reproducible offline:
responses are stored one JSON file per request digest and replayed
byte-identically.
"""

from __future__ import annotations

import hashlib
import json
import os
import random
import time
from dataclasses import dataclass
from typing import Protocol

import httpx

from ..errors import TransportError

DEFAULT_CREDENTIAL_ENV = "CLCTS_API_KEY"


@dataclass(frozen=True)
class ChatRequest:
    prompt: str
    temperature: float
    model: str

    def digest(self) -> str:
        payload = json.dumps(
            {"prompt": self.prompt, "temperature": self.temperature, "model": self.model},
            ensure_ascii=False, sort_keys=True,
        )
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()


class Transport(Protocol):
    def complete(self, request: ChatRequest) -> str: ...


class HttpChatTransport:
    """Minimal chat-completions client with jittered exponential backoff.

    Credentials come from an environment variable, never from arguments,
    so they cannot leak into manifests or logs.
    """

    def __init__(
        self,
        endpoint: str,
        model: str,
        credential_env: str = DEFAULT_CREDENTIAL_ENV,
        max_retries: int = 3,
        backoff_base: float = 1.0,
        timeout: float = 60.0,
        rng: random.Random | None = None,
    ) -> None:
        self.endpoint = endpoint
        self.model = model
        self.credential_env = credential_env
        self.max_retries = max_retries
        self.backoff_base = backoff_base
        self.timeout = timeout
        self._rng = rng or random.Random()

    def _credential(self) -> str:
        value = os.environ.get(self.credential_env, "")
        if not value:
            raise TransportError(
                f"credential missing: set the {self.credential_env} environment variable"
            )
        return value

    def _sleep(self, attempt: int) -> None:
        delay = self.backoff_base * (2 ** attempt) * (1.0 + self._rng.random())
        time.sleep(delay)

    def complete(self, request: ChatRequest) -> str:
        key = self._credential()
        body = {
            "model": request.model or self.model,
            "temperature": request.temperature,
            "messages": [{"role": "user", "content": request.prompt}],
        }
        headers = {"Authorization": f"Bearer {key}"}
        last_error: Exception | None = None
        for attempt in range(self.max_retries + 1):
            try:
                response = httpx.post(
                    self.endpoint, json=body, headers=headers, timeout=self.timeout
                )
                if response.status_code in (429,) or response.status_code >= 500:
                    last_error = TransportError(
                        f"HTTP {response.status_code} from {self.endpoint}"
                    )
                elif response.status_code != 200:
                    raise TransportError(
                        f"HTTP {response.status_code} from {self.endpoint}: {response.text[:200]}"
                    )
                else:
                    payload = response.json()
                    return payload["choices"][0]["message"]["content"]
            except (httpx.HTTPError, KeyError, ValueError) as exc:
                last_error = exc
            if attempt < self.max_retries:
                self._sleep(attempt)
        raise TransportError(
            f"transport failed after {self.max_retries + 1} attempts: {last_error}"
        )


class RecordingTransport:
    """Wraps a live transport and writes every exchange to a fixtures
    directory, one JSON file per request digest."""

    def __init__(self, inner: Transport, fixtures_dir: str) -> None:
        self.inner = inner
        self.fixtures_dir = fixtures_dir
        os.makedirs(fixtures_dir, exist_ok=True)

    def complete(self, request: ChatRequest) -> str:
        response = self.inner.complete(request)
        record = {
            "prompt": request.prompt,
            "temperature": request.temperature,
            "model": request.model,
            "response": response,
        }
        path = os.path.join(self.fixtures_dir, f"{request.digest()}.json")
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(record, fh, ensure_ascii=False, indent=1)
        return response


class ReplayTransport:
    """Serves recorded responses; unknown requests are transport errors so
    offline runs cannot silently fall through to the network."""

    def __init__(self, fixtures_dir: str) -> None:
        self.fixtures_dir = fixtures_dir

    def complete(self, request: ChatRequest) -> str:
        path = os.path.join(self.fixtures_dir, f"{request.digest()}.json")
        if not os.path.exists(path):
            raise TransportError(
                f"no recorded fixture for this request (digest {request.digest()[:16]}…) "
                f"in {self.fixtures_dir}"
            )
        with open(path, encoding="utf-8") as fh:
            record = json.load(fh)
        return record["response"]


class ScriptedTransport:
    """Test double: returns canned responses in order and counts calls."""

    def __init__(self, responses: list[str]) -> None:
        self.responses = list(responses)
        self.calls = 0
        self.requests: list[ChatRequest] = []

    def complete(self, request: ChatRequest) -> str:
        self.requests.append(request)
        if self.calls >= len(self.responses):
            raise TransportError("scripted transport ran out of responses")
        response = self.responses[self.calls]
        self.calls += 1
        return response
