"""Chat-completion providers: HTTP client and a deterministic mock.

The HTTP provider speaks the common chat-completions shape (POST
``{base_url}/chat/completions``); the auth token comes from an environment
variable only. The mock provider is table-driven (payload hash to canned
response) with an optional synthesizer fallback so hermetic end-to-end runs
need no prepared table.
"""

from __future__ import annotations

import hashlib
import os
import threading
import time
from dataclasses import dataclass
from typing import Callable

from .prompts import PromptKind


class TransportError(RuntimeError):
    """Provider unreachable or persistently failing after bounded retries."""


class AuthError(RuntimeError):
    """Auth token environment variable is missing."""


@dataclass(frozen=True)
class ProviderConfig:
    name: str = "mock"
    model: str = "mock-1"
    temperature: float = 0.0
    max_output_tokens: int = 16000
    timeout_seconds: float = 60.0
    max_retries: int = 3
    base_url: str = "http://localhost:8000/v1"
    auth_env_var: str = "LLM_API_KEY"
    max_in_flight: int = 4
    tokens_per_minute: int | None = None  # None disables rate limiting

    @property
    def provider_id(self) -> str:
        """Stable identity used in cache keys."""
        return f"{self.name}:{self.model}:t={self.temperature:g}"


def payload_hash(kind: PromptKind, payload: str) -> str:
    return hashlib.sha256(f"{kind.value}\x00{payload}".encode("utf-8")).hexdigest()


class TokenBudget:
    """Simple token-bucket limiter on estimated tokens per minute."""

    def __init__(self, tokens_per_minute: int):
        self.rate = tokens_per_minute / 60.0
        self.capacity = float(tokens_per_minute)
        self._level = self.capacity
        self._last = time.monotonic()
        self._lock = threading.Lock()

    def acquire(self, tokens: int) -> None:
        while True:
            with self._lock:
                now = time.monotonic()
                self._level = min(self.capacity, self._level + (now - self._last) * self.rate)
                self._last = now
                if self._level >= tokens:
                    self._level -= tokens
                    return
                wait = (tokens - self._level) / self.rate
            time.sleep(min(wait, 1.0))


class HttpChatProvider:
    """Minimal chat-completions client over HTTP."""

    def __init__(self, config: ProviderConfig):
        self.config = config
        token = os.environ.get(config.auth_env_var)
        if not token:
            raise AuthError(
                f"auth token env var {config.auth_env_var!r} is not set"
            )
        self._token = token
        self._budget = (
            TokenBudget(config.tokens_per_minute) if config.tokens_per_minute else None
        )

    def complete(self, kind: PromptKind, system: str, user: str) -> tuple[str, object]:
        """Returns (response text, logprobs-or-None). Retries transport failures."""
        import requests

        if self._budget is not None:
            # Rough estimate: one token per 4 characters plus the output cap.
            self._budget.acquire(len(system + user) // 4 + self.config.max_output_tokens)

        body = {
            "model": self.config.model,
            "temperature": self.config.temperature,
            "max_tokens": self.config.max_output_tokens,
            "messages": [
                {"role": "system", "content": system},
                {"role": "user", "content": user},
            ],
        }
        last_exc: Exception | None = None
        for attempt in range(self.config.max_retries):
            try:
                resp = requests.post(
                    f"{self.config.base_url.rstrip('/')}/chat/completions",
                    json=body,
                    headers={"Authorization": f"Bearer {self._token}"},
                    timeout=self.config.timeout_seconds,
                )
                if resp.status_code >= 500:
                    raise TransportError(f"server error {resp.status_code}")
                resp.raise_for_status()
                data = resp.json()
                choice = data["choices"][0]
                return choice["message"]["content"], choice.get("logprobs")
            except TransportError as exc:
                last_exc = exc
            except Exception as exc:  # connection/timeout/JSON shape
                last_exc = exc
            time.sleep(min(2.0 ** attempt, 8.0) * 0.1)
        raise TransportError(f"provider unreachable after {self.config.max_retries} attempts: {last_exc}")


class MockProvider:
    """Deterministic in-process provider for tests and hermetic pipelines.

    Lookup order: exact (kind, payload-hash) table entry, then the
    synthesizer callback, then the default response. A call counter lets
    tests assert cache behavior.
    """

    def __init__(
        self,
        config: ProviderConfig | None = None,
        responses: dict[tuple[PromptKind, str], str] | None = None,
        synthesizer: Callable[[PromptKind, str], str] | None = None,
        default_response: str = "**Direction Estimate: NA**,**Magnitude Estimate: 0**",
    ):
        self.config = config or ProviderConfig()
        self._responses = dict(responses or {})
        self._synthesizer = synthesizer
        self._default = default_response
        self.calls = 0
        self._lock = threading.Lock()

    def add_response(self, kind: PromptKind, payload: str, response: str) -> None:
        self._responses[(kind, payload_hash(kind, payload))] = response

    def complete(self, kind: PromptKind, system: str, user: str) -> tuple[str, object]:
        with self._lock:
            self.calls += 1
        key = (kind, payload_hash(kind, user))
        if key in self._responses:
            return self._responses[key], None
        if self._synthesizer is not None:
            return self._synthesizer(kind, user), None
        return self._default, None
