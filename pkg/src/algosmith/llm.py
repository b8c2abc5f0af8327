"""Samplers: where candidate text comes from.

Two implementations share the contract: an HTTP client for chat-completion
endpoints (request/response in the common JSON wire format) and a scripted
mock that cycles through canned responses for deterministic runs and tests.
Batch draws are positionally aligned and bounded to a fixed number of
in-flight requests; an individual failure becomes a SampleError in its slot
and never aborts the batch.
"""

from __future__ import annotations

import logging
import os
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Optional, Sequence, Union

import httpx

from .core import ConfigError, SampleError

API_KEY_ENV = "ALGOSMITH_API_KEY"

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SamplerConfig:
    host: str
    api_key: str = ""
    model: str = ""
    request_timeout_s: float = 20.0
    max_retries: int = 2
    temperature: Optional[float] = None

    def __post_init__(self) -> None:
        if self.request_timeout_s <= 0:
            raise ConfigError("request_timeout_s must be positive")
        if self.max_retries < 0:
            raise ConfigError("max_retries must be >= 0")


@dataclass(frozen=True)
class Prompt:
    user: str
    system: str = ""
    metadata: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.user:
            raise ConfigError("prompt user text must be non-empty")


class Sampler:
    """Base sampler; subclasses implement draw_sample."""

    def draw_sample(self, prompt: Prompt) -> str:
        raise NotImplementedError

    def draw_batch(
        self, prompts: Sequence[Prompt], parallelism: int = 1
    ) -> list[Union[str, SampleError]]:
        """Draw all prompts with at most ``parallelism`` requests in flight.

        Results align positionally with the prompts; failures are returned
        in place, never raised.
        """
        if parallelism < 1:
            raise ConfigError("parallelism must be >= 1")

        def one(prompt: Prompt) -> Union[str, SampleError]:
            try:
                return self.draw_sample(prompt)
            except SampleError as exc:
                return exc

        if parallelism == 1 or len(prompts) <= 1:
            return [one(p) for p in prompts]
        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            return list(pool.map(one, prompts))


def resolve_endpoint(host: str) -> str:
    """Normalize a host string to a chat-completions URL."""
    url = host if "://" in host else f"https://{host}"
    stripped = url.rstrip("/")
    if stripped.endswith("/chat/completions"):
        return stripped
    base = httpx.URL(stripped)
    if base.path in ("", "/"):
        return f"{stripped}/v1/chat/completions"
    return f"{stripped}/chat/completions"


class HttpSampler(Sampler):
    """Chat-completion client with timeout, bounded retries, and key redaction.

    The API key falls back to the ALGOSMITH_API_KEY environment variable and
    is never included in logs or error text.
    """

    def __init__(
        self,
        config: SamplerConfig,
        transport: Optional[httpx.BaseTransport] = None,
        sleep: Callable[[float], None] = time.sleep,
        retry_backoff_s: float = 1.0,
    ) -> None:
        self.config = config
        self.endpoint = resolve_endpoint(config.host)
        self._sleep = sleep
        self._retry_backoff_s = retry_backoff_s
        self._client = httpx.Client(
            transport=transport, timeout=config.request_timeout_s
        )

    def close(self) -> None:
        self._client.close()

    def _headers(self) -> dict[str, str]:
        key = self.config.api_key or os.environ.get(API_KEY_ENV, "")
        headers = {"Content-Type": "application/json"}
        if key:
            headers["Authorization"] = f"Bearer {key}"
        return headers

    def _payload(self, prompt: Prompt) -> dict[str, Any]:
        messages = []
        if prompt.system:
            messages.append({"role": "system", "content": prompt.system})
        messages.append({"role": "user", "content": prompt.user})
        payload: dict[str, Any] = {"model": self.config.model, "messages": messages}
        if self.config.temperature is not None:
            payload["temperature"] = self.config.temperature
        return payload

    def draw_sample(self, prompt: Prompt) -> str:
        attempts = self.config.max_retries + 1
        last_error = "no attempt made"
        payload = self._payload(prompt)
        logger.debug("request to %s: %r", self.endpoint, payload)  # key is header-only
        for attempt in range(attempts):
            if attempt > 0:
                self._sleep(self._retry_backoff_s)
            try:
                response = self._client.post(
                    self.endpoint, json=payload, headers=self._headers()
                )
            except httpx.TimeoutException:
                last_error = f"request timed out after {self.config.request_timeout_s}s"
                continue
            except httpx.HTTPError as exc:
                last_error = f"transport error: {type(exc).__name__}"
                continue
            logger.debug(
                "response status %s: %r", response.status_code, response.text[:2000]
            )
            if response.status_code != 200:
                last_error = f"endpoint returned status {response.status_code}"
                continue
            try:
                doc = response.json()
                content = doc["choices"][0]["message"]["content"]
            except (ValueError, LookupError, TypeError):
                last_error = "response body is not a chat completion"
                continue
            if not isinstance(content, str):
                last_error = "completion content is not text"
                continue
            return content
        raise SampleError(f"draw failed after {attempts} attempts: {last_error}")


class MockSampler(Sampler):
    """Deterministic scripted sampler; cycles when the script is exhausted.

    The cursor is advanced under a lock so concurrent draws consume distinct
    script entries (cross-thread order is unspecified unless parallelism=1).
    """

    def __init__(self, script: Sequence[str]) -> None:
        if not script:
            raise ConfigError("mock sampler script must be non-empty")
        self.script = list(script)
        self._cursor = 0
        self._lock = threading.Lock()

    def draw_sample(self, prompt: Prompt) -> str:
        with self._lock:
            text = self.script[self._cursor % len(self.script)]
            self._cursor += 1
        return text
