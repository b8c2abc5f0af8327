from __future__ import annotations

import json
import threading
import time

import httpx
import pytest

from algosmith.core import ConfigError, SampleError
from algosmith.llm import (
    HttpSampler,
    MockSampler,
    Prompt,
    Sampler,
    SamplerConfig,
    resolve_endpoint,
)


def prompt(text="hello"):
    return Prompt(user=text)


class TestMockSampler:
    def test_cycles_when_exhausted(self):
        sampler = MockSampler(["A", "B"])
        assert [sampler.draw_sample(prompt()) for _ in range(3)] == ["A", "B", "A"]

    def test_empty_script_rejected(self):
        with pytest.raises(ConfigError):
            MockSampler([])

    def test_serial_batch_keeps_script_order(self):
        sampler = MockSampler(["A", "B", "C"])
        out = sampler.draw_batch([prompt()] * 3, parallelism=1)
        assert out == ["A", "B", "C"]

    def test_concurrent_draws_consume_without_duplication(self):
        sampler = MockSampler([str(i) for i in range(32)])
        out = sampler.draw_batch([prompt()] * 32, parallelism=8)
        assert sorted(out, key=int) == [str(i) for i in range(32)]


class TestResolveEndpoint:
    def test_bare_host(self):
        assert resolve_endpoint("api.example.com") == (
            "https://api.example.com/v1/chat/completions"
        )

    def test_host_with_path(self):
        assert resolve_endpoint("https://llm.local/proxy") == (
            "https://llm.local/proxy/chat/completions"
        )

    def test_full_endpoint_kept(self):
        url = "https://x.test/v1/chat/completions"
        assert resolve_endpoint(url) == url


def _completion(content):
    return {"choices": [{"message": {"content": content}}]}


def _sampler_with(handler, **cfg):
    config = SamplerConfig(host="https://fake.test", model="m", **cfg)
    transport = httpx.MockTransport(handler)
    return HttpSampler(config, transport=transport, sleep=lambda s: None)


class TestHttpSampler:
    def test_happy_path_payload_shape(self):
        seen = {}

        def handler(request):
            seen["body"] = json.loads(request.content)
            seen["auth"] = request.headers.get("authorization")
            return httpx.Response(200, json=_completion("OUT"))

        sampler = _sampler_with(handler, api_key="secret", temperature=0.5)
        result = sampler.draw_sample(Prompt(user="U", system="S"))
        assert result == "OUT"
        assert seen["auth"] == "Bearer secret"
        assert seen["body"]["model"] == "m"
        assert seen["body"]["temperature"] == 0.5
        assert seen["body"]["messages"] == [
            {"role": "system", "content": "S"},
            {"role": "user", "content": "U"},
        ]

    def test_retry_exhaustion_is_sample_error(self):
        calls = {"n": 0}

        def handler(request):
            calls["n"] += 1
            return httpx.Response(500)

        sampler = _sampler_with(handler, max_retries=1)
        with pytest.raises(SampleError, match="status 500"):
            sampler.draw_sample(prompt())
        assert calls["n"] == 2  # initial try + one retry

    def test_retry_then_success(self):
        calls = {"n": 0}

        def handler(request):
            calls["n"] += 1
            if calls["n"] == 1:
                return httpx.Response(503)
            return httpx.Response(200, json=_completion("ok"))

        sampler = _sampler_with(handler, max_retries=2)
        assert sampler.draw_sample(prompt()) == "ok"

    def test_timeout_is_sample_error(self):
        def handler(request):
            raise httpx.ReadTimeout("slow")

        sampler = _sampler_with(handler, max_retries=0, request_timeout_s=0.1)
        with pytest.raises(SampleError, match="timed out"):
            sampler.draw_sample(prompt())

    def test_malformed_body_is_sample_error(self):
        def handler(request):
            return httpx.Response(200, json={"nope": True})

        sampler = _sampler_with(handler, max_retries=0)
        with pytest.raises(SampleError, match="not a chat completion"):
            sampler.draw_sample(prompt())

    def test_key_never_in_error_text(self):
        def handler(request):
            return httpx.Response(401)

        sampler = _sampler_with(handler, api_key="sk-super-secret", max_retries=0)
        with pytest.raises(SampleError) as err:
            sampler.draw_sample(prompt())
        assert "sk-super-secret" not in str(err.value)


class _Instrumented(Sampler):
    """Counts concurrent draw_sample calls; fails on marked prompts."""

    def __init__(self, delay=0.02):
        self.delay = delay
        self.active = 0
        self.max_active = 0
        self.lock = threading.Lock()

    def draw_sample(self, p):
        with self.lock:
            self.active += 1
            self.max_active = max(self.max_active, self.active)
        time.sleep(self.delay)
        with self.lock:
            self.active -= 1
        if p.user.startswith("FAIL"):
            raise SampleError("scripted failure")
        return f"echo:{p.user}"


class TestDrawBatch:
    def test_positional_alignment_with_failures(self):
        sampler = _Instrumented()
        out = sampler.draw_batch(
            [prompt("a"), prompt("FAIL-b"), prompt("c")], parallelism=2
        )
        assert out[0] == "echo:a"
        assert isinstance(out[1], SampleError)
        assert out[2] == "echo:c"

    def test_in_flight_never_exceeds_parallelism(self):
        sampler = _Instrumented()
        sampler.draw_batch([prompt(str(i)) for i in range(12)], parallelism=3)
        assert sampler.max_active <= 3

    def test_four_prompts_parallelism_four(self):
        sampler = _Instrumented()
        out = sampler.draw_batch([prompt(str(i)) for i in range(4)], parallelism=4)
        assert len(out) == 4
        assert sampler.max_active <= 4
