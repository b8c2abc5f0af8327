"""Run configuration: one schema for the TOML file and the JSON API body.

Sections: [llm], [method], [task], [budget], [profiler], optional [run].
Key names are identical in both frontends, so a config file round-trips
through the HTTP API unchanged.
"""

from __future__ import annotations

import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from ..core import Budget, ConfigError
from ..llm import API_KEY_ENV, HttpSampler, MockSampler, Sampler, SamplerConfig
from ..search import MethodConfig
from ..tasks import Task, get_task


@dataclass(frozen=True)
class TaskOverrides:
    instance_seed: Optional[int] = None
    instance_count: Optional[int] = None
    timeout_s: Optional[float] = None
    eval_mode: Optional[str] = None


@dataclass(frozen=True)
class RunConfig:
    llm: dict[str, Any]
    method: MethodConfig
    task_id: str
    overrides: TaskOverrides
    budget: Budget
    log_dir: Optional[str]
    num_samplers: int = 1
    num_evaluators: int = 1
    raw: dict[str, Any] = field(default_factory=dict)

    def task(self) -> Task:
        return get_task(self.task_id)

    def build_sampler(self) -> Sampler:
        kind = self.llm.get("type", "http")
        if kind == "mock":
            return MockSampler(self._mock_script())
        if kind == "http":
            cfg = SamplerConfig(
                host=str(self.llm["host"]),
                api_key=str(self.llm.get("api_key", "")),
                model=str(self.llm.get("model", "")),
                request_timeout_s=float(self.llm.get("request_timeout_s", 20.0)),
                max_retries=int(self.llm.get("max_retries", 2)),
                temperature=(
                    float(self.llm["temperature"])
                    if "temperature" in self.llm
                    else None
                ),
            )
            return HttpSampler(cfg)
        raise ConfigError(f"unknown llm type {kind!r} (use 'http' or 'mock')")

    def _mock_script(self) -> list[str]:
        if "script" in self.llm:
            script = self.llm["script"]
            if not isinstance(script, list) or not all(
                isinstance(s, str) for s in script
            ):
                raise ConfigError("llm.script must be a list of strings")
            return script
        if "script_file" in self.llm:
            text = Path(self.llm["script_file"]).read_text(encoding="utf-8")
            parts = [p.strip() for p in text.split("\n---\n")]
            return [p for p in parts if p]
        raise ConfigError("mock sampler needs llm.script or llm.script_file")


def _require_section(doc: dict, name: str) -> dict:
    section = doc.get(name)
    if not isinstance(section, dict):
        raise ConfigError(f"config is missing the [{name}] section")
    return dict(section)


def _validate_llm(section: dict) -> dict:
    kind = section.get("type", "http")
    if kind == "mock":
        if "script" not in section and "script_file" not in section:
            raise ConfigError("mock sampler needs llm.script or llm.script_file")
    elif kind == "http":
        if not section.get("host"):
            raise ConfigError("http sampler needs llm.host")
        if not section.get("api_key") and not os.environ.get(API_KEY_ENV):
            raise ConfigError(
                f"http sampler needs llm.api_key or the {API_KEY_ENV} environment variable"
            )
    else:
        raise ConfigError(f"unknown llm type {kind!r} (use 'http' or 'mock')")
    return section


def config_from_dict(doc: dict[str, Any]) -> RunConfig:
    """Validate a config document; every referenced component must resolve."""
    llm = _validate_llm(_require_section(doc, "llm"))
    method = MethodConfig.from_dict(_require_section(doc, "method"))

    task_section = _require_section(doc, "task")
    task_id = task_section.get("id")
    if not task_id:
        raise ConfigError("task section must carry the task id")
    task = get_task(str(task_id))  # raises ConfigError with the valid list
    overrides = TaskOverrides(
        instance_seed=(
            int(task_section["instance_seed"])
            if "instance_seed" in task_section
            else None
        ),
        instance_count=(
            int(task_section["instance_count"])
            if "instance_count" in task_section
            else None
        ),
        timeout_s=(
            float(task_section["timeout_s"]) if "timeout_s" in task_section else None
        ),
        eval_mode=(
            str(task_section["eval_mode"]) if "eval_mode" in task_section else None
        ),
    )
    if overrides.eval_mode not in (None, "dsl", "external"):
        raise ConfigError("task.eval_mode must be 'dsl' or 'external'")

    budget_section = _require_section(doc, "budget")
    if "max_samples" not in budget_section:
        raise ConfigError("budget section must set max_samples")
    timeout = overrides.timeout_s
    if timeout is None:
        timeout = float(budget_section.get("eval_timeout_s", task.default_timeout_s))
    budget = Budget(
        max_samples=int(budget_section["max_samples"]),
        max_generations=(
            int(budget_section["max_generations"])
            if "max_generations" in budget_section
            else None
        ),
        eval_timeout_s=timeout,
    )

    profiler_section = doc.get("profiler") or {}
    log_dir = profiler_section.get("log_dir")

    run_section = doc.get("run") or {}
    num_samplers = int(run_section.get("num_samplers", 1))
    num_evaluators = int(run_section.get("num_evaluators", 1))
    if num_samplers < 1 or num_evaluators < 1:
        raise ConfigError("num_samplers and num_evaluators must be >= 1")

    return RunConfig(
        llm=llm,
        method=method,
        task_id=str(task_id),
        overrides=overrides,
        budget=budget,
        log_dir=str(log_dir) if log_dir else None,
        num_samplers=num_samplers,
        num_evaluators=num_evaluators,
        raw=_redact(doc),
    )


def load_config(path: str | Path) -> RunConfig:
    try:
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config file is not valid TOML: {exc}") from None
    return config_from_dict(doc)


def _redact(doc: dict[str, Any]) -> dict[str, Any]:
    """Config snapshot for logging; the API key never reaches disk."""
    out = {k: (dict(v) if isinstance(v, dict) else v) for k, v in doc.items()}
    llm = out.get("llm")
    if isinstance(llm, dict) and llm.get("api_key"):
        llm["api_key"] = "***"
    return out
