"""Task base class and the code-size objective for multi-objective runs."""

from __future__ import annotations

import abc
from functools import lru_cache
from typing import Any, Callable, Sequence

from ..codekit import normalize_code, parse_dsl_function, parse_template
from ..codekit.template import TemplateProgram
from ..core import ContractViolation, ParseError

CandidateFn = Callable[..., float]


class Task(abc.ABC):
    """One algorithm-design problem: template, instances, scoring.

    Scoring must be deterministic in (candidate, instance_seed,
    instance_count); all scores are minimized.
    """

    id: str
    description: str
    template_source: str
    objective_count: int = 1
    instance_seed: int = 2024
    instance_count: int = 8
    default_timeout_s: float = 50.0
    eval_mode: str = "dsl"  # "dsl" runs in-process, "external" in a worker

    @property
    def template(self) -> TemplateProgram:
        return _parse_template_cached(self.template_source)

    @abc.abstractmethod
    def generate_instances(self, seed: int, count: int) -> list[Any]:
        """Deterministic instances from the named generator seeded by ``seed``."""

    @abc.abstractmethod
    def score_instance(self, fn: CandidateFn, instance: Any) -> float:
        """Score one instance with the candidate callable (lower is better)."""

    def aggregate(self, scores: Sequence[float]) -> float:
        """Combine per-instance scores into the task fitness (default: mean)."""
        if not scores:
            raise ContractViolation("cannot aggregate an empty score list")
        return sum(scores) / len(scores)

    def instances(self, seed: int | None = None, count: int | None = None) -> list[Any]:
        """Instance set for (seed, count), cached per task object."""
        key = (
            self.instance_seed if seed is None else seed,
            self.instance_count if count is None else count,
        )
        cache: dict = getattr(self, "_instance_cache", None) or {}
        if key not in cache:
            cache[key] = self.generate_instances(*key)
            self._instance_cache = cache
        return cache[key]


@lru_cache(maxsize=64)
def _parse_template_cached(source: str) -> TemplateProgram:
    return parse_template(source)


def complexity_objective(code: str) -> float:
    """Code-size objective (minimized): DSL node count, else token count."""
    try:
        return float(parse_dsl_function(code).total_nodes)
    except ParseError:
        return float(len(normalize_code(code).split()))
