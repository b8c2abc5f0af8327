"""Shared domain types: fitness vectors, candidates, budgets, and run events.

Every objective in the engine is minimized; smaller fitness values are
better. Tasks whose natural score is a maximization flip the sign inside
their evaluator so the rest of the engine never special-cases direction.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterator, Optional, Sequence


class ContractViolation(ValueError):
    """An operation was called with arguments that break its contract."""


class TemplateError(ValueError):
    """Template program source does not satisfy the template rules."""


class ParseError(ValueError):
    """Text could not be turned into runnable code (LLM response or DSL)."""


class EvalError(RuntimeError):
    """Expression evaluation failed (unbound variable, budget exhausted)."""


class SampleError(RuntimeError):
    """A sampler draw failed after exhausting retries/timeouts."""


class ConfigError(ValueError):
    """A run configuration references unknown components or bad values."""


@dataclass(frozen=True)
class FitnessVector:
    """An m >= 1 tuple of finite objective values, all minimized."""

    values: tuple[float, ...]

    def __init__(self, values: Sequence[float]) -> None:
        vals = tuple(float(v) for v in values)
        if not vals:
            raise ContractViolation("fitness vector must have at least one objective")
        for v in vals:
            if not math.isfinite(v):
                raise ContractViolation(f"fitness values must be finite, got {v!r}")
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, i: int) -> float:
        return self.values[i]

    def __iter__(self) -> Iterator[float]:
        return iter(self.values)

    @property
    def scalar(self) -> float:
        if len(self.values) != 1:
            raise ContractViolation("scalar access on multi-objective fitness")
        return self.values[0]


def compare_scalar(a: Optional[FitnessVector], b: Optional[FitnessVector]) -> int:
    """Total preorder on optional single-objective fitness.

    Returns a negative number if ``a`` is better (smaller), positive if ``b``
    is better, 0 on ties. Absent fitness (invalid candidate) compares worse
    than any present value.
    """
    for v in (a, b):
        if v is not None and len(v) != 1:
            raise ContractViolation("compare_scalar expects length-1 vectors")
    if a is None and b is None:
        return 0
    if a is None:
        return 1
    if b is None:
        return -1
    if a.scalar < b.scalar:
        return -1
    if a.scalar > b.scalar:
        return 1
    return 0


def dominates(a: FitnessVector, b: FitnessVector) -> bool:
    """Pareto dominance: a <= b componentwise and strictly better somewhere."""
    if len(a) != len(b):
        raise ContractViolation("dominance requires equal-length vectors")
    strictly_better = False
    for x, y in zip(a, b):
        if x > y:
            return False
        if x < y:
            strictly_better = True
    return strictly_better


class EvalStatus(str, Enum):
    VALID = "valid"
    TIMEOUT = "timeout"
    RUNTIME_ERROR = "runtime_error"
    PARSE_ERROR = "parse_error"
    SAMPLE_ERROR = "sample_error"


@dataclass(frozen=True)
class EvalOutcome:
    """Classification of one candidate evaluation.

    ``fitness`` is present exactly when ``status`` is VALID.
    """

    status: EvalStatus
    fitness: Optional[FitnessVector] = None
    wall_time_s: float = 0.0
    diagnostics: str = ""

    def __post_init__(self) -> None:
        if (self.status is EvalStatus.VALID) != (self.fitness is not None):
            raise ContractViolation("fitness present iff status is valid")

    @property
    def is_valid(self) -> bool:
        return self.status is EvalStatus.VALID


@dataclass(frozen=True)
class Candidate:
    """One sampled algorithm with provenance and its evaluation outcome."""

    id: int
    code: str
    outcome: EvalOutcome
    idea: Optional[str] = None
    parent_ids: tuple[int, ...] = ()
    sample_index: int = -1
    normalized_hash: str = ""

    @property
    def fitness(self) -> Optional[FitnessVector]:
        return self.outcome.fitness

    @property
    def is_valid(self) -> bool:
        return self.outcome.is_valid


def candidate_order_key(c: Candidate) -> tuple[float, int]:
    """Sort key: ascending fitness, invalid last, ties to earlier sample."""
    if c.fitness is None:
        return (math.inf, c.sample_index)
    return (c.fitness.scalar, c.sample_index)


@dataclass(frozen=True)
class Budget:
    """Run limits: sampler invocations, optional generations, per-eval wall time."""

    max_samples: int
    max_generations: Optional[int] = None
    eval_timeout_s: float = 50.0

    def __post_init__(self) -> None:
        if self.max_samples < 1:
            raise ContractViolation("max_samples must be >= 1")
        if self.eval_timeout_s <= 0:
            raise ContractViolation("eval_timeout_s must be positive")
        if self.max_generations is not None and self.max_generations < 1:
            raise ContractViolation("max_generations must be >= 1 when set")


def budget_remaining(budget: Budget, samples_used: int) -> int:
    if samples_used < 0:
        raise ContractViolation("samples_used must be >= 0")
    return max(0, budget.max_samples - samples_used)


class EventKind(str, Enum):
    SAMPLE_DRAWN = "sample_drawn"
    EVAL_FINISHED = "eval_finished"
    NEW_BEST = "new_best"
    GENERATION_END = "generation_end"
    RUN_END = "run_end"
    ERROR = "error"


@dataclass(frozen=True)
class RunEvent:
    """One totally ordered log record; serialized as one JSON object per line."""

    seq: int
    ts: float
    kind: EventKind
    payload: dict[str, Any] = field(default_factory=dict)

    def to_json_line(self) -> str:
        doc = {"seq": self.seq, "ts": self.ts, "kind": self.kind.value, "payload": self.payload}
        return json.dumps(doc, sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json_line(cls, line: str) -> "RunEvent":
        doc = json.loads(line)
        return cls(
            seq=int(doc["seq"]),
            ts=float(doc["ts"]),
            kind=EventKind(doc["kind"]),
            payload=dict(doc.get("payload") or {}),
        )
