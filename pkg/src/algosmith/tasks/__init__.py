"""Algorithm-design tasks: the evaluation contract and the built-in registry.

A task owns a template program, a seeded instance generator, and a scoring
rule. Candidates are plain callables invoked positionally with the values
named by the template's parameters, so the engine can drive either a parsed
DSL function or a worker-side host-language function through the same code.
"""

from __future__ import annotations

from .base import Task, complexity_objective
from .obp import ObpInstance, ObpTask
from .sr import SrDataset, SrTask, sr_rmse
from .tsp import TspInstance, TspTask

from ..core import ConfigError

_REGISTRY: dict[str, Task] = {}


def register_task(task: Task) -> None:
    if task.id in _REGISTRY:
        raise ConfigError(f"duplicate task id {task.id!r}")
    _REGISTRY[task.id] = task


def get_task(task_id: str) -> Task:
    try:
        return _REGISTRY[task_id]
    except KeyError:
        raise ConfigError(
            f"unknown task {task_id!r}; valid tasks: {', '.join(sorted(_REGISTRY))}"
        ) from None


def list_tasks() -> list[str]:
    return sorted(_REGISTRY)


def generate_instances(task_id: str, seed: int, count: int) -> list:
    """Deterministic instance list for a registered task."""
    return get_task(task_id).generate_instances(seed, count)


register_task(ObpTask())
register_task(TspTask())
register_task(SrTask())

__all__ = [
    "ObpInstance",
    "ObpTask",
    "SrDataset",
    "SrTask",
    "Task",
    "TspInstance",
    "TspTask",
    "complexity_objective",
    "generate_instances",
    "get_task",
    "list_tasks",
    "register_task",
    "sr_rmse",
]
