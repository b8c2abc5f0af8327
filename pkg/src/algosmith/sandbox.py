"""Time-bounded evaluation of one candidate against one task.

Two paths share the EvalOutcome classification:

* DSL candidates run in-process. In-process code cannot be killed, so the
  wall bound is enforced cooperatively: a deadline check between instances
  plus a node-visit budget (with its own clock check) inside expression
  evaluation.
* Host-language candidates run in a worker subprocess speaking a one-line
  JSON protocol on stdin/stdout. At the deadline the whole process group is
  killed, so even a hard infinite loop cannot wedge the engine.

Every candidate, however adversarial, maps to exactly one outcome status.
"""

from __future__ import annotations

import json
import math
import os
import signal
import subprocess
import sys
import time
from dataclasses import dataclass
from typing import Optional, Sequence

from .codekit import NodeBudget, parse_dsl_function
from .core import EvalError, EvalOutcome, EvalStatus, FitnessVector, ParseError
from .tasks import Task

DEFAULT_NODE_BUDGET = 10_000_000
KILL_GRACE_S = 2.0
STDERR_CAP = 64 * 1024


@dataclass(frozen=True)
class WorkerRequest:
    """One evaluation job; instances are regenerated worker-side from the seed."""

    task_id: str
    candidate_code: str
    instance_seed: int
    instance_count: int

    def to_json_line(self) -> str:
        return json.dumps(
            {
                "task_id": self.task_id,
                "candidate_code": self.candidate_code,
                "instance_seed": self.instance_seed,
                "instance_count": self.instance_count,
            }
        )


@dataclass(frozen=True)
class WorkerResponse:
    status: str  # "ok" | "parse_error" | "error"
    scores: tuple[float, ...]
    detail: str


class WorkerTimeout(Exception):
    """The worker missed the deadline and was killed."""


class WorkerCrash(Exception):
    """The worker exited nonzero or could not be spawned."""

    def __init__(self, message: str, stderr: str = "") -> None:
        super().__init__(message)
        self.stderr = stderr


class MalformedResponse(Exception):
    """The worker's stdout was not one well-formed response line."""


def _kill_process_group(proc: subprocess.Popen) -> None:
    try:
        os.killpg(os.getpgid(proc.pid), signal.SIGKILL)
    except (ProcessLookupError, PermissionError):
        proc.kill()


def supervise(
    worker_command: Sequence[str], request: WorkerRequest, deadline_s: float
) -> WorkerResponse:
    """Run one request through a worker process with a hard deadline.

    Raises WorkerTimeout / WorkerCrash / MalformedResponse; any other result
    is a well-formed WorkerResponse.
    """
    try:
        proc = subprocess.Popen(
            list(worker_command),
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            stderr=subprocess.PIPE,
            text=True,
            start_new_session=True,  # its own process group, killable as a unit
        )
    except OSError as exc:
        raise WorkerCrash(f"failed to spawn worker: {exc}") from exc
    try:
        stdout, stderr = proc.communicate(
            input=request.to_json_line() + "\n", timeout=deadline_s
        )
    except subprocess.TimeoutExpired:
        _kill_process_group(proc)
        proc.communicate()
        raise WorkerTimeout(f"worker killed after {deadline_s}s") from None
    stderr = (stderr or "")[:STDERR_CAP]
    if proc.returncode != 0:
        raise WorkerCrash(f"worker exited with code {proc.returncode}", stderr=stderr)
    lines = [line for line in (stdout or "").splitlines() if line.strip()]
    if len(lines) != 1:
        raise MalformedResponse(f"expected one response line, got {len(lines)}")
    try:
        doc = json.loads(lines[0])
        status = str(doc["status"])
        scores = tuple(float(v) for v in doc.get("scores") or ())
        detail = str(doc.get("detail", ""))
    except (ValueError, KeyError, TypeError) as exc:
        raise MalformedResponse(f"malformed response: {exc}") from exc
    if status == "ok" and any(not math.isfinite(v) for v in scores):
        raise MalformedResponse("ok response carries non-finite scores")
    return WorkerResponse(status=status, scores=scores, detail=detail)


def default_worker_command() -> list[str]:
    return [sys.executable, "-u", "-m", "algosmith.worker"]


def evaluate(
    candidate: str,
    task: Task,
    timeout_s: float,
    mode: Optional[str] = None,
    instance_seed: Optional[int] = None,
    instance_count: Optional[int] = None,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> EvalOutcome:
    """Evaluate candidate code against a task, classifying every failure."""
    if timeout_s <= 0:
        raise ValueError("timeout_s must be positive")
    mode = mode or task.eval_mode
    seed = task.instance_seed if instance_seed is None else instance_seed
    count = task.instance_count if instance_count is None else instance_count
    start = time.monotonic()
    if mode == "dsl":
        return _evaluate_dsl(candidate, task, timeout_s, seed, count, node_budget, start)
    if mode == "external":
        return _evaluate_external(candidate, task, timeout_s, seed, count, start)
    raise ValueError(f"unknown evaluation mode {mode!r}")


def _outcome(
    status: EvalStatus, start: float, diagnostics: str = "", fitness=None
) -> EvalOutcome:
    return EvalOutcome(
        status=status,
        fitness=fitness,
        wall_time_s=time.monotonic() - start,
        diagnostics=diagnostics[:2000],
    )


def _evaluate_dsl(
    candidate: str,
    task: Task,
    timeout_s: float,
    seed: int,
    count: int,
    node_budget: int,
    start: float,
) -> EvalOutcome:
    try:
        fn = parse_dsl_function(candidate)
    except ParseError as exc:
        return _outcome(EvalStatus.PARSE_ERROR, start, str(exc))
    arity = len(task.template.params)
    if len(fn.params) != arity:
        return _outcome(
            EvalStatus.PARSE_ERROR,
            start,
            f"candidate takes {len(fn.params)} parameters, task expects {arity}",
        )
    deadline = start + timeout_s
    budget = NodeBudget(node_budget, deadline=deadline)

    def adapter(*args: float) -> float:
        return fn(dict(zip(fn.params, args)), budget)

    scores: list[float] = []
    for instance in task.instances(seed, count):
        if time.monotonic() > deadline:
            return _outcome(EvalStatus.TIMEOUT, start, "deadline between instances")
        try:
            scores.append(float(task.score_instance(adapter, instance)))
        except EvalError as exc:
            return _outcome(EvalStatus.TIMEOUT, start, str(exc))
        except Exception as exc:  # candidate-induced failure
            return _outcome(
                EvalStatus.RUNTIME_ERROR, start, f"{type(exc).__name__}: {exc}"
            )
    return _finish(task, scores, start)


def _evaluate_external(
    candidate: str, task: Task, timeout_s: float, seed: int, count: int, start: float
) -> EvalOutcome:
    request = WorkerRequest(
        task_id=task.id,
        candidate_code=candidate,
        instance_seed=seed,
        instance_count=count,
    )
    try:
        response = supervise(default_worker_command(), request, deadline_s=timeout_s)
    except WorkerTimeout as exc:
        return _outcome(EvalStatus.TIMEOUT, start, str(exc))
    except WorkerCrash as exc:
        return _outcome(EvalStatus.RUNTIME_ERROR, start, f"{exc}\n{exc.stderr}")
    except MalformedResponse as exc:
        return _outcome(EvalStatus.RUNTIME_ERROR, start, str(exc))
    if response.status == "parse_error":
        return _outcome(EvalStatus.PARSE_ERROR, start, response.detail)
    if response.status != "ok":
        return _outcome(EvalStatus.RUNTIME_ERROR, start, response.detail)
    return _finish(task, list(response.scores), start)


def _finish(task: Task, scores: list[float], start: float) -> EvalOutcome:
    try:
        value = float(task.aggregate(scores))
    except Exception as exc:
        return _outcome(EvalStatus.RUNTIME_ERROR, start, f"aggregation failed: {exc}")
    if not math.isfinite(value):
        return _outcome(EvalStatus.RUNTIME_ERROR, start, "non-finite task fitness")
    return _outcome(EvalStatus.VALID, start, fitness=FitnessVector([value]))
