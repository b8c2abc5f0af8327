"""The run loop: propose, draw, extract, evaluate, update, log.

A single coordinator owns the event sequence, the budget, and best-so-far
state. Worker pools (sampling, evaluation) only ever parallelize a batch;
results are consumed in submission order, so event logs are deterministic
whenever the sampler is.
"""

from __future__ import annotations

import threading
import time
from concurrent.futures import Future, ThreadPoolExecutor
from typing import Callable, Optional, Sequence, Union

from .. import sandbox
from ..codekit import extract_candidate, extract_idea, normalized_hash
from ..core import (
    Budget,
    Candidate,
    EvalOutcome,
    EvalStatus,
    EventKind,
    FitnessVector,
    ParseError,
    RunEvent,
    SampleError,
    budget_remaining,
)
from ..llm import Sampler
from ..profiler import BaseProfiler, RunSummary, pareto_admit
from ..tasks import Task, complexity_objective
from .config import MethodConfig
from .strategies import Proposal, build_strategy


def run(
    method: MethodConfig,
    task: Task,
    sampler: Sampler,
    budget: Budget,
    profiler: Optional[BaseProfiler] = None,
    *,
    num_samplers: int = 1,
    num_evaluators: int = 1,
    stop: Optional[threading.Event] = None,
    event_hook: Optional[Callable[[RunEvent], None]] = None,
    instance_seed: Optional[int] = None,
    instance_count: Optional[int] = None,
    eval_mode: Optional[str] = None,
) -> RunSummary:
    """Execute one search run to completion and return its summary."""
    coordinator = _Coordinator(
        method=method,
        task=task,
        sampler=sampler,
        budget=budget,
        profiler=profiler,
        num_samplers=num_samplers,
        num_evaluators=num_evaluators,
        stop=stop or threading.Event(),
        event_hook=event_hook,
        instance_seed=instance_seed,
        instance_count=instance_count,
        eval_mode=eval_mode,
    )
    return coordinator.run()


class _Coordinator:
    def __init__(
        self,
        method: MethodConfig,
        task: Task,
        sampler: Sampler,
        budget: Budget,
        profiler: Optional[BaseProfiler],
        num_samplers: int,
        num_evaluators: int,
        stop: threading.Event,
        event_hook: Optional[Callable[[RunEvent], None]],
        instance_seed: Optional[int],
        instance_count: Optional[int],
        eval_mode: Optional[str],
    ) -> None:
        self.method = method
        self.task = task
        self.sampler = sampler
        self.budget = budget
        self.profiler = profiler
        self.num_samplers = max(1, num_samplers)
        self.num_evaluators = max(1, num_evaluators)
        self.stop = stop
        self.event_hook = event_hook
        self.instance_seed = instance_seed
        self.instance_count = instance_count
        self.eval_mode = eval_mode

        self.strategy = build_strategy(method, task, budget)
        self.seq = 0
        self.samples_used = 0
        self.next_candidate_id = 0
        self.best: Optional[Candidate] = None
        self.archive: list[dict] = []  # multi-objective non-dominated set
        self.histogram: dict[str, int] = {}
        self.started = time.monotonic()

    # ---------------- events ----------------

    def _emit(self, kind: EventKind, payload: dict) -> None:
        event = RunEvent(seq=self.seq, ts=time.time(), kind=kind, payload=payload)
        self.seq += 1
        if self.profiler is not None:
            try:
                self.profiler.record(event)
            except OSError:
                if kind is not EventKind.ERROR:
                    try:
                        self.profiler.record(
                            RunEvent(
                                seq=self.seq,
                                ts=time.time(),
                                kind=EventKind.ERROR,
                                payload={"message": "event log write failed"},
                            )
                        )
                    except OSError:
                        pass
                raise
        if self.event_hook is not None:
            self.event_hook(event)

    # ---------------- candidate pipeline ----------------

    def _new_id(self) -> int:
        cid = self.next_candidate_id
        self.next_candidate_id += 1
        return cid

    def _evaluate_code(self, code: str) -> EvalOutcome:
        outcome = sandbox.evaluate(
            code,
            self.task,
            self.budget.eval_timeout_s,
            mode=self.eval_mode,
            instance_seed=self.instance_seed,
            instance_count=self.instance_count,
        )
        if outcome.is_valid and self.method.multi_objective:
            full = FitnessVector([outcome.fitness.scalar, complexity_objective(code)])
            outcome = EvalOutcome(
                status=EvalStatus.VALID,
                fitness=full,
                wall_time_s=outcome.wall_time_s,
                diagnostics=outcome.diagnostics,
            )
        return outcome

    def _build_candidate(
        self,
        proposal: Proposal,
        drawn: Union[str, SampleError],
        sample_index: int,
        outcome: Optional[EvalOutcome],
        code: str,
        idea: Optional[str],
    ) -> Candidate:
        if isinstance(drawn, SampleError):
            outcome = EvalOutcome(
                status=EvalStatus.SAMPLE_ERROR, diagnostics=str(drawn)
            )
            code, idea = "", None
        assert outcome is not None
        return Candidate(
            id=self._new_id(),
            code=code,
            outcome=outcome,
            idea=idea,
            parent_ids=proposal.parent_ids,
            sample_index=sample_index,
            normalized_hash=normalized_hash(code) if code else "",
        )

    def _prepare(self, drawn: Union[str, SampleError]) -> tuple[Optional[EvalOutcome], str, Optional[str]]:
        """Extract and evaluate one raw response (run inside the eval pool)."""
        if isinstance(drawn, SampleError):
            return None, "", None
        try:
            code = extract_candidate(drawn, self.task.template)
        except ParseError as exc:
            return (
                EvalOutcome(status=EvalStatus.PARSE_ERROR, diagnostics=str(exc)),
                "",
                None,
            )
        return self._evaluate_code(code), code, extract_idea(drawn)

    # ---------------- best tracking ----------------

    def _consider_best(self, candidate: Candidate) -> None:
        if not candidate.is_valid:
            return
        if self.method.multi_objective:
            entry = {
                "fitness": list(candidate.fitness.values),
                "code": candidate.code,
                "candidate_id": candidate.id,
            }
            if pareto_admit(self.archive, entry):
                self._emit(
                    EventKind.NEW_BEST,
                    {
                        "sample_index": candidate.sample_index,
                        "candidate_id": candidate.id,
                        "fitness": list(candidate.fitness.values),
                        "code": candidate.code,
                        "archive_size": len(self.archive),
                    },
                )
            return
        if (
            self.best is None
            or candidate.fitness.scalar < self.best.fitness.scalar
        ):
            self.best = candidate
            self._emit(
                EventKind.NEW_BEST,
                {
                    "sample_index": candidate.sample_index,
                    "candidate_id": candidate.id,
                    "fitness": list(candidate.fitness.values),
                    "code": candidate.code,
                },
            )

    # ---------------- seeding ----------------

    def _seed_from_template(self) -> None:
        code = self.task.template.function_source()
        outcome = self._evaluate_code(code)
        candidate = Candidate(
            id=self._new_id(),
            code=code,
            outcome=outcome,
            idea="The template's example algorithm.",
            parent_ids=(),
            sample_index=-1,
            normalized_hash=normalized_hash(code),
        )
        self._emit(
            EventKind.EVAL_FINISHED,
            {
                "sample_index": -1,
                "candidate_id": candidate.id,
                "status": outcome.status.value,
                "fitness": list(outcome.fitness.values) if outcome.fitness else None,
                "wall_time_s": outcome.wall_time_s,
                "diagnostics": outcome.diagnostics,
            },
        )
        if candidate.is_valid:
            self.strategy.seed(candidate)
            self._consider_best(candidate)

    # ---------------- main loop ----------------

    def run(self) -> RunSummary:
        if self.method.seed_from_template:
            self._seed_from_template()

        reason = "budget"
        generation = 0
        while True:
            if self.stop.is_set():
                reason = "stopped"
                break
            remaining = budget_remaining(self.budget, self.samples_used)
            if remaining == 0:
                reason = "budget"
                break
            if (
                self.budget.max_generations is not None
                and generation >= self.budget.max_generations
            ):
                reason = "generations"
                break

            proposals = self.strategy.propose()[:remaining]
            drawn = self.sampler.draw_batch(
                [p.prompt for p in proposals], parallelism=self.num_samplers
            )
            processed, stopped = self._process_generation(proposals, drawn, generation)
            self.strategy.observe(processed)
            self._emit(
                EventKind.GENERATION_END,
                {
                    "generation": generation,
                    "samples_used": self.samples_used,
                    "best_fitness": self._best_fitness_payload(),
                    "archive_size": len(self.archive) if self.method.multi_objective else None,
                },
            )
            generation += 1
            if stopped:
                reason = "stopped"
                break
            if processed and all(
                c.outcome.status is EvalStatus.SAMPLE_ERROR for c in processed
            ):
                self._emit(
                    EventKind.ERROR,
                    {
                        "message": "sampler unavailable: every draw in the generation failed",
                        "generation": generation - 1,
                    },
                )
                reason = "error"
                break

        return self._finish(reason)

    def _process_generation(
        self,
        proposals: Sequence[Proposal],
        drawn: Sequence[Union[str, SampleError]],
        generation: int,
    ) -> tuple[list[Candidate], bool]:
        prepared: list[Union[Future, tuple]] = []
        pool: Optional[ThreadPoolExecutor] = None
        if self.num_evaluators > 1 and len(drawn) > 1:
            pool = ThreadPoolExecutor(max_workers=self.num_evaluators)
            prepared = [pool.submit(self._prepare, text) for text in drawn]
        else:
            prepared = list(drawn)

        processed: list[Candidate] = []
        stopped = False
        try:
            for proposal, raw, item in zip(proposals, drawn, prepared):
                if self.stop.is_set():
                    stopped = True
                    break
                sample_index = self.samples_used
                self.samples_used += 1
                if isinstance(item, Future):
                    outcome, code, idea = item.result()
                else:
                    outcome, code, idea = self._prepare(item)
                candidate = self._build_candidate(
                    proposal, raw, sample_index, outcome, code, idea
                )
                self._emit(
                    EventKind.SAMPLE_DRAWN,
                    {
                        "sample_index": sample_index,
                        "candidate_id": candidate.id,
                        "generation": generation,
                        "operator": proposal.operator,
                        "parent_ids": list(proposal.parent_ids),
                        # full prompt text: reruns must be able to reproduce
                        # the exact request (prompts never contain secrets)
                        "prompt": {
                            "system": proposal.prompt.system,
                            "user": proposal.prompt.user,
                            "metadata": proposal.prompt.metadata,
                        },
                        "response_chars": 0 if isinstance(raw, SampleError) else len(raw),
                    },
                )
                status = candidate.outcome.status
                self.histogram[status.value] = self.histogram.get(status.value, 0) + 1
                self._emit(
                    EventKind.EVAL_FINISHED,
                    {
                        "sample_index": sample_index,
                        "candidate_id": candidate.id,
                        "status": status.value,
                        "fitness": (
                            list(candidate.fitness.values) if candidate.fitness else None
                        ),
                        "wall_time_s": candidate.outcome.wall_time_s,
                        "diagnostics": candidate.outcome.diagnostics,
                    },
                )
                self._consider_best(candidate)
                processed.append(candidate)
        finally:
            if pool is not None:
                pool.shutdown(wait=False, cancel_futures=True)
        return processed, stopped

    # ---------------- summary ----------------

    def _best_fitness_payload(self) -> Optional[list[float]]:
        if self.best is not None:
            return list(self.best.fitness.values)
        return None

    def _finish(self, reason: str) -> RunSummary:
        wall = time.monotonic() - self.started
        self._emit(
            EventKind.RUN_END,
            {
                "reason": reason,
                "method": self.method.method,
                "task": self.task.id,
                "samples_used": self.samples_used,
                "wall_time_s": wall,
                "state_snapshot": self.strategy.state_snapshot(),
            },
        )
        if self.method.multi_objective:
            best_code = self.archive[0]["code"] if self.archive else None
            best_fitness = self.archive[0]["fitness"] if self.archive else None
        else:
            best_code = self.best.code if self.best else None
            best_fitness = (
                list(self.best.fitness.values) if self.best else None
            )
        summary = RunSummary(
            method=self.method.method,
            task=self.task.id,
            reason=reason,
            samples_used=self.samples_used,
            wall_time_s=wall,
            best_code=best_code,
            best_fitness=best_fitness,
            pareto=[dict(entry) for entry in self.archive],
            status_histogram=dict(self.histogram),
            state_snapshot=self.strategy.state_snapshot(),
        )
        if self.profiler is not None:
            self.profiler.write_summary(summary)
            self.profiler.close()
        return summary
