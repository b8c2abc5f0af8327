"""Run lifecycle management: background execution, polling, stop signals.

The manager hosts independent run coordinators on worker threads; handles
are read-consistent snapshots. Nothing here ever waits on the sampler, so
status and event queries stay fast however slow the LLM is.
"""

from __future__ import annotations

import threading
import time
import uuid
from enum import Enum
from pathlib import Path
from typing import Any, Optional

from ..core import EventKind, RunEvent
from ..profiler import BaseProfiler, RunSummary, pareto_admit
from ..search import MULTI_OBJECTIVE_METHODS
from ..search.coordinator import run as run_search
from .config import RunConfig


class RunState(str, Enum):
    PENDING = "pending"
    RUNNING = "running"
    STOPPED = "stopped"
    FINISHED = "finished"
    FAILED = "failed"

    @property
    def terminal(self) -> bool:
        return self in (RunState.STOPPED, RunState.FINISHED, RunState.FAILED)


class CapacityError(RuntimeError):
    """The concurrent-run cap is already reached."""


class UnknownRun(KeyError):
    """No run with that id."""


def execute_run(
    config: RunConfig,
    log_dir: Optional[str],
    stop: Optional[threading.Event] = None,
    event_hook=None,
) -> RunSummary:
    """Build components from a config and run to completion (shared by the
    CLI and the manager, so both produce identical logs)."""
    sampler = config.build_sampler()
    profiler: Optional[BaseProfiler] = None
    if log_dir is not None:
        profiler = BaseProfiler(log_dir)
        profiler.write_config(config.raw)
    try:
        return run_search(
            config.method,
            config.task(),
            sampler,
            config.budget,
            profiler,
            num_samplers=config.num_samplers,
            num_evaluators=config.num_evaluators,
            stop=stop,
            event_hook=event_hook,
            instance_seed=config.overrides.instance_seed,
            instance_count=config.overrides.instance_count,
            eval_mode=config.overrides.eval_mode,
        )
    finally:
        close = getattr(sampler, "close", None)
        if close is not None:
            close()


class ManagedRun:
    """One run's live state; all mutation happens under the lock."""

    def __init__(self, run_id: str, config: RunConfig, log_dir: Optional[str]) -> None:
        self.run_id = run_id
        self.config = config
        self.log_dir = log_dir
        self.created_ts = time.time()
        self.stop_signal = threading.Event()
        self.lock = threading.Lock()
        self.state = RunState.PENDING
        self.events: list[RunEvent] = []
        self.samples_used = 0
        self.best: Optional[dict] = None
        self.archive: list[dict] = []
        self.summary: Optional[RunSummary] = None
        self.error: Optional[str] = None
        self.thread: Optional[threading.Thread] = None
        self.multi_objective = config.method.method in MULTI_OBJECTIVE_METHODS

    def on_event(self, event: RunEvent) -> None:
        with self.lock:
            self.events.append(event)
            if event.kind is EventKind.SAMPLE_DRAWN:
                self.samples_used += 1
            elif event.kind is EventKind.NEW_BEST:
                entry = {
                    "fitness": event.payload.get("fitness"),
                    "code": event.payload.get("code"),
                    "candidate_id": event.payload.get("candidate_id"),
                }
                self.best = entry
                if self.multi_objective:
                    pareto_admit(self.archive, dict(entry))

    def snapshot(self) -> dict[str, Any]:
        with self.lock:
            return {
                "run_id": self.run_id,
                "state": self.state.value,
                "task": self.config.task_id,
                "method": self.config.method.method,
                "samples_used": self.samples_used,
                "max_samples": self.config.budget.max_samples,
                "best": dict(self.best) if self.best else None,
                "log_dir": self.log_dir,
                "error": self.error,
                "created_ts": self.created_ts,
            }

    def events_since(self, since_seq: int) -> list[RunEvent]:
        with self.lock:
            return [e for e in self.events if e.seq > since_seq]

    def best_view(self) -> dict[str, Any]:
        with self.lock:
            if self.multi_objective:
                return {"pareto": [dict(e) for e in self.archive]}
            return {"best": dict(self.best) if self.best else None}


class RunManager:
    """Owns every run; enforces the concurrent-run cap."""

    def __init__(self, max_concurrent: int = 4, base_log_dir: str | Path = "logs") -> None:
        self.max_concurrent = max_concurrent
        self.base_log_dir = Path(base_log_dir)
        self._runs: dict[str, ManagedRun] = {}
        self._lock = threading.Lock()

    def _active_count(self) -> int:
        return sum(1 for r in self._runs.values() if not r.state.terminal)

    def start(self, config: RunConfig) -> dict[str, Any]:
        run_id = uuid.uuid4().hex[:12]
        log_dir = config.log_dir or str(self.base_log_dir / run_id)
        managed = ManagedRun(run_id, config, log_dir)
        with self._lock:
            if self._active_count() >= self.max_concurrent:
                raise CapacityError(
                    f"concurrent-run cap ({self.max_concurrent}) reached"
                )
            self._runs[run_id] = managed
        thread = threading.Thread(
            target=self._drive, args=(managed,), name=f"run-{run_id}", daemon=True
        )
        managed.thread = thread
        thread.start()
        return managed.snapshot()

    def _drive(self, managed: ManagedRun) -> None:
        with managed.lock:
            managed.state = RunState.RUNNING
        try:
            summary = execute_run(
                managed.config,
                managed.log_dir,
                stop=managed.stop_signal,
                event_hook=managed.on_event,
            )
        except Exception as exc:  # any escape is a failed run, never a crash
            with managed.lock:
                managed.state = RunState.FAILED
                managed.error = f"{type(exc).__name__}: {exc}"
            return
        with managed.lock:
            managed.summary = summary
            if summary.reason == "stopped":
                managed.state = RunState.STOPPED
            elif summary.reason == "error":
                managed.state = RunState.FAILED
                managed.error = "sampler unavailable"
            else:
                managed.state = RunState.FINISHED

    def get(self, run_id: str) -> ManagedRun:
        try:
            return self._runs[run_id]
        except KeyError:
            raise UnknownRun(run_id) from None

    def status(self, run_id: str) -> dict[str, Any]:
        return self.get(run_id).snapshot()

    def stop(self, run_id: str) -> dict[str, Any]:
        managed = self.get(run_id)
        if not managed.state.terminal:
            managed.stop_signal.set()
        return managed.snapshot()

    def events(self, run_id: str, since_seq: int = -1) -> list[RunEvent]:
        return self.get(run_id).events_since(since_seq)

    def best(self, run_id: str) -> dict[str, Any]:
        return self.get(run_id).best_view()

    def list_runs(self) -> list[dict[str, Any]]:
        with self._lock:
            runs = list(self._runs.values())
        return [r.snapshot() for r in sorted(runs, key=lambda r: r.created_ts)]
