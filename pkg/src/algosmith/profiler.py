"""Run logging and reporting.

A run directory holds four artifacts:

* ``config.json``   - config snapshot, written at start.
* ``events.jsonl``  - one JSON event per line, seq-gapless, append-only.
* ``summary.json``  - written when the run ends; exists iff RunEnd logged.
* ``convergence.csv`` - best-so-far series, one row per sample drawn.

The events file is the complete record: summaries and convergence series
recomputed from it must equal what the coordinator held in memory. Golden
tests compare canonicalized text, which zeroes wall-clock fields only.
"""

from __future__ import annotations

import csv
import json
import os
import statistics
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .core import (
    ContractViolation,
    EventKind,
    FitnessVector,
    RunEvent,
    dominates,
)


class LogCorrupt(ValueError):
    """An events file line could not be parsed."""


def pareto_admit(archive: list[dict], entry: dict) -> bool:
    """Admit an entry (``{"fitness": [...], ...}``) into a non-dominated archive.

    Entries dominated by, or fitness-equal to, an existing member are
    rejected; admission evicts every member the newcomer dominates. Both the
    coordinator and log replay use this, so their archives match exactly.
    """
    fv = FitnessVector(entry["fitness"])
    for member in archive:
        if member["fitness"] == entry["fitness"]:
            return False
        if dominates(FitnessVector(member["fitness"]), fv):
            return False
    archive[:] = [
        m for m in archive if not dominates(fv, FitnessVector(m["fitness"]))
    ]
    archive.append(entry)
    return True


@dataclass
class RunSummary:
    """End-of-run digest; serializes to summary.json."""

    method: str
    task: str
    reason: str  # budget | generations | stopped | error
    samples_used: int
    wall_time_s: float
    best_code: Optional[str] = None
    best_fitness: Optional[list[float]] = None
    pareto: list[dict] = field(default_factory=list)  # multi-objective archive
    status_histogram: dict[str, int] = field(default_factory=dict)
    state_snapshot: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "method": self.method,
            "task": self.task,
            "reason": self.reason,
            "samples_used": self.samples_used,
            "wall_time_s": self.wall_time_s,
            "best_code": self.best_code,
            "best_fitness": self.best_fitness,
            "pareto": self.pareto,
            "status_histogram": self.status_histogram,
            "state_snapshot": self.state_snapshot,
        }


class RunLog:
    """Paths and read access for one run directory."""

    def __init__(self, path: str | Path) -> None:
        self.path = Path(path)
        self.events_path = self.path / "events.jsonl"
        self.summary_path = self.path / "summary.json"
        self.config_path = self.path / "config.json"
        self.convergence_path = self.path / "convergence.csv"

    def read_events(self) -> list[RunEvent]:
        events: list[RunEvent] = []
        with open(self.events_path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    events.append(RunEvent.from_json_line(line))
                except (ValueError, KeyError) as exc:
                    raise LogCorrupt(f"corrupt event at line {lineno}: {exc}") from exc
        return events

    def read_summary(self) -> dict:
        with open(self.summary_path, encoding="utf-8") as fh:
            return json.load(fh)


class BaseProfiler:
    """Single-writer event recorder for one run.

    Events must arrive in seq order starting at 0 with no gaps, and nothing
    may follow RunEnd. Each event is flushed and fsynced before record()
    returns so the log survives the coordinator.
    """

    def __init__(self, log_dir: str | Path) -> None:
        self.log = RunLog(log_dir)
        self.log.path.mkdir(parents=True, exist_ok=True)
        self._fh = open(self.log.events_path, "w", encoding="utf-8")
        self._next_seq = 0
        self._ended = False

    def write_config(self, config: dict) -> None:
        with open(self.log.config_path, "w", encoding="utf-8") as fh:
            json.dump(config, fh, indent=2, sort_keys=True)
            fh.write("\n")

    def record(self, event: RunEvent) -> None:
        if self._ended:
            raise ContractViolation("record after RunEnd")
        if event.seq != self._next_seq:
            raise ContractViolation(
                f"out-of-order event: expected seq {self._next_seq}, got {event.seq}"
            )
        self._fh.write(event.to_json_line() + "\n")
        self._fh.flush()
        os.fsync(self._fh.fileno())
        self._next_seq += 1
        if event.kind is EventKind.RUN_END:
            self._ended = True

    def write_summary(self, summary: RunSummary) -> None:
        with open(self.log.summary_path, "w", encoding="utf-8") as fh:
            json.dump(summary.to_json_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")
        rows = convergence(self.log)
        write_convergence_csv(rows, self.log.convergence_path)

    def close(self) -> None:
        if not self._fh.closed:
            self._fh.close()


def canonical_events_text(events: Iterable[RunEvent]) -> str:
    """Render events with wall-clock fields zeroed, for golden comparison."""
    lines = []
    for event in events:
        payload = dict(event.payload)
        if "wall_time_s" in payload:
            payload["wall_time_s"] = 0.0
        lines.append(RunEvent(seq=event.seq, ts=0.0, kind=event.kind, payload=payload).to_json_line())
    return "\n".join(lines) + "\n"


def _replay(events: Sequence[RunEvent]) -> dict:
    """Walk the event list once, accumulating everything reports need."""
    state: dict = {
        "samples": [],  # sample_index in draw order
        "fitness_by_sample": {},  # sample_index -> list[float] | None
        "objectives": None,
        "seed_fitness": [],
        "new_best": [],  # (fitness values, code, candidate_id)
        "histogram": {},
        "run_end": None,
        "first_ts": None,
        "last_ts": None,
    }
    for event in events:
        if state["first_ts"] is None:
            state["first_ts"] = event.ts
        state["last_ts"] = event.ts
        if event.kind is EventKind.SAMPLE_DRAWN:
            state["samples"].append(int(event.payload["sample_index"]))
        elif event.kind is EventKind.EVAL_FINISHED:
            idx = int(event.payload["sample_index"])
            fitness = event.payload.get("fitness")
            if fitness is not None:
                fitness = [float(v) for v in fitness]
                state["objectives"] = len(fitness)
            if idx >= 0:
                status = str(event.payload["status"])
                state["histogram"][status] = state["histogram"].get(status, 0) + 1
                state["fitness_by_sample"][idx] = fitness
            elif fitness is not None:
                state["seed_fitness"].append(fitness)
        elif event.kind is EventKind.NEW_BEST:
            state["new_best"].append(
                (
                    [float(v) for v in event.payload["fitness"]],
                    event.payload.get("code", ""),
                    event.payload.get("candidate_id"),
                )
            )
        elif event.kind is EventKind.RUN_END:
            state["run_end"] = event.payload
    return state


def convergence(log: RunLog) -> list[dict]:
    """Best-so-far series, one row per sample drawn.

    Scalar runs produce {sample_index, best_fitness} with None while no
    valid candidate exists yet. Multi-objective runs export the
    per-objective running minimum and the archive size instead.
    """
    state = _replay(log.read_events())
    m = state["objectives"] or 1
    rows: list[dict] = []
    if m == 1:
        best: Optional[float] = None
        for seed in state["seed_fitness"]:
            if best is None or seed[0] < best:
                best = seed[0]
        for idx in state["samples"]:
            fitness = state["fitness_by_sample"].get(idx)
            if fitness is not None and (best is None or fitness[0] < best):
                best = fitness[0]
            rows.append({"sample_index": idx, "best_fitness": best})
        return rows
    best_vec: list[Optional[float]] = [None] * m
    archive: list[dict] = []

    def admit(values: list[float]) -> None:
        for k in range(m):
            if best_vec[k] is None or values[k] < best_vec[k]:
                best_vec[k] = values[k]
        pareto_admit(archive, {"fitness": values})

    for seed in state["seed_fitness"]:
        admit(seed)
    for idx in state["samples"]:
        fitness = state["fitness_by_sample"].get(idx)
        if fitness is not None:
            admit(fitness)
        row = {"sample_index": idx, "archive_size": len(archive)}
        for k in range(m):
            row[f"best_obj_{k}"] = best_vec[k]
        rows.append(row)
    return rows


def write_convergence_csv(rows: list[dict], path: str | Path) -> None:
    headers = list(rows[0].keys()) if rows else ["sample_index", "best_fitness"]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(headers)
        for row in rows:
            writer.writerow(["" if row[h] is None else row[h] for h in headers])


def aggregate_convergence(logs: Sequence[RunLog]) -> list[dict]:
    """Per-sample-index mean and sample standard deviation across runs."""
    series = [convergence(log) for log in logs]
    if any("best_fitness" not in rows[0] for rows in series if rows):
        raise ContractViolation("aggregation requires scalar (single-objective) runs")
    length = min(len(rows) for rows in series)
    out: list[dict] = []
    for i in range(length):
        values = [rows[i]["best_fitness"] for rows in series]
        defined = [v for v in values if v is not None]
        row: dict = {"sample_index": i, "n": len(series)}
        if len(defined) == len(values):
            row["mean"] = statistics.fmean(defined)
            row["std"] = statistics.stdev(defined) if len(defined) > 1 else 0.0
        else:
            row["mean"] = None
            row["std"] = None
        out.append(row)
    return out


def summarize(log: RunLog) -> RunSummary:
    """Rebuild the run summary purely from the events file."""
    events = log.read_events()
    state = _replay(events)
    run_end = state["run_end"]
    if run_end is None:
        raise ContractViolation("run incomplete: no RunEnd event logged")
    m = state["objectives"] or 1
    best_code: Optional[str] = None
    best_fitness: Optional[list[float]] = None
    pareto: list[dict] = []
    if m == 1:
        if state["new_best"]:
            fitness, code, _ = state["new_best"][-1]
            best_code, best_fitness = code, fitness
    else:
        for fitness, code, cid in state["new_best"]:
            pareto_admit(
                pareto, {"fitness": fitness, "code": code, "candidate_id": cid}
            )
        if pareto:
            best_code = pareto[0]["code"]
            best_fitness = pareto[0]["fitness"]
    return RunSummary(
        method=str(run_end.get("method", "")),
        task=str(run_end.get("task", "")),
        reason=str(run_end.get("reason", "")),
        samples_used=len(state["samples"]),
        wall_time_s=float(run_end.get("wall_time_s", 0.0)),
        best_code=best_code,
        best_fitness=best_fitness,
        pareto=pareto,
        status_histogram=dict(state["histogram"]),
        state_snapshot=dict(run_end.get("state_snapshot") or {}),
    )
