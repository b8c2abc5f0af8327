from __future__ import annotations

import json

import pytest

from algosmith.core import ContractViolation, EventKind, RunEvent
from algosmith.profiler import (
    BaseProfiler,
    LogCorrupt,
    aggregate_convergence,
    canonical_events_text,
    convergence,
    pareto_admit,
    summarize,
)


def ev(seq, kind, **payload):
    return RunEvent(seq=seq, ts=100.0 + seq, kind=kind, payload=payload)


def sample_events(fitnesses, reason="budget"):
    """A minimal well-formed run: draw/eval pairs then RunEnd."""
    events = []
    seq = 0
    best = None
    for i, fitness in enumerate(fitnesses):
        events.append(ev(seq, EventKind.SAMPLE_DRAWN, sample_index=i, candidate_id=i))
        seq += 1
        payload = {
            "sample_index": i,
            "candidate_id": i,
            "status": "valid" if fitness is not None else "runtime_error",
            "fitness": [fitness] if fitness is not None else None,
            "wall_time_s": 0.25,
            "diagnostics": "",
        }
        events.append(ev(seq, EventKind.EVAL_FINISHED, **payload))
        seq += 1
        if fitness is not None and (best is None or fitness < best):
            best = fitness
            events.append(
                ev(
                    seq,
                    EventKind.NEW_BEST,
                    sample_index=i,
                    candidate_id=i,
                    fitness=[fitness],
                    code=f"code-{i}",
                )
            )
            seq += 1
    events.append(
        ev(
            seq,
            EventKind.RUN_END,
            reason=reason,
            method="random_sampling",
            task="sr_growth",
            samples_used=len(fitnesses),
            wall_time_s=1.5,
            state_snapshot={},
        )
    )
    return events


def write_run(tmp_path, fitnesses, name="run", reason="budget"):
    profiler = BaseProfiler(tmp_path / name)
    for event in sample_events(fitnesses, reason):
        profiler.record(event)
    profiler.close()
    return profiler.log


class TestRecord:
    def test_gapless_seq_enforced(self, tmp_path):
        profiler = BaseProfiler(tmp_path)
        profiler.record(ev(0, EventKind.SAMPLE_DRAWN, sample_index=0))
        with pytest.raises(ContractViolation):
            profiler.record(ev(2, EventKind.SAMPLE_DRAWN, sample_index=1))

    def test_record_after_run_end_rejected(self, tmp_path):
        profiler = BaseProfiler(tmp_path)
        profiler.record(ev(0, EventKind.RUN_END, reason="budget"))
        with pytest.raises(ContractViolation):
            profiler.record(ev(1, EventKind.ERROR, message="late"))

    def test_twenty_sample_run_has_twenty_draw_records(self, tmp_path):
        log = write_run(tmp_path, [float(i) for i in range(20)])
        kinds = [e.kind for e in log.read_events()]
        assert kinds.count(EventKind.SAMPLE_DRAWN) == 20

    def test_corrupt_line_names_line_number(self, tmp_path):
        log = write_run(tmp_path, [1.0])
        with open(log.events_path, "a") as fh:
            fh.write("{broken json\n")
        with pytest.raises(LogCorrupt, match="line 5"):
            log.read_events()


class TestConvergence:
    def test_running_minimum(self, tmp_path):
        log = write_run(tmp_path, [5.0, 7.0, 3.0])
        rows = convergence(log)
        assert [(r["sample_index"], r["best_fitness"]) for r in rows] == [
            (0, 5.0),
            (1, 5.0),
            (2, 3.0),
        ]

    def test_all_invalid_run_has_absent_markers(self, tmp_path):
        log = write_run(tmp_path, [None, None])
        rows = convergence(log)
        assert [r["best_fitness"] for r in rows] == [None, None]

    def test_monotone_non_increasing(self, tmp_path):
        log = write_run(tmp_path, [9.0, 4.0, 6.0, 2.0, 8.0])
        rows = convergence(log)
        values = [r["best_fitness"] for r in rows]
        assert all(a >= b for a, b in zip(values, values[1:]))

    def test_aggregation_mean_and_std(self, tmp_path):
        logs = [
            write_run(tmp_path, [4.0, 2.0], name="r1"),
            write_run(tmp_path, [6.0, 6.0], name="r2"),
            write_run(tmp_path, [5.0, 1.0], name="r3"),
        ]
        rows = aggregate_convergence(logs)
        assert rows[0]["mean"] == pytest.approx(5.0)
        assert rows[0]["std"] == pytest.approx(1.0)
        assert rows[0]["n"] == 3
        assert rows[1]["mean"] == pytest.approx(3.0)


class TestSummarize:
    def test_matches_final_new_best(self, tmp_path):
        log = write_run(tmp_path, [5.0, 7.0, 3.0])
        summary = summarize(log)
        assert summary.best_fitness == [3.0]
        assert summary.best_code == "code-2"
        assert summary.samples_used == 3

    def test_histogram_totals_equal_samples(self, tmp_path):
        log = write_run(tmp_path, [5.0, None, 3.0, None])
        summary = summarize(log)
        assert sum(summary.status_histogram.values()) == 4
        assert summary.status_histogram == {"valid": 2, "runtime_error": 2}

    def test_missing_run_end_is_an_error(self, tmp_path):
        profiler = BaseProfiler(tmp_path)
        profiler.record(ev(0, EventKind.SAMPLE_DRAWN, sample_index=0))
        profiler.close()
        with pytest.raises(ContractViolation, match="incomplete"):
            summarize(profiler.log)

    def test_stopped_reason_preserved(self, tmp_path):
        log = write_run(tmp_path, [2.0], reason="stopped")
        assert summarize(log).reason == "stopped"


class TestCanonicalText:
    def test_wall_clock_fields_zeroed(self, tmp_path):
        log = write_run(tmp_path, [5.0])
        text = canonical_events_text(log.read_events())
        for line in text.strip().splitlines():
            doc = json.loads(line)
            assert doc["ts"] == 0.0
            if "wall_time_s" in doc["payload"]:
                assert doc["payload"]["wall_time_s"] == 0.0

    def test_summary_written_iff_run_end(self, tmp_path):
        profiler = BaseProfiler(tmp_path / "incomplete")
        profiler.record(ev(0, EventKind.SAMPLE_DRAWN, sample_index=0))
        profiler.close()
        assert not profiler.log.summary_path.exists()


class TestParetoAdmit:
    def test_dominated_rejected(self):
        archive = []
        assert pareto_admit(archive, {"fitness": [1.0, 1.0]})
        assert not pareto_admit(archive, {"fitness": [2.0, 2.0]})

    def test_duplicate_fitness_rejected(self):
        archive = []
        pareto_admit(archive, {"fitness": [1.0, 2.0]})
        assert not pareto_admit(archive, {"fitness": [1.0, 2.0]})

    def test_newcomer_evicts_dominated(self):
        archive = []
        pareto_admit(archive, {"fitness": [2.0, 2.0]})
        pareto_admit(archive, {"fitness": [1.0, 3.0]})
        assert pareto_admit(archive, {"fitness": [1.0, 1.0]})
        assert [e["fitness"] for e in archive] == [[1.0, 1.0]]
