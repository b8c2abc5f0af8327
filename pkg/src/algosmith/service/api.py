"""HTTP run-control API.

A thin view/control plane over the RunManager: starting, monitoring, and
stopping runs, plus the task/method registries the dashboard's forms need.
No handler ever blocks on sampler latency; runs execute on background
threads and queries read snapshots.

Errors are JSON objects: {"code": ..., "message": ..., "field": ...?}.
"""

from __future__ import annotations

from dataclasses import fields
from typing import Any, Optional

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from ..core import ConfigError
from ..search import METHOD_IDS, MULTI_OBJECTIVE_METHODS, MethodConfig
from ..tasks import get_task, list_tasks
from .config import config_from_dict
from .manager import CapacityError, RunManager, UnknownRun

# Parameters the configuration form shows per method, beyond the common ones.
METHOD_PARAMS: dict[str, tuple[str, ...]] = {
    "random_sampling": (),
    "one_plus_one_eps": (),
    "sa": ("sa_t0", "sa_alpha"),
    "tabu": ("tabu_len",),
    "ils": ("ils_stall",),
    "vns": ("vns_levels",),
    "eoh": ("pop_size",),
    "funsearch": ("num_islands", "samples_per_prompt"),
    "moeoh_nsga2": ("pop_size",),
    "moead": ("pop_size", "moead_neighbors"),
}


def _method_listing() -> list[dict[str, Any]]:
    defaults = {
        f.name: f.default for f in fields(MethodConfig) if f.name != "method"
    }
    out = []
    for method_id in METHOD_IDS:
        params = {name: defaults[name] for name in METHOD_PARAMS[method_id]}
        params["rng_seed"] = defaults["rng_seed"]
        out.append(
            {
                "id": method_id,
                "multi_objective": method_id in MULTI_OBJECTIVE_METHODS,
                "params": params,
            }
        )
    return out


def _task_listing() -> list[dict[str, Any]]:
    out = []
    for task_id in list_tasks():
        task = get_task(task_id)
        out.append(
            {
                "id": task.id,
                "description": task.description,
                "objective_count": task.objective_count,
                "signature": task.template.signature(),
                "default_timeout_s": task.default_timeout_s,
                "instance_count": task.instance_count,
            }
        )
    return out


def _error(status: int, code: str, message: str, field: Optional[str] = None) -> JSONResponse:
    body: dict[str, Any] = {"code": code, "message": message}
    if field:
        body["field"] = field
    return JSONResponse(status_code=status, content=body)


def create_app(
    manager: Optional[RunManager] = None, static_dir: Optional[str] = None
) -> FastAPI:
    app = FastAPI(title="algosmith", docs_url=None, redoc_url=None)
    mgr = manager or RunManager()
    app.state.manager = mgr

    @app.exception_handler(UnknownRun)
    async def _unknown_run(request: Request, exc: UnknownRun):
        return _error(404, "not_found", f"no run with id {exc.args[0]!r}")

    @app.get("/tasks")
    def tasks() -> dict[str, Any]:
        return {"tasks": _task_listing()}

    @app.get("/methods")
    def methods() -> dict[str, Any]:
        return {"methods": _method_listing()}

    @app.get("/runs")
    def runs() -> dict[str, Any]:
        return {"runs": mgr.list_runs()}

    @app.post("/runs")
    async def start_run(request: Request):
        try:
            doc = await request.json()
        except Exception:
            return _error(400, "bad_request", "body must be a JSON config document")
        if not isinstance(doc, dict):
            return _error(400, "bad_request", "body must be a JSON object")
        try:
            config = config_from_dict(doc)
        except ConfigError as exc:
            return _error(400, "invalid_config", str(exc))
        try:
            return mgr.start(config)
        except CapacityError as exc:
            return _error(429, "too_many_runs", str(exc))

    @app.get("/runs/{run_id}")
    def run_status(run_id: str):
        return mgr.status(run_id)

    @app.post("/runs/{run_id}/stop")
    def stop_run(run_id: str):
        return mgr.stop(run_id)

    @app.get("/runs/{run_id}/events")
    def run_events(run_id: str, since: int = -1):
        events = mgr.events(run_id, since)
        return {
            "events": [
                {"seq": e.seq, "ts": e.ts, "kind": e.kind.value, "payload": e.payload}
                for e in events
            ]
        }

    @app.get("/runs/{run_id}/best")
    def run_best(run_id: str):
        return mgr.best(run_id)

    if static_dir:
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="dashboard")

    return app
