"""Command-line frontend: run, validate, report, list registries, serve."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from ..core import ConfigError
from ..profiler import RunLog, aggregate_convergence, convergence, write_convergence_csv
from ..search import list_methods
from ..tasks import list_tasks
from .config import load_config
from .manager import execute_run

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="algosmith",
        description="Search for algorithms with a language-model sampler.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="execute a run to completion")
    run_p.add_argument("--config", required=True, help="TOML config file")
    run_p.add_argument("--log-dir", help="override the profiler log directory")

    val_p = sub.add_parser("validate", help="check a config without sampling")
    val_p.add_argument("--config", required=True)

    rep_p = sub.add_parser("report", help="write convergence series from run logs")
    rep_p.add_argument("--log", required=True, nargs="+", help="run log directory(ies)")
    rep_p.add_argument("--out", help="output CSV for multi-run aggregation")

    sub.add_parser("list-tasks", help="print the task registry")
    sub.add_parser("list-methods", help="print the method registry")

    serve_p = sub.add_parser("serve", help="start the HTTP API")
    serve_p.add_argument("--port", type=int, default=8000)
    serve_p.add_argument("--host", default="127.0.0.1")
    serve_p.add_argument("--static-dir", help="serve a built dashboard from this directory")
    serve_p.add_argument("--max-runs", type=int, default=4)
    serve_p.add_argument("--log-root", default="logs")
    return parser


def _cmd_run(args: argparse.Namespace) -> int:
    try:
        config = load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    log_dir = args.log_dir or config.log_dir or str(Path("logs") / "latest")
    try:
        summary = execute_run(config, log_dir)
    except Exception as exc:
        print(f"run failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    print(str(Path(log_dir) / "summary.json"))
    if summary.best_fitness is not None:
        print(f"best fitness: {summary.best_fitness}", file=sys.stderr)
    return EXIT_OK


def _cmd_validate(args: argparse.Namespace) -> int:
    try:
        config = load_config(args.config)
        config.build_sampler()
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(f"config ok: {config.method.method} on {config.task_id}")
    return EXIT_OK


def _cmd_report(args: argparse.Namespace) -> int:
    logs = [RunLog(d) for d in args.log]
    try:
        if len(logs) == 1:
            rows = convergence(logs[0])
            write_convergence_csv(rows, logs[0].convergence_path)
            print(str(logs[0].convergence_path))
            return EXIT_OK
        rows = aggregate_convergence(logs)
        out = Path(args.out) if args.out else Path("convergence_aggregate.csv")
        with open(out, "w", encoding="utf-8") as fh:
            fh.write("sample_index,mean,std,n\n")
            for row in rows:
                mean = "" if row["mean"] is None else row["mean"]
                std = "" if row["std"] is None else row["std"]
                fh.write(f"{row['sample_index']},{mean},{std},{row['n']}\n")
        print(str(out))
        return EXIT_OK
    except FileNotFoundError as exc:
        print(f"log not found: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:
        print(f"report failed: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .api import create_app
    from .manager import RunManager

    manager = RunManager(max_concurrent=args.max_runs, base_log_dir=args.log_root)
    app = create_app(manager, static_dir=args.static_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "run":
        return _cmd_run(args)
    if args.command == "validate":
        return _cmd_validate(args)
    if args.command == "report":
        return _cmd_report(args)
    if args.command == "list-tasks":
        print("\n".join(list_tasks()))
        return EXIT_OK
    if args.command == "list-methods":
        print("\n".join(list_methods()))
        return EXIT_OK
    if args.command == "serve":
        return _cmd_serve(args)
    return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
