"""External evaluation worker: one JSON request line in, one response line out.

Runs candidate code as host-language source, so it is only ever executed
here, inside a process the supervisor can kill. Candidate stdout is diverted
to stderr to keep the response line uncontaminated. Exit code 0 covers all
candidate failures (reported in the response); a nonzero exit means the
worker itself broke.

The protocol is plain enough that task authors can ship workers in other
languages: read one JSON object {task_id, candidate_code, instance_seed,
instance_count} from stdin, write one JSON object {status, scores, detail}.
"""

from __future__ import annotations

import contextlib
import json
import math
import sys
import traceback


def _respond(status: str, scores: list[float], detail: str) -> None:
    print(json.dumps({"status": status, "scores": scores, "detail": detail}), flush=True)


def _load_candidate(code: str, function_name: str):
    env: dict = {"math": math}
    compiled = compile(code, "<candidate>", "exec")
    exec(compiled, env)
    fn = env.get(function_name)
    if callable(fn):
        return fn
    defined = [v for k, v in env.items() if callable(v) and not k.startswith("_") and k != "math"]
    if len(defined) == 1:
        return defined[0]
    raise NameError(f"candidate does not define {function_name!r}")


def main() -> int:
    from .tasks import get_task

    line = sys.stdin.readline()
    try:
        request = json.loads(line)
        task = get_task(str(request["task_id"]))
        code = str(request["candidate_code"])
        seed = int(request["instance_seed"])
        count = int(request["instance_count"])
    except Exception:
        _respond("error", [], f"bad request: {traceback.format_exc(limit=1)}")
        return 0

    try:
        fn = _load_candidate(code, task.template.function_name)
    except SyntaxError as exc:
        _respond("parse_error", [], f"syntax error: {exc}")
        return 0
    except Exception as exc:
        _respond("parse_error", [], f"{type(exc).__name__}: {exc}")
        return 0

    try:
        with contextlib.redirect_stdout(sys.stderr):
            scores = [
                float(task.score_instance(fn, instance))
                for instance in task.instances(seed, count)
            ]
    except Exception as exc:
        _respond("error", [], f"{type(exc).__name__}: {exc}")
        return 0
    if any(not math.isfinite(v) for v in scores):
        _respond("error", [], "candidate produced non-finite scores")
        return 0
    _respond("ok", scores, "")
    return 0


if __name__ == "__main__":
    sys.exit(main())
