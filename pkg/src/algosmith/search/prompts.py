"""Prompt assembly from the versioned template files in prompts/.

The wording of every operator lives in a plain-text file so benchmark
prompts are fixed, diffable artifacts. Placeholders are substituted in a
single pass, so inserted candidate code can never be re-expanded.
"""

from __future__ import annotations

import re
from functools import lru_cache
from importlib import resources
from typing import Sequence

from ..core import Candidate
from ..llm import Prompt
from ..tasks import Task

_PLACEHOLDER_RE = re.compile(r"\{([a-z_]+)\}")

VNS_STRENGTH = {
    1: "Make one small, targeted change to this function.",
    2: "Rework a major component of this function while keeping its overall shape.",
    3: "Redesign the function around a different principle; only the signature must stay.",
}


@lru_cache(maxsize=None)
def _load(name: str) -> str:
    return (
        resources.files(__package__)
        .joinpath("prompts", f"{name}.txt")
        .read_text(encoding="utf-8")
    )


def render(template_name: str, **values: str) -> str:
    text = _load(template_name)

    def sub(match: re.Match) -> str:
        key = match.group(1)
        if key not in values:
            raise KeyError(f"prompt {template_name!r} needs placeholder {key!r}")
        return values[key]

    return _PLACEHOLDER_RE.sub(sub, text).strip() + "\n"


def system_prompt() -> str:
    return _load("system").strip()


def candidate_block(candidate: Candidate) -> str:
    idea = candidate.idea or "No description recorded."
    return f"{{{idea}}}\n```\n{candidate.code.rstrip()}\n```"


def _common(task: Task) -> dict[str, str]:
    template = task.template
    return {
        "task": task.description,
        "signature": template.signature(),
        "docstring": template.docstring,
        "rules": render("rules", signature=template.signature()).strip(),
    }


def _make(
    task: Task,
    template_name: str,
    operator: str,
    parent_candidates: Sequence[Candidate] = (),
    **extra: str,
) -> Prompt:
    values = _common(task)
    values.update(extra)
    return Prompt(
        user=render(template_name, **values),
        system=system_prompt(),
        metadata={
            "operator": operator,
            "parents": [c.id for c in parent_candidates],
        },
    )


def base_prompt(task: Task, operator: str = "create") -> Prompt:
    return _make(task, "base", operator)


def modify_prompt(task: Task, parent: Candidate, operator: str = "modify") -> Prompt:
    return _make(task, "modify", operator, [parent], parent=candidate_block(parent))


def perturb_prompt(task: Task, parent: Candidate) -> Prompt:
    return _make(task, "perturb", "perturb", [parent], parent=candidate_block(parent))


def vns_prompt(task: Task, parent: Candidate, level: int) -> Prompt:
    strength = VNS_STRENGTH.get(min(level, max(VNS_STRENGTH)), VNS_STRENGTH[1])
    if level > max(VNS_STRENGTH):
        strength += f" (escalation level {level})"
    return _make(
        task, "vns", f"vns_level_{level}", [parent],
        parent=candidate_block(parent), strength=strength,
    )


def eoh_prompt(task: Task, operator: str, parents: Sequence[Candidate]) -> Prompt:
    single = {"eoh_modify", "eoh_tune"}
    if operator in single:
        return _make(
            task, operator, operator, parents, parent=candidate_block(parents[0])
        )
    blocks = "\n\n".join(candidate_block(c) for c in parents)
    return _make(task, operator, operator, parents, parents=blocks)


def funsearch_prompt(task: Task, versions: Sequence[Candidate]) -> Prompt:
    """Versions must arrive worse-first, best-last."""
    blocks = []
    for i, candidate in enumerate(versions):
        score = candidate.fitness.scalar if candidate.fitness is not None else None
        header = f"Version {i} (score {score}):"
        blocks.append(f"{header}\n```\n{candidate.code.rstrip()}\n```")
    return _make(
        task, "funsearch", "funsearch", versions, versions="\n\n".join(blocks)
    )
