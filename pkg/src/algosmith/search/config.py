"""Search method configuration and the method registry surface."""

from __future__ import annotations

from dataclasses import dataclass, fields
from typing import Any

from ..core import ConfigError

METHOD_IDS = (
    "random_sampling",
    "one_plus_one_eps",
    "sa",
    "tabu",
    "ils",
    "vns",
    "eoh",
    "funsearch",
    "moeoh_nsga2",
    "moead",
)

MULTI_OBJECTIVE_METHODS = frozenset({"moeoh_nsga2", "moead"})


@dataclass(frozen=True)
class MethodConfig:
    method: str
    pop_size: int = 10
    num_islands: int = 10
    samples_per_prompt: int = 4
    sa_t0: float = 1.0
    sa_alpha: float = 0.95
    tabu_len: int = 5
    ils_stall: int = 5
    vns_levels: int = 3
    moead_neighbors: int = 3
    rng_seed: int = 0
    seed_from_template: bool = True

    def __post_init__(self) -> None:
        if self.method not in METHOD_IDS:
            raise ConfigError(
                f"unknown method {self.method!r}; valid methods: {', '.join(METHOD_IDS)}"
            )
        if self.pop_size < 1:
            raise ConfigError("pop_size must be >= 1")
        if self.num_islands < 1:
            raise ConfigError("num_islands must be >= 1")
        if self.samples_per_prompt < 1:
            raise ConfigError("samples_per_prompt must be >= 1")
        if not 0.0 < self.sa_alpha < 1.0:
            raise ConfigError("sa_alpha must lie in (0, 1)")
        if self.sa_t0 < 0:
            raise ConfigError("sa_t0 must be >= 0")
        for name in ("tabu_len", "ils_stall", "vns_levels", "moead_neighbors"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")

    @property
    def multi_objective(self) -> bool:
        return self.method in MULTI_OBJECTIVE_METHODS

    @classmethod
    def from_dict(cls, doc: dict[str, Any]) -> "MethodConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(doc) - known
        if unknown:
            raise ConfigError(f"unknown method option(s): {', '.join(sorted(unknown))}")
        if "method" not in doc:
            raise ConfigError("method section must name a method")
        return cls(**doc)


def list_methods() -> list[str]:
    return list(METHOD_IDS)
