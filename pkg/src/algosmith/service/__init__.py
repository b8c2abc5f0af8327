"""CLI and HTTP run-control surfaces."""

from .config import RunConfig, TaskOverrides, config_from_dict, load_config
from .manager import CapacityError, RunManager, RunState, UnknownRun, execute_run

__all__ = [
    "CapacityError",
    "RunConfig",
    "RunManager",
    "RunState",
    "TaskOverrides",
    "UnknownRun",
    "config_from_dict",
    "execute_run",
    "load_config",
]
