"""Search methods and the coordinator loop."""

from .config import METHOD_IDS, MULTI_OBJECTIVE_METHODS, MethodConfig, list_methods
from .coordinator import run
from .multiobj import (
    crowding_distance,
    fast_nondominated_sort,
    moead_update,
    moead_weights,
    tchebycheff,
    update_ideal,
    weight_neighborhoods,
)
from .ops import rank_proportional_weights, sa_accept, select_parents, tabu_admissible
from .population import Island, Population, eoh_survivor_selection, island_reset
from .strategies import Proposal, Strategy, build_strategy, nsga2_ranked, nsga2_survivors

__all__ = [
    "METHOD_IDS",
    "MULTI_OBJECTIVE_METHODS",
    "Island",
    "MethodConfig",
    "Population",
    "Proposal",
    "Strategy",
    "build_strategy",
    "crowding_distance",
    "eoh_survivor_selection",
    "fast_nondominated_sort",
    "island_reset",
    "list_methods",
    "moead_update",
    "moead_weights",
    "nsga2_ranked",
    "nsga2_survivors",
    "rank_proportional_weights",
    "run",
    "sa_accept",
    "select_parents",
    "tabu_admissible",
    "tchebycheff",
    "update_ideal",
    "weight_neighborhoods",
]
