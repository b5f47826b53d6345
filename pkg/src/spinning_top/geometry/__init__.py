from spinning_top.geometry.cycles import count_3cycles
from spinning_top.geometry.profile import GameProfile, ProfileFit, fit_spinning_top, game_profile
from spinning_top.geometry.signalling import cyclic_target, simulate_payoff, theorem1_construct
from spinning_top.geometry.tree import (
    CommResult,
    NodeBudgetExceeded,
    StrategyCount,
    communicativeness,
    count_pure_strategies,
    go_bound_bits,
    minmax_depth_labeler,
    prune_determined,
    restricted_communicativeness,
    subset_max_solver,
)

__all__ = [
    "CommResult",
    "communicativeness",
    "count_3cycles",
    "count_pure_strategies",
    "cyclic_target",
    "fit_spinning_top",
    "game_profile",
    "GameProfile",
    "go_bound_bits",
    "minmax_depth_labeler",
    "NodeBudgetExceeded",
    "ProfileFit",
    "prune_determined",
    "restricted_communicativeness",
    "simulate_payoff",
    "StrategyCount",
    "subset_max_solver",
    "theorem1_construct",
]
