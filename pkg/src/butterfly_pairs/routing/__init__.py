from .balance import Allocation, ComponentOccupancy, Group, balance_components, case3_parameters, is_balanced
from .matching import maximum_matching, perfect_matching_regular_bipartite
from .paths import PathSet, check_terminals
from .plan import RoundingPlan, compute_rounding_plan
from .router import (
    MODES,
    SwitchSetting,
    extend_to_full_switch_setting,
    middle_is_complete,
    route,
    route_complement,
    route_general,
    route_mini_rearrangeable,
    route_power_of_two,
)
from .splitting import PacketDistribution, SplitResult, realize_split, split_level

__all__ = [
    "Allocation",
    "ComponentOccupancy",
    "Group",
    "MODES",
    "PacketDistribution",
    "PathSet",
    "RoundingPlan",
    "SplitResult",
    "SwitchSetting",
    "balance_components",
    "case3_parameters",
    "check_terminals",
    "compute_rounding_plan",
    "extend_to_full_switch_setting",
    "is_balanced",
    "maximum_matching",
    "middle_is_complete",
    "perfect_matching_regular_bipartite",
    "realize_split",
    "route",
    "route_complement",
    "route_general",
    "route_mini_rearrangeable",
    "route_power_of_two",
    "split_level",
]
