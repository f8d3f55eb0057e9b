"""Node-disjoint routing on concatenated pairs of butterfly networks."""

from .connectivity import (
    Component,
    ConnectivityGraph,
    NoReuse,
    OneReuse,
    SubButterflyId,
    TwoReuse,
    classify_refinement,
    connected_components,
    connectivity_graph,
    refinement_map,
)
from .errors import (
    ButterflyError,
    ConstructionError,
    InternalInvariantError,
    PreconditionError,
    UnsupportedNetworkError,
)
from .oracle import FlowResult, ValidationReport, max_vertex_disjoint, search_blocking_witness, validate_path_set
from .routing import (
    PathSet,
    RoundingPlan,
    compute_rounding_plan,
    extend_to_full_switch_setting,
    route,
    route_complement,
    route_general,
    route_mini_rearrangeable,
    route_power_of_two,
)
from .topology import (
    Butterfly,
    NodeRef,
    PairNetwork,
    Side,
    benes,
    build_pair,
    double_butterfly,
    sub_butterfly_nodes,
)

__version__ = "0.1.0"
