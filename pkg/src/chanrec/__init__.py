"""White-channel assignment and preemption recovery capacity."""

from .assign import (
    EdgeColoring,
    edge_color,
    greedy_assign,
    ifa_assign,
    is_proper_edge_coloring,
    random_assign,
    serialize_edge_coloring,
)
from .experiments import (
    ExperimentRecord,
    InstanceSpec,
    derive_seed,
    generate_instance,
    run_gap_study,
    run_scaling_study,
    run_traffic_study,
    write_records_csv,
)
from .metrics import (
    IFA_CAPACITY_RATIO_BOUND,
    ODDSET_EXACT_CAP,
    TOL,
    FeasibilityReport,
    RecoveryReport,
    capacity_floor,
    channel_load_at_node,
    feasibility_ratio,
    greedy_capacity_ratio_bound,
    is_feasible,
    is_interference_free,
    max_node_load,
    max_odd_set_load_bracket,
    max_odd_set_load_exact,
    recovery_capacity,
)
from .netmodel import (
    ChannelAssignment,
    FormatError,
    Network,
    OddSet,
    check_assignment,
    make_network,
    parse_assignment,
    parse_network,
    serialize_assignment,
    serialize_network,
)
from .oracles import (
    DEFAULT_LEAF_BUDGET,
    OracleResult,
    solve_feasi_exact,
    solve_whiterec_exact,
    solve_whiterecinf_exact,
)

__version__ = "0.1.0"

__all__ = [
    "ChannelAssignment",
    "DEFAULT_LEAF_BUDGET",
    "EdgeColoring",
    "ExperimentRecord",
    "FeasibilityReport",
    "FormatError",
    "IFA_CAPACITY_RATIO_BOUND",
    "InstanceSpec",
    "Network",
    "ODDSET_EXACT_CAP",
    "OddSet",
    "OracleResult",
    "RecoveryReport",
    "TOL",
    "capacity_floor",
    "channel_load_at_node",
    "check_assignment",
    "derive_seed",
    "edge_color",
    "feasibility_ratio",
    "generate_instance",
    "greedy_assign",
    "greedy_capacity_ratio_bound",
    "ifa_assign",
    "is_feasible",
    "is_interference_free",
    "is_proper_edge_coloring",
    "make_network",
    "max_node_load",
    "max_odd_set_load_bracket",
    "max_odd_set_load_exact",
    "parse_assignment",
    "parse_network",
    "random_assign",
    "recovery_capacity",
    "run_gap_study",
    "run_scaling_study",
    "run_traffic_study",
    "serialize_assignment",
    "serialize_edge_coloring",
    "serialize_network",
    "solve_feasi_exact",
    "solve_whiterec_exact",
    "solve_whiterecinf_exact",
    "write_records_csv",
]
