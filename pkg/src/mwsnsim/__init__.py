"""Mobile wireless sensor network simulator for target detection and tracking."""
from .analysis import (
    CoverageParams,
    detect_prob_mobile,
    detect_prob_static,
    min_nodes_mobile,
    min_nodes_static,
    nodes_no_overlap,
    prob_k_coverage,
)
from .config import ConfigDocument, ConfigError, parse_config
from .engine import RunResult, SimConfig, covered_now, estimate_area_coverage, run_single
from .geometry import Arena, Point2, distance, redirect_into_interior, sample_uniform_point, seg_point_distance
from .harness import (
    Aggregate,
    Experiment,
    SweepGrid,
    export_snapshots,
    find_min_nodes_empirical,
    monte_carlo,
    sweep,
)
from .mobility import (
    MobilityParams,
    Model,
    NodeState,
    Swarm,
    advance,
    decide_direction,
    init_nodes,
    resultant_direction,
)
from .target import TargetKind, TargetSpec, TargetState, advance_target, spawn_target

__version__ = "0.1.0"
