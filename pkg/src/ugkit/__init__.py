"""Ultragraph combinatorics, branching systems and the representations they induce."""

from .core import (
    EMPTY,
    G0Decision,
    G0Expression,
    GraphError,
    Ultragraph,
    VertexId,
    VertexSet,
    g0_enumerate,
    g0_membership,
    make_graph,
    validate_ultragraph,
    vs_combine,
)
from .paths_cycles import (
    Cycle,
    composability_graph,
    condition_l,
    cycle_exits,
    enumerate_paths,
    enumerate_simple_cycles,
)
from .ideals import (
    HSSet,
    hs_closure,
    is_essential,
    is_hereditary_saturated,
    uniqueness_decomposition,
    uniqueness_report,
)
from .intervals import AffinePiece, Interval, PiecewiseAffineMap
from .branching import (
    DiscreteBranchingSystem,
    IntervalBranchingSystem,
    assemble_F,
    build_discrete_bs_from_peeling,
    build_no_exit_degenerate_bs,
    build_standard_interval_bs,
    validate_bs,
)
from .stepfunction import StepFunction
from .representation import (
    Generator,
    discrete_rep_matrix,
    faithfulness_witness,
    pf_direct,
    pf_via_rep,
    rep_apply,
    verify_ck_relations,
)
from .permutative import (
    check_l1_invariants,
    extreme_vertices,
    isolated_vertices,
    peel_sequence,
    permutativity_condition,
)

__version__ = "0.1.0"

__all__ = [
    "EMPTY",
    "G0Decision",
    "G0Expression",
    "GraphError",
    "Ultragraph",
    "VertexId",
    "VertexSet",
    "g0_enumerate",
    "g0_membership",
    "make_graph",
    "validate_ultragraph",
    "vs_combine",
    "Cycle",
    "composability_graph",
    "condition_l",
    "cycle_exits",
    "enumerate_paths",
    "enumerate_simple_cycles",
    "HSSet",
    "hs_closure",
    "is_essential",
    "is_hereditary_saturated",
    "uniqueness_decomposition",
    "uniqueness_report",
    "AffinePiece",
    "Interval",
    "PiecewiseAffineMap",
    "DiscreteBranchingSystem",
    "IntervalBranchingSystem",
    "assemble_F",
    "build_discrete_bs_from_peeling",
    "build_no_exit_degenerate_bs",
    "build_standard_interval_bs",
    "validate_bs",
    "StepFunction",
    "Generator",
    "discrete_rep_matrix",
    "faithfulness_witness",
    "pf_direct",
    "pf_via_rep",
    "rep_apply",
    "verify_ck_relations",
    "check_l1_invariants",
    "extreme_vertices",
    "isolated_vertices",
    "peel_sequence",
    "permutativity_condition",
]
