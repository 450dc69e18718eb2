"""Stable assignments in two-sided markets with integer choice functions.

The package computes the distributive lattice of stable assignments:
its extremes, the rotations linking neighbouring assignments, the
weighted poset of labeled rotations whose closed functions coordinate
the whole lattice, and minimum-cost selection by a closure/min-cut
reduction -- all cross-validated against brute-force enumeration at
desk scale.
"""

from .audit import CheckResult, cross_validate
from .choice import (
    AxiomReport,
    BalancedTripleChoice,
    ChoiceFunction,
    QuotaOrderChoice,
    TableChoice,
    check_axioms,
    check_gapless,
    closure,
    local_join_meet,
    revealed_prefers,
)
from .errors import CapExceeded, InvalidInstance, InvariantViolation, ParseError
from .fileio import format_vector, parse_instance, parse_vector, serialize_instance
from .fixtures import fixture_instance, generate_fixture
from .mincost import (
    ClosureNetwork,
    build_closure_network,
    min_cost_stable,
    min_cut_closure,
    rotation_cost,
    to_dimacs,
)
from .model import (
    BalanceSpec,
    EdgeInterest,
    Instance,
    Ordering,
    QuotaOrderSpec,
    StabilityReport,
    TableSpec,
    compare_firm_side,
    compare_worker_side,
    edge_interest,
    is_acceptable,
    is_interesting,
    is_stable,
    restrict,
    stability_report,
)
from .oracle import (
    BirkhoffStructure,
    StableLattice,
    birkhoff_extract,
    enumerate_stable,
    immediate_successors,
    lattice_audit,
    lattice_join,
    lattice_meet,
    principal_elements,
)
from .poset import (
    PosetElement,
    RotationPoset,
    build_poset,
    closed_functions,
    from_closed_function,
    is_closed,
    poset_dot,
    poset_text,
    stable_assignments,
    to_closed_function,
)
from .rotations import (
    ActiveGraph,
    Rotation,
    Tandem,
    apply_rotation,
    binary_weight_probes,
    build_active_graph,
    is_rotation_applicable,
    max_weight_binary,
    max_weight_linear,
    rotations_at,
)
from .routes import (
    Route,
    RouteStep,
    firm_optimal,
    full_route,
    rotation_multiset,
    route_between,
    route_length_bound,
    worker_optimal,
    worker_optimal_two_stage,
)

__version__ = "0.1.0"
