"""Round elimination toolkit for locally checkable labeling problems.

Problems live on Delta-regular bipartite port graphs: nodes pick a
configuration of Delta labels, one per incident edge, and each edge checks
the unordered pair it sees.  The package computes the standard speedup
rewrites (universal edge side, universal node side, and their composition),
label strength diagrams, zero-round solvability, the ruling-set problem
family with its closed forms and reduction maps, a synchronous simulator,
and round complexity bound calculators.  A command line front end and a
local session service expose the same operations.
"""

from .core import (
    BudgetError,
    Config,
    Constraint,
    DEFAULT_DERIVED_CAP,
    DomainError,
    MAX_ALPHABET,
    ParseError,
    Problem,
    StrengthDiagram,
    compute_strength,
    discard_configs,
    enumerate_right_closed,
    expand_constraint,
    make_constraint,
    make_problem,
    merge_labels,
    parse_config,
    parse_problem,
    problem_from_json,
    problem_json_text,
    problem_to_json,
    problems_equivalent,
    prune_unused_labels,
    relax_node_constraint,
    rename_labels,
    serialize_problem,
)
from .roundelim import (
    DEFAULT_BUDGET,
    ReductionReport,
    SpeedupResult,
    ZeroRound,
    check_zero_round_reduction,
    maximal_boxes,
    re,
    relaxes_to,
    rere,
    speedup,
    zero_round_solvable,
)
from .family import (
    FamilyParams,
    GoodPair,
    LowerBoundSequence,
    SpeedupMap,
    ZMember,
    ZReport,
    binom_color,
    color_pairing,
    family_colors,
    family_edge_diagram,
    family_size,
    family_speedup,
    good_pairs,
    grid_vectors,
    lower_bound_rounds,
    lower_bound_sequence,
    make_family_problem,
    make_Z,
    predicted_re_edge,
    predicted_re_node,
    predicted_strength_sets,
    prefix_sum,
    re_node_strength_mismatches,
    speedup_map,
    verify_relaxation_to_Z,
)
from .bounds import (
    BoundQuery,
    LowerBoundEstimate,
    det_lower_bound,
    failure_after_j_steps,
    rand_lower_bound,
    too_fast_failure_floor,
    upper_bound_rounds,
    zero_round_failure_floor,
)
from .simulator import (
    PortGraph,
    RulingSetReport,
    RunResult,
    check_ruling_set,
    gen_cycle,
    gen_random_regular,
    gen_regular_tree,
    greedy_coloring,
    parse_port_graph,
    ruling_set_to_solution,
    run_ruling_set_algorithm,
    serialize_port_graph,
    solution_to_ruling_set,
    states_to_labeling,
    validate_labeling,
)

__version__ = "0.1.0"

__all__ = [
    "BoundQuery",
    "BudgetError",
    "Config",
    "Constraint",
    "DEFAULT_BUDGET",
    "DEFAULT_DERIVED_CAP",
    "DomainError",
    "FamilyParams",
    "GoodPair",
    "LowerBoundEstimate",
    "LowerBoundSequence",
    "MAX_ALPHABET",
    "ParseError",
    "PortGraph",
    "Problem",
    "ReductionReport",
    "RulingSetReport",
    "RunResult",
    "SpeedupMap",
    "SpeedupResult",
    "StrengthDiagram",
    "ZMember",
    "ZReport",
    "ZeroRound",
    "binom_color",
    "check_ruling_set",
    "check_zero_round_reduction",
    "color_pairing",
    "compute_strength",
    "det_lower_bound",
    "discard_configs",
    "enumerate_right_closed",
    "expand_constraint",
    "failure_after_j_steps",
    "family_colors",
    "family_edge_diagram",
    "family_size",
    "family_speedup",
    "gen_cycle",
    "gen_random_regular",
    "gen_regular_tree",
    "good_pairs",
    "greedy_coloring",
    "grid_vectors",
    "lower_bound_rounds",
    "lower_bound_sequence",
    "make_Z",
    "make_constraint",
    "make_family_problem",
    "make_problem",
    "maximal_boxes",
    "merge_labels",
    "parse_config",
    "parse_port_graph",
    "parse_problem",
    "predicted_re_edge",
    "predicted_re_node",
    "predicted_strength_sets",
    "prefix_sum",
    "problem_from_json",
    "problem_json_text",
    "problem_to_json",
    "problems_equivalent",
    "prune_unused_labels",
    "rand_lower_bound",
    "re",
    "re_node_strength_mismatches",
    "relax_node_constraint",
    "relaxes_to",
    "rename_labels",
    "rere",
    "ruling_set_to_solution",
    "run_ruling_set_algorithm",
    "serialize_port_graph",
    "serialize_problem",
    "solution_to_ruling_set",
    "speedup",
    "speedup_map",
    "states_to_labeling",
    "too_fast_failure_floor",
    "upper_bound_rounds",
    "validate_labeling",
    "zero_round_failure_floor",
    "zero_round_solvable",
]
