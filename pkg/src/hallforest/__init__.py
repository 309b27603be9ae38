"""Perfect (1, d-1)-matchings with cycle control, and what they build.

The package constructs, one computable step at a time, a matching on the
bipartite double of a symmetric relation in which every point of one side
keeps exactly d-1 partners, the induced self-map has tightly bounded
cycles, and the leftovers assemble into d-regular forests and pairs of
bounded-displacement permutations acting freely.
"""

from .graph import (
    BipartiteGraph,
    ExplicitBipartiteGraph,
    FiniteInducedSubgraph,
    OracleInconsistencyError,
    SymmetricDoubleGraph,
    ball,
    is_A_reflected,
    step_radius,
)
from .hall import (
    HallWitness,
    HaremCheck,
    InfeasibleMatchingError,
    Matching,
    boundary_relaxed_matching,
    brute_force_matching,
    check_harem_condition,
    solve_relaxed,
)
from .matcher import (
    HaremMatcher,
    MatchFunction,
    MatcherBudgetError,
    cumulative_shift,
    shift_witness,
    verify_cycle_control,
)
from .forest import (
    Entourage,
    ExplicitEntourage,
    ForestFunction,
    TreeEntourage,
    build_tree_entourage,
    check_expansion,
    double_graph,
    forest_to_dot,
    forest_to_json,
    strip_diagonal,
    verify_forest,
)
from .wobbling import (
    EdgeLabeling,
    WobblingPair,
    build_labeling,
    build_wobbling_pair,
    ordered_forest_neighbors,
    reduced_words,
    verify_free_semiregular,
    wobble_to_dot,
    wobble_to_json,
)

__version__ = "0.1.0"

__all__ = [
    "BipartiteGraph",
    "EdgeLabeling",
    "Entourage",
    "ExplicitBipartiteGraph",
    "ExplicitEntourage",
    "FiniteInducedSubgraph",
    "ForestFunction",
    "HallWitness",
    "HaremCheck",
    "HaremMatcher",
    "InfeasibleMatchingError",
    "MatchFunction",
    "MatcherBudgetError",
    "Matching",
    "OracleInconsistencyError",
    "SymmetricDoubleGraph",
    "TreeEntourage",
    "WobblingPair",
    "ball",
    "boundary_relaxed_matching",
    "brute_force_matching",
    "build_labeling",
    "build_tree_entourage",
    "build_wobbling_pair",
    "check_expansion",
    "check_harem_condition",
    "cumulative_shift",
    "double_graph",
    "forest_to_dot",
    "forest_to_json",
    "is_A_reflected",
    "ordered_forest_neighbors",
    "reduced_words",
    "shift_witness",
    "solve_relaxed",
    "step_radius",
    "strip_diagonal",
    "verify_cycle_control",
    "verify_forest",
    "wobble_to_dot",
    "wobble_to_json",
    "__version__",
]
