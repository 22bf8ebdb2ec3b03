"""Stallings graphs, partial injections and statistics of subgroups of free groups.

The words and stallings modules hold the core algebra (reduced words,
folding, membership, cores, isomorphism); partial_injections the exact
counting and uniform generation; samplers the two subgroup
distributions; properties the decision procedures; experiments the
Monte Carlo harness; cli the command-line front end.
"""

from .experiments import ExperimentSpec, exact_ratio_table, run_experiment
from .partial_injections import (
    CountCache,
    PartialInjection,
    count_fixpoint_free_injections,
    count_fragmented_permutations,
    count_gcd_not_one,
    count_no_big_cycle_injections,
    count_orbit_multiple,
    count_partial_injections,
    uniform_partial_injection,
    uniform_permutation,
)
from .properties import (
    HncReport,
    MalnormalityReport,
    NonPure,
    PairGraph,
    PureUpTo,
    avoids_generator_conjugates,
    hnc_report,
    intersection,
    is_malnormal,
    normal_closure_trivial_sufficient,
    product_graph,
    purity_status,
)
from .samplers import (
    GenericityParams,
    SamplingError,
    WordTuple,
    central_outer_structure,
    has_repeated_long_factor,
    in_Y,
    sample_graph_subgroup,
    sample_word_tuple,
)
from .stallings import (
    LabeledCore,
    PreGraph,
    StallingsGraph,
    conjugate,
    cyclic_core,
    fold,
    is_admissible,
    isomorphic,
    membership,
    parse,
    rank,
    reduced_rank,
    serialize,
)
from .words import (
    concat_reduce,
    count_reduced_words,
    cyclically_reduce,
    format_word,
    free_reduce,
    invert,
    is_reduced,
    parse_word,
    random_reduced_word,
    sphere_size,
)

__version__ = "0.1.0"
