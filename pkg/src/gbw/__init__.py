"""Exact finite-section tools for thresholding-greedy approximation.

Norms of weighted and Schreier-type sequence spaces, greedy sets and error
functionals, lower-bound estimators for greedy-type constants, and
instance-level checks of the relations between them.
"""
from .constants import (
    CONSTANT_TAGS,
    ConstantEstimate,
    ConstantKind,
    SearchBudget,
    estimate_constant,
    evaluate_witness,
    scan_instances,
    witness_transport,
)
from .error_oracles import SigmaKind, UnsupportedSpace, gamma, sigma
from .greedy_core import (
    GreedyFamily,
    GreedyOrdering,
    greedy_orderings,
    greedy_sets,
    partial_sum,
    project,
    truncate,
)
from .harness import CheckReport, check_construction, check_relation
from .sequence_space import (
    CoeffVector,
    EnumerationOverflow,
    SignVector,
    SpaceSpec,
    WeightSeq,
    admissible_sets,
    eval_norm,
    named_space,
)

__version__ = "0.1.0"
