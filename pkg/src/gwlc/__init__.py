"""Exact laws, simulation and brute-force checks for the leaf count of a
uniformly random subtree of a critical Galton-Watson extinction tree."""

from .errors import GWLCError
from .offspring import (
    NAMED_DISTRIBUTIONS,
    OffspringDistribution,
    load_distribution,
    reduce_distribution,
    validate_offspring,
)
from .powerseries import PowerSeries, solve_leaf_series, verify_gf_identities
from .exactlaws import (
    ConditionalLaw,
    binary_conditional_law,
    binary_mean_leafcount,
    binary_subtree_law,
    joint_mass,
    leaf_law,
    leaf_law_asymptotic,
    plugin_conditional_law,
    ratio_conditional_law,
    tail_deficit,
    v_conditional_moments,
)
from .trees import GWTree, subtree_profile
from .enumeration import enumerate_trees, oracle_conditional_law, oracle_joint_mass
from .treesim import mc_conditional_law, rejection_sample, sample_tree

__version__ = "0.1.0"

__all__ = [
    "GWLCError",
    "NAMED_DISTRIBUTIONS",
    "OffspringDistribution",
    "load_distribution",
    "reduce_distribution",
    "validate_offspring",
    "PowerSeries",
    "solve_leaf_series",
    "verify_gf_identities",
    "ConditionalLaw",
    "binary_conditional_law",
    "binary_mean_leafcount",
    "binary_subtree_law",
    "joint_mass",
    "leaf_law",
    "leaf_law_asymptotic",
    "plugin_conditional_law",
    "ratio_conditional_law",
    "tail_deficit",
    "v_conditional_moments",
    "GWTree",
    "subtree_profile",
    "enumerate_trees",
    "oracle_conditional_law",
    "oracle_joint_mass",
    "mc_conditional_law",
    "rejection_sample",
    "sample_tree",
]
