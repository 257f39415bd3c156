"""Branch-length and diversity laws for reconstructed birth-death trees.

Closed-form densities, survival functions, expectations and MGFs for
pendant edges, interior edges, root edges and diversity under three
conditioning scenarios (tip count n, MRCA age x1, or both), together with
exact conditioned samplers and a Monte Carlo harness that cross-validates
every law against simulation.
"""

from .kernel import Params, RawParams, Regime, p0, p1, prob_n_given_age, transform_params
from .sim import (
    RngStream,
    StopRule,
    ExtinctRun,
    reconstruct,
    sample_given_age,
    sample_given_n_age,
    sample_rejection_given_age,
    sample_yule_given_n,
    simulate_forward,
)
from .tree import FullTree, ReconTree, classify_edges, from_newick, to_newick, tree_stats

__all__ = [
    "Params",
    "RawParams",
    "Regime",
    "p0",
    "p1",
    "prob_n_given_age",
    "transform_params",
    "RngStream",
    "StopRule",
    "ExtinctRun",
    "simulate_forward",
    "reconstruct",
    "sample_yule_given_n",
    "sample_given_n_age",
    "sample_given_age",
    "sample_rejection_given_age",
    "ReconTree",
    "FullTree",
    "classify_edges",
    "tree_stats",
    "to_newick",
    "from_newick",
]

__version__ = "0.1.0"
