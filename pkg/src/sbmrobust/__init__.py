"""Robust connectivity estimation for block-structured graphs under node corruption."""

from .errors import (DegenerateSpectrumError, InfeasibleError, InvalidInputError,
                     StuckNeighborhoodError)
from .estimator import PartitionedSubset, cost, estimate_gamma, q_hat
from .graph import Graph, load_edge_list, node_subset
from .metrics import EvalReport, align_labels, bound_check, estimation_error
from .sbm import (CommunityAssignment, CorruptionConfig, SbmParams, SbmSample,
                  corrupt, expected_adjacency, make_sample, sample_sbm)
from .search import SaConfig, SearchResult, run as run_search
from .spectral import (ClusteringConfig, kmeans, normalized_laplacian,
                       smallest_nonzero_eigvecs, spectral_clustering,
                       spectral_norm, top_eigenpair)

__version__ = "0.1.0"

__all__ = [
    "CommunityAssignment", "ClusteringConfig", "CorruptionConfig",
    "DegenerateSpectrumError", "EvalReport", "Graph", "InfeasibleError",
    "InvalidInputError", "PartitionedSubset", "SaConfig", "SbmParams",
    "SbmSample", "SearchResult", "StuckNeighborhoodError", "align_labels",
    "bound_check", "corrupt", "cost", "estimate_gamma", "estimation_error",
    "expected_adjacency", "kmeans", "load_edge_list", "make_sample",
    "node_subset", "normalized_laplacian", "q_hat", "run_search", "sample_sbm",
    "smallest_nonzero_eigvecs", "spectral_clustering", "spectral_norm",
    "top_eigenpair",
]
