"""Comparison methods: oracle on true inliers, degree pruning, eigenvector filtering."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .estimator import CostCache, CostResult, PartitionedSubset, cost, estimate_gamma
from .graph import Graph
from .sbm import SbmSample
from .spectral import ClusteringConfig, spectral_clustering

logger = logging.getLogger(__name__)


@dataclass
class BaselineResult:
    subset: np.ndarray
    partition: PartitionedSubset | None
    gamma_hat: np.ndarray | None
    cost: float


@dataclass
class FilteringStep:
    size: int
    cost: float
    subset: np.ndarray
    eval: CostResult | None = None


@dataclass
class FilteringTrace:
    steps: list

    def sizes(self) -> list:
        return [s.size for s in self.steps]

    def costs(self) -> list:
        return [s.cost for s in self.steps]


def oracle_estimate(sample: SbmSample) -> tuple[np.ndarray, PartitionedSubset]:
    """Estimate on the true inlier set partitioned by the true labels."""
    z = sample.assignment.z
    parts = [sample.inliers[z[sample.inliers] == k]
             for k in range(sample.params.K)]
    partition = PartitionedSubset.from_parts(parts)
    return estimate_gamma(sample.graph, partition), partition


def pruning(g: Graph, K: int, num_to_prune: int, seed,
            cluster_cfg: ClusteringConfig = ClusteringConfig()) -> BaselineResult:
    """Cluster, drop extreme-degree nodes per community, recluster, re-estimate.

    From each cluster the ceil(num_to_prune / 2K) highest- and lowest-degree
    nodes go (degrees in the full graph, ties broken by node id), then any
    nodes left isolated in the remainder are dropped too.
    """
    if num_to_prune >= g.n:
        raise InvalidInputError("num_to_prune must be smaller than n")
    rng = np.random.default_rng(seed)
    labels = spectral_clustering(g.adj.astype(float), K,
                                 rng.integers(2 ** 63), cluster_cfg)
    deg = g.degrees()
    quota = int(np.ceil(num_to_prune / (2 * K)))
    removed = set()
    for k in range(K):
        members = np.flatnonzero(labels == k)
        if members.size <= 2 * quota:
            logger.warning("cluster %d smaller than its pruning quota; "
                           "keeping one node", k)
            keep_one = members[np.lexsort((members, deg[members]))][0]
            removed.update(int(v) for v in members if v != keep_one)
            continue
        by_degree = members[np.lexsort((members, deg[members]))]
        removed.update(int(v) for v in by_degree[:quota])        # lowest degrees
        removed.update(int(v) for v in by_degree[-quota:][::-1])  # highest degrees
    kept = np.setdiff1d(np.arange(g.n), np.array(sorted(removed), dtype=np.int64))
    # drop nodes isolated inside the pruned subgraph
    sub = g.induced_adjacency(kept)
    kept = kept[sub.sum(axis=1) > 0]
    result = cost(g, kept, K, CostCache(run_seed=_seed_int(seed)), cluster_cfg)
    return BaselineResult(subset=kept, partition=result.partition,
                          gamma_hat=result.gamma_hat, cost=result.cost)


def filtering(g: Graph, K: int, max_removals: int, seed,
              cluster_cfg: ClusteringConfig = ClusteringConfig()
              ) -> tuple[BaselineResult, FilteringTrace]:
    """Iterative node deletion sampled from the squared top residual eigenvector.

    Starts from the whole graph; at each step re-clusters, forms the residual,
    and removes one node with probability proportional to the squared entry of
    the residual's top-magnitude eigenvector.  Returns the minimum-cost iterate.
    """
    if max_removals >= g.n:
        raise InvalidInputError("max_removals must be smaller than n")
    rng = np.random.default_rng(seed)
    cache = CostCache(run_seed=_seed_int(seed))
    subset = np.arange(g.n, dtype=np.int64)
    steps = []
    best: tuple[float, np.ndarray, CostResult] | None = None
    for _ in range(max_removals + 1):
        result = cost(g, subset, K, cache, cluster_cfg)
        steps.append(FilteringStep(size=subset.size, cost=result.cost,
                                   subset=subset, eval=result))
        if np.isfinite(result.cost) and (best is None or result.cost < best[0]):
            best = (result.cost, subset, result)
        if subset.size <= K or result.top_vector is None:
            break
        probs = result.top_vector ** 2
        probs = probs / probs.sum()
        drop = rng.choice(subset.size, p=probs)
        subset = np.delete(subset, drop)
    if best is None:
        return BaselineResult(subset, None, None, np.inf), FilteringTrace(steps)
    _, bs, br = best
    return (BaselineResult(subset=bs, partition=br.partition,
                           gamma_hat=br.gamma_hat, cost=br.cost),
            FilteringTrace(steps))


def _seed_int(seed) -> int:
    return int(np.random.default_rng(seed).integers(2 ** 63))
