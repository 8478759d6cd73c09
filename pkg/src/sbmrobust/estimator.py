"""Plug-in connectivity estimation on a partitioned subset and the search cost."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateSpectrumError, InvalidInputError
from .graph import Graph
from .spectral import ClusteringConfig, spectral_clustering, top_eigenpair


@dataclass(frozen=True)
class PartitionedSubset:
    """Disjoint node groups S_1..S_K, their sorted union, and the one-hot map."""

    parts: tuple
    union: np.ndarray
    membership: np.ndarray  # |S| x K one-hot, row i marks the part of union[i]

    @classmethod
    def from_parts(cls, parts) -> "PartitionedSubset":
        parts = tuple(np.asarray(p, dtype=np.int64) for p in parts)
        if any(p.size == 0 for p in parts):
            raise InvalidInputError("every part must be nonempty")
        union = np.concatenate(parts)
        if np.unique(union).size != union.size:
            raise InvalidInputError("parts must be disjoint")
        union = np.sort(union)
        K = len(parts)
        labels = np.empty(union.size, dtype=np.int64)
        pos = {int(v): i for i, v in enumerate(union)}
        for k, p in enumerate(parts):
            for v in p:
                labels[pos[int(v)]] = k
        membership = np.zeros((union.size, K))
        membership[np.arange(union.size), labels] = 1.0
        return cls(parts=parts, union=union, membership=membership)

    @classmethod
    def from_labels(cls, subset: np.ndarray, labels: np.ndarray) -> "PartitionedSubset":
        """Build from a sorted subset and per-position labels in 0..K-1."""
        K = int(labels.max()) + 1
        parts = [subset[labels == k] for k in range(K)]
        return cls.from_parts(parts)

    @property
    def K(self) -> int:
        return len(self.parts)

    @property
    def sizes(self) -> np.ndarray:
        return np.array([p.size for p in self.parts])

    def labels(self) -> np.ndarray:
        """Per-position labels aligned with the sorted union."""
        return self.membership.argmax(axis=1)


def estimate_gamma(g: Graph, p: PartitionedSubset,
                   unbiased_diagonal: bool = False) -> np.ndarray:
    """Block edge-density estimate of the connectivity matrix.

    The literal average over |S_k| * |S_l| entries is used even for k == l,
    where the zero diagonal contributes an O(1/|S_k|) downward bias; set
    ``unbiased_diagonal`` to divide by |S_k|(|S_k| - 1) instead.
    """
    sub = g.induced_adjacency(p.union).astype(float)
    counts = p.membership.T @ sub @ p.membership
    sizes = p.sizes.astype(float)
    denom = np.outer(sizes, sizes)
    if unbiased_diagonal:
        np.fill_diagonal(denom, sizes * np.maximum(sizes - 1.0, 1.0))
    return counts / denom


def q_hat(p: PartitionedSubset, gamma_hat: np.ndarray) -> np.ndarray:
    """Block-constant reconstruction; its diagonal is Gamma_hat_kk, not zero."""
    return p.membership @ gamma_hat @ p.membership.T


@dataclass
class CostResult:
    cost: float
    partition: PartitionedSubset | None
    gamma_hat: np.ndarray | None
    top_vector: np.ndarray | None
    degenerate: bool = False


@dataclass
class CostCache:
    """Per-search memo of cost evaluations, keyed by the sorted index bytes."""

    run_seed: int = 0
    _memo: dict = field(default_factory=dict)

    def key(self, s: np.ndarray) -> bytes:
        return s.astype(np.int64).tobytes()

    def clustering_seed(self, s: np.ndarray) -> int:
        # deterministic per (run seed, subset) so the cost is a function of S
        h = hashlib.blake2b(digest_size=8)
        h.update(self.run_seed.to_bytes(8, "little", signed=True))
        h.update(self.key(s))
        return int.from_bytes(h.digest(), "little")

    def get(self, s: np.ndarray):
        return self._memo.get(self.key(s))

    def put(self, s: np.ndarray, result: CostResult) -> None:
        self._memo[self.key(s)] = result


def cost(g: Graph, s: np.ndarray, K: int,
         cache: CostCache | None = None,
         cluster_cfg: ClusteringConfig = ClusteringConfig()) -> CostResult:
    """Spectral-norm misfit of the induced subgraph against its block fit.

    Clusters the induced subgraph, estimates the connectivity matrix, and
    returns the spectral norm of A_S minus the block-constant reconstruction.
    Degenerate clusterings (empty part, insufficient spectrum) yield an
    infinite-cost sentinel so the search rejects the state.
    """
    if s.size < K:
        raise InvalidInputError(f"subset of size {s.size} cannot host K={K} parts")
    if cache is not None:
        hit = cache.get(s)
        if hit is not None:
            return hit
    cache_for_seed = cache or CostCache()
    sub = g.induced_adjacency(s).astype(float)
    try:
        labels = spectral_clustering(sub, K, cache_for_seed.clustering_seed(s),
                                     cluster_cfg)
        if np.unique(labels).size < K:
            result = CostResult(np.inf, None, None, None, degenerate=True)
        else:
            partition = PartitionedSubset.from_labels(s, labels)
            sizes = partition.sizes.astype(float)
            gh = (partition.membership.T @ sub @ partition.membership) \
                / np.outer(sizes, sizes)
            residual = sub - q_hat(partition, gh)
            norm, vec = top_eigenpair(residual)
            result = CostResult(norm, partition, gh, vec)
    except DegenerateSpectrumError:
        result = CostResult(np.inf, None, None, None, degenerate=True)
    if cache is not None:
        cache.put(s, result)
    return result
