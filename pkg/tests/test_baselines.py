import numpy as np
import pytest

from sbmrobust.baselines import filtering, oracle_estimate, pruning
from sbmrobust.errors import InvalidInputError
from sbmrobust.estimator import PartitionedSubset, estimate_gamma
from sbmrobust.graph import Graph
from sbmrobust.sbm import (CorruptionConfig, SbmParams, corrupt, make_sample,
                           sample_sbm)
from sbmrobust.spectral import ClusteringConfig

FAST = ClusteringConfig(restarts=3)


def two_block_params(diag=0.65, off=0.35):
    return SbmParams(np.array([0.5, 0.5]), np.array([[diag, off], [off, diag]]))


class TestOracle:
    def test_gamma_zero_equals_full_graph_estimate(self):
        params = two_block_params()
        clean, asg = sample_sbm(params, 60, seed=0)
        sample = corrupt(clean, asg, params, 0.0, CorruptionConfig(), seed=1)
        gh, partition = oracle_estimate(sample)
        full = PartitionedSubset.from_parts(
            [asg.community(0), asg.community(1)])
        assert np.allclose(gh, estimate_gamma(clean, full))
        assert partition.union.size == 60

    def test_single_community_concentration(self):
        params = SbmParams(np.array([1.0]), np.array([[0.4]]))
        errs = []
        for seed in range(30):
            sample = make_sample(params, 300, 0.1,
                                 graph_seed=seed, corruption_seed=seed + 500)
            gh, _ = oracle_estimate(sample)
            errs.append(abs(gh[0, 0] - 0.4))
        # O(1/n) estimator bias plus O(n^-1/2)-scale noise
        assert np.mean(errs) < 3.0 / np.sqrt(270)


class TestPruning:
    def test_regular_graph_quota(self):
        # cycle graph: all degrees equal, removal is quota-sized per cluster
        n = 24
        g = Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])
        res = pruning(g, 2, num_to_prune=8, seed=0, cluster_cfg=FAST)
        quota = int(np.ceil(8 / 4))
        # 2 clusters x 2 quota sides, minus any isolated-node drops
        assert res.subset.size <= n - 2 * 2 * quota
        assert res.gamma_hat is not None

    def test_num_to_prune_must_be_small(self):
        g = Graph.from_edges(3, [(0, 1), (1, 2)])
        with pytest.raises(InvalidInputError):
            pruning(g, 1, num_to_prune=3, seed=0)

    def test_error_worse_than_oracle_under_corruption(self):
        sample = make_sample(two_block_params(), 120, 0.3,
                             graph_seed=3, corruption_seed=4)
        res = pruning(sample.graph, 2, num_to_prune=36, seed=5, cluster_cfg=FAST)
        assert np.isfinite(res.cost)
        assert res.subset.size < 120


class TestFiltering:
    def test_trace_shape(self):
        sample = make_sample(two_block_params(), 60, 0.2,
                             graph_seed=0, corruption_seed=1)
        best, trace = filtering(sample.graph, 2, max_removals=10, seed=2,
                                cluster_cfg=FAST)
        assert len(trace.steps) == 11
        assert trace.sizes() == list(range(60, 49, -1))
        assert best.cost == min(trace.costs())

    def test_removal_probabilities_match_squared_eigenvector(self):
        from sbmrobust.estimator import cost
        sample = make_sample(two_block_params(), 50, 0.2,
                             graph_seed=5, corruption_seed=6)
        res = cost(sample.graph, np.arange(50), 2)
        probs = res.top_vector ** 2
        probs = probs / probs.sum()
        assert probs.sum() == pytest.approx(1.0)
        assert np.all(probs >= 0)
        # unit-norm eigenvector: normalization is the identity
        assert np.allclose(probs, res.top_vector ** 2, atol=1e-9)

    def test_concentrated_eigenvector_targets_anomalous_node(self):
        # clique of 20 with node 0 disconnected: the residual's top
        # eigenvector piles mass on node 0, so it is removed far more
        # often than the uniform 1/20 baseline
        from sbmrobust.estimator import cost
        adj = (1 - np.eye(20)).astype(np.uint8)
        adj[0, 1:] = 0
        adj[1:, 0] = 0
        g = Graph.from_adjacency(adj)
        probs = cost(g, np.arange(20), 1).top_vector ** 2
        assert np.argmax(probs) == 0
        assert probs[0] > 5 * probs[1:].mean()
        removed_zero = 0
        for seed in range(30):
            best, trace = filtering(g, 1, max_removals=1, seed=seed)
            if 0 not in trace.steps[-1].subset:
                removed_zero += 1
        # expected hits about 30 * probs[0] ~ 10; uniform removal gives 1.5
        assert removed_zero >= 5

    def test_max_removals_bounded(self):
        g = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3)])
        with pytest.raises(InvalidInputError):
            filtering(g, 1, max_removals=4, seed=0)
