import itertools
import json

import numpy as np
import pytest

from sbmrobust.errors import InvalidInputError
from sbmrobust.estimator import PartitionedSubset, estimate_gamma
from sbmrobust.metrics import align_labels, bound_check, estimation_error
from sbmrobust.sbm import CommunityAssignment, SbmParams, make_sample


def two_block_params(diag=0.65, off=0.35):
    return SbmParams(np.array([0.5, 0.5]), np.array([[diag, off], [off, diag]]))


class TestAlignLabels:
    def test_identity_alignment(self):
        truth = CommunityAssignment(np.array([0, 0, 0, 1, 1, 1]), 2)
        est = PartitionedSubset.from_parts([[0, 1, 2], [3, 4, 5]])
        assert align_labels(est, truth) == (0, 1)

    def test_swapped_alignment(self):
        truth = CommunityAssignment(np.array([0, 0, 0, 1, 1, 1]), 2)
        est = PartitionedSubset.from_parts([[3, 4, 5], [0, 1, 2]])
        assert align_labels(est, truth) == (1, 0)

    def test_partial_subset(self):
        truth = CommunityAssignment(np.array([0, 0, 0, 0, 1, 1, 1, 1]), 2)
        est = PartitionedSubset.from_parts([[4, 5], [0, 1, 2]])
        assert align_labels(est, truth) == (1, 0)

    @pytest.mark.parametrize("K", [2, 3, 4, 5])
    def test_matches_brute_force(self, K):
        rng = np.random.default_rng(K)
        for _ in range(20):
            n = 6 * K
            z = rng.integers(K, size=n)
            while len(set(z)) < K:
                z = rng.integers(K, size=n)
            truth = CommunityAssignment(z, K)
            labels = rng.integers(K, size=n)
            while len(set(labels)) < K:
                labels = rng.integers(K, size=n)
            est = PartitionedSubset.from_labels(np.arange(n), labels)
            sigma = align_labels(est, truth)

            def score(perm):
                return sum(
                    np.intersect1d(est.parts[perm[k]],
                                   truth.community(k)).size
                    for k in range(K))

            best = max(score(p) for p in itertools.permutations(range(K)))
            assert score(sigma) == best

    def test_k_mismatch_rejected(self):
        truth = CommunityAssignment(np.array([0, 1, 2]), 3)
        est = PartitionedSubset.from_parts([[0], [1, 2]])
        with pytest.raises(InvalidInputError):
            align_labels(est, truth)


class TestEstimationError:
    def test_exact_estimate_is_zero(self):
        g = np.array([[0.6, 0.2], [0.2, 0.7]])
        assert estimation_error(g, g, (0, 1)) == 0.0

    def test_upper_triangle_sum(self):
        gt = np.array([[0.6, 0.2], [0.2, 0.7]])
        gh = np.array([[0.55, 0.23], [0.23, 0.72]])
        want = abs(0.6 - 0.55) + abs(0.2 - 0.23) + abs(0.7 - 0.72)
        assert estimation_error(gt, gh, (0, 1)) == pytest.approx(want)
        assert estimation_error(gt, gh, (0, 1)) == pytest.approx(0.10)

    def test_permutation_applied_to_estimate(self):
        gt = np.array([[0.6, 0.2], [0.2, 0.7]])
        gh = np.array([[0.7, 0.2], [0.2, 0.6]])  # blocks swapped
        assert estimation_error(gt, gh, (1, 0)) == 0.0
        assert estimation_error(gt, gh, (0, 1)) == pytest.approx(0.2)

    def test_shape_mismatch_rejected(self):
        with pytest.raises(InvalidInputError):
            estimation_error(np.eye(2), np.eye(3), (0, 1, 2))


class TestBoundCheck:
    def test_clean_oracle_bound_holds(self):
        params = two_block_params()
        sample = make_sample(params, 120, 0.0,
                             graph_seed=0, corruption_seed=1)
        parts = [sample.assignment.community(k) for k in range(2)]
        p = PartitionedSubset.from_parts(parts)
        gh = estimate_gamma(sample.graph, p)
        report = bound_check(sample, p, gh)
        assert report.bound_holds
        assert report.outliers_in_subset == 0
        assert report.min_overlap == min(len(q) for q in parts)
        assert np.isfinite(report.bound_rhs)
        assert report.estimation_error <= report.bound_rhs

    def test_corrupted_oracle_bound_holds(self):
        params = two_block_params()
        for seed in range(5):
            sample = make_sample(params, 100, 0.2,
                                 graph_seed=seed, corruption_seed=seed + 50)
            z = sample.assignment.z
            parts = [np.intersect1d(sample.inliers, np.flatnonzero(z == k))
                     for k in range(2)]
            p = PartitionedSubset.from_parts(parts)
            gh = estimate_gamma(sample.graph, p)
            report = bound_check(sample, p, gh)
            assert report.bound_holds
            assert report.outliers_in_subset == 0

    def test_zero_overlap_is_vacuous(self):
        params = two_block_params()
        sample = make_sample(params, 40, 0.2,
                             graph_seed=2, corruption_seed=3)
        z = sample.assignment.z
        # deliberately wrong partition: both parts drawn from community 0
        c0 = np.flatnonzero(z == 0)
        p = PartitionedSubset.from_parts([c0[:2], c0[2:4]])
        gh = estimate_gamma(sample.graph, p)
        report = bound_check(sample, p, gh)
        # with both parts inside one community the minimum overlap over
        # communities is zero, so the bound is vacuous
        assert report.min_overlap == 0
        assert report.bound_rhs == np.inf
        assert report.cost_to_overlap == np.inf
        assert report.bound_holds

    def test_report_json_roundtrip(self):
        params = two_block_params()
        sample = make_sample(params, 60, 0.1,
                             graph_seed=4, corruption_seed=5)
        parts = [sample.assignment.community(k) for k in range(2)]
        p = PartitionedSubset.from_parts(parts)
        gh = estimate_gamma(sample.graph, p)
        report = bound_check(sample, p, gh)
        d = json.loads(report.to_json())
        assert d["estimation_error"] == pytest.approx(report.estimation_error)
        assert tuple(d["alignment"]) == report.alignment
        assert d["bound_holds"] == report.bound_holds
        assert d["min_overlap"] == report.min_overlap
