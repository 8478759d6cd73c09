"""Ground-truth evaluation: label alignment, estimation error, error-bound check."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import InvalidInputError
from .estimator import PartitionedSubset, q_hat
from .sbm import CommunityAssignment, SbmSample, expected_adjacency
from .spectral import spectral_norm

EXHAUSTIVE_ALIGN_MAX_K = 8


@dataclass
class EvalReport:
    estimation_error: float
    alignment: tuple
    outliers_in_subset: int
    min_overlap: int
    cost: float
    cost_to_overlap: float
    bound_rhs: float
    bound_holds: bool

    def to_json(self) -> str:
        return json.dumps({
            "estimation_error": self.estimation_error,
            "alignment": list(self.alignment),
            "outliers_in_subset": self.outliers_in_subset,
            "min_overlap": self.min_overlap,
            "cost": self.cost,
            "cost_to_overlap": self.cost_to_overlap,
            "bound_rhs": self.bound_rhs,
            "bound_holds": self.bound_holds,
        })


def align_labels(est: PartitionedSubset, truth: CommunityAssignment) -> tuple:
    """Permutation sigma maximizing total overlap of part sigma(k) with community k.

    Exhaustive over K! for small K, assignment solver above.
    """
    if est.K != truth.K:
        raise InvalidInputError(f"K mismatch: {est.K} vs {truth.K}")
    K = est.K
    overlap = np.zeros((K, K))
    for a, part in enumerate(est.parts):
        for k in range(K):
            overlap[a, k] = np.intersect1d(part, truth.community(k),
                                           assume_unique=False).size
    if K <= EXHAUSTIVE_ALIGN_MAX_K:
        best, best_score = None, -1.0
        for perm in itertools.permutations(range(K)):
            score = sum(overlap[perm[k], k] for k in range(K))
            if score > best_score:
                best, best_score = perm, score
        return tuple(best)
    rows, cols = linear_sum_assignment(-overlap)
    sigma = [0] * K
    for a, k in zip(rows, cols):
        sigma[k] = a
    return tuple(sigma)


def estimation_error(gamma_true: np.ndarray, gamma_hat: np.ndarray,
                     sigma: tuple) -> float:
    """Sum of |Gamma_kl - Gamma_hat_{sigma(k) sigma(l)}| over the upper triangle."""
    gt = np.asarray(gamma_true, dtype=float)
    gh = np.asarray(gamma_hat, dtype=float)
    if gt.shape != gh.shape:
        raise InvalidInputError("shape mismatch between true and estimated matrices")
    K = gt.shape[0]
    total = 0.0
    for k in range(K):
        for l in range(k, K):
            total += abs(gt[k, l] - gh[sigma[k], sigma[l]])
    return total


def bound_check(sample: SbmSample, p: PartitionedSubset,
                gamma_hat: np.ndarray) -> EvalReport:
    """Evaluate the error bound: K^2 / min-overlap times the three norm terms.

    Reports the aligned estimation error, the subset's residual norm, the
    cost-to-overlap ratio, and whether error <= RHS.  A zero minimum overlap
    makes the bound vacuous (RHS infinite).
    """
    K = sample.params.K
    sigma = align_labels(p, sample.assignment)
    err = estimation_error(sample.params.gamma_conn, gamma_hat, sigma)

    inliers = sample.inliers
    min_overlap = min(
        np.intersect1d(np.intersect1d(p.parts[sigma[k]],
                                      sample.assignment.community(k)),
                       inliers).size
        for k in range(K))
    subset = p.union
    outliers_in_subset = subset.size - np.intersect1d(subset, inliers).size

    residual = sample.graph.induced_adjacency(subset).astype(float) \
        - q_hat(p, gamma_hat)
    subset_norm = spectral_norm(residual)

    expected = expected_adjacency(sample.params, sample.assignment)
    inlier_residual = sample.graph.induced_adjacency(inliers).astype(float) \
        - expected[np.ix_(inliers, inliers)]
    inlier_norm = spectral_norm(inlier_residual)

    max_diag = float(np.max(np.diag(sample.params.gamma_conn)))
    if min_overlap == 0:
        rhs = np.inf
        ratio = np.inf
    else:
        rhs = K ** 2 / min_overlap * (max_diag + inlier_norm + subset_norm)
        ratio = subset_norm / min_overlap
    return EvalReport(
        estimation_error=err,
        alignment=sigma,
        outliers_in_subset=int(outliers_in_subset),
        min_overlap=int(min_overlap),
        cost=subset_norm,
        cost_to_overlap=ratio,
        bound_rhs=rhs,
        bound_holds=bool(err <= rhs),
    )
