"""Normalized Laplacian, eigensolvers, k-means, spectral clustering, spectral norm."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

from .errors import DegenerateSpectrumError, InvalidInputError

# dense decompositions below this size, Lanczos-style iterations above
DENSE_CUTOFF = 512

ZERO_EIGVAL_REL_TOL = 1e-8


@dataclass(frozen=True)
class ClusteringConfig:
    """Knobs for k-means and the eigenvector embedding."""

    restarts: int = 10
    max_iter: int = 300
    tol: float = 1e-7
    row_normalize: bool = False


def normalized_laplacian(adj: np.ndarray) -> np.ndarray:
    """Symmetric normalized Laplacian; rows of isolated nodes are all zero."""
    a = np.asarray(adj, dtype=float)
    deg = a.sum(axis=1)
    inv_sqrt = np.zeros_like(deg)
    nz = deg > 0
    inv_sqrt[nz] = 1.0 / np.sqrt(deg[nz])
    lap = -(inv_sqrt[:, None] * a * inv_sqrt[None, :])
    np.fill_diagonal(lap, np.where(nz, 1.0, 0.0))
    return lap


def _fix_signs(vecs: np.ndarray) -> np.ndarray:
    """First entry with magnitude above tolerance made positive, per column."""
    out = vecs.copy()
    for c in range(out.shape[1]):
        col = out[:, c]
        nz = np.flatnonzero(np.abs(col) > 1e-12)
        if nz.size and col[nz[0]] < 0:
            out[:, c] = -col
    return out


def smallest_nonzero_eigvecs(lap: np.ndarray, k: int) -> np.ndarray:
    """Orthonormal eigenvectors of the k smallest eigenvalues strictly above zero.

    Eigenvalues below ZERO_EIGVAL_REL_TOL times the largest eigenvalue count as
    zero (one per connected component on well-formed Laplacians).
    """
    if k < 1:
        raise InvalidInputError("k must be >= 1")
    n = lap.shape[0]
    if n <= DENSE_CUTOFF:
        # normalized-Laplacian spectrum sits in [0, 2]; only the bottom of it
        # is needed, so ask LAPACK for a subset and widen if zeros crowd it out
        hi = min(n - 1, k + 1)
        while True:
            vals, vecs = scipy.linalg.eigh(lap, subset_by_index=[0, hi])
            thresh = ZERO_EIGVAL_REL_TOL * 2.0
            if np.count_nonzero(vals > thresh) >= k or hi == n - 1:
                break
            hi = min(n - 1, 2 * hi)
    else:
        # need the bottom of the spectrum including every zero eigenvalue;
        # grow the Lanczos block until k nonzero eigenpairs are available
        want = k + 1
        while True:
            want = min(n - 1, want)
            vals, vecs = scipy.sparse.linalg.eigsh(
                scipy.sparse.csr_matrix(lap), k=want, which="SA")
            thresh = ZERO_EIGVAL_REL_TOL * 2.0
            if np.count_nonzero(vals > thresh) >= k or want == n - 1:
                break
            want *= 2
    thresh = ZERO_EIGVAL_REL_TOL * 2.0
    nonzero = np.flatnonzero(vals > thresh)
    if nonzero.size < k:
        raise DegenerateSpectrumError(
            f"requested {k} nonzero eigenvalues, spectrum has {nonzero.size}")
    pick = nonzero[:k]
    return _fix_signs(vecs[:, pick])


def kmeans(points: np.ndarray, K: int, rng,
           cfg: ClusteringConfig = ClusteringConfig()) -> np.ndarray:
    """Lloyd's algorithm, greedy farthest-point seeding, best of cfg.restarts.

    Empty clusters are re-seeded with the point currently farthest from its
    assigned centroid.  Returns labels in 0..K-1.
    """
    pts = np.asarray(points, dtype=float)
    n = pts.shape[0]
    if n < K:
        raise InvalidInputError(f"need at least K={K} points, got {n}")
    rng = np.random.default_rng(rng)

    pts_sq = (pts ** 2).sum(axis=1)
    rows = np.arange(n)

    def distances(centroids):
        return pts_sq[:, None] - 2.0 * (pts @ centroids.T) \
            + (centroids ** 2).sum(axis=1)[None, :]

    best_labels, best_wcss = None, np.inf
    for _ in range(cfg.restarts):
        centroids = _farthest_point_seed(pts, K, rng)
        labels = None
        prev_labels = None
        for _ in range(cfg.max_iter):
            d2 = distances(centroids)
            labels = d2.argmin(axis=1)
            if prev_labels is not None and np.array_equal(labels, prev_labels):
                break
            prev_labels = labels
            counts = np.bincount(labels, minlength=K)
            for c in np.flatnonzero(counts == 0):
                far = int(d2[rows, labels].argmax())
                labels[far] = c
                counts = np.bincount(labels, minlength=K)
            sums = np.zeros((K, pts.shape[1]))
            np.add.at(sums, labels, pts)
            new_centroids = sums / counts[:, None]
            shift = np.abs(new_centroids - centroids).max()
            centroids = new_centroids
            if shift < cfg.tol:
                break
        d2 = distances(centroids)
        labels = d2.argmin(axis=1)
        wcss = max(0.0, float(d2[rows, labels].sum()))
        if wcss < best_wcss:
            best_wcss, best_labels = wcss, labels
        if best_wcss <= 1e-15:
            break
    return best_labels


def _farthest_point_seed(pts: np.ndarray, K: int, rng) -> np.ndarray:
    n = pts.shape[0]
    first = rng.integers(n)
    chosen = [first]
    min_d2 = ((pts - pts[first]) ** 2).sum(axis=1)
    for _ in range(1, K):
        nxt = int(min_d2.argmax())
        chosen.append(nxt)
        min_d2 = np.minimum(min_d2, ((pts - pts[nxt]) ** 2).sum(axis=1))
    return pts[chosen].copy()


def spectral_clustering(adj: np.ndarray, K: int, rng,
                        cfg: ClusteringConfig = ClusteringConfig()) -> np.ndarray:
    """k-means over the bottom nonzero eigenvectors of the normalized Laplacian."""
    if K == 1:
        return np.zeros(adj.shape[0], dtype=np.int64)
    lap = normalized_laplacian(adj)
    emb = smallest_nonzero_eigvecs(lap, K)
    if cfg.row_normalize:
        norms = np.linalg.norm(emb, axis=1, keepdims=True)
        emb = emb / np.where(norms > 0, norms, 1.0)
    return kmeans(emb, K, rng, cfg)


def top_eigenpair(mat: np.ndarray, rel_tol: float = 1e-6) -> tuple[float, np.ndarray]:
    """Largest-magnitude eigenvalue (absolute value) and its eigenvector.

    For a symmetric matrix this is the spectral norm.  Dense decomposition up
    to DENSE_CUTOFF, restarted Lanczos iteration above.
    """
    m = np.asarray(mat, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidInputError("matrix must be square")
    if not np.allclose(m, m.T, atol=1e-10):
        raise InvalidInputError("matrix must be symmetric")
    n = m.shape[0]
    if n == 1:
        return abs(float(m[0, 0])), np.ones(1)
    if n <= DENSE_CUTOFF:
        lo_val, lo_vec = scipy.linalg.eigh(m, subset_by_index=[0, 0])
        hi_val, hi_vec = scipy.linalg.eigh(m, subset_by_index=[n - 1, n - 1])
        if abs(lo_val[0]) >= abs(hi_val[0]):
            return abs(float(lo_val[0])), lo_vec[:, 0]
        return abs(float(hi_val[0])), hi_vec[:, 0]
    vals, vecs = scipy.sparse.linalg.eigsh(m, k=1, which="LM", tol=rel_tol)
    return abs(float(vals[0])), vecs[:, 0]


def spectral_norm(mat: np.ndarray) -> float:
    return top_eigenpair(mat)[0]
