"""SBM sampling, expected adjacency, and the Beta node-corruption adversary."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError
from .graph import Graph, node_subset


@dataclass(frozen=True)
class SbmParams:
    """Community-size vector and K x K connectivity matrix."""

    pi: np.ndarray
    gamma_conn: np.ndarray

    def __post_init__(self):
        pi = np.asarray(self.pi, dtype=float)
        g = np.asarray(self.gamma_conn, dtype=float)
        if pi.ndim != 1 or g.shape != (pi.size, pi.size):
            raise InvalidInputError("pi must be length-K, gamma_conn K x K")
        if np.any(pi <= 0) or np.any(pi > 1) or not np.isclose(pi.sum(), 1.0):
            raise InvalidInputError("pi entries must lie in (0,1] and sum to 1")
        if not np.allclose(g, g.T) or np.any(g < 0) or np.any(g > 1):
            raise InvalidInputError("gamma_conn must be symmetric with entries in [0,1]")
        object.__setattr__(self, "pi", pi)
        object.__setattr__(self, "gamma_conn", g)

    @property
    def K(self) -> int:
        return self.pi.size


@dataclass(frozen=True)
class CommunityAssignment:
    """Length-n label vector with values in 0..K-1."""

    z: np.ndarray
    K: int

    def __post_init__(self):
        z = np.asarray(self.z, dtype=np.int64)
        if z.ndim != 1 or np.any(z < 0) or np.any(z >= self.K):
            raise InvalidInputError("labels must lie in [0, K)")
        object.__setattr__(self, "z", z)

    @property
    def n(self) -> int:
        return self.z.size

    def onehot(self) -> np.ndarray:
        m = np.zeros((self.n, self.K))
        m[np.arange(self.n), self.z] = 1.0
        return m

    def community(self, k: int) -> np.ndarray:
        return np.flatnonzero(self.z == k)


@dataclass(frozen=True)
class CorruptionConfig:
    """Beta-draw concentration s = alpha + beta; smaller s means wilder outliers."""

    beta_concentration: float = 0.1

    def __post_init__(self):
        if self.beta_concentration <= 0:
            raise InvalidInputError("beta_concentration must be positive")


@dataclass(frozen=True)
class SbmSample:
    """Corrupted graph together with everything needed to score an estimate."""

    graph: Graph
    clean_graph: Graph
    assignment: CommunityAssignment
    params: SbmParams
    inliers: np.ndarray
    outliers: np.ndarray
    gamma_frac: float
    seed: int | None = None
    corruption: CorruptionConfig = field(default_factory=CorruptionConfig)

    def to_json(self) -> str:
        def edge_list(g: Graph):
            ii, jj = np.nonzero(np.triu(g.adj))
            return [[int(a), int(b)] for a, b in zip(ii, jj)]

        return json.dumps({
            "n": self.graph.n,
            "K": self.params.K,
            "pi": self.params.pi.tolist(),
            "gamma_conn": self.params.gamma_conn.tolist(),
            "z": self.assignment.z.tolist(),
            "inliers": self.inliers.tolist(),
            "gamma_frac": self.gamma_frac,
            "beta_concentration": self.corruption.beta_concentration,
            "seed": self.seed,
            "edges": edge_list(self.graph),
            "clean_edges": edge_list(self.clean_graph),
        })

    @classmethod
    def from_json(cls, text: str) -> "SbmSample":
        d = json.loads(text)
        n = d["n"]
        params = SbmParams(np.array(d["pi"]), np.array(d["gamma_conn"]))
        assignment = CommunityAssignment(np.array(d["z"]), params.K)
        inliers = node_subset(d["inliers"], n)
        outliers = np.setdiff1d(np.arange(n), inliers)
        return cls(
            graph=Graph.from_edges(n, d["edges"]),
            clean_graph=Graph.from_edges(n, d["clean_edges"]),
            assignment=assignment,
            params=params,
            inliers=inliers,
            outliers=outliers,
            gamma_frac=d["gamma_frac"],
            seed=d.get("seed"),
            corruption=CorruptionConfig(d.get("beta_concentration", 0.1)),
        )


def sample_sbm(params: SbmParams, n: int, seed) -> tuple[Graph, CommunityAssignment]:
    """Draw labels i.i.d. from pi, then each edge independently from gamma_conn."""
    if n < params.K:
        raise InvalidInputError(f"need n >= K, got n={n}, K={params.K}")
    rng = np.random.default_rng(seed)
    z = rng.choice(params.K, size=n, p=params.pi)
    probs = params.gamma_conn[np.ix_(z, z)]
    upper = np.triu(rng.random((n, n)) < probs, k=1)
    adj = (upper | upper.T).astype(np.uint8)
    return Graph.from_adjacency(adj), CommunityAssignment(z, params.K)


def expected_adjacency(params: SbmParams, assignment: CommunityAssignment) -> np.ndarray:
    """Q - diag(Q) with Q = Z Gamma Z^t."""
    q = params.gamma_conn[np.ix_(assignment.z, assignment.z)]
    q = q.copy()
    np.fill_diagonal(q, 0.0)
    return q


def _draw_connection_probs(gamma_row: np.ndarray, s: float, rng) -> np.ndarray:
    """One Beta(mu*s, (1-mu)*s) draw per community; degenerate mu in {0,1} is kept."""
    out = np.empty_like(gamma_row)
    for k, mu in enumerate(gamma_row):
        if mu <= 0.0 or mu >= 1.0:
            out[k] = mu
        else:
            out[k] = rng.beta(mu * s, (1.0 - mu) * s)
    return out


def corrupt(clean: Graph, assignment: CommunityAssignment, params: SbmParams,
            gamma_frac: float, cfg: CorruptionConfig, seed) -> SbmSample:
    """Rewire floor(gamma_frac * n) uniformly chosen outlier nodes.

    Each outlier i gets, per community k, a fresh connection probability drawn
    from a Beta with mean gamma_conn[z[i], k], then every edge from i is
    resampled with that probability.  Edges between two outliers are resampled
    once, using the lower-indexed endpoint's draw.  Inlier-inlier entries are
    never touched.
    """
    if not (0.0 <= gamma_frac < 0.5):
        raise InvalidInputError("gamma_frac must lie in [0, 1/2)")
    n = clean.n
    rng = np.random.default_rng(seed)
    m = int(np.floor(gamma_frac * n))
    outliers = np.sort(rng.choice(n, size=m, replace=False))
    inlier_mask = np.ones(n, dtype=bool)
    inlier_mask[outliers] = False
    inliers = np.flatnonzero(inlier_mask)

    adj = clean.adj.astype(np.uint8).copy()
    z = assignment.z
    for idx, i in enumerate(outliers):
        tilde = _draw_connection_probs(params.gamma_conn[z[i]], cfg.beta_concentration, rng)
        # resample edges to inliers and to higher-indexed outliers only,
        # so each outlier-outlier pair is drawn exactly once
        targets = inlier_mask.copy()
        targets[outliers[idx + 1:]] = True
        targets[i] = False
        draws = (rng.random(n) < tilde[z]).astype(np.uint8)
        adj[i, targets] = draws[targets]
        adj[targets, i] = draws[targets]

    return SbmSample(
        graph=Graph.from_adjacency(adj),
        clean_graph=clean,
        assignment=assignment,
        params=params,
        inliers=inliers,
        outliers=outliers,
        gamma_frac=gamma_frac,
        seed=seed if isinstance(seed, int) else None,
        corruption=cfg,
    )


def make_sample(params: SbmParams, n: int, gamma_frac: float,
                cfg: CorruptionConfig | None = None, *,
                graph_seed, corruption_seed) -> SbmSample:
    """Convenience wrapper: sample a clean SBM graph and corrupt it."""
    cfg = cfg or CorruptionConfig()
    clean, assignment = sample_sbm(params, n, graph_seed)
    return corrupt(clean, assignment, params, gamma_frac, cfg, corruption_seed)
