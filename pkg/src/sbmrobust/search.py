"""Simulated annealing over connected subgraphs of fixed size."""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import InfeasibleError, InvalidInputError, StuckNeighborhoodError
from .estimator import CostCache, CostResult, cost
from .graph import Graph, submatrix_is_connected
from .spectral import ClusteringConfig

logger = logging.getLogger(__name__)

NEIGHBOR_MAX_RETRIES = 100
TEMP_PROBE_LENGTH = 100
TEMP_PROBE_TARGET = 0.95
TEMP_GROWTH = 1.5
TEMP_MAX_DOUBLINGS = 40


@dataclass(frozen=True)
class SaConfig:
    """Annealing hyperparameters; defaults follow the reference experiments."""

    gamma_frac: float = 0.3
    cooling_rate: float = 0.99
    chain_length: int | None = None  # default: floor(gamma_frac * n)
    t_max: int = 1000
    t_tol: int = 25
    epsilon: float = 1e-4
    seed: int = 12345
    schedule: str = "geometric"  # or "logarithmic"
    log_c: float = 1.0
    log_t0: float = 1.0
    cluster: ClusteringConfig = field(default_factory=ClusteringConfig)

    def __post_init__(self):
        if not (0.0 < self.cooling_rate < 1.0):
            raise InvalidInputError("cooling_rate must lie in (0, 1)")
        if self.epsilon <= 0 or self.t_tol < 1:
            raise InvalidInputError("epsilon must be > 0 and t_tol >= 1")
        if self.schedule not in ("geometric", "logarithmic"):
            raise InvalidInputError(f"unknown schedule {self.schedule!r}")


@dataclass
class TraceRow:
    outer_iter: int
    temperature: float
    current_cost: float
    best_cost: float
    accepted_moves: int
    subgraph_size: int
    # end-of-chain state, kept so harnesses can append ground-truth columns
    subset: np.ndarray | None = None
    eval: CostResult | None = None


@dataclass
class SearchResult:
    best: np.ndarray
    best_cost: float
    best_eval: CostResult
    trace: list
    initial_temperature: float
    stopped_early: bool
    stop_reason: str


def acceptance_probability(delta: float, temperature: float) -> float:
    """min(1, exp(delta / T)); improving moves (delta >= 0) always pass."""
    if temperature <= 0:
        raise InvalidInputError("temperature must be positive")
    if delta >= 0:
        return 1.0
    try:
        return math.exp(delta / temperature)
    except OverflowError:
        return 0.0


def initial_subgraph(g: Graph, size: int, rng) -> np.ndarray:
    """Random connected subset grown by randomized BFS inside the largest component."""
    rng = np.random.default_rng(rng)
    comps = g.connected_components()
    largest = comps[0]
    if len(largest) < size:
        raise InfeasibleError(
            f"largest component has {len(largest)} nodes, need {size}")
    start = largest[rng.integers(len(largest))]
    chosen = {start}
    boundary = set(int(v) for v in g.neighbors[start])
    while len(chosen) < size:
        cand = sorted(boundary)
        pick = cand[rng.integers(len(cand))]
        chosen.add(pick)
        boundary.discard(pick)
        for v in g.neighbors[pick]:
            v = int(v)
            if v not in chosen:
                boundary.add(v)
    return np.array(sorted(chosen), dtype=np.int64)


def neighbor(g: Graph, s: np.ndarray, rng) -> np.ndarray:
    """Swap one inside node for an adjacent outside node, keeping connectivity.

    Pairs (remove i, insert j) are drawn uniformly among those where j has a
    neighbor in s minus {i}; disconnected candidates are rejected and redrawn
    up to NEIGHBOR_MAX_RETRIES times.
    """
    if s.size >= g.n:
        raise InvalidInputError("subset already covers the whole graph")
    rng = np.random.default_rng(rng)
    outside = np.setdiff1d(np.arange(g.n), s)
    # counts of each outside node's neighbors inside s
    links = g.adj[np.ix_(outside, s)]
    inside_counts = links.sum(axis=1, dtype=np.int64)
    # valid[j_idx, i_idx]: j still touches s \ {i}
    valid = (inside_counts[:, None] - links) >= 1
    pairs = np.argwhere(valid)
    if pairs.size == 0:
        raise StuckNeighborhoodError("no boundary swap available")
    order = rng.permutation(pairs.shape[0])
    for attempt, idx in enumerate(order):
        if attempt >= NEIGHBOR_MAX_RETRIES:
            break
        j_idx, i_idx = pairs[idx]
        candidate = s.copy()
        candidate[i_idx] = outside[j_idx]
        candidate.sort()
        if submatrix_is_connected(g.induced_adjacency(candidate)):
            return candidate
    raise StuckNeighborhoodError(
        f"no connected swap found in {NEIGHBOR_MAX_RETRIES} attempts")


def set_initial_temp(g: Graph, s0: np.ndarray, K: int, rng,
                     cache: CostCache | None = None,
                     cluster_cfg: ClusteringConfig = ClusteringConfig()) -> float:
    """Grow T from 1 by factors of 1.5 until a probe chain accepts nearly all moves.

    Probe chains are Metropolis walks of TEMP_PROBE_LENGTH steps that do not
    advance the main search state.
    """
    rng = np.random.default_rng(rng)
    cache = cache if cache is not None else CostCache()
    temp = 1.0
    for _ in range(TEMP_MAX_DOUBLINGS):
        if _probe_acceptance_rate(g, s0, K, temp, rng, cache, cluster_cfg) \
                >= TEMP_PROBE_TARGET:
            return temp
        temp *= TEMP_GROWTH
    logger.warning("initial-temperature search hit the cap at T=%.3g", temp)
    return temp


def _probe_acceptance_rate(g, s0, K, temp, rng, cache, cluster_cfg) -> float:
    current = s0
    current_cost = cost(g, current, K, cache, cluster_cfg).cost
    accepted = 0
    for _ in range(TEMP_PROBE_LENGTH):
        try:
            candidate = neighbor(g, current, rng)
        except StuckNeighborhoodError:
            continue
        cand_cost = cost(g, candidate, K, cache, cluster_cfg).cost
        delta = current_cost - cand_cost
        if rng.random() < acceptance_probability(delta, temp):
            accepted += 1
            current, current_cost = candidate, cand_cost
    return accepted / TEMP_PROBE_LENGTH


def _temperature(cfg: SaConfig, t0: float, t: int) -> float:
    """Temperature for outer iteration t = 1, 2, ...; the first chain runs at t0."""
    if cfg.schedule == "geometric":
        return t0 * cfg.cooling_rate ** (t - 1)
    return cfg.log_c / math.log(t + cfg.log_t0)


def run(g: Graph, K: int, cfg: SaConfig,
        deadline: float | None = None) -> SearchResult:
    """Full annealing loop; returns the best subgraph ever visited plus the trace.

    ``deadline`` (time.monotonic() value) triggers a graceful stop between
    outer iterations when the wall-clock budget runs out.
    """
    size = g.n - int(np.floor(cfg.gamma_frac * g.n))
    chain_len = cfg.chain_length
    if chain_len is None:
        chain_len = max(1, int(np.floor(cfg.gamma_frac * g.n)))
    rng = np.random.default_rng(cfg.seed)
    cache = CostCache(run_seed=cfg.seed)

    current = initial_subgraph(g, size, rng)
    current_eval = cost(g, current, K, cache, cfg.cluster)
    best, best_eval = current, current_eval

    if size == g.n or cfg.gamma_frac == 0.0:
        return SearchResult(best=current, best_cost=current_eval.cost,
                            best_eval=current_eval, trace=[
                                TraceRow(0, 0.0, current_eval.cost,
                                         current_eval.cost, 0, size,
                                         subset=current, eval=current_eval)],
                            initial_temperature=0.0, stopped_early=False,
                            stop_reason="full graph")

    t0 = set_initial_temp(g, current, K, rng, cache, cfg.cluster)
    trace: list[TraceRow] = []
    end_costs: list[float] = []
    stopped_early, stop_reason = False, "t_max reached"

    for t in range(1, cfg.t_max + 1):
        temp = _temperature(cfg, t0, t)
        accepted = 0
        for _ in range(chain_len):
            try:
                candidate = neighbor(g, current, rng)
            except StuckNeighborhoodError:
                logger.warning("stuck neighborhood at iteration %d; resampling", t)
                current = initial_subgraph(g, size, rng)
                current_eval = cost(g, current, K, cache, cfg.cluster)
                continue
            cand_eval = cost(g, candidate, K, cache, cfg.cluster)
            delta = current_eval.cost - cand_eval.cost
            if rng.random() < acceptance_probability(delta, temp):
                accepted += 1
                current, current_eval = candidate, cand_eval
                if current_eval.cost < best_eval.cost:
                    best, best_eval = current, current_eval
        trace.append(TraceRow(t, temp, current_eval.cost, best_eval.cost,
                              accepted, size, subset=current, eval=current_eval))
        end_costs.append(current_eval.cost)
        if len(end_costs) >= cfg.t_tol:
            window = end_costs[-cfg.t_tol:]
            if max(window) - min(window) < cfg.epsilon:
                stopped_early, stop_reason = True, "cost stabilized"
                break
        if deadline is not None and time.monotonic() > deadline:
            stopped_early, stop_reason = True, "time budget exhausted"
            break

    return SearchResult(best=best, best_cost=best_eval.cost, best_eval=best_eval,
                        trace=trace, initial_temperature=t0,
                        stopped_early=stopped_early, stop_reason=stop_reason)
