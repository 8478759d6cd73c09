"""Experiment harness: single runs, corruption sweeps, size sweeps, real graphs.

Every run's randomness is derived from the master seed and the experiment
coordinates, so outputs are reproducible file-for-file and adding a method
never perturbs the others.
"""

from __future__ import annotations

import csv
import json
import logging
import time
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np
import scipy.stats

from . import runner
from .errors import InfeasibleError
from .graph import Graph, load_edge_list
from .runner import METHODS, STOCHASTIC_METHODS, MethodOutcome
from .sbm import CorruptionConfig, SbmParams, SbmSample, make_sample
from .search import SaConfig
from .seeds import derive_seed
from .spectral import ClusteringConfig

logger = logging.getLogger(__name__)

TRACE_FIELDS = ["iter", "temperature", "current_cost", "best_cost",
                "accepted_moves", "subgraph_size", "estimation_error",
                "outliers_in_subset"]

DEFAULT_GAMMA_GRID = [0.10, 0.15, 0.20, 0.25, 0.30, 0.35, 0.40]
DEFAULT_N_GRID = [100, 150, 200, 300, 400]


@dataclass
class ExperimentConfig:
    kind: str = "single"
    n: int = 200
    K: int = 2
    pi: list = field(default_factory=lambda: [0.5, 0.5])
    gamma_conn: list = field(default_factory=lambda: [[0.65, 0.35], [0.35, 0.65]])
    gamma: float = 0.3
    gamma_grid: list = field(default_factory=lambda: list(DEFAULT_GAMMA_GRID))
    n_grid: list = field(default_factory=lambda: list(DEFAULT_N_GRID))
    graphs_per_gamma: int = 10
    runs_per_graph: int = 3
    methods: list = field(default_factory=lambda: list(METHODS))
    sa: SaConfig = field(default_factory=SaConfig)
    beta_concentration: float = 0.1
    num_to_prune: int | None = None
    max_removals: int | None = None
    out_dir: str = "results"
    seed: int = 12345
    # real-graph options
    edge_list: str | None = None
    subgraph_frac: float = 0.9
    time_budget: float | None = None  # seconds for the whole command

    def params(self) -> SbmParams:
        return SbmParams(np.array(self.pi, dtype=float),
                         np.array(self.gamma_conn, dtype=float))

    def corruption(self) -> CorruptionConfig:
        return CorruptionConfig(self.beta_concentration)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        d = dict(d)
        sa = d.pop("sa", None)
        cfg = cls(**d)
        if sa is not None:
            cluster = sa.pop("cluster", None)
            sa_cfg = SaConfig(**sa) if cluster is None else \
                SaConfig(cluster=ClusteringConfig(**cluster), **sa)
            cfg.sa = sa_cfg
        return cfg

    def to_dict(self) -> dict:
        return asdict(self)


def write_trace_csv(path: Path, rows: list) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=TRACE_FIELDS, extrasaction="ignore")
        writer.writeheader()
        for row in rows:
            writer.writerow(row)


def _deadline(cfg: ExperimentConfig) -> float | None:
    if cfg.time_budget is None:
        return None
    return time.monotonic() + cfg.time_budget


def make_cell_sample(cfg: ExperimentConfig, n: int, gamma: float,
                     graph_index: int) -> SbmSample:
    graph_seed = derive_seed(cfg.seed, "graph", n, gamma, graph_index)
    corr_seed = derive_seed(cfg.seed, "corrupt", n, gamma, graph_index)
    return make_sample(cfg.params(), n, gamma, cfg.corruption(),
                       graph_seed=graph_seed, corruption_seed=corr_seed)


def run_cell(cfg: ExperimentConfig, sample: SbmSample, coords: tuple,
             deadline: float | None = None) -> dict:
    """Run every requested method on one sample; stochastic methods keep the
    least-cost of runs_per_graph runs."""
    outcomes: dict[str, MethodOutcome] = {}
    for method in cfg.methods:
        repeats = cfg.runs_per_graph if method in STOCHASTIC_METHODS else 1
        best: MethodOutcome | None = None
        for r in range(repeats):
            seed = derive_seed(cfg.seed, method, *coords, r)
            out = runner.run_method(method, sample, cfg.sa, seed,
                                    max_removals=cfg.max_removals,
                                    num_to_prune=cfg.num_to_prune,
                                    deadline=deadline)
            if best is None or out.cost < best.cost:
                best = out
        outcomes[method] = best
    return outcomes


def cmd_single(cfg: ExperimentConfig) -> Path:
    """One corrupted sample, every method, traces + summary on disk."""
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    sample = make_cell_sample(cfg, cfg.n, cfg.gamma, 0)
    (out_dir / "sample.json").write_text(sample.to_json())
    deadline = _deadline(cfg)

    summary = {"config": cfg.to_dict(), "methods": {}}
    for method in cfg.methods:
        seed = derive_seed(cfg.seed, method, cfg.n, cfg.gamma, 0, 0)
        out = runner.run_method(method, sample, cfg.sa, seed,
                                max_removals=cfg.max_removals,
                                num_to_prune=cfg.num_to_prune,
                                deadline=deadline)
        write_trace_csv(out_dir / f"trace_{method}.csv", out.trace_rows)
        summary["methods"][method] = out.summary()
        if out.search_result is not None:
            summary["methods"][method]["initial_temperature"] = \
                out.search_result.initial_temperature
            summary["methods"][method]["stop_reason"] = \
                out.search_result.stop_reason
        logger.info("%s: cost=%.3f error=%s", method, out.cost,
                    summary["methods"][method].get("estimation_error"))
    path = out_dir / "summary.json"
    path.write_text(json.dumps(summary, indent=2))
    return path


def student_half_width(values: np.ndarray, level: float = 0.95) -> float:
    """t-interval half width; zero for fewer than two values."""
    v = np.asarray(values, dtype=float)
    if v.size < 2:
        return 0.0
    t = scipy.stats.t.ppf(0.5 + level / 2.0, df=v.size - 1)
    return float(t * v.std(ddof=1) / np.sqrt(v.size))


def cmd_sweep_gamma(cfg: ExperimentConfig) -> Path:
    """Mean estimation error per corruption level, with 95% t-intervals."""
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    deadline = _deadline(cfg)
    rows = []
    per_run: dict[tuple, list] = {}
    for gamma in cfg.gamma_grid:
        for gi in range(cfg.graphs_per_gamma):
            sample = make_cell_sample(cfg, cfg.n, gamma, gi)
            cell_dir = out_dir / f"gamma_{gamma:.2f}" / f"graph_{gi}"
            cell_dir.mkdir(parents=True, exist_ok=True)
            (cell_dir / "sample.json").write_text(sample.to_json())
            outcomes = run_cell(cfg, sample, (cfg.n, gamma, gi), deadline)
            cell_summary = {}
            for method, out in outcomes.items():
                write_trace_csv(cell_dir / f"trace_{method}.csv", out.trace_rows)
                cell_summary[method] = out.summary()
                per_run.setdefault((gamma, method), []).append(
                    out.estimation_error)
            (cell_dir / "summary.json").write_text(
                json.dumps(cell_summary, indent=2))
            logger.info("gamma=%.2f graph=%d done", gamma, gi)
    for gamma in cfg.gamma_grid:
        for method in cfg.methods:
            errs = np.array(per_run[(gamma, method)])
            rows.append({
                "gamma": gamma, "method": method,
                "mean_error": float(np.nanmean(errs)),
                "ci95_half_width": student_half_width(errs[~np.isnan(errs)]),
                "count": int(errs.size),
            })
    path = out_dir / "sweep_gamma.csv"
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)
    return path


def fit_loglog_slope(x: np.ndarray, y: np.ndarray) -> float:
    slope, _ = np.polyfit(np.log(x), np.log(y), 1)
    return float(slope)


def cmd_sweep_n(cfg: ExperimentConfig) -> Path:
    """Cost-to-overlap ratio versus graph size, with the fitted log-log slope."""
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    deadline = _deadline(cfg)
    n_grid = sorted(cfg.n_grid)
    ratios: dict[int, list] = {n: [] for n in n_grid}
    for n in n_grid:
        for gi in range(cfg.graphs_per_gamma):
            sample = make_cell_sample(cfg, n, cfg.gamma, gi)
            cell_dir = out_dir / f"n_{n}" / f"graph_{gi}"
            cell_dir.mkdir(parents=True, exist_ok=True)
            best: MethodOutcome | None = None
            for r in range(cfg.runs_per_graph):
                seed = derive_seed(cfg.seed, "subsearch", n, cfg.gamma, gi, r)
                out = runner.run_method("subsearch", sample, cfg.sa, seed,
                                        deadline=deadline)
                if best is None or out.cost < best.cost:
                    best = out
            write_trace_csv(cell_dir / "trace_subsearch.csv", best.trace_rows)
            (cell_dir / "summary.json").write_text(
                json.dumps(best.summary(), indent=2))
            if best.report is not None and np.isfinite(best.report.cost_to_overlap):
                ratios[n].append(best.report.cost_to_overlap)
            logger.info("n=%d graph=%d done", n, gi)
    means = {n: float(np.mean(v)) for n, v in ratios.items() if v}
    xs = np.array(sorted(means))
    ys = np.array([means[n] for n in xs])
    slope = fit_loglog_slope(xs, ys)
    path = out_dir / "sweep_n.csv"
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n", "mean_cost_to_overlap", "count"])
        for n in xs:
            writer.writerow([int(n), means[int(n)], len(ratios[int(n)])])
    (out_dir / "summary.json").write_text(json.dumps(
        {"config": cfg.to_dict(), "loglog_slope": slope,
         "mean_cost_to_overlap": {str(k): v for k, v in means.items()}},
        indent=2))
    return path


def cmd_real(cfg: ExperimentConfig) -> Path:
    """Subgraph search on a real edge-list graph, plus the pruning comparison."""
    if cfg.edge_list is None:
        raise InfeasibleError("real experiment needs an edge-list path")
    g = load_edge_list(cfg.edge_list)
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    deadline = _deadline(cfg)

    size = int(round(cfg.subgraph_frac * g.n))
    gamma_frac = (g.n - size) / g.n
    sa = replace(cfg.sa, gamma_frac=gamma_frac,
                 seed=derive_seed(cfg.seed, "real", "subsearch"))
    out = runner.run_subsearch(g, cfg.K, sa, sample=None, deadline=deadline)
    write_trace_csv(out_dir / "trace_subsearch.csv", out.trace_rows)

    removed = np.setdiff1d(np.arange(g.n), out.subset)
    deg = g.degrees()
    summary = {
        "config": cfg.to_dict(),
        "n": g.n,
        "edge_count": g.edge_count,
        "subgraph_size": size,
        "subsearch": {
            "cost": out.cost,
            "gamma_hat": np.asarray(out.gamma_hat).tolist()
            if out.gamma_hat is not None else None,
            "labels": {str(int(v)): int(l) for v, l in
                       zip(out.partition.union, out.partition.labels())}
            if out.partition is not None else None,
            "removed_nodes": removed.tolist(),
            "kept_degree_hist": np.bincount(deg[out.subset]).tolist(),
            "removed_degree_hist": np.bincount(deg[removed]).tolist()
            if removed.size else [],
        },
    }
    if "pruning" in cfg.methods:
        num = cfg.num_to_prune if cfg.num_to_prune is not None else g.n - size
        pr = runner.run_pruning(g, cfg.K, num,
                                derive_seed(cfg.seed, "real", "pruning"),
                                cluster_cfg=cfg.sa.cluster)
        write_trace_csv(out_dir / "trace_pruning.csv", pr.trace_rows)
        pruned_removed = np.setdiff1d(np.arange(g.n), pr.subset)
        summary["pruning"] = {
            "cost": pr.cost,
            "gamma_hat": np.asarray(pr.gamma_hat).tolist()
            if pr.gamma_hat is not None else None,
            "removed_nodes": pruned_removed.tolist(),
            "kept_degree_hist": np.bincount(deg[pr.subset]).tolist(),
            "removed_degree_hist": np.bincount(deg[pruned_removed]).tolist()
            if pruned_removed.size else [],
        }
    path = out_dir / "summary.json"
    path.write_text(json.dumps(summary, indent=2))
    return path
