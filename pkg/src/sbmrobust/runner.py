"""Method dispatch shared by the CLI and the test harness.

Runs one estimation method on a synthetic sample (or a bare graph) and packages
the ground-truth evaluation plus a serializable trace.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import baselines, metrics, search
from .estimator import PartitionedSubset
from .graph import Graph
from .sbm import SbmSample
from .search import SaConfig, SearchResult

METHODS = ("subsearch", "filtering", "pruning", "oracle")
STOCHASTIC_METHODS = ("subsearch", "filtering")


@dataclass
class MethodOutcome:
    method: str
    cost: float
    subset: np.ndarray
    partition: PartitionedSubset | None
    gamma_hat: np.ndarray | None
    report: metrics.EvalReport | None
    trace_rows: list  # list of dicts, one per iteration
    search_result: SearchResult | None = None

    @property
    def estimation_error(self) -> float:
        return self.report.estimation_error if self.report else float("nan")

    @property
    def outliers_in_subset(self) -> int:
        return self.report.outliers_in_subset if self.report else -1

    def summary(self) -> dict:
        out = {
            "method": self.method,
            "cost": self.cost,
            "subset_size": int(self.subset.size),
        }
        if self.gamma_hat is not None:
            out["gamma_hat"] = np.asarray(self.gamma_hat).tolist()
        if self.report is not None:
            out.update({
                "estimation_error": self.report.estimation_error,
                "outliers_in_subset": self.report.outliers_in_subset,
                "min_overlap": self.report.min_overlap,
                "cost_to_overlap": self.report.cost_to_overlap,
                "bound_rhs": self.report.bound_rhs,
                "bound_holds": self.report.bound_holds,
            })
        return out


def _evaluate(sample: SbmSample | None, partition, gamma_hat):
    if sample is None or partition is None or gamma_hat is None:
        return None
    return metrics.bound_check(sample, partition, gamma_hat)


def _truth_columns(sample: SbmSample | None, partition, gamma_hat):
    if sample is None or partition is None or gamma_hat is None:
        return {}
    sigma = metrics.align_labels(partition, sample.assignment)
    err = metrics.estimation_error(sample.params.gamma_conn, gamma_hat, sigma)
    out = partition.union.size - np.intersect1d(partition.union,
                                                sample.inliers).size
    return {"estimation_error": err, "outliers_in_subset": int(out)}


def run_subsearch(g: Graph, K: int, cfg: SaConfig,
                  sample: SbmSample | None = None,
                  deadline: float | None = None) -> MethodOutcome:
    result = search.run(g, K, cfg, deadline=deadline)
    rows = []
    for row in result.trace:
        d = {"iter": row.outer_iter, "temperature": row.temperature,
             "current_cost": row.current_cost, "best_cost": row.best_cost,
             "accepted_moves": row.accepted_moves,
             "subgraph_size": row.subgraph_size}
        if row.eval is not None:
            d.update(_truth_columns(sample, row.eval.partition,
                                    row.eval.gamma_hat))
        rows.append(d)
    report = _evaluate(sample, result.best_eval.partition,
                       result.best_eval.gamma_hat)
    return MethodOutcome(method="subsearch", cost=result.best_cost,
                         subset=result.best,
                         partition=result.best_eval.partition,
                         gamma_hat=result.best_eval.gamma_hat,
                         report=report, trace_rows=rows, search_result=result)


def run_filtering(g: Graph, K: int, max_removals: int, seed,
                  sample: SbmSample | None = None,
                  cluster_cfg=None) -> MethodOutcome:
    kwargs = {"cluster_cfg": cluster_cfg} if cluster_cfg else {}
    best, trace = baselines.filtering(g, K, max_removals, seed, **kwargs)
    rows = []
    for i, step in enumerate(trace.steps):
        d = {"iter": i, "temperature": 0.0, "current_cost": step.cost,
             "best_cost": min(s.cost for s in trace.steps[:i + 1]),
             "accepted_moves": 0, "subgraph_size": step.size}
        if step.eval is not None:
            d.update(_truth_columns(sample, step.eval.partition,
                                    step.eval.gamma_hat))
        rows.append(d)
    report = _evaluate(sample, best.partition, best.gamma_hat)
    return MethodOutcome(method="filtering", cost=best.cost, subset=best.subset,
                         partition=best.partition, gamma_hat=best.gamma_hat,
                         report=report, trace_rows=rows)


def run_pruning(g: Graph, K: int, num_to_prune: int, seed,
                sample: SbmSample | None = None,
                cluster_cfg=None) -> MethodOutcome:
    kwargs = {"cluster_cfg": cluster_cfg} if cluster_cfg else {}
    res = baselines.pruning(g, K, num_to_prune, seed, **kwargs)
    report = _evaluate(sample, res.partition, res.gamma_hat)
    row = {"iter": 0, "temperature": 0.0, "current_cost": res.cost,
           "best_cost": res.cost, "accepted_moves": 0,
           "subgraph_size": int(res.subset.size)}
    row.update(_truth_columns(sample, res.partition, res.gamma_hat))
    return MethodOutcome(method="pruning", cost=res.cost, subset=res.subset,
                         partition=res.partition, gamma_hat=res.gamma_hat,
                         report=report, trace_rows=[row])


def run_oracle(sample: SbmSample) -> MethodOutcome:
    gh, partition = baselines.oracle_estimate(sample)
    report = metrics.bound_check(sample, partition, gh)
    row = {"iter": 0, "temperature": 0.0, "current_cost": report.cost,
           "best_cost": report.cost, "accepted_moves": 0,
           "subgraph_size": int(partition.union.size),
           "estimation_error": report.estimation_error,
           "outliers_in_subset": report.outliers_in_subset}
    return MethodOutcome(method="oracle", cost=report.cost,
                         subset=partition.union, partition=partition,
                         gamma_hat=gh, report=report, trace_rows=[row])


def run_method(method: str, sample: SbmSample, sa_cfg: SaConfig, seed: int,
               max_removals: int | None = None,
               num_to_prune: int | None = None,
               deadline: float | None = None) -> MethodOutcome:
    """Run one method on a synthetic sample with a per-run seed."""
    g = sample.graph
    n = g.n
    m = int(np.floor(sample.gamma_frac * n))
    if method == "subsearch":
        cfg = replace(sa_cfg, gamma_frac=sample.gamma_frac, seed=seed)
        return run_subsearch(g, sample.params.K, cfg, sample, deadline=deadline)
    if method == "filtering":
        return run_filtering(g, sample.params.K,
                             max_removals if max_removals is not None else n // 2,
                             seed, sample, cluster_cfg=sa_cfg.cluster)
    if method == "pruning":
        return run_pruning(g, sample.params.K,
                           num_to_prune if num_to_prune is not None else m,
                           seed, sample, cluster_cfg=sa_cfg.cluster)
    if method == "oracle":
        return run_oracle(sample)
    raise ValueError(f"unknown method {method!r}")
