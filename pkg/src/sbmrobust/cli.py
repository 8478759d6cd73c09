"""Command-line entry point: single | sweep-gamma | sweep-n | real."""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .errors import InfeasibleError, InvalidInputError
from .experiments import (ExperimentConfig, cmd_real, cmd_single,
                          cmd_sweep_gamma, cmd_sweep_n)

EXIT_OK = 0
EXIT_INFEASIBLE = 1
EXIT_PARSE = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sbmrobust",
        description="Robust block-model connectivity estimation experiments")
    parser.add_argument("--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON file with an ExperimentConfig")
        p.add_argument("--seed", type=int, help="master seed")
        p.add_argument("--n", type=int, help="number of nodes")
        p.add_argument("--k", type=int, help="number of communities")
        p.add_argument("--gamma", type=float, help="corruption fraction")
        p.add_argument("--out-dir", help="output directory")
        p.add_argument("--methods", help="comma-separated method list")
        p.add_argument("--num-to-prune", type=int)
        p.add_argument("--max-removals", type=int)
        p.add_argument("--time-budget", type=float,
                       help="wall-clock budget in seconds")

    p = sub.add_parser("single", help="one corrupted sample, every method")
    common(p)

    p = sub.add_parser("sweep-gamma", help="error versus corruption level")
    common(p)
    p.add_argument("--gamma-grid", help="comma-separated corruption levels")
    p.add_argument("--graphs-per-gamma", type=int)
    p.add_argument("--runs-per-graph", type=int)

    p = sub.add_parser("sweep-n", help="cost-to-overlap ratio versus graph size")
    common(p)
    p.add_argument("--n-grid", help="comma-separated graph sizes")
    p.add_argument("--graphs-per-gamma", type=int,
                   help="graphs per grid point")
    p.add_argument("--runs-per-graph", type=int)

    p = sub.add_parser("real", help="run on an edge-list file")
    common(p)
    p.add_argument("edge_list", help="path to the edge-list file")
    p.add_argument("--subgraph-frac", type=float,
                   help="kept fraction of nodes (default 0.9)")
    return parser


def load_config(args: argparse.Namespace) -> ExperimentConfig:
    data = {}
    if args.config:
        with open(args.config) as fh:
            data = json.load(fh)
    cfg = ExperimentConfig.from_dict(data)
    cfg.kind = args.command
    for attr, key in [("seed", "seed"), ("n", "n"), ("k", "K"),
                      ("gamma", "gamma"), ("out_dir", "out_dir"),
                      ("num_to_prune", "num_to_prune"),
                      ("max_removals", "max_removals"),
                      ("time_budget", "time_budget")]:
        val = getattr(args, attr, None)
        if val is not None:
            setattr(cfg, key, val)
    if getattr(args, "methods", None):
        cfg.methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    if getattr(args, "gamma_grid", None):
        cfg.gamma_grid = [float(x) for x in args.gamma_grid.split(",")]
    if getattr(args, "n_grid", None):
        cfg.n_grid = [int(x) for x in args.n_grid.split(",")]
    if getattr(args, "graphs_per_gamma", None):
        cfg.graphs_per_gamma = args.graphs_per_gamma
    if getattr(args, "runs_per_graph", None):
        cfg.runs_per_graph = args.runs_per_graph
    if getattr(args, "edge_list", None):
        cfg.edge_list = args.edge_list
    if getattr(args, "subgraph_frac", None):
        cfg.subgraph_frac = args.subgraph_frac
    _patch_k(cfg)
    return cfg


def _patch_k(cfg: ExperimentConfig) -> None:
    # a bare --k over the default 2-community model means a uniform prior and
    # a flat connectivity matrix scaled from the defaults' diagonal/off-diagonal
    if cfg.kind != "real" and cfg.K != len(cfg.pi):
        cfg.pi = [1.0 / cfg.K] * cfg.K
        diag, off = 0.65, 0.35
        cfg.gamma_conn = [[diag if i == j else off for j in range(cfg.K)]
                          for i in range(cfg.K)]


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args)
    except (json.JSONDecodeError, OSError, InvalidInputError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        if args.command == "single":
            path = cmd_single(cfg)
        elif args.command == "sweep-gamma":
            path = cmd_sweep_gamma(cfg)
        elif args.command == "sweep-n":
            path = cmd_sweep_n(cfg)
        else:
            path = cmd_real(cfg)
    except InvalidInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    print(path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
