"""Command-line interface: simulate, metrics, plan, and cost subcommands."""

from __future__ import annotations

import argparse
import sys

from .experiment import COEFFICIENTS, config_from_file, run_experiment, write_outputs
from .metrics import coefficient_suite, read_ranking_csv
from .protocol import (
    ProtocolParams,
    ballot_sizes,
    estimate_cost,
    top_rank_presentations,
    total_comparisons,
    validate_params,
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pairrank",
        description="Adaptive pairwise-comparison ranking toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a simulated vote collection from a config file")
    sim.add_argument("--config", help="key = value config file")
    sim.add_argument("--seed", type=int, help="override the base seed")
    sim.add_argument("--out-dir", help="override the output directory")
    sim.add_argument("--policy", choices=("adaptive", "uniform"))
    sim.add_argument("--distribution", choices=("exponential", "power_law", "file"))
    sim.add_argument("--similarity-file")
    sim.add_argument("--mode", choices=("similarity", "relatedness"))
    sim.add_argument("--reference", choices=("similarity", "relatedness"))
    sim.add_argument("--replicates", type=int)
    sim.add_argument("--n-items", type=int)
    sim.add_argument("--m", type=int)
    sim.add_argument("--alpha", type=float)
    sim.add_argument("--ballots", type=int, dest="n_ballots")
    sim.add_argument("--n-voters", type=int)
    sim.add_argument("--n0", type=int)
    sim.add_argument("--jobs", type=int, dest="n_jobs")

    met = sub.add_parser("metrics", help="rank-correlation coefficients of two ranking CSVs")
    met.add_argument("ranking_a")
    met.add_argument("ranking_b")
    met.add_argument("--n0", type=int, default=2, help="weight offset (default 2)")

    plan = sub.add_parser("plan", help="ballot schedule and diagnostics for given parameters")
    plan.add_argument("--n-items", type=int, required=True)
    plan.add_argument("--m", type=int, required=True)
    plan.add_argument("--alpha", type=float, required=True)
    plan.add_argument("--ballots", type=int, required=True)
    plan.add_argument("--policy", choices=("adaptive", "uniform"), default="adaptive")

    cost = sub.add_parser("cost", help="person-hours estimate for a comparison budget")
    cost.add_argument("--seconds-per-comparison", type=float, required=True)
    cost.add_argument("--comparisons", type=int, required=True)

    return parser


_OVERRIDE_KEYS = (
    "seed", "out_dir", "policy", "distribution", "similarity_file", "mode",
    "reference", "replicates", "n_items", "m", "alpha", "n_ballots",
    "n_voters", "n0", "n_jobs",
)


def _cmd_simulate(args) -> int:
    overrides = {
        key: getattr(args, key)
        for key in _OVERRIDE_KEYS
        if getattr(args, key, None) is not None
    }
    cfg = config_from_file(args.config, overrides)
    summary = run_experiment(cfg)
    out = write_outputs(summary)
    for name in COEFFICIENTS:
        sd = summary.sd[name]
        sd_text = "n/a" if sd is None else f"{sd:.6f}"
        print(f"{name}: mean={summary.mean[name]:.6f} sd={sd_text}")
    print(f"outputs written to {out}")
    return 0


def _cmd_metrics(args) -> int:
    ranks_a, _ = read_ranking_csv(args.ranking_a)
    ranks_b, _ = read_ranking_csv(args.ranking_b)
    if ranks_a.size != ranks_b.size:
        raise ValueError("the two ranking files cover different numbers of items")
    for name, value in coefficient_suite(ranks_a, ranks_b, args.n0).items():
        print(f"{name} {value:.6f}")
    return 0


def _cmd_plan(args) -> int:
    params = ProtocolParams(args.n_items, args.m, args.alpha, args.ballots)
    diagnostics = validate_params(params, policy=args.policy)
    errors = [d for d in diagnostics if d.level == "error"]
    for diag in diagnostics:
        print(f"{diag.level}: {diag.message}")
    if errors:
        return 1
    sizes = ballot_sizes(params)
    print("ballot sizes: " + " ".join(str(s) for s in sizes))
    print(f"total comparisons: {total_comparisons(params)}")
    print(f"top-rank presentations: {top_rank_presentations(params)}")
    if not diagnostics:
        print("diagnostics: none")
    return 0


def _cmd_cost(args) -> int:
    hours = estimate_cost(args.seconds_per_comparison, args.comparisons)
    print(f"estimated cost: {hours:.4f} person-hours")
    return 0


_COMMANDS = {
    "simulate": _cmd_simulate,
    "metrics": _cmd_metrics,
    "plan": _cmd_plan,
    "cost": _cmd_cost,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
