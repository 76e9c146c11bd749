#!/usr/bin/env python3
"""Run the full simulation-study matrix and print a summary table.

For each similarity distribution and each comparison budget, both the
adaptive and the uniform policy are simulated over seeded replicates and
scored against the theoretical ranking. Per-cell CSV outputs land in
subdirectories of --out-dir.

    python3 scripts/run_simulation_study.py --replicates 50 --jobs 8
"""

import argparse
from pathlib import Path

import numpy as np

from pairrank.experiment import (
    COEFFICIENTS,
    ExperimentConfig,
    run_experiment,
    sample_cosine_values,
    write_outputs,
)


def format_cell(summary):
    parts = []
    for name in COEFFICIENTS:
        sd = summary.sd[name]
        sd_text = "  n/a " if sd is None else f"{sd:.4f}"
        parts.append(f"{summary.mean[name]:+.4f}({sd_text})")
    return "  ".join(parts)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--replicates", type=int, default=50)
    parser.add_argument("--seed", type=int, default=101)
    parser.add_argument("--jobs", type=int, default=1)
    parser.add_argument("--out-dir", default="study_out")
    parser.add_argument("--m", type=int, nargs="+", default=[20, 40],
                        help="per-ballot appearance budgets to run (default: 20 40)")
    parser.add_argument("--embedding-file", default=None,
                        help="similarity file for the embedding-style row "
                             "(default: generate a synthetic cosine sample)")
    parser.add_argument("--skip-embedding", action="store_true")
    args = parser.parse_args()

    out_root = Path(args.out_dir)
    out_root.mkdir(parents=True, exist_ok=True)

    distributions: list[tuple[str, str, str | None]] = [
        ("exponential", "exponential", None),
        ("power_law", "power_law", None),
    ]
    if not args.skip_embedding:
        if args.embedding_file is None:
            path = out_root / "cosines.txt"
            values = sample_cosine_values(45, 64, 1.0, np.random.default_rng(12345))
            path.write_text("\n".join(repr(float(v)) for v in values))
            embedding_file = str(path)
        else:
            embedding_file = args.embedding_file
        distributions.append(("embedding", "file", embedding_file))

    header = "  ".join(f"{name:>16s}" for name in COEFFICIENTS)
    print(f"{'cell':<34s}{header}")
    for label, dist, similarity_file in distributions:
        for m in args.m:
            for policy in ("uniform", "adaptive"):
                cfg = ExperimentConfig(
                    m=m,
                    policy=policy,
                    distribution=dist,
                    similarity_file=similarity_file,
                    replicates=args.replicates,
                    seed=args.seed,
                    n_jobs=args.jobs,
                    out_dir=str(out_root / f"{label}_m{m}_{policy}"),
                )
                summary = run_experiment(cfg)
                write_outputs(summary)
                print(f"{label:<12s} m={m:<3d} {policy:<9s}  {format_cell(summary)}")
    print(f"\nper-cell CSVs under {out_root}/")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
