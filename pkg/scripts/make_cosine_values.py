#!/usr/bin/env python3
"""Write a synthetic embedding-style similarity file.

Samples pairwise cosines of clustered random unit vectors and writes one
value per line, ready for the 'file' distribution kind:

    python3 scripts/make_cosine_values.py --out cosines.txt --seed 12345
"""

import argparse

import numpy as np

from pairrank.experiment import sample_cosine_values


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", required=True, help="output file path")
    parser.add_argument("--n-tokens", type=int, default=45,
                        help="tokens to sample; yields n*(n-1)/2 values (default 45 -> 990)")
    parser.add_argument("--dim", type=int, default=64)
    parser.add_argument("--spread", type=float, default=1.0,
                        help="scatter of token vectors around the cluster center")
    parser.add_argument("--seed", type=int, default=12345)
    args = parser.parse_args()

    values = sample_cosine_values(args.n_tokens, args.dim, args.spread,
                                  np.random.default_rng(args.seed))
    with open(args.out, "w") as fh:
        fh.write(f"# {len(values)} pairwise cosines of {args.n_tokens} clustered unit vectors\n")
        for v in values:
            fh.write(f"{float(v)!r}\n")
    print(f"wrote {len(values)} values to {args.out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
