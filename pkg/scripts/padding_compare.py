"""Measured padding of CKR and chopping partitions on grid hop metrics."""

import argparse

import numpy as np

from flowspec.generators import generate
from flowspec.partition import estimate_padding, partition_sampler
from flowspec.paths import all_pairs_metric


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--family", default="grid2d")
    ap.add_argument("--size", type=int, default=8)
    ap.add_argument("--deltas", default="2,3,4,6,8")
    ap.add_argument("--samples", type=int, default=200)
    args = ap.parse_args()
    g = generate(args.family, args.size)
    metric = all_pairs_metric(g, np.full(g.n, 0.5))
    for delta in map(float, args.deltas.split(",")):
        parts = []
        for source in ("ckr", "chop"):
            est = estimate_padding(metric, delta, partition_sampler(source, metric, delta, g), args.samples)
            parts.append(f"{source} alpha_hat={est.alpha_hat:.3f}")
        print(f"delta={delta}: " + "  ".join(parts))


if __name__ == "__main__":
    main()
