"""Run a size ladder through the full pipeline and print the report.

    python scripts/run_ladder.py --family grid2d --sizes 8,16,32 --out runs/grid
"""

import argparse
import sys

from flowspec.experiment import ExperimentConfig, run_experiment


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--family", default="grid2d")
    ap.add_argument("--sizes", default="8,16,32")
    ap.add_argument("--iters", type=int, default=100)
    ap.add_argument("--trials", type=int, default=128)
    ap.add_argument("--partition", default="ckr", choices=("ckr", "chop"))
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--csv")
    ap.add_argument("--timings", action="store_true")
    args = ap.parse_args()
    cfg = ExperimentConfig(
        family=args.family, sizes=tuple(int(x) for x in args.sizes.split(",")),
        max_iters=args.iters, trials=args.trials, partition_source=args.partition,
        seed=args.seed, csv_path=args.csv, timings=args.timings,
    )
    _, report, table = run_experiment(cfg)
    sys.stdout.write(report.to_text())
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write(table)


if __name__ == "__main__":
    main()
