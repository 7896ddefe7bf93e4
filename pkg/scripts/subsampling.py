"""Mean intersection count of terminal-subsampled flows against the p^4 law."""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))

from fixtures import k6_in_grid  # noqa: E402
from flowspec.integral import intersection_number, subsample_experiment  # noqa: E402


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--samples", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    flow = k6_in_grid()
    print(f"base inter = {intersection_number(flow)}")
    for p in (0.3, 0.5, 0.7, 0.9):
        st = subsample_experiment(flow, p, args.samples, args.seed)
        print(f"p={p}: mean={st.mean:.4f} expected={st.expected:.4f} se={st.std_error:.4f} |z|={st.z_score:.2f}")


if __name__ == "__main__":
    main()
