"""Mean restriction norm of block operators over a grid of n, with every bound ratio.

    python scripts/suppression_sweep.py --h 8 16 --k 8 16 --trials 2000 --out results/sweep.csv
"""

import argparse
import math

from restrictlab.constants import load_constants
from restrictlab.operators import make_block
from restrictlab.results import csv_text
from restrictlab.suppression import estimate_expected_restriction_norm


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--h", type=int, nargs="+", default=[8, 16])
    p.add_argument("--k", type=int, nargs="+", default=[8, 16])
    p.add_argument("--points", type=int, default=8, help="n values per operator (log-spaced)")
    p.add_argument("--scheme", choices=["selectors", "fixed"], default="selectors")
    p.add_argument("--trials", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="-")
    args = p.parse_args()

    C = load_constants()["C_suppress"]
    header = ["h", "k", "N", "n", "mean", "q95", "kt", "random_subset", "fixed_size", "log_h", "fitted_random_subset"]
    rows = []
    for h in args.h:
        for k in args.k:
            u = make_block(h, k)
            N = u.cols
            ns = sorted({max(2, round(math.exp(i * math.log(N) / (args.points - 1)))) for i in range(args.points)})
            for n in ns:
                r = estimate_expected_restriction_norm(u, n, args.scheme, args.trials, args.seed)
                rs = r.ratios
                rows.append([h, k, N, n, r.summary.mean, r.summary.q95, rs["kt"], rs["random_subset"], rs["fixed_size"], rs["log_h"], rs["random_subset"] / C])
    text = csv_text(header, rows)
    if args.out == "-":
        print(text, end="")
    else:
        with open(args.out, "w") as fh:
            fh.write(text)


if __name__ == "__main__":
    main()
