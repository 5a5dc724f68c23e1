"""Failure curves of lossy harmonic-frame transmission over a grid of delivery rates.

For each delta, prints P(operator error >= t) with Wilson intervals next to
6 exp(-t^2/eps^2) at the fitted constant.
"""

import argparse

from restrictlab.constants import load_constants
from restrictlab.netsim import run_campaign
from restrictlab.operators import make_untf
from restrictlab.results import csv_text


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--m", type=int, default=16)
    p.add_argument("--k", type=int, default=64)
    p.add_argument("--deltas", type=float, nargs="+", default=[0.25, 0.5, 0.75, 0.9])
    p.add_argument("--tgrid", type=float, nargs="+", default=[0.2, 0.4, 0.6, 0.8, 1.0])
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()

    frame = make_untf(args.m, args.k)
    C = load_constants()["C_frame"]
    rows = []
    for delta in args.deltas:
        rep = run_campaign(frame, delta, args.trials, args.tgrid, args.seed, C)
        for pt in rep.points:
            rows.append([delta, pt["t"], pt["frequency"], pt["wilson_lo"], pt["wilson_hi"], pt["bound"], rep.total_losses])
    print(csv_text(["delta", "t", "failure", "wilson_lo", "wilson_hi", "bound", "total_losses"], rows), end="")


if __name__ == "__main__":
    main()
