"""Best restricted condition number against eps for a few operators.

The empirical condition at cardinality (1 - eps) N / |u|^2 is printed next to
the shape eps^-2 log(1/eps); no constant is fitted.
"""

import argparse

from restrictlab.invertibility import tradeoff_curve
from restrictlab.operators import parse_family

DEFAULT = ["gaussian:m=8,N=16,seed=0", "gaussian:m=6,N=18,seed=1", "arc:b=1/2,K=5,M=32", "arc:b=1/4,K=6,M=32"]


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--family", nargs="+", default=DEFAULT)
    p.add_argument("--eps", type=float, nargs="+", default=[0.9, 0.75, 0.5, 0.3, 0.2])
    p.add_argument("--reference", choices=["norm", "hs"], default="norm")
    p.add_argument("--budget", type=int, default=200_000)
    args = p.parse_args()

    print("family,eps,target,condition,method,shape")
    for fam in args.family:
        curve = tradeoff_curve(parse_family(fam).build(), args.eps, args.reference, args.budget)
        for pt in curve.points:
            c = pt["certificate"]
            print(f"{fam!r},{pt['eps']},{c['target']},{c['condition']},{c['method']},{pt['shape']}")


if __name__ == "__main__":
    main()
