"""Refit the constants file and show how much slack each acceptance check keeps.

    python scripts/run_calibration.py --out src/restrictlab/data/constants.json
"""

import argparse
import json

from restrictlab.constants import CalibrationGrid, calibrate, write_constants


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--out", required=True)
    p.add_argument("--grid", help="JSON calibration grid (defaults to the built-in one)")
    p.add_argument("--seed", type=int, default=None)
    args = p.parse_args()

    grid = CalibrationGrid.from_dict(json.load(open(args.grid))) if args.grid else CalibrationGrid()
    if args.seed is not None:
        grid.seed = args.seed
    payload = calibrate(grid)
    digest = write_constants(payload, args.out)
    for name, value in sorted(payload["constants"].items()):
        print(f"{name:16s} {value:10.6f}   (observed {payload['observed'][name]:.6f})")
    print(f"sha256 {digest}")


if __name__ == "__main__":
    main()
