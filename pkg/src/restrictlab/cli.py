"""Command-line front end.

Exit codes: 0 success, 2 input/usage error, 3 exhaustive-search budget refusal.
Every run writes ``<command>.csv`` (per-trial rows) and ``<command>.json``
(spec echo, seed, generator family, constants hash, summary) to ``--out-dir``.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import approximation as ap
from . import invertibility as inv
from . import netsim
from . import suppression as sup
from .constants import CalibrationGrid, calibrate, load_constants, rudelson_instance, write_constants
from .linalg import DenseOperator, InputError, load_matrix
from .operators import make_doubled_onb, make_modified_block, make_untf, parse_family
from .randomness import RngHandle
from .results import write_outputs

log = logging.getLogger("restrictlab")

EXIT_OK, EXIT_INPUT, EXIT_BUDGET = 0, 2, 3


@dataclass
class ExperimentSpec:
    """Everything that determines a run; echoed into result files."""

    command: str
    seed: int = 0
    out_dir: str = "results"
    threads: int = 1
    constants_file: str | None = None
    options: dict = field(default_factory=dict)

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "ExperimentSpec":
        skip = {"command", "seed", "out_dir", "threads", "constants_file", "spec", "func", "verbose"}
        opts = {k: v for k, v in vars(args).items() if k not in skip}
        return cls(args.command, args.seed, args.out_dir, args.threads, args.constants_file, opts)

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "seed": self.seed,
            "out_dir": self.out_dir,
            "threads": self.threads,
            "constants_file": self.constants_file,
            **self.options,
        }


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _u64(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _operator(opts: dict) -> DenseOperator:
    if opts.get("matrix_file"):
        return load_matrix(opts["matrix_file"])
    if not opts.get("family"):
        raise InputError("give --family or --matrix-file")
    return parse_family(opts["family"]).build()


def _constants(spec: ExperimentSpec, required: bool = True):
    try:
        return load_constants(spec.constants_file)
    except InputError:
        if required:
            raise
        return None


# --- subcommands -----------------------------------------------------------


def cmd_suppress(spec: ExperimentSpec):
    o = spec.options
    u = _operator(o)
    rep = sup.estimate_expected_restriction_norm(u, o["n"], o["scheme"], o["trials"], spec.seed, spec.threads)
    consts = _constants(spec, required=False)
    summary = rep.to_dict()
    if consts:
        summary["fitted_ratios"] = {k: (v / consts["C_suppress"] if v is not None else None) for k, v in rep.ratios.items()}
    return ("trial", "size", "norm"), rep.records, summary, consts


def cmd_kt_min(spec: ExperimentSpec):
    o = spec.options
    u = _operator(o)
    rows, summary = [], {"operator": u.label, "n": o["n"], "N": u.cols}
    if o["method"] in ("exhaustive", "both"):
        sigma, val = sup.min_restriction_norm_exhaustive(u, o["n"], o["budget"])
        rows.append(("exhaustive", o["n"], val, " ".join(map(str, sigma))))
        summary["exhaustive"] = {"subset": list(sigma), "norm": val}
    if o["method"] in ("greedy", "both"):
        sigma, val = sup.min_restriction_norm_greedy(u, o["n"])
        rows.append(("greedy", o["n"], val, " ".join(map(str, sigma))))
        summary["greedy"] = {"subset": list(sigma), "norm": val}
    N, h, M = sup.operator_parameters(u)
    summary.update(h=h, M=M, kt_bound=sup.kt_bound(o["n"], N, h), chebyshev_fraction=sup.chebyshev_column_fraction(u))
    return ("method", "n", "norm", "subset"), rows, summary, _constants(spec, required=False)


def cmd_approx(spec: ExperimentSpec):
    o = spec.options
    u = _operator(o)
    consts = _constants(spec, required=False)
    C = consts["C_approx"] if consts else None
    rep = ap.estimate_mean_error(u, o["n"], o["trials"], spec.seed, spec.threads, constant=C)
    summary = rep.to_dict()
    if C and rep.ratio is not None:
        summary["fitted_ratio"] = rep.ratio / C
    return ("trial", "rank", "error"), rep.records, summary, consts


def cmd_tail(spec: ExperimentSpec):
    o = spec.options
    u = _operator(o)
    consts = _constants(spec, required=o.get("C0") is None)
    C0 = o["C0"] if o.get("C0") is not None else consts["C0_tail"]
    rep = ap.estimate_tail(u, o["n"], C0, o["tgrid"], o["trials"], spec.seed, spec.threads)
    return ("trial", "error"), rep.records, rep.to_dict(), consts


def cmd_khinchine(spec: ExperimentSpec):
    o = spec.options
    consts = _constants(spec, required=False)
    rows, worst = [], 0.0
    for i in range(o["instances"]):
        x, y = rudelson_instance(o["m"], o["pairs"], spec.seed, i)
        rep = ap.check_rudelson_inequality(x, y, o["trials"], spec.seed + i, symmetric=o["symmetric"])
        rows.append((i, rep.lhs, rep.rhs, rep.ratio))
        worst = max(worst, rep.ratio)
    key = "C_rudelson_sym" if o["symmetric"] else "C_rudelson"
    summary = {"max_ratio": worst, "constant": consts[key] if consts else None}
    return ("instance", "lhs", "rhs", "ratio"), rows, summary, consts


def cmd_counterexample(spec: ExperimentSpec):
    o = spec.options
    h, k, n = o["h"], o["k"], o["n"]
    rows, held = [], 0
    for d in range(o["draws"]):
        delta = ap.random_low_rank_diagonal(h * k, n, RngHandle(spec.seed, d))
        res = ap.counterexample_lower_bound(h, k, delta, n)
        rows.append((d, res["rank"], res["lhs"], res["rhs"]))
        held += res["holds"]
    refuter = ap.alpha_projection_refuter(h, k, n, o["alphas"], o["budget"])
    summary = {
        "block": {"h": h, "k": k, "n": n, "draws": o["draws"], "held": held},
        "modified_block": {"N": make_modified_block(h, k).cols, "alphas": refuter},
    }
    return ("draw", "rank", "lhs", "rhs"), rows, summary, _constants(spec, required=False)


def cmd_invert(spec: ExperimentSpec):
    o = spec.options
    u = _operator(o)
    if o.get("target"):
        if o["method"] == "greedy":
            cert = inv.best_subset_greedy(u, o["target"])
        else:
            cert = inv.best_subset_exhaustive(u, o["target"], o["budget"])
        points = [{"eps": None, "certificate": cert.to_dict()}]
    else:
        points = inv.tradeoff_curve(u, o["eps_grid"], o["reference"], o["budget"]).points
    rows = []
    for p in points:
        c = p["certificate"]
        rows.append((p["eps"], c["target"], c["c1"], c["c2"], " ".join(map(str, c["sigma"])), c["method"]))
    summary = {"operator": u.label, "points": points}
    return ("eps", "target", "c1", "c2", "subset", "method"), rows, summary, _constants(spec, required=False)


def cmd_framesim(spec: ExperimentSpec):
    o = spec.options
    frame = make_doubled_onb(o["m"], o["k"] // o["m"]) if o["frame"] == "onb" else make_untf(o["m"], o["k"])
    if o["frame"] == "onb" and frame.cols != o["k"]:
        raise InputError("doubled-basis frame needs k to be a multiple of m")
    consts = _constants(spec, required=False)
    C = consts["C_frame"] if consts else None
    rep = netsim.run_campaign(frame, o["delta"], o["trials"], o["tgrid"], spec.seed, C, spec.threads)
    summary = rep.to_dict()
    if o.get("sgrid"):
        summary["binomial"] = netsim.binomial_concentration_check(o["k"], o["delta"], o["sgrid"], o["trials"], spec.seed)
    return ("trial", "size", "operator_error", "relative_error"), rep.records, summary, consts


def cmd_calibrate(spec: ExperimentSpec):
    o = spec.options
    grid = CalibrationGrid.from_dict(json.loads(Path(o["grid"]).read_text())) if o.get("grid") else CalibrationGrid()
    if o.get("calibration_seed") is not None:
        grid.seed = o["calibration_seed"]
    payload = calibrate(grid)
    target = spec.constants_file or str(Path(spec.out_dir) / "constants.json")
    digest = write_constants(payload, target)
    rows = sorted(payload["constants"].items())
    return ("name", "value"), rows, {**payload, "written_to": target, "sha256": digest}, None


COMMANDS = {
    "suppress": cmd_suppress,
    "kt-min": cmd_kt_min,
    "approx": cmd_approx,
    "tail": cmd_tail,
    "khinchine": cmd_khinchine,
    "counterexample": cmd_counterexample,
    "invert": cmd_invert,
    "framesim": cmd_framesim,
    "calibrate": cmd_calibrate,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="restrictlab", description="Random coordinate restriction experiments")
    p.add_argument("--seed", type=_u64, default=0)
    p.add_argument("--out-dir", default="results")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--constants-file", default=None)
    p.add_argument("--spec", default=None, help="JSON file with the run's fields (replaces the command line)")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command")

    def op_args(sp):
        sp.add_argument("--family", help="e.g. block:h=4,k=8 or untf:m=16,k=64,norm=op")
        sp.add_argument("--matrix-file", help="text matrix: 'rows cols' then row-major values")

    s = sub.add_parser("suppress", help="Monte Carlo E||u|sigma||")
    op_args(s)
    s.add_argument("--n", type=float, required=True)
    s.add_argument("--scheme", choices=["fixed", "selectors"], default="selectors")
    s.add_argument("--trials", type=int, default=1000)

    s = sub.add_parser("kt-min", help="minimum restriction norm over |sigma| = n")
    op_args(s)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--method", choices=["exhaustive", "greedy", "both"], default="exhaustive")
    s.add_argument("--budget", type=int, default=sup.DEFAULT_BUDGET)

    s = sub.add_parser("approx", help="random diagonal approximation error")
    op_args(s)
    s.add_argument("--n", type=float, required=True)
    s.add_argument("--trials", type=int, default=1000)

    s = sub.add_parser("tail", help="tail probabilities of the approximation error")
    op_args(s)
    s.add_argument("--n", type=float, required=True)
    s.add_argument("--tgrid", type=_floats, default=[0.2, 0.4, 0.6, 0.8])
    s.add_argument("--trials", type=int, default=1000)
    s.add_argument("--C0", type=float, default=None, help="override the fitted constant")

    s = sub.add_parser("khinchine", help="sign-sum inequality check on random unit vectors")
    s.add_argument("--m", type=int, default=16)
    s.add_argument("--pairs", type=int, default=50)
    s.add_argument("--instances", type=int, default=10)
    s.add_argument("--trials", type=int, default=2000)
    s.add_argument("--symmetric", action="store_true")

    s = sub.add_parser("counterexample", help="block counterexamples")
    s.add_argument("--h", type=int, default=4)
    s.add_argument("--k", type=int, default=64)
    s.add_argument("--n", type=int, default=16)
    s.add_argument("--draws", type=int, default=100)
    s.add_argument("--alphas", type=_floats, default=[0.5, 0.75, 1.0, 1.25, 1.5])
    s.add_argument("--budget", type=int, default=10**6)

    s = sub.add_parser("invert", help="restricted invertibility certificates")
    op_args(s)
    s.add_argument("--target", type=int, default=None)
    s.add_argument("--eps-grid", type=_floats, default=[0.75, 0.5, 0.25])
    s.add_argument("--reference", choices=["norm", "hs"], default="norm")
    s.add_argument("--method", choices=["exhaustive", "greedy"], default="exhaustive")
    s.add_argument("--budget", type=int, default=sup.DEFAULT_BUDGET)

    s = sub.add_parser("framesim", help="lossy frame transmission campaign")
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--delta", type=float, required=True)
    s.add_argument("--trials", type=int, default=1000)
    s.add_argument("--tgrid", type=_floats, default=[0.2, 0.5, 0.8])
    s.add_argument("--sgrid", type=_floats, default=None, help="binomial deviations to check")
    s.add_argument("--frame", choices=["harmonic", "onb"], default="harmonic")

    s = sub.add_parser("calibrate", help="fit the constants file")
    s.add_argument("--grid", default=None, help="JSON calibration grid")
    s.add_argument("--calibration-seed", type=_u64, default=None)
    return p


def spec_to_argv(data: dict) -> list[str]:
    """Turn a JSON spec into command-line arguments."""
    data = dict(data)
    if "command" not in data:
        raise InputError("spec file needs a 'command' field")
    command = data.pop("command")
    globals_, local = [], []
    for key, value in data.items():
        if value is None or value is False:
            continue
        flag = "--" + key.replace("_", "-")
        target = globals_ if key in ("seed", "out_dir", "threads", "constants_file") else local
        if value is True:
            target.append(flag)
        elif isinstance(value, list):
            target += [flag, ",".join(str(v) for v in value)]
        else:
            target += [flag, str(value)]
    return globals_ + [command] + local


def run(spec: ExperimentSpec) -> tuple[Path, Path]:
    start = time.perf_counter()
    header, rows, summary, consts = COMMANDS[spec.command](spec)
    elapsed = time.perf_counter() - start
    stem = spec.command.replace("-", "_")
    return write_outputs(
        spec.out_dir, stem, header, rows, summary, spec.to_dict(), consts.sha256 if consts else None, elapsed
    )


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parser.parse_args(argv)
        if args.spec:
            data = json.loads(Path(args.spec).read_text())
            args = parser.parse_args(spec_to_argv(data))
    except SystemExit as exc:
        return int(exc.code or 0) and EXIT_INPUT
    except (OSError, json.JSONDecodeError, InputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    if not args.command:
        parser.print_usage(sys.stderr)
        return EXIT_INPUT
    spec = ExperimentSpec.from_args(args)
    try:
        csv_path, json_path = run(spec)
    except sup.BudgetExceeded as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    log.info("wrote %s and %s", csv_path, json_path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
