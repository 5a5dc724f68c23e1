import csv
import json

import numpy as np
import pytest

from restrictlab.cli import main, spec_to_argv
from restrictlab.linalg import DenseOperator, save_matrix
from restrictlab.constants import load_constants


def rows(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_suppress_identity(tmp_path):
    code = main(["--out-dir", str(tmp_path), "suppress", "--family", "identity:N=8", "--n", "3", "--scheme", "fixed", "--trials", "10"])
    assert code == 0
    r = rows(tmp_path / "suppress.csv")
    assert len(r) == 10 and all(float(x["norm"]) == pytest.approx(1.0) for x in r)
    meta = json.loads((tmp_path / "suppress.json").read_text())
    assert meta["seed"] == 0 and meta["spec"]["command"] == "suppress"
    assert meta["constants_sha256"] == load_constants().sha256
    assert "fitted_ratios" in meta["summary"]
    assert meta["wall_clock_seconds"] >= 0


def test_kt_min_block(tmp_path):
    assert main(["--out-dir", str(tmp_path), "kt-min", "--family", "block:h=2,k=2", "--n", "2", "--method", "both"]) == 0
    r = rows(tmp_path / "kt_min.csv")
    assert [x["method"] for x in r] == ["exhaustive", "greedy"]
    assert all(round(float(x["norm"]), 6) == 0.707107 for x in r)


def test_framesim_full_delivery(tmp_path):
    assert main(["--out-dir", str(tmp_path), "framesim", "--m", "2", "--k", "4", "--delta", "1", "--trials", "5"]) == 0
    r = rows(tmp_path / "framesim.csv")
    assert len(r) == 5 and all(float(x["operator_error"]) <= 1e-10 for x in r)


@pytest.mark.parametrize(
    "argv",
    [
        ["suppress", "--family", "nothing:x=1", "--n", "2"],
        ["suppress", "--n", "2"],
        ["kt-min", "--family", "block:h=2,k=2", "--n", "2", "--bogus"],
        ["frobnicate"],
        [],
        ["tail", "--family", "untf:m=4,k=8", "--n", "4", "--tgrid", "1.5", "--trials", "5"],
        ["--seed", "-4", "approx", "--family", "block:h=2,k=2", "--n", "2"],
        ["--spec", "/nonexistent/spec.json"],
        ["--constants-file", "/nonexistent/c.json", "tail", "--family", "untf:m=4,k=8", "--n", "4", "--trials", "5"],
    ],
)
def test_input_errors_exit_2(tmp_path, argv):
    assert main(["--out-dir", str(tmp_path)] + argv) == 2


def test_budget_refusal_exit_3(tmp_path):
    code = main(["--out-dir", str(tmp_path), "kt-min", "--family", "gaussian:m=3,N=30", "--n", "15", "--budget", "1000"])
    assert code == 3
    code = main(["--out-dir", str(tmp_path), "counterexample", "--h", "4", "--k", "64", "--n", "16", "--budget", "10"])
    assert code == 3


def test_matrix_file_input(tmp_path):
    path = tmp_path / "u.txt"
    save_matrix(DenseOperator(np.eye(3)), path)
    assert main(["--out-dir", str(tmp_path), "kt-min", "--matrix-file", str(path), "--n", "2"]) == 0
    assert float(rows(tmp_path / "kt_min.csv")[0]["norm"]) == pytest.approx(1.0)


def test_spec_file_equivalent_to_flags(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    argv = ["--seed", "17", "--out-dir", str(a), "approx", "--family", "untf:m=4,k=12", "--n", "6", "--trials", "40"]
    assert main(argv) == 0
    spec = json.loads((a / "approx.json").read_text())["spec"]
    spec["out_dir"] = str(b)
    (tmp_path / "spec.json").write_text(json.dumps(spec))
    assert main(["--spec", str(tmp_path / "spec.json")]) == 0
    assert (a / "approx.csv").read_bytes() == (b / "approx.csv").read_bytes()


def test_spec_to_argv_shapes():
    argv = spec_to_argv({"command": "tail", "seed": 3, "tgrid": [0.2, 0.4], "symmetric": False, "C0": None, "n": 4})
    assert argv == ["--seed", "3", "tail", "--tgrid", "0.2,0.4", "--n", "4"]


COMMANDS = [
    ["suppress", "--family", "block:h=3,k=3", "--n", "4", "--trials", "30"],
    ["kt-min", "--family", "gaussian:m=3,N=8,seed=2", "--n", "3", "--method", "both"],
    ["approx", "--family", "block:h=3,k=4", "--n", "4", "--trials", "30"],
    ["tail", "--family", "untf:m=4,k=12", "--n", "8", "--trials", "30"],
    ["khinchine", "--m", "4", "--pairs", "6", "--instances", "3", "--trials", "20"],
    ["khinchine", "--m", "4", "--pairs", "6", "--instances", "2", "--trials", "20", "--symmetric"],
    ["counterexample", "--h", "2", "--k", "8", "--n", "4", "--draws", "10", "--alphas", "0.5,1"],
    ["invert", "--family", "gaussian:m=4,N=8,seed=1", "--eps-grid", "0.5,0.25"],
    ["invert", "--family", "arc:b=1/2,K=3,M=16", "--target", "3", "--method", "greedy"],
    ["framesim", "--m", "4", "--k", "8", "--delta", "0.5", "--trials", "30", "--sgrid", "1,2"],
    ["framesim", "--m", "2", "--k", "4", "--delta", "0.5", "--trials", "30", "--frame", "onb"],
]


@pytest.mark.parametrize("argv", COMMANDS, ids=lambda a: "-".join(a[:2]))
def test_replay_is_byte_identical(tmp_path, argv):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["--seed", "11", "--out-dir", str(a)] + argv) == 0
    assert main(["--seed", "11", "--out-dir", str(b), "--threads", "3"] + argv) == 0
    stem = argv[0].replace("-", "_")
    assert (a / f"{stem}.csv").read_bytes() == (b / f"{stem}.csv").read_bytes()
    meta = json.loads((a / f"{stem}.json").read_text())
    assert {"spec", "seed", "generator", "constants_sha256", "wall_clock_seconds", "summary"} <= set(meta)


def test_calibrate_subcommand(tmp_path):
    grid = {
        "kt_blocks": [[2, 3], [3, 2]],
        "kt_gaussian": [],
        "suppress_blocks": [[3, 3], [3, 4]],
        "approx_operators": ["block:3,1", "untf:3,6"],
        "approx_multiples": [1, 2],
        "tail_points": [["untf:3,9", 6], ["untf:4,8", 6]],
        "tail_grid": [0.3, 0.6],
        "frame_points": [[3, 9, 0.75], [4, 8, 0.75]],
        "frame_grid": [0.3, 0.6],
        "rudelson_shapes": [[4, 6]],
        "rudelson_instances": 2,
        "trials": 40,
        "tail_trials": 60,
    }
    (tmp_path / "grid.json").write_text(json.dumps(grid))
    out = tmp_path / "c.json"
    assert main(["--out-dir", str(tmp_path), "--constants-file", str(out), "calibrate", "--grid", str(tmp_path / "grid.json")]) == 0
    first = out.read_bytes()
    assert main(["--out-dir", str(tmp_path), "--constants-file", str(out), "calibrate", "--grid", str(tmp_path / "grid.json")]) == 0
    assert out.read_bytes() == first
    grid["suppress_blocks"] = [[3, 3]]
    (tmp_path / "grid.json").write_text(json.dumps(grid))
    assert main(["--out-dir", str(tmp_path), "--constants-file", str(out), "calibrate", "--grid", str(tmp_path / "grid.json")]) == 2
