"""Fitted stand-ins for the unspecified absolute constants.

Each constant is the largest ratio observed on a calibration grid times a
1.25 headroom factor.  The grid here is disjoint from every grid point the
acceptance suite checks.  ``calibrate`` is deterministic: the same grid and
seed write the same file byte for byte.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .approximation import check_rudelson_inequality, estimate_mean_error, tail_constant_needed
from .linalg import InputError, hs_norm_sq
from .netsim import run_campaign
from .operators import make_block, make_gaussian, make_untf, normalize_operator
from .randomness import GENERATOR_FAMILY, RngHandle
from .suppression import estimate_expected_restriction_norm, kt_bound, min_restriction_norm_exhaustive

HEADROOM = 1.25
NAMES = ("C_suppress", "C_approx", "C0_tail", "C_frame", "c_kt", "C_rudelson", "C_rudelson_sym")


@dataclass
class CalibrationGrid:
    kt_blocks: list = field(default_factory=lambda: [[3, 3], [3, 6], [5, 3], [5, 5]])
    kt_gaussian: list = field(default_factory=lambda: [[4, 10], [6, 12]])
    suppress_blocks: list = field(default_factory=lambda: [[4, 6], [4, 12], [6, 6], [6, 12]])
    approx_operators: list = field(default_factory=lambda: ["untf:8,32", "untf:12,48", "block:4,16", "block:6,6"])
    approx_multiples: list = field(default_factory=lambda: [1, 2, 4])
    tail_points: list = field(default_factory=lambda: [["untf:8,32", 24], ["untf:12,48", 36], ["untf:8,64", 32], ["untf:16,64", 32]])
    tail_grid: list = field(default_factory=lambda: [0.2, 0.4, 0.6, 0.8])
    frame_points: list = field(default_factory=lambda: [[8, 32, 0.75], [12, 48, 0.75], [16, 64, 0.5], [8, 32, 0.5]])
    frame_grid: list = field(default_factory=lambda: [0.2, 0.3, 0.4, 0.5, 0.6, 0.8])
    rudelson_shapes: list = field(default_factory=lambda: [[8, 30], [8, 50], [12, 30], [12, 50]])
    rudelson_instances: int = 5
    trials: int = 2000
    tail_trials: int = 4000
    seed: int = 20240601

    @classmethod
    def from_dict(cls, d: dict) -> "CalibrationGrid":
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise InputError(f"unknown calibration grid fields: {sorted(unknown)}")
        return cls(**d)

    def check(self) -> None:
        sizes = [
            len(self.kt_blocks) + len(self.kt_gaussian),
            len(self.suppress_blocks),
            len(self.approx_operators) * len(self.approx_multiples),
            len(self.tail_points),
            len(self.frame_points),
            len(self.rudelson_shapes) * self.rudelson_instances,
        ]
        if min(sizes) < 2:
            raise InputError("degenerate calibration grid: every constant needs at least two grid points")


def _small_op(spec: str):
    kind, _, args = spec.partition(":")
    a, b = (int(v) for v in args.split(","))
    return make_untf(a, b) if kind == "untf" else make_block(a, b)


def unit_vectors(m: int, J: int, rng: RngHandle) -> np.ndarray:
    g = rng.generator()
    x = g.standard_normal((m, J))
    return x / np.linalg.norm(x, axis=0)


def rudelson_instance(m: int, J: int, seed: int, index: int) -> tuple[np.ndarray, np.ndarray]:
    """Two sets of ``J`` random unit vectors in R^m for instance ``index``."""
    return unit_vectors(m, J, RngHandle(seed, 2 * index)), unit_vectors(m, J, RngHandle(seed, 2 * index + 1))


def observe(grid: CalibrationGrid) -> dict:
    """Largest ratio seen for each constant on the grid."""
    grid.check()
    seed = grid.seed
    obs = dict.fromkeys(NAMES, 0.0)

    for h, k in grid.kt_blocks:
        u = make_block(h, k)
        for n in range(1, u.cols + 1):
            _, val = min_restriction_norm_exhaustive(u, n)
            obs["c_kt"] = max(obs["c_kt"], val / kt_bound(n, u.cols, h))
    for m, N in grid.kt_gaussian:
        u = normalize_operator(make_gaussian(m, N, seed))
        h = hs_norm_sq(u)
        for n in range(1, N + 1):
            _, val = min_restriction_norm_exhaustive(u, n)
            obs["c_kt"] = max(obs["c_kt"], val / kt_bound(n, N, h))

    for h, k in grid.suppress_blocks:
        u = make_block(h, k)
        hlogh = h * math.log(h)
        for n in sorted({h, round(hlogh), u.cols // 2}):
            r = estimate_expected_restriction_norm(u, n, "selectors", grid.trials, seed)
            obs["C_suppress"] = max(obs["C_suppress"], r.ratios["random_subset"])
        r = estimate_expected_restriction_norm(u, hlogh, "selectors", grid.trials, seed)
        obs["C_suppress"] = max(obs["C_suppress"], r.ratios["log_h"])

    for spec in grid.approx_operators:
        u = _small_op(spec)
        h = round(hs_norm_sq(u))
        for mult in grid.approx_multiples:
            r = estimate_mean_error(u, mult * h, grid.trials, seed)
            if r.ratio is not None:
                obs["C_approx"] = max(obs["C_approx"], r.ratio)

    for spec, n in grid.tail_points:
        u = _small_op(spec)
        r = estimate_mean_error(u, n, grid.tail_trials, seed)
        errors = [e for _, _, e in r.records]
        obs["C0_tail"] = max(obs["C0_tail"], tail_constant_needed(errors, n, hs_norm_sq(u), grid.tail_grid))

    for m, k, delta in grid.frame_points:
        rep = run_campaign(make_untf(m, k), delta, grid.tail_trials, grid.frame_grid, seed)
        n = delta * k
        base = math.sqrt(math.log(n)) * math.sqrt(m / n)
        for p in rep.points:
            # 6 exp(-t^2/eps^2) >= w  <=>  eps >= t / sqrt(log(6 / w))
            obs["C_frame"] = max(obs["C_frame"], p["t"] / math.sqrt(math.log(6.0 / p["wilson_hi"])) / base)

    for m, J in grid.rudelson_shapes:
        for i in range(grid.rudelson_instances):
            x, y = rudelson_instance(m, J, seed + m * 1000 + J, i)
            obs["C_rudelson"] = max(obs["C_rudelson"], check_rudelson_inequality(x, y, grid.trials, seed + i).ratio)
            sym = check_rudelson_inequality(x, None, grid.trials, seed + i, symmetric=True)
            obs["C_rudelson_sym"] = max(obs["C_rudelson_sym"], sym.ratio)
    return obs


def calibrate(grid: CalibrationGrid | None = None) -> dict:
    grid = grid or CalibrationGrid()
    obs = observe(grid)
    return {
        "constants": {k: round(v * HEADROOM, 6) for k, v in obs.items()},
        "observed": {k: round(v, 9) for k, v in obs.items()},
        "headroom": HEADROOM,
        "grid": asdict(grid),
        "generator": GENERATOR_FAMILY,
    }


def dumps(payload: dict) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def write_constants(payload: dict, path: str | Path) -> str:
    text = dumps(payload)
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(text)
    return hashlib.sha256(text.encode()).hexdigest()


def default_constants_path() -> Path:
    return Path(str(resources.files("restrictlab") / "data" / "constants.json"))


@dataclass(frozen=True)
class FittedConstants:
    values: dict
    sha256: str
    path: str

    def __getitem__(self, key: str) -> float:
        return self.values[key]


def load_constants(path: str | Path | None = None) -> FittedConstants:
    p = Path(path) if path else default_constants_path()
    if not p.exists():
        raise InputError(f"constants file {p} not found (run `restrictlab calibrate`)")
    text = p.read_text()
    payload = json.loads(text)
    missing = set(NAMES) - set(payload.get("constants", {}))
    if missing:
        raise InputError(f"constants file {p} lacks {sorted(missing)}")
    return FittedConstants(payload["constants"], hashlib.sha256(text.encode()).hexdigest(), str(p))
