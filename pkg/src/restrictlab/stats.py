"""Summaries and confidence intervals shared by the Monte Carlo modules."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Callable, Sequence, TypeVar

import numpy as np

T = TypeVar("T")

WILSON_Z = 1.959963984540054


def wilson_interval(successes: int, trials: int, z: float = WILSON_Z) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion (95% by default)."""
    if trials <= 0:
        return 0.0, 1.0
    p = successes / trials
    denom = 1.0 + z * z / trials
    centre = (p + z * z / (2 * trials)) / denom
    half = z * np.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    lo = 0.0 if successes == 0 else max(0.0, centre - half)
    hi = 1.0 if successes == trials else min(1.0, centre + half)
    return float(lo), float(hi)


@dataclass(frozen=True)
class Summary:
    count: int
    mean: float
    std: float
    stderr: float
    q05: float
    q50: float
    q95: float
    minimum: float
    maximum: float

    def to_dict(self) -> dict:
        return asdict(self)


def summarize(values: Sequence[float] | np.ndarray) -> Summary:
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        nan = float("nan")
        return Summary(0, nan, nan, nan, nan, nan, nan, nan, nan)
    std = float(v.std(ddof=1)) if v.size > 1 else 0.0
    q05, q50, q95 = np.quantile(v, [0.05, 0.5, 0.95])
    return Summary(
        count=int(v.size),
        mean=float(v.mean()),
        std=std,
        stderr=std / np.sqrt(v.size),
        q05=float(q05),
        q50=float(q50),
        q95=float(q95),
        minimum=float(v.min()),
        maximum=float(v.max()),
    )


def survival(values: Sequence[float] | np.ndarray, grid: Sequence[float]) -> list[dict]:
    """Empirical ``P(value > t)`` with Wilson intervals for each ``t``."""
    v = np.asarray(values, dtype=float)
    out = []
    for t in grid:
        hits = int(np.count_nonzero(v > t))
        lo, hi = wilson_interval(hits, v.size)
        out.append({"t": float(t), "exceed": hits, "survival": hits / max(v.size, 1), "wilson_lo": lo, "wilson_hi": hi})
    return out


def run_trials(fn: Callable[[int], T], trials: int, threads: int = 1) -> list[T]:
    """Evaluate ``fn(trial)`` for every trial index; results stay in index order."""
    if threads <= 1:
        return [fn(i) for i in range(trials)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(trials)))
