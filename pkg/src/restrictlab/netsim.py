"""Frame-coded transmission over a lossy channel.

A payload ``x`` in R^m travels as the ``k`` frame coefficients ``<x_j, x>``.
Each packet survives independently with probability ``delta = n/k``; the
receiver rebuilds ``x_hat = (k/|sigma|) sum_{j in sigma} <x_j, x> x_j`` from
the survivors only.  Packets live in memory as ``(index, value)`` pairs.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from itertools import product

import numpy as np

from .linalg import DenseOperator, InputError, SymmetricOperator, sym_norm
from .randomness import RngHandle, as_generator, sample_independent
from .stats import Summary, run_trials, summarize, wilson_interval


@dataclass(frozen=True)
class Delivery:
    indices: np.ndarray
    values: np.ndarray
    k: int

    def __len__(self) -> int:
        return int(self.indices.size)


@dataclass(frozen=True)
class Reconstruction:
    x_hat: np.ndarray
    operator_error: float
    lost: bool


def encode(x, frame: DenseOperator) -> np.ndarray:
    v = np.asarray(x, dtype=float).reshape(-1)
    if v.size != frame.rows:
        raise InputError(f"payload has dimension {v.size}, frame expects {frame.rows}")
    return frame.matrix.T @ v


def channel(packets, delta: float, rng) -> Delivery:
    p = np.asarray(packets, dtype=float)
    sigma = sample_independent(p.size, delta, rng)
    return Delivery(sigma.indices, p[sigma.indices], p.size)


def reconstruct(delivery: Delivery, frame: DenseOperator) -> Reconstruction:
    """Rescaled partial frame sum over the delivered packets.

    No survivors is a total loss: ``x_hat = 0`` and operator error 1.
    """
    if delivery.k != frame.cols:
        raise InputError(f"delivery has {delivery.k} slots, frame has {frame.cols} vectors")
    if len(delivery) == 0:
        return Reconstruction(np.zeros(frame.rows), 1.0, True)
    xs = frame.matrix[:, delivery.indices]
    scale = frame.cols / len(delivery)
    x_hat = scale * (xs @ delivery.values)
    r = scale * (xs @ xs.T)
    err = sym_norm(SymmetricOperator(np.eye(frame.rows) - r))
    return Reconstruction(x_hat, err, False)


def operator_error_for(frame: DenseOperator, sigma) -> float:
    """``||id - (k/|sigma|) sum_{j in sigma} x_j (x) x_j||`` (1 for an empty subset)."""
    idx = np.asarray(list(sigma), dtype=int)
    if idx.size == 0:
        return 1.0
    xs = frame.matrix[:, idx]
    r = (frame.cols / idx.size) * (xs @ xs.T)
    return sym_norm(SymmetricOperator(np.eye(frame.rows) - r))


def frame_eps(C: float, n: float, m: int) -> float:
    """``C sqrt(log n) sqrt(m/n)``."""
    return C * math.sqrt(math.log(n)) * math.sqrt(m / n) if n > 1 else math.inf


def failure_bound(t: float, eps: float) -> float:
    """``6 exp(-t^2/eps^2)``: the allowed probability of an error ``>= t``."""
    return 6.0 * math.exp(-(t * t) / (eps * eps))


@dataclass
class CampaignReport:
    frame: str
    m: int
    k: int
    delta: float
    n: float
    trials: int
    seed: int
    C: float | None
    eps: float | None
    operator_error: Summary
    relative_error: Summary
    total_losses: int
    points: list
    records: list = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("records")
        d["operator_error"] = self.operator_error.to_dict()
        d["relative_error"] = self.relative_error.to_dict()
        return d


def transmission_trial(frame: DenseOperator, delta: float, rng: RngHandle) -> tuple[int, float, float]:
    """One payload through the channel: ``(|sigma|, operator error, relative error)``."""
    g = rng.generator()
    x = g.standard_normal(frame.rows)
    delivery = channel(encode(x, frame), delta, g)
    rec = reconstruct(delivery, frame)
    rel = float(np.linalg.norm(x - rec.x_hat) / np.linalg.norm(x))
    return len(delivery), rec.operator_error, rel


def run_campaign(
    frame: DenseOperator,
    delta: float,
    trials: int,
    t_grid,
    seed: int = 0,
    C: float | None = None,
    threads: int = 1,
) -> CampaignReport:
    """Failure frequency ``P(operator error >= t)`` per ``t`` with Wilson intervals."""
    if trials < 1:
        raise InputError("need at least one trial")
    if not 0.0 <= delta <= 1.0:
        raise InputError(f"delivery probability must lie in [0, 1], got {delta}")
    k, m = frame.cols, frame.rows
    n = delta * k
    out = run_trials(lambda t: transmission_trial(frame, delta, RngHandle(seed, t)), trials, threads)
    sizes = np.array([s for s, _, _ in out])
    op_err = np.array([e for _, e, _ in out])
    rel_err = np.array([r for _, _, r in out])
    eps = frame_eps(C, n, m) if C is not None else None
    points = []
    for t in t_grid:
        fails = int(np.count_nonzero(op_err >= t))
        lo, hi = wilson_interval(fails, trials)
        point = {"t": float(t), "failures": fails, "frequency": fails / trials, "wilson_lo": lo, "wilson_hi": hi}
        if eps is not None:
            point["bound"] = failure_bound(t, eps) if math.isfinite(eps) else 6.0
            point["holds"] = hi <= point["bound"]
        points.append(point)
    return CampaignReport(
        frame=frame.label,
        m=m,
        k=k,
        delta=float(delta),
        n=n,
        trials=trials,
        seed=seed,
        C=C,
        eps=eps,
        operator_error=summarize(op_err),
        relative_error=summarize(rel_err),
        total_losses=int(np.count_nonzero(sizes == 0)),
        points=points,
        records=[(t, int(s), float(e), float(r)) for t, (s, e, r) in enumerate(out)],
    )


def exact_failure_probability(frame: DenseOperator, delta: float, t: float) -> float:
    """``P(operator error >= t)`` by enumerating all ``2^k`` delivery patterns."""
    k = frame.cols
    if k > 20:
        raise InputError("exact enumeration limited to k <= 20")
    total = 0.0
    for bits in product((0, 1), repeat=k):
        size = sum(bits)
        if operator_error_for(frame, [j for j in range(k) if bits[j]]) >= t:
            total += delta**size * (1.0 - delta) ** (k - size)
    return total


def _binomial_deviation_exact(k: int, delta: float, s: float) -> float:
    from math import comb

    n = delta * k
    return sum(comb(k, i) * delta**i * (1 - delta) ** (k - i) for i in range(k + 1) if abs(i - n) > s)


def binomial_concentration_check(k: int, delta: float, s_grid, trials: int, seed: int = 0) -> list[dict]:
    """Empirical ``P(||sigma| - n| > s)`` against ``exp(-s^2/(8n))``, ``n = delta k``."""
    n = delta * k
    grid = [float(s) for s in s_grid]
    if any(s < 0 or s > 2 * delta * k for s in grid):
        raise InputError(f"deviations must lie in [0, 2 delta k] = [0, {2 * delta * k}]")
    g = as_generator(RngHandle(seed, 0))
    sizes = g.binomial(k, delta, size=trials)
    out = []
    for s in grid:
        hits = int(np.count_nonzero(np.abs(sizes - n) > s))
        lo, hi = wilson_interval(hits, trials)
        bound = math.exp(-s * s / (8 * n)) if n > 0 else 1.0
        out.append(
            {
                "s": s,
                "frequency": hits / trials,
                "wilson_lo": lo,
                "wilson_hi": hi,
                "exact": _binomial_deviation_exact(k, delta, s),
                "bound": bound,
            }
        )
    return out
