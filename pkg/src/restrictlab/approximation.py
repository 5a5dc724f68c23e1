"""Approximating ``u u*`` by ``u Delta u*`` with a random low-rank diagonal.

``Delta(j)`` depends only on ``||u e_j||`` and ``K = n / h``:

* zero column: ``Delta(j) = 0``;
* ``K ||u e_j||^2 > 1``: ``Delta(j) = 1``;
* otherwise ``Delta(j) = 1 / (K ||u e_j||^2)`` with probability
  ``K ||u e_j||^2`` and 0 else, so ``E Delta(j) = 1``.

Also here: tail estimation for the error, the two block counterexamples and
a Monte Carlo check of the Rudelson-type sign-sum inequality.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from itertools import product

import numpy as np

from .linalg import (
    DenseOperator,
    InputError,
    SymmetricOperator,
    batch_gram_norms,
    gram,
    hs_norm_sq,
    restrict_columns,
    spectral_norm,
    sym_norm,
)
from .randomness import RngHandle, as_generator, rademacher
from .stats import Summary, run_trials, summarize, survival

ZERO, ONE, BERNOULLI = "zero", "one", "bernoulli"


@dataclass(frozen=True)
class DiagonalSampler:
    K: float
    cases: tuple
    prob: np.ndarray = field(repr=False)
    value: np.ndarray = field(repr=False)

    @property
    def N(self) -> int:
        return len(self.cases)

    def expected_rank(self) -> float:
        return float(self.prob.sum())

    def realize(self, rng: RngHandle | np.random.Generator) -> np.ndarray:
        g = as_generator(rng)
        hit = g.random(self.N) < self.prob
        return np.where(hit, self.value, 0.0)


def make_sampler(u: DenseOperator, n: float) -> DiagonalSampler:
    """Per-column case split for target rank ``n``."""
    if n < 1:
        raise InputError("target rank n must be at least 1")
    sq = np.einsum("ij,ij->j", u.matrix, u.matrix)
    h = float(sq.sum())
    N = u.cols
    if h == 0:
        return DiagonalSampler(math.inf, (ZERO,) * N, np.zeros(N), np.zeros(N))
    K = n / h
    load = K * sq
    cases, prob, value = [], np.zeros(N), np.zeros(N)
    for j in range(N):
        if sq[j] == 0:
            cases.append(ZERO)
        elif load[j] > 1:
            cases.append(ONE)
            prob[j], value[j] = 1.0, 1.0
        else:
            cases.append(BERNOULLI)
            prob[j], value[j] = load[j], 1.0 / load[j]
    return DiagonalSampler(K, tuple(cases), prob, value)


def build_delta(u: DenseOperator, n: float, rng: RngHandle | np.random.Generator) -> np.ndarray:
    return make_sampler(u, n).realize(rng)


def _error_from_weights(a: np.ndarray, delta: np.ndarray) -> float:
    d = (a * (delta - 1.0)) @ a.T
    return sym_norm(SymmetricOperator(d))


def approximation_error(u: DenseOperator, delta) -> float:
    """``||u (Delta - id) u*||``."""
    d = np.asarray(delta, dtype=float).reshape(-1)
    if d.size != u.cols:
        raise InputError(f"expected {u.cols} diagonal entries, got {d.size}")
    return _error_from_weights(u.matrix, d)


def stripped_bound(n: float, h: float) -> float:
    """``sqrt(log n) * sqrt(h / n)``."""
    if n <= 1:
        return 0.0
    return math.sqrt(math.log(n)) * math.sqrt(h / n)


@dataclass
class ApproxReport:
    operator: str
    n: float
    h: float
    K: float
    trials: int
    seed: int
    error: Summary
    rank: Summary
    bound: float
    ratio: float | None
    expected_rank: float
    rank_limit: float
    side_condition_ok: bool | None = None
    records: list = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("records")
        d["error"] = self.error.to_dict()
        d["rank"] = self.rank.to_dict()
        return d


def _delta_trials(u: DenseOperator, n: float, trials: int, seed: int, threads: int):
    sampler = make_sampler(u, n)
    a = u.matrix

    def one(t: int) -> tuple[int, float]:
        delta = sampler.realize(RngHandle(seed, t))
        return int(np.count_nonzero(delta)), _error_from_weights(a, delta)

    return sampler, run_trials(one, trials, threads)


def estimate_mean_error(
    u: DenseOperator,
    n: float,
    trials: int = 1000,
    seed: int = 0,
    threads: int = 1,
    constant: float | None = None,
) -> ApproxReport:
    """Mean error and realised rank over ``trials`` draws of ``Delta``.

    With ``constant`` given, ``side_condition_ok`` records whether
    ``constant * sqrt(log n) * sqrt(h/n) <= 1``.
    """
    if trials < 1:
        raise InputError("need at least one trial")
    h = hs_norm_sq(u)
    sampler, out = _delta_trials(u, n, trials, seed, threads)
    ranks = np.array([r for r, _ in out])
    errors = np.array([e for _, e in out])
    err = summarize(errors)
    bound = stripped_bound(n, h)
    return ApproxReport(
        operator=u.label,
        n=n,
        h=h,
        K=sampler.K,
        trials=trials,
        seed=seed,
        error=err,
        rank=summarize(ranks),
        bound=bound,
        ratio=err.mean / bound if bound > 0 else None,
        expected_rank=sampler.expected_rank(),
        rank_limit=2.0 * n,
        side_condition_ok=None if constant is None else constant * bound <= 1.0,
        records=[(t, int(r), float(e)) for t, (r, e) in enumerate(out)],
    )


def rank_statistics(u: DenseOperator, n: float, trials: int = 1000, seed: int = 0) -> dict:
    """Realised ``rank Delta`` over ``trials`` draws (mean, max, histogram)."""
    if trials < 1:
        raise InputError("need at least one trial")
    sampler = make_sampler(u, n)
    ranks = np.array([np.count_nonzero(sampler.realize(RngHandle(seed, t))) for t in range(trials)])
    s = summarize(ranks)
    values, counts = np.unique(ranks, return_counts=True)
    return {
        "mean": s.mean,
        "stderr": s.stderr,
        "max": int(ranks.max()),
        "expected": sampler.expected_rank(),
        "limit": 2.0 * n,
        "histogram": {int(v): int(c) for v, c in zip(values, counts)},
    }


def tail_bound(t: float, eps: float) -> float:
    return 3.0 * math.exp(-(t * t) / (eps * eps))


@dataclass
class TailReport:
    operator: str
    n: float
    h: float
    C0: float
    eps: float
    trials: int
    seed: int
    points: list
    records: list = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("records")
        return d


def estimate_tail(
    u: DenseOperator,
    n: float,
    C0: float,
    t_grid,
    trials: int = 1000,
    seed: int = 0,
    threads: int = 1,
) -> TailReport:
    """Empirical ``P(error > t)`` against ``3 exp(-t^2/eps^2)``, ``eps = C0 sqrt(log n) sqrt(h/n)``."""
    grid = [float(t) for t in t_grid]
    if any(not 0 < t < 1 for t in grid):
        raise InputError("tail thresholds must lie in (0, 1)")
    h = hs_norm_sq(u)
    eps = C0 * stripped_bound(n, h)
    _, out = _delta_trials(u, n, trials, seed, threads)
    errors = np.array([e for _, e in out])
    points = survival(errors, grid)
    for p in points:
        p["bound"] = tail_bound(p["t"], eps) if eps > 0 else 0.0
        p["holds"] = p["wilson_hi"] <= p["bound"]
    return TailReport(u.label, n, h, C0, eps, trials, seed, points, [(t, float(e)) for t, e in enumerate(errors)])


def tail_constant_needed(errors, n: float, h: float, t_grid) -> float:
    """Smallest ``C0`` for which every Wilson upper survival sits under the bound."""
    base = stripped_bound(n, h)
    need = 0.0
    for p in survival(errors, t_grid):
        # 3 exp(-t^2 / eps^2) >= w  <=>  eps >= t / sqrt(log(3 / w))
        need = max(need, p["t"] / math.sqrt(math.log(3.0 / p["wilson_hi"])) / base)
    return need


@dataclass
class RudelsonReport:
    m: int
    pairs: int
    trials: int
    seed: int
    symmetric: bool
    lhs: float
    rhs: float
    ratio: float

    def to_dict(self) -> dict:
        return asdict(self)


def _outer_sum_norm(v: np.ndarray) -> float:
    return spectral_norm(DenseOperator(v))


def check_rudelson_inequality(xs, ys=None, trials: int = 1000, seed: int = 0, symmetric: bool = False) -> RudelsonReport:
    """Monte Carlo ``E ||sum_j eps_j x_j (x) y_j||`` over its sign-free right side.

    Vectors are the columns of ``xs`` / ``ys`` (``m x J``).  The default right
    side is ``sqrt(log m) (max|x| ||sum y(x)y||^1/2 + max|y| ||sum x(x)x||^1/2)``;
    ``symmetric=True`` (``ys`` ignored, ``y = x``) uses
    ``sqrt(max(1, log m)) max|y| ||sum y(x)y||^1/2``.
    """
    x = np.asarray(xs, dtype=float)
    y = x if ys is None or symmetric else np.asarray(ys, dtype=float)
    if x.shape != y.shape:
        raise InputError(f"vector sets differ in shape: {x.shape} vs {y.shape}")
    m, J = x.shape
    if m < 2:
        raise InputError("dimension m must be at least 2")
    signs = np.stack([rademacher(J, RngHandle(seed, t)) for t in range(trials)])
    sums = np.einsum("tj,ij,kj->tik", signs, x, y)
    if symmetric:
        lhs_all = batch_gram_norms(sums)
    else:
        lhs_all = np.linalg.norm(sums, ord=2, axis=(1, 2))
    lhs = float(lhs_all.mean())
    xmax = float(np.linalg.norm(x, axis=0).max())
    ymax = float(np.linalg.norm(y, axis=0).max())
    if symmetric:
        rhs = math.sqrt(max(1.0, math.log(m))) * ymax * _outer_sum_norm(y)
    else:
        rhs = math.sqrt(math.log(m)) * (xmax * _outer_sum_norm(y) + ymax * _outer_sum_norm(x))
    return RudelsonReport(m, J, trials, seed, symmetric, lhs, rhs, lhs / rhs)


# --- block counterexamples -------------------------------------------------


def counterexample_lower_bound(h: int, k: int, delta, n: int) -> dict:
    """Check ``||u (id - Delta)|| >= max_l sqrt(|sigma cap A_l| / k)`` on ``B(h, k)``.

    ``sigma`` is the zero set of ``Delta``; ``A_l`` the ``l``-th block.
    """
    from .operators import make_block

    d = np.asarray(delta, dtype=float).reshape(-1)
    u = make_block(h, k)
    if d.size != u.cols:
        raise InputError(f"expected {u.cols} diagonal entries, got {d.size}")
    rank = int(np.count_nonzero(d))
    if rank > n:
        raise InputError(f"diagonal has rank {rank} > n = {n}")
    lhs = spectral_norm(u.with_matrix(u.matrix * (1.0 - d)))
    zero_counts = np.bincount(np.flatnonzero(d == 0) // k, minlength=h)
    rhs = math.sqrt(zero_counts.max() / k)
    return {"lhs": lhs, "rhs": rhs, "rank": rank, "zero_counts": zero_counts.tolist(), "holds": lhs >= rhs - 1e-12}


def random_low_rank_diagonal(N: int, n: int, rng, scale: float = 3.0) -> np.ndarray:
    """Diagonal with a uniform random support of size ``<= n`` and positive entries."""
    g = as_generator(rng)
    size = int(g.integers(0, n + 1))
    d = np.zeros(N)
    support = g.choice(N, size=size, replace=False)
    d[support] = g.uniform(0.0, scale, size=size) + 1e-3
    return d


def projection_error_closed_form(alpha: float, counts, k: int, includes_last: bool) -> float:
    """``||alpha u P_sigma u* - u u*||`` on the modified block operator.

    ``counts[j] = |A_j cap sigma|``; the operator is diagonal with entries
    ``alpha m_j / k - 1`` and ``alpha [N in sigma] - 1``.
    """
    m = np.asarray(counts, dtype=float)
    last = abs(alpha * (1.0 if includes_last else 0.0) - 1.0)
    return float(max(np.max(np.abs(alpha * m / k - 1.0)) if m.size else 0.0, last))


def projection_error_direct(u: DenseOperator, alpha: float, sigma) -> float:
    sub = restrict_columns(u, sigma) if len(sigma) else u.with_matrix(np.zeros((u.rows, 0)))
    return sym_norm(SymmetricOperator(alpha * gram(sub).matrix - gram(u).matrix))


def sigma_from_counts(h: int, k: int, counts, includes_last: bool) -> tuple[int, ...]:
    idx = [l * k + i for l in range(h) for i in range(int(counts[l]))]
    if includes_last:
        idx.append(h * k)
    return tuple(idx)


def alpha_projection_refuter(h: int, k: int, n: int, alphas, budget: int = 10**6) -> list[dict]:
    """Search every ``(alpha, sigma)`` with ``|sigma| <= n`` on the modified block operator.

    Subsets are enumerated by their block counts ``m_j`` (the error depends on
    nothing else).  For each ``alpha`` the result holds the smallest attainable
    error, its witness subset, and ``certificate``: the smallest value, over
    all subsets, of ``|alpha m_j / k - 1|`` at a block with ``m_j <= n/h``.
    """
    patterns = [
        (counts, last)
        for last in (False, True)
        for counts in product(range(min(k, n) + 1), repeat=h)
        if sum(counts) + last <= n
    ]
    if len(patterns) > budget:
        from .suppression import BudgetExceeded

        raise BudgetExceeded(len(patterns), budget)
    out = []
    for alpha in alphas:
        best_err, best_pat, cert = math.inf, None, math.inf
        for counts, last in patterns:
            err = projection_error_closed_form(alpha, counts, k, last)
            if err < best_err:
                best_err, best_pat = err, (counts, last)
            light = [j for j in range(h) if counts[j] <= n / h]
            cert = min(cert, max(abs(alpha * counts[j] / k - 1.0) for j in light))
        counts, last = best_pat
        j = int(np.argmin(counts))
        out.append(
            {
                "alpha": float(alpha),
                "min_error": best_err,
                "witness": sigma_from_counts(h, k, counts, last),
                "witness_counts": list(counts),
                "witness_includes_last": last,
                "certificate_block": j,
                "certificate_value": abs(alpha * counts[j] / k - 1.0),
                "certificate_min_over_sigma": cert,
                "patterns": len(patterns),
            }
        )
    return out
