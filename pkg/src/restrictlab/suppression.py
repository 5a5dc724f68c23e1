"""Norm suppression by coordinate restriction.

Monte Carlo estimates of ``E ||u restricted to sigma||`` under both random
subset models, exact minimisation over all subsets of a given size, a greedy
surrogate, and the stripped right-hand sides of the suppression bounds (no
absolute constants; ratios are reported instead).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from itertools import combinations, product

import numpy as np

from .linalg import DenseOperator, InputError, hs_norm_sq, restrict_columns, spectral_norm
from .randomness import FIXED, SELECTORS, RngHandle, sample_subset
from .stats import Summary, run_trials, summarize

DEFAULT_BUDGET = 10**7


class BudgetExceeded(RuntimeError):
    """Exhaustive enumeration would exceed the subset budget."""

    def __init__(self, count: int, budget: int):
        super().__init__(f"exhaustive search needs {count} candidate subsets, budget is {budget}")
        self.count = count
        self.budget = budget


def kt_bound(n: float, N: int, h: float) -> float:
    """``sqrt(n/N) + sqrt(h/N)``."""
    return math.sqrt(n / N) + math.sqrt(h / N)


def random_subset_bound(n: float, N: int, M: float) -> float:
    """``sqrt(log n) * (sqrt(n/N) + sqrt(log n) * M)``; zero for ``n <= 1``."""
    if n <= 1:
        return 0.0
    ln = math.log(n)
    return math.sqrt(ln) * (math.sqrt(n / N) + math.sqrt(ln) * M)


def fixed_size_bound(n: float, N: int, M: float) -> float:
    """``log n * (sqrt(n/N) + M)``, the fixed-cardinality form."""
    if n <= 1:
        return 0.0
    return math.log(n) * (math.sqrt(n / N) + M)


def log_h_bound(h: float, M: float) -> float:
    """``log h * M`` (dimension-free form at ``|sigma| ~ h log h``)."""
    if h <= 1:
        return 0.0
    return math.log(h) * M


def _ratio(value: float, bound: float) -> float | None:
    return value / bound if bound > 0 else None


@dataclass
class SuppressionReport:
    operator: str
    n: float
    N: int
    h: float
    M: float
    op_norm: float
    scheme: str
    trials: int
    seed: int
    summary: Summary
    mean_nonempty: float
    empty_trials: int
    bounds: dict = field(default_factory=dict)
    ratios: dict = field(default_factory=dict)
    records: list = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("records")
        d["summary"] = self.summary.to_dict()
        return d


def operator_parameters(u: DenseOperator) -> tuple[int, float, float]:
    """``(N, h, M)`` with ``h = ||u||_HS^2`` and ``M = max_j ||u e_j||``."""
    norms = u.column_norms()
    return u.cols, hs_norm_sq(u), float(norms.max()) if norms.size else 0.0


def restriction_norm_trial(u: DenseOperator, n: float, scheme: str, rng: RngHandle) -> tuple[int, float]:
    sigma = sample_subset(u.cols, scheme, n, rng)
    if len(sigma) == 0:
        return 0, 0.0
    return len(sigma), spectral_norm(restrict_columns(u, sigma))


def estimate_expected_restriction_norm(
    u: DenseOperator,
    n: float,
    scheme: str = SELECTORS,
    trials: int = 1000,
    seed: int = 0,
    threads: int = 1,
) -> SuppressionReport:
    """Average ``||u|sigma||`` over ``trials`` independent subsets.

    Trial ``t`` draws from stream ``t`` of ``seed``.  An empty subset has
    restriction norm 0; ``mean_nonempty`` conditions on ``sigma`` nonempty.
    """
    if u.cols == 0 or u.rows == 0:
        raise InputError("empty operator")
    if trials < 1:
        raise InputError("need at least one trial")
    if scheme not in (FIXED, SELECTORS):
        raise InputError(f"unknown sampling scheme {scheme!r}")
    N, h, M = operator_parameters(u)
    outcomes = run_trials(lambda t: restriction_norm_trial(u, n, scheme, RngHandle(seed, t)), trials, threads)
    sizes = np.array([s for s, _ in outcomes])
    norms = np.array([v for _, v in outcomes])
    summary = summarize(norms)
    nonempty = norms[sizes > 0]
    bounds = {
        "kt": kt_bound(n, N, h),
        "random_subset": random_subset_bound(n, N, M),
        "fixed_size": fixed_size_bound(n, N, M),
        "log_h": log_h_bound(h, M),
    }
    return SuppressionReport(
        operator=u.label,
        n=n,
        N=N,
        h=h,
        M=M,
        op_norm=spectral_norm(u),
        scheme=scheme,
        trials=trials,
        seed=seed,
        summary=summary,
        mean_nonempty=float(nonempty.mean()) if nonempty.size else float("nan"),
        empty_trials=int(np.count_nonzero(sizes == 0)),
        bounds=bounds,
        ratios={k: _ratio(summary.mean, b) for k, b in bounds.items()},
        records=[(t, int(s), float(v)) for t, (s, v) in enumerate(outcomes)],
    )


def _column_classes(u: DenseOperator) -> list[np.ndarray]:
    """Indices grouped by identical columns, in order of first appearance."""
    seen: dict[bytes, list[int]] = {}
    for j in range(u.cols):
        seen.setdefault(u.matrix[:, j].tobytes(), []).append(j)
    return [np.array(v) for v in seen.values()]


def _count_vectors(sizes: list[int], n: int) -> int:
    """Number of ``(c_i)`` with ``0 <= c_i <= sizes[i]`` and ``sum c_i = n``."""
    ways = np.zeros(n + 1, dtype=object)
    ways[0] = 1
    for s in sizes:
        nxt = np.zeros(n + 1, dtype=object)
        for total in range(n + 1):
            if ways[total]:
                for c in range(min(s, n - total) + 1):
                    nxt[total + c] += ways[total]
        ways = nxt
    return int(ways[n])


def _iter_count_vectors(sizes: list[int], n: int):
    def rec(i: int, left: int, acc: list[int]):
        if i == len(sizes):
            if left == 0:
                yield tuple(acc)
            return
        rest = sum(sizes[i + 1 :])
        for c in range(max(0, left - rest), min(sizes[i], left) + 1):
            acc.append(c)
            yield from rec(i + 1, left - c, acc)
            acc.pop()

    yield from rec(0, n, [])


def _gram_norm(g: np.ndarray) -> float:
    return float(np.sqrt(max(np.linalg.eigvalsh(g)[-1], 0.0)))


def _better(norm: float, sigma: tuple, best_norm: float, best_sigma: tuple | None) -> bool:
    if best_sigma is None:
        return True
    tol = 1e-12 * max(1.0, best_norm)
    if norm < best_norm - tol:
        return True
    return abs(norm - best_norm) <= tol and sigma < best_sigma


def candidate_count(u: DenseOperator, n: int) -> int:
    """Subsets examined by :func:`min_restriction_norm_exhaustive` (after merging equal columns)."""
    classes = _column_classes(u)
    if all(c.size == 1 for c in classes):
        return math.comb(u.cols, n)
    return _count_vectors([c.size for c in classes], n)


def min_restriction_norm_exhaustive(
    u: DenseOperator, n: int, budget: int = DEFAULT_BUDGET
) -> tuple[tuple[int, ...], float]:
    """Exact ``min ||u|sigma||`` over ``|sigma| = n``.

    Identical columns are interchangeable, so subsets are enumerated up to
    that symmetry (one representative per multiplicity pattern).  Distinct
    columns are walked in lexicographic order, each leaf adding one rank-one
    term to its prefix Gram.  Ties go to the lexicographically smallest subset.
    """
    if not 0 <= n <= u.cols:
        raise InputError(f"subset size must lie in 0..{u.cols}")
    count = candidate_count(u, n)
    if count > budget:
        raise BudgetExceeded(count, budget)
    if n == 0:
        return (), 0.0
    if u.complex_embedded:
        return _exhaustive_direct(u, n)

    a = u.matrix
    classes = _column_classes(u)
    best_norm, best_sigma = math.inf, None
    if all(c.size == 1 for c in classes):
        outer = np.einsum("ij,kj->jik", a, a)

        def walk(start: int, depth: int, g: np.ndarray, chosen: list[int]):
            nonlocal best_norm, best_sigma
            for j in range(start, u.cols - (n - depth) + 1):
                g2 = g + outer[j]
                chosen.append(j)
                if depth + 1 == n:
                    val = _gram_norm(g2)
                    sig = tuple(chosen)
                    if _better(val, sig, best_norm, best_sigma):
                        best_norm, best_sigma = val, sig
                else:
                    walk(j + 1, depth + 1, g2, chosen)
                chosen.pop()

        walk(0, 0, np.zeros((u.rows, u.rows)), [])
    else:
        reps = np.stack([a[:, c[0]] for c in classes], axis=1)
        for counts in _iter_count_vectors([c.size for c in classes], n):
            w = np.asarray(counts, dtype=float)
            val = _gram_norm((reps * w) @ reps.T)
            sig = tuple(sorted(int(j) for c, m in zip(classes, counts) for j in c[:m]))
            if _better(val, sig, best_norm, best_sigma):
                best_norm, best_sigma = val, sig
    assert best_sigma is not None
    return best_sigma, spectral_norm(restrict_columns(u, best_sigma))


def _exhaustive_direct(u: DenseOperator, n: int) -> tuple[tuple[int, ...], float]:
    best_norm, best_sigma = math.inf, None
    for sig in combinations(range(u.cols), n):
        val = spectral_norm(restrict_columns(u, sig))
        if _better(val, sig, best_norm, best_sigma):
            best_norm, best_sigma = val, sig
    return best_sigma, best_norm


def min_restriction_norm_greedy(u: DenseOperator, n: int) -> tuple[tuple[int, ...], float]:
    """Drop columns one at a time, always the one whose removal lowers the norm most."""
    if not 1 <= n <= u.cols:
        raise InputError(f"subset size must lie in 1..{u.cols}")
    if u.complex_embedded:
        return _greedy_direct(u, n)
    a = u.matrix
    keep = list(range(u.cols))
    g = a @ a.T
    while len(keep) > n:
        best_val, best_pos = math.inf, -1
        for pos, j in enumerate(keep):
            val = _gram_norm(g - np.outer(a[:, j], a[:, j]))
            if best_pos < 0 or val < best_val - 1e-12 * max(1.0, best_val):
                best_val, best_pos = val, pos
        j = keep.pop(best_pos)
        g = g - np.outer(a[:, j], a[:, j])
    sigma = tuple(keep)
    return sigma, spectral_norm(restrict_columns(u, sigma))


def _greedy_direct(u: DenseOperator, n: int) -> tuple[tuple[int, ...], float]:
    keep = list(range(u.cols))
    while len(keep) > n:
        vals = [spectral_norm(restrict_columns(u, keep[:p] + keep[p + 1 :])) for p in range(len(keep))]
        keep.pop(int(np.argmin(vals)))
    sigma = tuple(keep)
    return sigma, spectral_norm(restrict_columns(u, sigma))


def exhaustive_mean_restriction_norm(u: DenseOperator, n: int, budget: int = 10**6) -> float:
    """Exact ``E ||u|sigma||`` for a uniform subset of size ``n`` (full enumeration)."""
    total = math.comb(u.cols, n)
    if total > budget:
        raise BudgetExceeded(total, budget)
    vals = [spectral_norm(restrict_columns(u, s)) if n else 0.0 for s in combinations(range(u.cols), n)]
    return float(np.mean(vals))


def chebyshev_column_fraction(u: DenseOperator) -> float:
    """Fraction of columns with ``||u e_j|| <= 2 sqrt(h/N)``; at least 1/2 always."""
    N, h, _ = operator_parameters(u)
    norms = u.column_norms()
    threshold = 2.0 * math.sqrt(h / N)
    return float(np.count_nonzero(norms <= threshold * (1 + 1e-12)) / N)


def kt_ratio_grid(hs, ks, budget: int = DEFAULT_BUDGET) -> list[dict]:
    """Exact minimum over every ``n`` on a block-operator grid, with its KT ratio."""
    from .operators import make_block

    rows = []
    for h, k in product(hs, ks):
        u = make_block(h, k)
        N = u.cols
        for n in range(1, N + 1):
            sigma, val = min_restriction_norm_exhaustive(u, n, budget)
            bound = kt_bound(n, N, h)
            rows.append({"h": h, "k": k, "n": n, "N": N, "min_norm": val, "bound": bound, "ratio": val / bound})
    return rows
