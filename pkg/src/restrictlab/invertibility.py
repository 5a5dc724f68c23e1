"""Restricted invertibility at desk scale.

Certificates record a column subset together with the extreme singular
values of the restricted operator; they can be re-checked from ``sigma``
alone.  Search is exhaustive when the subset count fits the budget, greedy
otherwise.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from itertools import combinations

import numpy as np

from .linalg import DenseOperator, InputError, extreme_singular_values, restrict_columns, spectral_norm
from .operators import normalize_columns
from .suppression import DEFAULT_BUDGET, BudgetExceeded


@dataclass(frozen=True)
class InvertibilityCertificate:
    sigma: tuple
    c1: float
    c2: float
    target: int
    operator: str = ""
    eps: float | None = None
    method: str = "exhaustive"

    @property
    def condition(self) -> float:
        return self.c2 / self.c1 if self.c1 > 0 else math.inf

    def verify(self, u: DenseOperator, tol: float = 1e-10) -> bool:
        c1, c2 = restricted_extreme_singulars(u, self.sigma)
        return len(self.sigma) == self.target and abs(c1 - self.c1) <= tol and abs(c2 - self.c2) <= tol

    def to_dict(self) -> dict:
        d = asdict(self)
        d["sigma"] = list(self.sigma)
        d["condition"] = self.condition if self.c1 > 0 else None
        return d


def restricted_extreme_singulars(u: DenseOperator, sigma) -> tuple[float, float]:
    """``(c1, c2)``: best constants with ``c1|x| <= |ux| <= c2|x|`` on ``R^sigma``."""
    idx = list(sigma)
    if not idx:
        raise InputError("restricted singular values need a nonempty subset")
    return extreme_singular_values(restrict_columns(u, idx))


def _prepare(u: DenseOperator, normalize: bool) -> DenseOperator:
    if normalize:
        return normalize_columns(u)
    norms = u.column_norms()
    if np.any(np.abs(norms - 1.0) > 1e-10):
        raise InputError("columns must have unit norm (pass normalize=True)")
    return u


def target_cardinality(u: DenseOperator, eps: float = 0.0) -> int:
    """``floor((1 - eps) N / ||u||^2)`` for an operator with unit columns, at least 1."""
    return max(1, math.floor((1.0 - eps) * u.cols / spectral_norm(u) ** 2 + 1e-9))


def _key(c1: float, c2: float, sigma: tuple) -> tuple:
    ratio = c1 / c2 if c2 > 0 else 0.0
    return (-round(ratio, 12), -round(c1, 12), sigma)


def best_subset_exhaustive(
    u: DenseOperator, target: int, budget: int = DEFAULT_BUDGET, normalize: bool = True, eps: float | None = None
) -> InvertibilityCertificate:
    """Subset of size ``target`` maximising ``c1/c2``.

    Ties (to 12 decimals) go to the larger ``c1``, then to the
    lexicographically smallest subset.
    """
    v = _prepare(u, normalize)
    if not 1 <= target <= v.cols:
        raise InputError(f"target must lie in 1..{v.cols}")
    count = math.comb(v.cols, target)
    if count > budget:
        raise BudgetExceeded(count, budget)
    best = None
    for sigma in combinations(range(v.cols), target):
        c1, c2 = restricted_extreme_singulars(v, sigma)
        key = _key(c1, c2, sigma)
        if best is None or key < best[0]:
            best = (key, sigma, c1, c2)
    _, sigma, c1, c2 = best
    return InvertibilityCertificate(sigma, c1, c2, target, v.label, eps, "exhaustive")


def best_subset_greedy(
    u: DenseOperator, target: int, normalize: bool = True, eps: float | None = None
) -> InvertibilityCertificate:
    """Add columns one at a time, each maximising the new smallest singular value.

    Ties go to the larger ``c1/c2``, then the lowest column index.
    """
    v = _prepare(u, normalize)
    if not 1 <= target <= v.cols:
        raise InputError(f"target must lie in 1..{v.cols}")
    chosen: list[int] = []
    while len(chosen) < target:
        best = None
        for j in range(v.cols):
            if j in chosen:
                continue
            c1, c2 = restricted_extreme_singulars(v, sorted(chosen + [j]))
            key = (-round(c1, 12), -round(c1 / c2 if c2 > 0 else 0.0, 12), j)
            if best is None or key < best[0]:
                best = (key, j)
        chosen.append(best[1])
    sigma = tuple(sorted(chosen))
    c1, c2 = restricted_extreme_singulars(v, sigma)
    return InvertibilityCertificate(sigma, c1, c2, target, v.label, eps, "greedy")


@dataclass
class TradeoffCurve:
    operator: str
    points: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def tradeoff_curve(
    u: DenseOperator,
    eps_grid,
    reference: str = "norm",
    budget: int = DEFAULT_BUDGET,
    normalize: bool = True,
) -> TradeoffCurve:
    """Best condition found at each ``eps``.

    ``reference='norm'`` targets ``(1-eps) N/||u||^2`` (unit columns);
    ``reference='hs'`` targets ``(1-eps) h`` on the operator rescaled to norm one.
    The empirical condition is to be read against the shape ``eps^-2 log(1/eps)``.
    """
    v = _prepare(u, normalize)
    out = TradeoffCurve(v.label)
    for eps in eps_grid:
        if reference == "norm":
            target = target_cardinality(v, eps)
        elif reference == "hs":
            s = spectral_norm(v)
            h = float(np.sum((v.matrix / s) ** 2))
            target = max(1, math.floor((1.0 - eps) * h + 1e-9))
        else:
            raise InputError(f"unknown reference {reference!r}")
        target = min(target, v.cols)
        try:
            cert = best_subset_exhaustive(v, target, budget, normalize=False, eps=eps)
        except BudgetExceeded:
            cert = best_subset_greedy(v, target, normalize=False, eps=eps)
        shape = eps**-2 * math.log(1.0 / eps) if 0 < eps < 1 else None
        out.points.append({"eps": float(eps), "certificate": cert.to_dict(), "shape": shape})
    return out
