"""Constructors for the operator families used in the experiments.

Family strings (``block:h=4,k=8``) are the CLI-facing descriptors; every
constructor checks its family's norm identities before returning.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .linalg import (
    DenseOperator,
    InputError,
    gram,
    hs_norm_sq,
    spectral_norm,
    sym_eigen_extremes,
)
from .randomness import RngHandle

_CHECK_TOL = 1e-10


def make_identity(N: int) -> DenseOperator:
    return DenseOperator(np.eye(N), label=f"identity:N={N}")


def block_of(j: int, k: int) -> int:
    """Block index ``l`` (0-based) of column ``j`` in a block operator."""
    return j // k


def make_block(h: int, k: int) -> DenseOperator:
    """``N = hk`` columns; the ``k`` columns of block ``l`` all equal ``e_l / sqrt(k)``."""
    if h < 1 or k < 1:
        raise InputError("block operator needs h, k >= 1")
    a = np.kron(np.eye(h), np.ones((1, k))) / np.sqrt(k)
    u = DenseOperator(a, label=f"block:h={h},k={k}")
    if abs(spectral_norm(u) - 1.0) > _CHECK_TOL or abs(hs_norm_sq(u) - h) > _CHECK_TOL * h:
        raise AssertionError("block operator norm identities violated")
    return u


def make_modified_block(h: int, k: int) -> DenseOperator:
    """Block operator on ``hk`` columns plus a last column ``e_{h+1}``; ``N = hk + 1``."""
    if h < 1 or k < 1:
        raise InputError("modified block operator needs h, k >= 1")
    a = np.zeros((h + 1, h * k + 1))
    a[:h, : h * k] = np.kron(np.eye(h), np.ones((1, k))) / np.sqrt(k)
    a[h, h * k] = 1.0
    u = DenseOperator(a, label=f"modblock:h={h},k={k}")
    lo, hi = sym_eigen_extremes(gram(u))
    if abs(lo - 1.0) > _CHECK_TOL or abs(hi - 1.0) > _CHECK_TOL:
        raise AssertionError("modified block gram is not the identity on h+1 coordinates")
    return u


def _reciprocal_integer(b) -> int:
    frac = Fraction(b).limit_denominator(10**6) if not isinstance(b, Fraction) else b
    if frac <= 0 or frac.numerator != 1 or abs(float(frac) - float(b)) > 1e-12:
        raise InputError(f"arc length must be 1/q for an integer q, got {b}")
    return frac.denominator


def arc_frequencies(K: int) -> np.ndarray:
    return np.arange(-K, K + 1)


def make_arc_operator(b, K: int, M: int) -> DenseOperator:
    """Normalised restriction to the arc ``[0, b)`` acting on characters ``-K..K``.

    Column for frequency ``f`` is ``t -> exp(2 pi i f t)`` on the grid
    ``t = s/M``, zeroed outside the arc and scaled by ``1/sqrt(bM)``, then
    embedded as real parts followed by imaginary parts (``2M`` rows).
    """
    q = _reciprocal_integer(b)
    if K < 0:
        raise InputError("maximum frequency must be nonnegative")
    if M % q:
        raise InputError(f"grid size M={M} is not aligned with arc length 1/{q}")
    if M < 4 * K + 4:
        raise InputError(f"grid size M={M} below the margin 4K+4={4 * K + 4}")
    L = M // q
    t = np.arange(M) / M
    freqs = arc_frequencies(K)
    z = np.exp(2j * np.pi * np.outer(t, freqs))
    z[L:] = 0.0
    z /= np.sqrt(L)
    a = np.vstack([z.real, z.imag])
    return DenseOperator(a, complex_embedded=True, label=f"arc:b=1/{q},K={K},M={M}")


def _check_tight(a: np.ndarray) -> None:
    g = a @ a.T
    if np.max(np.abs(g - np.eye(a.shape[0]))) > _CHECK_TOL:
        raise AssertionError("frame is not tight")
    norms = np.linalg.norm(a, axis=0)
    if np.ptp(norms) > 1e-12:
        raise AssertionError("frame columns have unequal norms")


def make_untf(m: int, k: int) -> DenseOperator:
    """Real harmonic frame: ``k`` columns in R^m, tight, each of norm ``sqrt(m/k)``.

    Rows are ``m`` rows of the real orthonormal Fourier basis of R^k (the
    constant row when ``m`` is odd, then cosine/sine pairs of frequencies
    ``1..m//2``), which stay clear of the Nyquist frequency whenever ``m < k``.
    """
    if m < 1 or k < m:
        raise InputError(f"tight frame needs k >= m >= 1, got m={m}, k={k}")
    if k == m:
        a = np.eye(m)
    else:
        cols = np.arange(k)
        rows = []
        if m % 2:
            rows.append(np.full(k, 1.0 / np.sqrt(k)))
        for f in range(1, m // 2 + 1):
            angle = 2.0 * np.pi * f * cols / k
            rows.append(np.sqrt(2.0 / k) * np.cos(angle))
            rows.append(np.sqrt(2.0 / k) * np.sin(angle))
        a = np.array(rows)
    _check_tight(a)
    return DenseOperator(a, label=f"untf:m={m},k={k}")


def make_doubled_onb(m: int, copies: int = 2) -> DenseOperator:
    """``copies`` stacked copies of the standard basis, scaled by ``1/sqrt(copies)``."""
    if m < 1 or copies < 1:
        raise InputError("doubled basis needs m, copies >= 1")
    a = np.tile(np.eye(m), (1, copies)) / np.sqrt(copies)
    _check_tight(a)
    return DenseOperator(a, label=f"onb:m={m},copies={copies}")


def make_gaussian(m: int, N: int, seed: int = 0) -> DenseOperator:
    """iid standard normal entries scaled by ``1/sqrt(m)``."""
    if m < 1 or N < 1:
        raise InputError("gaussian operator needs m, N >= 1")
    g = RngHandle(seed, 0).generator()
    return DenseOperator(g.standard_normal((m, N)) / np.sqrt(m), label=f"gaussian:m={m},N={N},seed={seed}")


def normalize_columns(u: DenseOperator) -> DenseOperator:
    """Divide each column by its norm; zero columns are rejected."""
    norms = u.column_norms()
    if np.any(norms == 0):
        raise InputError("cannot normalise an operator with a zero column")
    label = u.label if u.label.endswith("|cols") else f"{u.label}|cols"
    return u.with_matrix(u.matrix / norms, label=label)


def normalize_operator(u: DenseOperator) -> DenseOperator:
    """Rescale to operator norm one."""
    s = spectral_norm(u)
    if s == 0:
        raise InputError("cannot normalise the zero operator")
    return u.with_matrix(u.matrix / s, label=f"{u.label}|op")


@dataclass(frozen=True)
class OperatorFamily:
    kind: str
    params: dict = field(default_factory=dict)
    normalize: str | None = None

    def build(self) -> DenseOperator:
        p = self.params
        try:
            if self.kind == "identity":
                u = make_identity(int(p["N"]))
            elif self.kind == "block":
                u = make_block(int(p["h"]), int(p["k"]))
            elif self.kind == "modblock":
                u = make_modified_block(int(p["h"]), int(p["k"]))
            elif self.kind == "arc":
                u = make_arc_operator(Fraction(str(p["b"])), int(p["K"]), int(p["M"]))
            elif self.kind == "untf":
                u = make_untf(int(p["m"]), int(p["k"]))
            elif self.kind == "onb":
                u = make_doubled_onb(int(p["m"]), int(p.get("copies", 2)))
            elif self.kind == "gaussian":
                u = make_gaussian(int(p["m"]), int(p["N"]), int(p.get("seed", 0)))
            else:
                raise InputError(f"unknown operator family {self.kind!r}")
        except KeyError as exc:
            raise InputError(f"family {self.kind!r} is missing parameter {exc}") from None
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"bad parameters for {self.kind!r}: {exc}") from None
        if self.normalize == "cols":
            u = normalize_columns(u)
        elif self.normalize == "op":
            u = normalize_operator(u)
        elif self.normalize is not None:
            raise InputError(f"unknown normalisation {self.normalize!r}")
        return u

    def describe(self) -> str:
        body = ",".join(f"{k}={v}" for k, v in self.params.items())
        if self.normalize:
            body += f"{',' if body else ''}norm={self.normalize}"
        return f"{self.kind}:{body}"


_KNOWN = {
    "identity": {"N"},
    "block": {"h", "k"},
    "modblock": {"h", "k"},
    "arc": {"b", "K", "M"},
    "untf": {"m", "k"},
    "onb": {"m", "copies"},
    "gaussian": {"m", "N", "seed"},
}


def parse_family(text: str) -> OperatorFamily:
    """Parse ``kind:key=value,...``; ``norm=cols|op`` applies a normalisation."""
    kind, _, body = text.strip().partition(":")
    if kind not in _KNOWN:
        raise InputError(f"unknown operator family {kind!r}; choose from {sorted(_KNOWN)}")
    params: dict = {}
    normalize = None
    for item in filter(None, (s.strip() for s in body.split(","))):
        key, eq, value = item.partition("=")
        if not eq:
            raise InputError(f"malformed family parameter {item!r}")
        if key == "norm":
            normalize = value
        elif key not in _KNOWN[kind]:
            raise InputError(f"family {kind!r} has no parameter {key!r}")
        else:
            params[key] = value
    return OperatorFamily(kind, params, normalize)
