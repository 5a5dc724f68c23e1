"""Seed-splittable randomness and the two random-subset models.

Every trial draws from its own stream: ``SeedSequence(master_seed,
spawn_key=(stream,))`` feeding a counter-based Philox generator.  The family
name is recorded in result files via :data:`GENERATOR_FAMILY`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import InputError

GENERATOR_FAMILY = "numpy.Philox(SeedSequence(seed, spawn_key=(stream,)))"

SELECTORS = "selectors"
FIXED = "fixed"


@dataclass(frozen=True)
class RngHandle:
    seed: int
    stream: int = 0

    def __post_init__(self):
        if not (0 <= self.seed < 2**64 and 0 <= self.stream < 2**64):
            raise InputError("seed and stream must be unsigned 64-bit values")

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream,))
        return np.random.Generator(np.random.Philox(ss))

    def child(self, stream: int) -> "RngHandle":
        return RngHandle(self.seed, stream)


def as_generator(rng: RngHandle | np.random.Generator) -> np.random.Generator:
    return rng.generator() if isinstance(rng, RngHandle) else rng


@dataclass(frozen=True)
class SubsetSample:
    """Sorted 0-based indices plus how they were drawn."""

    indices: np.ndarray = field(repr=False)
    N: int
    scheme: str
    param: float
    seed: int | None = None
    stream: int | None = None

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=int).reshape(-1)
        if idx.size and (np.any(np.diff(idx) <= 0) or idx[0] < 0 or idx[-1] >= self.N):
            raise InputError("subset indices must be strictly increasing within 0..N-1")
        idx.setflags(write=False)
        object.__setattr__(self, "indices", idx)

    def __len__(self) -> int:
        return int(self.indices.size)

    def mask(self) -> np.ndarray:
        m = np.zeros(self.N, dtype=bool)
        m[self.indices] = True
        return m


def _meta(rng) -> tuple[int | None, int | None]:
    if isinstance(rng, RngHandle):
        return rng.seed, rng.stream
    return None, None


def sample_independent(N: int, delta: float, rng: RngHandle | np.random.Generator) -> SubsetSample:
    """Keep each index independently with probability ``delta``."""
    if not 0.0 <= delta <= 1.0:
        raise InputError(f"selector probability must lie in [0, 1], got {delta}")
    g = as_generator(rng)
    keep = g.random(N) < delta
    seed, stream = _meta(rng)
    return SubsetSample(np.flatnonzero(keep), N, SELECTORS, float(delta), seed, stream)


def sample_fixed(N: int, n: int, rng: RngHandle | np.random.Generator) -> SubsetSample:
    """Uniform subset of exactly ``n`` indices (partial Fisher-Yates)."""
    if not 0 <= n <= N:
        raise InputError(f"subset size must lie in 0..{N}, got {n}")
    g = as_generator(rng)
    perm = np.arange(N)
    draws = g.integers(np.arange(n), N) if n else np.empty(0, dtype=int)
    for i, j in enumerate(draws):
        perm[i], perm[j] = perm[j], perm[i]
    seed, stream = _meta(rng)
    return SubsetSample(np.sort(perm[:n]), N, FIXED, n, seed, stream)


def sample_subset(N: int, scheme: str, n: float, rng) -> SubsetSample:
    """Draw under ``scheme``: ``fixed`` takes ``|sigma| = n``, ``selectors`` uses delta = n/N."""
    if scheme == FIXED:
        if int(n) != n:
            raise InputError("fixed-cardinality scheme needs an integer n")
        return sample_fixed(N, int(n), rng)
    if scheme == SELECTORS:
        return sample_independent(N, min(n / N, 1.0), rng)
    raise InputError(f"unknown sampling scheme {scheme!r}")


def rademacher(count: int, rng: RngHandle | np.random.Generator) -> np.ndarray:
    """iid +-1 signs."""
    if count < 0:
        raise InputError("count must be nonnegative")
    g = as_generator(rng)
    return np.where(g.integers(0, 2, size=count) == 1, 1.0, -1.0)
