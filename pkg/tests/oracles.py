"""Independent reference computations used only by the tests."""

from __future__ import annotations

import itertools
import math

import numpy as np


def jacobi_eigenvalues(a, tol: float = 1e-12, max_sweeps: int = 100) -> np.ndarray:
    """Cyclic Jacobi rotations until the off-diagonal Frobenius mass is below ``tol``."""
    a = np.array(a, dtype=float)
    n = a.shape[0]
    for _ in range(max_sweeps):
        off = math.sqrt(float(np.sum(np.triu(a, 1) ** 2) * 2))
        if off < tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if a[p, q] == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * a[p, q])
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                rot = np.eye(n)
                rot[p, p] = rot[q, q] = c
                rot[p, q] = s
                rot[q, p] = -s
                a = rot.T @ a @ rot
    return np.sort(np.diag(a))


def jacobi_spectral_norm(m) -> float:
    m = np.asarray(m, dtype=float)
    g = m.T @ m
    return math.sqrt(max(jacobi_eigenvalues(g)[-1], 0.0))


def triple_loop_gram(a) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    rows, cols = a.shape
    g = np.zeros((rows, rows))
    for i in range(rows):
        for k in range(rows):
            s = 0.0
            for j in range(cols):
                s += a[i, j] * a[k, j]
            g[i, k] = s
    return g


def svd_norm(m) -> float:
    m = np.asarray(m, dtype=float)
    if m.size == 0:
        return 0.0
    return float(np.linalg.svd(m, compute_uv=False)[0])


def all_subset_norms(a, n: int) -> dict:
    a = np.asarray(a, dtype=float)
    return {s: svd_norm(a[:, list(s)]) for s in itertools.combinations(range(a.shape[1]), n)}


def brute_min_norm(a, n: int) -> float:
    return min(all_subset_norms(a, n).values())
