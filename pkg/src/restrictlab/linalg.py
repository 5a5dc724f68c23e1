"""Dense real linear algebra for coordinate restrictions.

Operators are stored column-first in meaning: column ``j`` of a
:class:`DenseOperator` is the image ``u e_j``.  Eigenvalue work is delegated
to LAPACK (``numpy.linalg.eigvalsh``); the test suite carries an independent
Jacobi eigensolver as the oracle.

Complex-valued operators (trigonometric characters) are stored through the
real isometric embedding ``z -> (Re z, Im z)`` of each column.  Operators
flagged ``complex_embedded`` have their norms and column Gram matrices
computed for the underlying complex operator.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np


class InputError(ValueError):
    """Raised for malformed or out-of-contract inputs."""


@dataclass(frozen=True)
class DenseOperator:
    """Real ``rows x cols`` matrix; column ``j`` is ``u e_j``."""

    matrix: np.ndarray
    complex_embedded: bool = False
    label: str = ""

    def __post_init__(self):
        a = np.array(self.matrix, dtype=float, copy=True)
        if a.ndim != 2:
            raise InputError(f"operator must be 2-d, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise InputError("operator has non-finite entries")
        if self.complex_embedded and a.shape[0] % 2:
            raise InputError("complex embedding needs an even row count")
        a.setflags(write=False)
        object.__setattr__(self, "matrix", a)

    @property
    def rows(self) -> int:
        return self.matrix.shape[0]

    @property
    def cols(self) -> int:
        return self.matrix.shape[1]

    def column(self, j: int) -> np.ndarray:
        return self.matrix[:, j]

    def column_norms(self) -> np.ndarray:
        return np.sqrt(np.einsum("ij,ij->j", self.matrix, self.matrix))

    def complex_matrix(self) -> np.ndarray:
        """Undo the real embedding (only for ``complex_embedded`` operators)."""
        half = self.rows // 2
        return self.matrix[:half] + 1j * self.matrix[half:]

    def with_matrix(self, matrix: np.ndarray, label: str | None = None) -> "DenseOperator":
        return DenseOperator(
            matrix,
            complex_embedded=self.complex_embedded,
            label=self.label if label is None else label,
        )


@dataclass(frozen=True)
class SymmetricOperator:
    """Real symmetric matrix; symmetry is enforced from the upper triangle."""

    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        a = np.array(self.matrix, dtype=float, copy=True)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise InputError(f"symmetric operator must be square, got {a.shape}")
        upper = np.triu(a)
        a = upper + np.triu(a, 1).T
        a.setflags(write=False)
        object.__setattr__(self, "matrix", a)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __sub__(self, other: "SymmetricOperator") -> "SymmetricOperator":
        return SymmetricOperator(self.matrix - other.matrix)


def _check_finite(a: np.ndarray) -> None:
    if not np.all(np.isfinite(a)):
        raise InputError("non-finite entries")


def _hermitian_as_real(g: np.ndarray) -> np.ndarray:
    """Real symmetric ``2n x 2n`` matrix with the eigenvalues of ``g`` doubled."""
    return np.block([[g.real, -g.imag], [g.imag, g.real]])


def column_gram(u: DenseOperator) -> np.ndarray:
    """``u* u`` (cols x cols); Hermitian Gram of the complex operator if embedded.

    Embedded operators return the real ``2 cols x 2 cols`` form of the Hermitian
    Gram so that its spectrum (each eigenvalue twice) stays real arithmetic.
    """
    a = u.matrix
    if not u.complex_embedded:
        return a.T @ a
    half = u.rows // 2
    re, im = a[:half], a[half:]
    g_re = re.T @ re + im.T @ im
    g_im = re.T @ im - im.T @ re
    return np.block([[g_re, -g_im], [g_im, g_re]])


def _eig_extremes(a: np.ndarray) -> tuple[float, float]:
    w = np.linalg.eigvalsh(a)
    return float(w[0]), float(w[-1])


def _smaller_gram(u: DenseOperator) -> np.ndarray:
    if u.complex_embedded:
        return column_gram(u)
    a = u.matrix
    return a @ a.T if u.rows <= u.cols else a.T @ a


def spectral_norm(u: DenseOperator) -> float:
    """Largest singular value, from the smaller of ``u u*`` and ``u* u``."""
    if u.rows == 0 or u.cols == 0:
        return 0.0
    _check_finite(u.matrix)
    _, top = _eig_extremes(_smaller_gram(u))
    return float(np.sqrt(max(top, 0.0)))


def hs_norm_sq(u: DenseOperator) -> float:
    """Squared Hilbert-Schmidt norm: the sum of squared entries."""
    a = u.matrix
    return float(np.einsum("ij,ij->", a, a))


def restrict_columns(u: DenseOperator, sigma: Sequence[int] | np.ndarray) -> DenseOperator:
    """Submatrix of the columns in ``sigma`` (order preserved, 0-based)."""
    idx = np.asarray(getattr(sigma, "indices", sigma), dtype=int).reshape(-1)
    if idx.size and (idx.min() < 0 or idx.max() >= u.cols):
        raise InputError(f"column index out of range 0..{u.cols - 1}")
    return u.with_matrix(u.matrix[:, idx])


def gram(u: DenseOperator) -> SymmetricOperator:
    """``u u^T`` as a sum of column outer products."""
    a = u.matrix
    return SymmetricOperator(a @ a.T)


def weighted_gram(u: DenseOperator, weights: Sequence[float] | np.ndarray) -> SymmetricOperator:
    """``sum_j w_j x_j (x) x_j`` for nonnegative per-column weights."""
    w = np.asarray(weights, dtype=float).reshape(-1)
    if w.size != u.cols:
        raise InputError(f"expected {u.cols} weights, got {w.size}")
    if np.any(w < 0):
        raise InputError("weights must be nonnegative")
    a = u.matrix
    return SymmetricOperator((a * w) @ a.T)


def sym_eigen_extremes(s: SymmetricOperator | np.ndarray) -> tuple[float, float]:
    a = s.matrix if isinstance(s, SymmetricOperator) else np.asarray(s, dtype=float)
    _check_finite(a)
    if a.size == 0:
        return 0.0, 0.0
    return _eig_extremes(a)


def sym_norm(s: SymmetricOperator) -> float:
    lo, hi = sym_eigen_extremes(s)
    return max(abs(lo), abs(hi))


def extreme_singular_values(u: DenseOperator) -> tuple[float, float]:
    """``(min, max)`` singular values of ``u`` as a map on its column space.

    The minimum is zero whenever ``u`` has more columns than (complex) rows.
    """
    if u.cols == 0:
        return 0.0, 0.0
    # SVD keeps small singular values to ~eps*|u| (sqrt of a Gram eigenvalue only to ~sqrt(eps))
    a = u.complex_matrix() if u.complex_embedded else u.matrix
    s = np.linalg.svd(a, compute_uv=False)
    lo = float(s[-1]) if a.shape[1] <= a.shape[0] else 0.0
    return lo, float(s[0])


def batch_gram_norms(grams: np.ndarray) -> np.ndarray:
    """Spectral norms of a stack of symmetric matrices (largest |eigenvalue|)."""
    w = np.linalg.eigvalsh(grams)
    return np.maximum(np.abs(w[..., 0]), np.abs(w[..., -1]))


def load_matrix(path: str | Path, label: str | None = None) -> DenseOperator:
    """Read the text format: ``rows cols`` then row-major decimals."""
    tokens = Path(path).read_text().split()
    if len(tokens) < 2:
        raise InputError(f"{path}: missing 'rows cols' header")
    try:
        rows, cols = int(tokens[0]), int(tokens[1])
        values = [float(t) for t in tokens[2:]]
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from None
    if rows < 1 or cols < 1 or len(values) != rows * cols:
        raise InputError(f"{path}: expected {rows}x{cols} values, got {len(values)}")
    return DenseOperator(np.array(values).reshape(rows, cols), label=label or f"file:{path}")


def save_matrix(u: DenseOperator, path: str | Path) -> None:
    lines = [f"{u.rows} {u.cols}"]
    lines += [" ".join(repr(float(v)) for v in row) for row in u.matrix]
    Path(path).write_text("\n".join(lines) + "\n")
