"""Dense complex linear algebra for small quantum objects.

All matrices and vectors are plain complex numpy arrays. Every function
treats its inputs as immutable and returns freshly allocated, read-only
arrays, so values can be shared freely across threads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_TOL = 1e-10
MAX_COMPOSITE_DIM = 1024


class ValidationError(ValueError):
    """A matrix failed one of the quantum-state validity checks."""


class NotHermitianError(ValidationError):
    pass


class NotUnitTraceError(ValidationError):
    pass


class NotPSDError(ValidationError):
    pass


def frozen(a: np.ndarray) -> np.ndarray:
    """Copy of `a` with the write flag cleared."""
    out = np.array(a, dtype=complex, copy=True)
    out.setflags(write=False)
    return out


def as_matrix(m) -> np.ndarray:
    """Coerce to a finite 2-D complex array."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise ValueError(f"expected a 2-D matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix contains NaN or Inf entries")
    return a


def as_vector(v) -> np.ndarray:
    """Coerce to a finite 1-D complex array."""
    a = np.asarray(v, dtype=complex)
    if a.ndim != 1 or a.shape[0] < 1:
        raise ValueError(f"expected a 1-D vector, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("vector contains NaN or Inf entries")
    return a


def dagger(m: np.ndarray) -> np.ndarray:
    return m.conj().T


def max_abs(m: np.ndarray) -> float:
    return float(np.max(np.abs(m))) if m.size else 0.0


def tensor(a, b) -> np.ndarray:
    """Kronecker product with a-index major, b-index minor block ordering.

    Entry ((i, k), (j, l)) of the result is a[i, j] * b[k, l], living at
    row i * b.rows + k, column j * b.cols + l. Raises if the combined
    dimension would exceed MAX_COMPOSITE_DIM.
    """
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape[0] * b.shape[0] > MAX_COMPOSITE_DIM or a.shape[1] * b.shape[1] > MAX_COMPOSITE_DIM:
        raise ValueError(
            f"tensor product dimension {a.shape[0] * b.shape[0]}x{a.shape[1] * b.shape[1]} "
            f"exceeds the configured maximum {MAX_COMPOSITE_DIM}"
        )
    return np.kron(a, b)


def partial_trace_second(m, dim_first: int, dim_second: int) -> np.ndarray:
    """Trace out the second factor of a (dim_first * dim_second)-sided matrix.

    Entry (i, j) of the result is sum_k m[(i, k), (j, k)].
    """
    m = as_matrix(m)
    side = dim_first * dim_second
    if m.shape != (side, side):
        raise ValueError(
            f"matrix side {m.shape} does not match dim_first*dim_second = {dim_first}*{dim_second}"
        )
    blocks = m.reshape(dim_first, dim_second, dim_first, dim_second)
    return np.einsum("ikjk->ij", blocks)


@dataclass(frozen=True)
class DensityMatrix:
    """A validated Hermitian, PSD, unit-trace matrix.

    Construct through validate_density; the stored array is hermitized,
    eigenvalue-clamped if needed, trace-renormalized, and read-only.
    """

    matrix: np.ndarray

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def diagonal(self) -> np.ndarray:
        """Real diagonal (the populations in the stored basis)."""
        return self.matrix.diagonal().real

    def purity(self) -> float:
        return float(np.trace(self.matrix @ self.matrix).real)


def validate_density(m, tol: float = DEFAULT_TOL) -> DensityMatrix:
    """Check that `m` is a density matrix and wrap it.

    Accepts iff the Hermiticity deviation, the unit-trace deviation, and
    the most negative eigenvalue are all within `tol`. Eigenvalues in
    [-tol, 0) are clamped to zero and the matrix renormalized to unit
    trace, which keeps downstream square roots of populations real.

    Raises NotHermitianError, NotUnitTraceError, or NotPSDError naming
    the measured violation.
    """
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"density matrix must be square, got shape {m.shape}")
    herm_dev = max_abs(m - dagger(m))
    if herm_dev > tol:
        raise NotHermitianError(f"Hermiticity deviation {herm_dev:.3e} exceeds tolerance {tol:.1e}")
    trace_dev = abs(m.trace() - 1.0)
    if trace_dev > tol:
        raise NotUnitTraceError(f"trace deviates from 1 by {trace_dev:.3e}, tolerance {tol:.1e}")
    h = (m + dagger(m)) / 2.0
    vals = np.linalg.eigvalsh(h)
    if vals[0] < -tol:
        raise NotPSDError(f"minimum eigenvalue {vals[0]:.3e} below -{tol:.1e}")
    if vals[0] < 0.0:
        vals_all, vecs = np.linalg.eigh(h)
        clamped = np.clip(vals_all, 0.0, None)
        h = (vecs * clamped) @ dagger(vecs)
        h = (h + dagger(h)) / 2.0
    h = h / h.trace().real
    return DensityMatrix(matrix=frozen(h))


def spectral_decompose(rho: DensityMatrix) -> list[tuple[float, np.ndarray]]:
    """Eigenpairs of a density matrix, eigenvalues descending.

    Eigenvalues are clamped at zero (they can undershoot by machine
    epsilon even for a validated input) and sum to one within tolerance;
    eigenvectors are orthonormal. For degenerate eigenvalues any
    orthonormal basis of the eigenspace may be returned, so callers must
    not rely on a specific choice. Eigensolver failures propagate as
    numpy.linalg.LinAlgError.
    """
    vals, vecs = np.linalg.eigh(rho.matrix)
    order = np.argsort(vals)[::-1]
    return [(max(float(vals[k]), 0.0), frozen(vecs[:, k])) for k in order]


def principal_submatrix_margin(m) -> float:
    """min over i != j of sqrt(m_ii * m_jj) - |m_ij|.

    Nonnegative for every PSD matrix: each principal 2x2 submatrix of a
    PSD matrix is itself PSD, so its determinant is nonnegative.
    """
    m = as_matrix(m)
    d = np.clip(m.diagonal().real, 0.0, None)
    margins = np.sqrt(np.outer(d, d)) - np.abs(m)
    np.fill_diagonal(margins, np.inf)
    return float(margins.min())


def gram_factor_vectors(gram, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Row vectors v_0 .. v_{n-1} with <v_i|v_j> equal to gram[i, j].

    Factorizes through the eigendecomposition so PSD-singular Gram
    matrices (e.g. all pairwise overlaps equal to one) are handled.
    """
    g = as_matrix(gram)
    if g.shape[0] != g.shape[1]:
        raise ValueError("Gram matrix must be square")
    herm_dev = max_abs(g - dagger(g))
    if herm_dev > tol:
        raise NotHermitianError(f"Gram Hermiticity deviation {herm_dev:.3e} exceeds {tol:.1e}")
    vals, vecs = np.linalg.eigh((g + dagger(g)) / 2.0)
    if vals[0] < -tol:
        raise NotPSDError(f"Gram minimum eigenvalue {vals[0]:.3e} below -{tol:.1e}")
    factors = vecs * np.sqrt(np.clip(vals, 0.0, None))
    # rows of conj(L) have <v_i|v_j> = (L L^dag)_ij = gram_ij
    return factors.conj()
