"""Dense complex matrix kernels.

Everything here works on plain ``numpy`` arrays.  Matrices in this package are
small (4x4 cores, a few hundred sites for chains), so LAPACK via numpy/scipy
is used directly; the functions add the checks and conventions the rest of
the package relies on (ascending eigenvalues, a fixed eigenvector phase,
overflow-safe log-determinants).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import NoConvergence, NonHermitian, DimensionMismatch


@dataclass(frozen=True)
class Tolerances:
    """Shared numerical thresholds.

    ``hermitian`` is applied relative to ``max(1, max|m|)`` so that the large
    nested commutators of the universality sequence are judged on the same
    footing as unit-scale cores.
    """

    hermitian: float = 1e-12
    residual: float = 1e-10
    degeneracy: float = 1e-9
    phase: float = 1e-8
    singular_pivot: float = 1e-300
    # pivot threshold after column equilibration, see log10_abs_det
    relative_pivot: float = 64 * np.finfo(float).eps


DEFAULT_TOL = Tolerances()


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(m, -1, -2))


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def hermiticity_residual(m: np.ndarray) -> float:
    m = np.asarray(m)
    return float(np.max(np.abs(m - dagger(m)))) if m.size else 0.0


def _check_square(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def check_hermitian(m: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    m = _check_square(m)
    scale = max(1.0, float(np.max(np.abs(m))) if m.size else 1.0)
    res = hermiticity_residual(m)
    if res > tol.hermitian * scale:
        raise NonHermitian(f"NonHermitian: max|m - m^dagger| = {res:.3e}")
    return m


def fix_phase(vectors: np.ndarray, threshold: float = DEFAULT_TOL.phase) -> np.ndarray:
    """Rotate each column so its first component above ``threshold`` is real positive."""
    v = np.array(vectors, dtype=complex, copy=True)
    for k in range(v.shape[1]):
        col = v[:, k]
        idx = np.flatnonzero(np.abs(col) > threshold)
        if idx.size:
            z = col[idx[0]]
            v[:, k] = col * (abs(z) / z)
    return v


def _orthonormalize_clusters(w: np.ndarray, v: np.ndarray, gap: float) -> np.ndarray:
    start = 0
    n = len(w)
    while start < n:
        stop = start + 1
        while stop < n and w[stop] - w[stop - 1] < gap:
            stop += 1
        if stop - start > 1:
            q, _ = np.linalg.qr(v[:, start:stop])
            v[:, start:stop] = q
        start = stop
    return v


def hermitian_eig(m: np.ndarray, tol: Tolerances = DEFAULT_TOL):
    """Eigen-decomposition of a Hermitian matrix.

    Returns ``(eigenvalues, eigenvectors)`` with eigenvalues ascending and the
    eigenvectors as columns.  Vectors inside a degenerate cluster (gap below
    ``tol.degeneracy``) are re-orthonormalized; callers must not depend on the
    basis chosen inside such a cluster.
    """
    m = check_hermitian(m, tol)
    h = 0.5 * (m + dagger(m))
    try:
        w, v = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NoConvergence(f"NoConvergence: {exc}") from exc
    v = _orthonormalize_clusters(w, v, tol.degeneracy)
    v = fix_phase(v, tol.phase)
    resid = np.linalg.norm(h @ v - v * w, axis=0)
    bound = tol.residual * (1.0 + np.abs(w))
    if np.any(resid > bound):
        raise NoConvergence(f"NoConvergence: eigen-residual {resid.max():.3e}")
    return w, v


def expm_hermitian(m: np.ndarray, t: float = 1.0, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """``exp(-i t m)`` for Hermitian ``m``, built from the eigen-decomposition."""
    w, v = hermitian_eig(m, tol)
    return (v * np.exp(-1j * t * w)) @ dagger(v)


def unitarity_residual(u: np.ndarray) -> float:
    u = np.asarray(u)
    return float(np.max(np.abs(dagger(u) @ u - np.eye(u.shape[0]))))


def log10_abs_det(m: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> float:
    """``log10 |det m|`` without forming the determinant.

    Columns are equilibrated (each divided by its largest modulus) before an
    LU factorization with partial pivoting, and the logarithms of the scales and
    pivots are summed.  Returns ``-inf`` when a pivot falls below
    ``tol.singular_pivot`` or below ``tol.relative_pivot`` on the equilibrated
    matrix: an exactly duplicated column never gives a zero pivot in floating
    point, only one at rounding level.
    """
    m = _check_square(m)
    n = m.shape[0]
    if n == 0:
        return 0.0
    scales = np.max(np.abs(m), axis=0)
    if np.any(scales < tol.singular_pivot):
        return float("-inf")
    lu, _ = scipy.linalg.lu_factor(m / scales, check_finite=False)
    pivots = np.abs(np.diag(lu))
    if np.any(pivots < tol.singular_pivot) or np.any(pivots < tol.relative_pivot):
        return float("-inf")
    return float(np.sum(np.log10(scales)) + np.sum(np.log10(pivots)))


def column_normalized_rank(m: np.ndarray, rtol: float = 1e-12) -> int:
    """Numerical rank after scaling every column to unit 2-norm.

    Plain SVD rank is misleading when column norms span many decades (the
    nested commutators grow by ~10 per level); normalizing removes that
    artificial spread without changing the true rank.
    """
    m = np.asarray(m)
    norms = np.linalg.norm(m, axis=0)
    keep = norms > 0
    if not np.any(keep):
        return 0
    s = np.linalg.svd(m[:, keep] / norms[keep], compute_uv=False)
    return int(np.sum(s > rtol * s[0]))
