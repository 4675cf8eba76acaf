"""Small dense linear algebra used throughout the package.

Everything here wraps numpy/LAPACK kernels behind checked contracts:
inputs must be finite, symmetric inputs are symmetrized before any
eigendecomposition, and positive-definiteness failures name the offending
eigenvalue.
"""
from dataclasses import dataclass

import numpy as np

MAX_DIM = 64


class DomainError(ValueError):
    """Raised when an input lies outside the domain of an operation."""


def as_finite(A, name="matrix", ndim=2):
    A = np.asarray(A, dtype=float)
    if ndim is not None and A.ndim != ndim:
        raise DomainError(f"{name} must be {ndim}-dimensional, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise DomainError(f"{name} has non-finite entries")
    if any(s > MAX_DIM for s in A.shape):
        raise DomainError(f"{name} exceeds the {MAX_DIM}x{MAX_DIM} size cap: {A.shape}")
    return A


def symmetrize(A):
    return 0.5 * (A + A.T)


@dataclass(frozen=True)
class SymmetricSpectrum:
    """Eigenvalues (ascending) and eigenvectors (columns) of a symmetric matrix."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self):
        Q = self.eigenvectors
        return (Q * self.eigenvalues) @ Q.T


def svd(A):
    """Full singular value decomposition ``A = U diag(s) V^T``.

    Returns ``(U, s, V)`` with square orthogonal ``U`` and ``V`` and ``s``
    sorted descending. Note that ``V`` itself is returned, not its transpose.
    """
    A = as_finite(A, "svd input")
    U, s, Vt = np.linalg.svd(A, full_matrices=True)
    return U, s, Vt.T


def sym_eig(A):
    A = as_finite(A, "sym_eig input")
    if A.shape[0] != A.shape[1]:
        raise DomainError(f"sym_eig needs a square matrix, got {A.shape}")
    w, Q = np.linalg.eigh(symmetrize(A))
    return SymmetricSpectrum(w, Q)


def inv_sqrt_spd(G, rel_floor=1e-12):
    """Return ``G^{-1/2}`` for a symmetric positive definite ``G``."""
    G = as_finite(G, "Gram matrix")
    w, Q = np.linalg.eigh(symmetrize(G))
    wmax = max(abs(w[-1]), np.finfo(float).tiny)
    if w[0] <= rel_floor * wmax:
        raise DomainError(
            f"Gram matrix is not positive definite: min eigenvalue {w[0]:.6g} "
            f"(max {w[-1]:.6g})"
        )
    return (Q / np.sqrt(w)) @ Q.T


def gen_sym_eig(A, G):
    """Eigenvalues of ``G^{-1/2} A G^{-1/2}``, sorted ascending.

    ``A`` is positive semidefinite relative to the inner product ``G`` iff
    the smallest returned value is nonnegative.
    """
    A = as_finite(A, "form")
    S = inv_sqrt_spd(G)
    return np.linalg.eigvalsh(symmetrize(S @ symmetrize(A) @ S))


def _checked_inverse(A):
    A = as_finite(A, "matrix")
    if A.shape[0] != A.shape[1]:
        raise DomainError(f"expected a square matrix, got {A.shape}")
    s = np.linalg.svd(A, compute_uv=False)
    if s[-1] <= 1e-14 * max(s[0], 1.0):
        raise DomainError(f"matrix is singular (smallest singular value {s[-1]:.3g})")
    return np.linalg.inv(A)


def logdet_directional(A, dA):
    """First derivative of ``log det A`` along a direction: ``tr(dA A^{-1})``.

    ``dA`` is the derivative of the matrix-valued function along that
    direction, evaluated at the same point as ``A``.
    """
    Ainv = _checked_inverse(A)
    return float(np.trace(as_finite(dA, "dA") @ Ainv))


def logdet_second(A, dXA, dYA, dYdXA):
    """Second derivative ``tr(dYdXA A^{-1}) - tr(dXA A^{-1} dYA A^{-1})``."""
    Ainv = _checked_inverse(A)
    P = as_finite(dXA, "dXA") @ Ainv
    Q = as_finite(dYA, "dYA") @ Ainv
    return float(np.trace(as_finite(dYdXA, "dYdXA") @ Ainv) - np.trace(P @ Q))
