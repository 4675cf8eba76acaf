"""The coordinate chart U of G(n, m) around the reference plane P0.

A point of the chart is an ``n x m`` matrix ``Z``; the plane it represents
is spanned by the rows of ``[I_n | Z]``. Tangent vectors are ``n x m``
matrices expanded in the elementary basis ``E[i, a]``.

Flattening convention: every Gram, Hessian or Christoffel array indexes the
basis ``E[i, a]`` by the single integer ``i * m + a`` (row-major, i.e.
``X.ravel()``). Nothing else in the package uses a different order.

All closed forms at diagonal points are written with the Jordan-angle
tangents zero-padded to length ``max(n, m)``, which makes them valid for
``n < m`` as well as ``n >= m``.
"""
from dataclasses import dataclass

import numpy as np

from .numerics import DomainError, as_finite, svd


def flat_index(i, a, m):
    return i * m + a


def as_chart_point(Z):
    """Validate and return ``Z`` as a float ``n x m`` chart coordinate."""
    Z = as_finite(Z, "chart point")
    if 0 in Z.shape:
        raise DomainError(f"chart point needs n, m >= 1, got {Z.shape}")
    return Z


@dataclass(frozen=True)
class JordanAngles:
    """Jordan angles of a plane relative to P0, sorted descending.

    ``lam[a] = tan(theta[a])`` are the singular values of the chart
    coordinate. ``n`` and ``m`` record the Grassmannian the angles live in.
    """

    n: int
    m: int
    theta: np.ndarray
    lam: np.ndarray

    @property
    def p(self):
        return min(self.n, self.m)

    @classmethod
    def from_lambda(cls, lam, n, m):
        lam = np.asarray(lam, dtype=float)
        p = min(n, m)
        if lam.shape != (p,):
            raise DomainError(f"need {p} Jordan angles for G({n},{m}), got {lam.shape}")
        if np.any(lam < 0) or not np.all(np.isfinite(lam)):
            raise DomainError("tan of Jordan angles must be finite and nonnegative")
        order = np.argsort(-lam, kind="stable")
        lam = lam[order]
        return cls(n, m, np.arctan(lam), lam)

    @classmethod
    def from_theta(cls, theta, n, m):
        theta = np.asarray(theta, dtype=float)
        if np.any(theta < 0) or np.any(theta >= np.pi / 2):
            raise DomainError("Jordan angles must lie in [0, pi/2)")
        return cls.from_lambda(np.tan(theta), n, m)

    def padded(self):
        """Row and column tangents ``(lam_rows[n], lam_cols[m])``, zero-padded."""
        rows = np.zeros(self.n)
        cols = np.zeros(self.m)
        rows[: self.p] = self.lam
        cols[: self.p] = self.lam
        return rows, cols

    def diagonal_point(self):
        Z0 = np.zeros((self.n, self.m))
        idx = np.arange(self.p)
        Z0[idx, idx] = self.lam
        return Z0


@dataclass(frozen=True)
class DiagonalNormalization:
    """Orthogonal ``U`` (n x n), ``V`` (m x m) with ``U @ Z @ V == Z0`` diagonal."""

    U: np.ndarray
    V: np.ndarray
    angles: JordanAngles
    Z0: np.ndarray

    def push(self, X):
        """Transport a tangent vector at ``Z`` to the normalized frame at ``Z0``."""
        return self.U @ X @ self.V

    def pull(self, X0):
        return self.U.T @ X0 @ self.V.T


def jordan_angles(Z):
    Z = as_chart_point(Z)
    n, m = Z.shape
    s = np.linalg.svd(Z, compute_uv=False)
    return JordanAngles.from_lambda(s, n, m)


def principal_angles(A, B):
    """Principal angles between the column spans of ``A`` and ``B``.

    Frames are orthonormalized by QR; the cosines are the singular values of
    ``Qa^T Qb``. Returned descending, to line up with :func:`jordan_angles`.
    """
    Qa = np.linalg.qr(np.asarray(A, dtype=float))[0]
    Qb = np.linalg.qr(np.asarray(B, dtype=float))[0]
    cos = np.clip(np.linalg.svd(Qa.T @ Qb, compute_uv=False), -1.0, 1.0)
    return np.sort(np.arccos(cos))[::-1]


def plane_frame(Z):
    """Columns spanning the plane of ``Z`` in R^{n+m}: the vectors ``e_i + Z[i] e_{n+a}``."""
    Z = as_chart_point(Z)
    return np.vstack([np.eye(Z.shape[0]), Z.T])


def _factors(Z):
    n, m = Z.shape
    Ainv = np.linalg.inv(np.eye(n) + Z @ Z.T)
    Binv = np.linalg.inv(np.eye(m) + Z.T @ Z)
    return Ainv, Binv


def metric_inner(Z, X, Y):
    """Canonical metric ``tr((I+ZZ^T)^-1 X (I+Z^TZ)^-1 Y^T)``."""
    Z = as_chart_point(Z)
    Ainv, Binv = _factors(Z)
    return float(np.trace(Ainv @ X @ Binv @ np.asarray(Y).T))


def metric_gram(Z):
    """Gram matrix of the canonical metric in the flattened ``E[i, a]`` basis.

    Entry ``((i,a),(j,b))`` equals ``(I+ZZ^T)^-1[i,j] * (I+Z^TZ)^-1[a,b]``,
    i.e. the Kronecker product of the two factors.
    """
    Z = as_chart_point(Z)
    Ainv, Binv = _factors(Z)
    G = np.kron(Ainv, Binv)
    return 0.5 * (G + G.T)


def metric_gram_diag(angles):
    """Diagonal of the Gram matrix at the diagonal point of ``angles``."""
    rows, cols = angles.padded()
    return np.outer(1.0 / (1.0 + rows**2), 1.0 / (1.0 + cols**2)).ravel()


def metric_derivative(Z, W):
    """Derivative of the Gram matrix along the chart direction ``W``.

    Differentiating ``(I+ZZ^T)^-1`` and ``(I+Z^TZ)^-1`` gives
    ``-A^-1 dA A^-1`` with ``dA = WZ^T + ZW^T`` (resp. ``dB = W^TZ + Z^TW``).
    """
    Z = as_chart_point(Z)
    W = np.asarray(W, dtype=float)
    Ainv, Binv = _factors(Z)
    dA = W @ Z.T + Z @ W.T
    dB = W.T @ Z + Z.T @ W
    return -np.kron(Ainv @ dA @ Ainv, Binv) - np.kron(Ainv, Binv @ dB @ Binv)


def christoffel_diag(angles):
    """Christoffel symbols at the diagonal point of ``angles``.

    Returns ``Gam`` of shape ``(nm, nm, nm)`` with
    ``nabla_{E_a} E_b = sum_c Gam[a, b, c] E_c``. The only nonzero entries
    are ``Gam[(i,a),(a,b),(i,b)] -= lam_a/(1+lam_a^2)`` and
    ``Gam[(b,a),(j,b),(j,a)] -= lam_b/(1+lam_b^2)``.
    """
    n, m = angles.n, angles.m
    rows, cols = angles.padded()
    N = n * m
    Gam = np.zeros((N, N, N))
    for al in range(m):
        c_al = cols[al] / (1.0 + cols[al] ** 2)
        if c_al == 0.0 or al >= n:
            continue
        # first term: j = al, k = i, gamma = beta
        for i in range(n):
            for be in range(m):
                Gam[i * m + al, al * m + be, i * m + be] -= c_al
        # second term (role of the pair swapped): i = al, k = j, gamma = alpha'
        for j in range(n):
            for ga in range(m):
                Gam[al * m + ga, j * m + al, j * m + ga] -= c_al
    return Gam


def christoffel_contract(angles, grad):
    """``sum_c Gam[a, b, c] * grad[c]`` as an ``(nm, nm)`` matrix, without the full tensor."""
    n, m = angles.n, angles.m
    _, cols = angles.padded()
    g = np.asarray(grad, dtype=float).reshape(n, m)
    N = n * m
    out = np.zeros((N, N))
    for al in range(min(n, m)):
        c_al = cols[al] / (1.0 + cols[al] ** 2)
        if c_al == 0.0:
            continue
        # a = (i, al), b = (al, be) -> c = (i, be)
        out[al::m, al * m:(al + 1) * m] -= c_al * g
        # a = (al, ga), b = (j, al) -> c = (j, ga)
        out[al * m:(al + 1) * m, al::m] -= c_al * g.T
    return out


def normalize_diagonal(Z):
    """Orthogonal ``U, V`` with ``U Z V = Z0 = diag(lam)``, ``lam`` descending.

    An already diagonal ``Z`` is handled by signed permutations so that a
    sorted nonnegative diagonal returns identities.
    """
    Z = as_chart_point(Z)
    n, m = Z.shape
    p = min(n, m)
    off = Z.copy()
    idx = np.arange(p)
    off[idx, idx] = 0.0
    if not np.any(off):
        d = Z[idx, idx]
        order = np.argsort(-np.abs(d), kind="stable")
        U = np.eye(n)
        V = np.eye(m)
        perm_r = np.concatenate([order, np.arange(p, n)])
        perm_c = np.concatenate([order, np.arange(p, m)])
        U = U[perm_r]
        V = V[:, perm_c]
        signs = np.where(d[order] < 0, -1.0, 1.0)
        U[:p] *= signs[:, None]
    else:
        Us, _, Vs = svd(Z)
        U, V = Us.T, Vs
    Z0 = U @ Z @ V
    lam = np.abs(Z0[idx, idx])
    angles = JordanAngles(n, m, np.arctan(lam), lam)
    return DiagonalNormalization(U, V, angles, angles.diagonal_point())


def in_bjx(angles):
    """True iff every pair of distinct Jordan angles sums to less than pi/2."""
    th = np.sort(np.asarray(angles.theta))[::-1]
    if th.size < 2:
        return True
    return bool(th[0] + th[1] < np.pi / 2)


def random_orthogonal(rng, k):
    Q, R = np.linalg.qr(rng.standard_normal((k, k)))
    return Q * np.sign(np.diag(R))
