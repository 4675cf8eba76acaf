"""Graphs ``M = (x, f(x))`` in R^{n+m} and their Gauss maps into the chart.

The Gauss map of a graph lands in the chart at ``Z = Df``: the tangent
plane is spanned by ``f_i = e_i + df^a/dx^i e_{n+a}``. Everything here is
pointwise, driven by second-order jets of ``f``.
"""
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .grassmann import as_chart_point
from .numerics import DomainError, as_finite
from .scalarfuncs import base_of, h_value, jet_at, u_value, v_value

MINIMAL_TOL = 1e-6
SYM_TOL = 1e-12


@dataclass(frozen=True)
class GraphJet:
    """Point ``x``, first derivatives ``Df[i, a]`` and second ``D2f[i, j, a]``."""

    x: np.ndarray
    Df: np.ndarray
    D2f: np.ndarray

    def __post_init__(self):
        x = as_finite(self.x, "x", ndim=1)
        Df = as_finite(self.Df, "Df")
        D2f = as_finite(self.D2f, "D2f", ndim=3)
        n, m = Df.shape
        if x.shape != (n,) or D2f.shape != (n, n, m):
            raise DomainError(
                f"inconsistent jet shapes: x {x.shape}, Df {Df.shape}, D2f {D2f.shape}"
            )
        asym = np.max(np.abs(D2f - D2f.transpose(1, 0, 2)))
        if asym > SYM_TOL * (1 + np.max(np.abs(D2f))):
            raise DomainError(f"D2f is not symmetric in (i, j): max asymmetry {asym:.3g}")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "Df", Df)
        object.__setattr__(self, "D2f", 0.5 * (D2f + D2f.transpose(1, 0, 2)))

    @property
    def n(self):
        return self.Df.shape[0]

    @property
    def m(self):
        return self.Df.shape[1]


def gauss_point(j):
    return as_chart_point(j.Df.copy())


def delta_f(j):
    """``sqrt(det(I + Df Df^T))``, i.e. v at the Gauss image."""
    return float(v_value(j.Df))


def lambda_f(j):
    """``sum (df^a/dx^i)^2``, i.e. u at the Gauss image."""
    return float(u_value(j.Df))


def slope_predicates(j):
    return {"delta_f_lt_2": delta_f(j) < 2.0, "lambda_f_lt_2": lambda_f(j) < 2.0}


def induced_metric(j):
    return np.eye(j.n) + j.Df @ j.Df.T


def tangent_frame(j):
    """Rows ``f_i = (e_i, Df[i])`` in R^{n+m}."""
    return np.hstack([np.eye(j.n), j.Df])


def normal_frame(j):
    """Orthonormal rows spanning the normal space.

    Gram-Schmidt, in order, on the projections of ``e_{n+a}`` onto the
    orthogonal complement of the tangent space.
    """
    T = tangent_frame(j)
    g_inv = np.linalg.inv(induced_metric(j))
    P = np.eye(j.n + j.m) - T.T @ g_inv @ T
    cand = P[:, j.n:]
    Q, R = np.linalg.qr(cand)
    return (Q * np.sign(np.diag(R))).T


@dataclass(frozen=True)
class SecondFundamentalForm:
    B: np.ndarray       # (n, n, m), normal components in the frame
    normB2: float
    H: np.ndarray       # (m,), mean curvature in the frame
    frame: np.ndarray

    @property
    def mean_curvature_norm(self):
        return float(np.linalg.norm(self.H))


def second_fundamental_form(j, frame=None):
    """Normal projection of ``d_i d_j (x, f(x)) = (0, D2f[i, j])``."""
    g = induced_metric(j)
    w, Q = np.linalg.eigh(g)
    if w[0] <= 1e-14 * w[-1]:
        raise RuntimeError("degenerate induced metric")
    g_inv = (Q / w) @ Q.T
    N = normal_frame(j) if frame is None else np.asarray(frame, float)
    B = np.einsum("ija,ba->ijb", j.D2f, N[:, j.n:])
    normB2 = float(np.einsum("ik,jl,ijb,klb->", g_inv, g_inv, B, B))
    H = np.einsum("ij,ijb->b", g_inv, B)
    return SecondFundamentalForm(B, normB2, H, N)


# ---------------------------------------------------------------- analytic graphs

@dataclass
class AnalyticGraph:
    """A graph given by a jet evaluator.

    ``local`` says whether ``evaluator`` can be queried at points near the
    sample points (true for closed-form graphs); tabulated graphs only
    answer at their own sample points.
    """

    kind: str
    evaluator: Callable[[np.ndarray], GraphJet]
    n: int
    m: int
    local: bool = True
    points: Optional[list] = field(default=None, repr=False)

    def __call__(self, x):
        return self.evaluator(np.asarray(x, dtype=float))


def affine_graph(C, b=None):
    """``f(x) = C^T x + b`` with ``Df = C`` everywhere."""
    C = as_finite(C, "slope")
    n, m = C.shape

    def ev(x):
        return GraphJet(x, C.copy(), np.zeros((n, n, m)))

    return AnalyticGraph("affine", ev, n, m)


def holomorphic_pair(coeffs=(0.0, 0.0, 1.0)):
    """``f = (Re phi(z), Im phi(z))`` over ``z = x1 + i x2``, ``phi = sum c_k z^k``.

    Complex-analytic graphs are minimal surfaces in R^4.
    """
    c = np.asarray(coeffs, dtype=complex)
    P = np.polynomial.Polynomial(c)
    P1, P2 = P.deriv(1), P.deriv(2)

    def ev(x):
        z = complex(x[0], x[1])
        d1, d2 = P1(z), P2(z)
        Df = np.array([[d1.real, d1.imag], [-d1.imag, d1.real]])
        D2f = np.empty((2, 2, 2))
        D2f[0, 0] = (d2.real, d2.imag)
        D2f[0, 1] = D2f[1, 0] = (-d2.imag, d2.real)
        D2f[1, 1] = (-d2.real, -d2.imag)
        return GraphJet(x, Df, D2f)

    return AnalyticGraph("holomorphic-pair", ev, 2, 2)


_HOPF = np.zeros((3, 4, 4))
_HOPF[0] = np.diag([1.0, 1.0, -1.0, -1.0])
_HOPF[1, 0, 2] = _HOPF[1, 2, 0] = _HOPF[1, 1, 3] = _HOPF[1, 3, 1] = 1.0
_HOPF[2, 1, 2] = _HOPF[2, 2, 1] = 1.0
_HOPF[2, 0, 3] = _HOPF[2, 3, 0] = -1.0
LO_SCALE = np.sqrt(5.0) / 2.0


def lawson_osserman_cone(x):
    """Jet of ``f(x) = (sqrt(5)/2) |x| eta(x/|x|)`` with ``eta`` the Hopf map.

    With ``z1 = x1 + i x2``, ``z2 = x3 + i x4`` the Hopf map is
    ``(|z1|^2 - |z2|^2, 2 Re(z1 conj z2), 2 Im(z1 conj z2))``, a quadratic
    form ``q`` per component, so ``f = c q(x) / r``.
    """
    x = as_finite(x, "x", ndim=1)
    if x.shape != (4,):
        raise DomainError("the Lawson-Osserman cone is a graph over R^4")
    r = float(np.linalg.norm(x))
    if r < 1e-6:
        raise DomainError(f"|x| = {r:.3g} too close to the cone vertex")
    Qx = _HOPF @ x                       # (3, 4)
    q = Qx @ x                           # (3,)
    Df = LO_SCALE * (2 * Qx / r - np.outer(q, x) / r**3)      # (3, 4) -> transpose below
    D2f = LO_SCALE * (
        2 * _HOPF / r
        - 2 * (Qx[:, :, None] * x[None, None, :] + Qx[:, None, :] * x[None, :, None]) / r**3
        - q[:, None, None] * np.eye(4)[None] / r**3
        + 3 * q[:, None, None] * np.outer(x, x)[None] / r**5
    )
    return GraphJet(x, Df.T, D2f.transpose(1, 2, 0))


def lawson_osserman_graph():
    return AnalyticGraph("lawson-osserman", lawson_osserman_cone, 4, 3)


def tabulated_graph(jets):
    """A user-supplied graph known only at its sample points."""
    jets = list(jets)
    if not jets:
        raise DomainError("tabulated graph needs at least one jet")
    n, m = jets[0].n, jets[0].m
    table = {tuple(j.x): j for j in jets}

    def ev(x):
        try:
            return table[tuple(np.asarray(x, float))]
        except KeyError:
            raise DomainError(f"tabulated graph has no jet at x = {x}") from None

    return AnalyticGraph("user-supplied", ev, n, m, local=False, points=[j.x for j in jets])


# ---------------------------------------------------------------- Gauss map

def gauss_pushforward(graph, x, fd_step=1e-4):
    """``gamma_* e_a`` for an orthonormal tangent frame ``e_a`` of M at ``x``.

    Coordinate derivatives ``dZ/dx^k`` come from Richardson-extrapolated
    central differences of ``Df`` when the graph can be evaluated nearby,
    else from ``D2f``. They are recombined with ``g^{-1/2}``.
    Returns an array of shape ``(n, n, m)``: one tangent vector per frame leg.
    """
    x = np.asarray(x, float)
    j = graph(x)
    n = j.n
    if graph.local:
        def central(h):
            out = np.empty_like(j.D2f)
            for k in range(n):
                e = np.zeros(n)
                e[k] = h
                out[k] = (graph(x + e).Df - graph(x - e).Df) / (2 * h)
            return out
        dZ = (4 * central(fd_step / 2) - central(fd_step)) / 3
    else:
        dZ = j.D2f
    w, Q = np.linalg.eigh(induced_metric(j))
    S = (Q / np.sqrt(w)) @ Q.T
    return np.einsum("ka,kim->aim", S, dZ)


def energy_density_twice(Z, legs):
    """``sum_a |X_a|^2`` in the canonical metric at ``Z``."""
    n, m = Z.shape
    Ainv = np.linalg.inv(np.eye(n) + Z @ Z.T)
    Binv = np.linalg.inv(np.eye(m) + Z.T @ Z)
    return float(sum(np.trace(Ainv @ X @ Binv @ X.T) for X in legs))


def gauss_energy_identity(graph, x, fd_step=1e-4):
    """Both sides of ``2 e(gamma) = |B|^2`` at ``x``: returns ``(lhs, rhs)``."""
    j = graph(x)
    legs = gauss_pushforward(graph, x, fd_step)
    return energy_density_twice(j.Df, legs), second_fundamental_form(j).normB2


# ---------------------------------------------------------------- composed Laplacians

LAPLACIAN_CONSTANTS = {
    "h1": lambda p: 1.5 + 1.0 / p,
    "h2": lambda p: 1.5 + 1.0 / (3 * p),
    "h3": lambda p: 1.0 + 2.0 / p,
    "h4": lambda p: 4.0 / 3 + 2.0 / (3 * p),
}


@dataclass(frozen=True)
class LaplacianCheck:
    kind: str
    status: str                 # "pass", "fail" or "out-of-domain"
    laplacian: float = float("nan")
    bound: float = float("nan")
    margin: float = float("nan")
    laplacian_fd: float = float("nan")
    reason: str = ""

    @property
    def verdict(self):
        return self.status == "pass"


def laplace_beltrami_fd(graph, x, phi, step=1e-3):
    """Laplace-Beltrami of ``phi(Df(y))`` on M at ``x``, by finite differences.

    Uses ``g^{kl} d_k d_l phi + (1/sqrt g) d_k(sqrt g g^{kl}) d_l phi`` with
    the metric derivatives taken from ``D2f``; no minimality assumed.
    """
    x = np.asarray(x, float)
    j = graph(x)
    n = j.n
    g = induced_metric(j)
    gi = np.linalg.inv(g)

    def derivs(h):
        I = np.eye(n) * h
        f0 = phi(j.Df)
        grad = np.empty(n)
        hess = np.empty((n, n))
        for k in range(n):
            fp, fm = phi(graph(x + I[k]).Df), phi(graph(x - I[k]).Df)
            grad[k] = (fp - fm) / (2 * h)
            hess[k, k] = (fp - 2 * f0 + fm) / h**2
            for l in range(k + 1, n):
                s = (phi(graph(x + I[k] + I[l]).Df) - phi(graph(x + I[k] - I[l]).Df)
                     - phi(graph(x - I[k] + I[l]).Df) + phi(graph(x - I[k] - I[l]).Df))
                hess[k, l] = hess[l, k] = s / (4 * h * h)
        return grad, hess

    g1, H1 = derivs(step)
    g2, H2 = derivs(step / 2)
    grad = (4 * g2 - g1) / 3
    hess = (4 * H2 - H1) / 3
    dg = np.einsum("kia,ja->kij", j.D2f, j.Df)
    dg = dg + dg.transpose(0, 2, 1)
    drift = np.zeros(n)
    for k in range(n):
        gdg = gi @ dg[k]
        drift += 0.5 * np.trace(gdg) * gi[k] - (gdg @ gi)[k]
    return float(np.sum(gi * hess) + drift @ grad)


def composed_laplacian_check(graph, x, kind, tol=1e-8, minimal_tol=MINIMAL_TOL,
                             fd_step=1e-4, laplacian_oracle=True):
    """Pointwise Laplacian inequality for ``h o gamma`` on a minimal graph.

    Raises :class:`DomainError` when the mean curvature exceeds
    ``minimal_tol`` (the composition formula then has a tension term).
    Points whose Gauss image is outside ``v < 2`` (h1, h2) or ``u < 2``
    (h3, h4), or graphs with ``min(n, m) < 2``, come back "out-of-domain".
    """
    j = graph(x)
    sff = second_fundamental_form(j)
    if sff.mean_curvature_norm > minimal_tol:
        raise DomainError(
            f"graph is not minimal at x (|H| = {sff.mean_curvature_norm:.3g} > {minimal_tol:g})"
        )
    p = min(j.n, j.m)
    base = base_of(kind)
    s = delta_f(j) if base == "v" else lambda_f(j)
    if p < 2:
        return LaplacianCheck(kind, "out-of-domain", reason="min(n, m) < 2")
    if s >= 2.0:
        return LaplacianCheck(kind, "out-of-domain", reason=f"{base} = {s:.12g} >= 2")

    jt = jet_at(kind, j.Df)
    legs = gauss_pushforward(graph, x, fd_step)
    flat = np.array([jt.normalization.push(X).ravel() for X in legs])
    lap = float(np.einsum("ai,ij,aj->", flat, jt.hessian, flat))
    dh = flat @ jt.covector
    hv = jt.value
    c = LAPLACIAN_CONSTANTS[kind](p)
    B2 = sff.normB2
    if kind in ("h1", "h3"):
        bound = -c * B2 * hv
        margin = bound - lap
    else:
        bound = 3 * hv * B2 + c / hv * float(dh @ dh)
        margin = lap - bound
    ok = margin >= -tol * (1 + abs(lap) + abs(bound))
    lap_fd = float("nan")
    if laplacian_oracle and graph.local:
        lap_fd = laplace_beltrami_fd(graph, x, lambda Z: float(h_value(kind, Z)))
    return LaplacianCheck(kind, "pass" if ok else "fail", lap, bound, margin, lap_fd)
