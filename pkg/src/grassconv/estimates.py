"""Hessian lower/upper bounds as checkable quadratic forms, and their oracles.

A :class:`GapForm` is ``Hess(f) - bound`` (or ``bound - Hess(f)`` for the
upper bounds on h1, h3) written in the flattened E basis together with the
metric Gram matrix. The estimate holds at a point iff the form is positive
semidefinite relative to the metric.
"""
from dataclasses import dataclass
from itertools import combinations_with_replacement

import numpy as np
from scipy.optimize import minimize

from .grassmann import (
    JordanAngles,
    as_chart_point,
    christoffel_contract,
    metric_gram,
    normalize_diagonal,
)
from .numerics import DomainError, gen_sym_eig, sym_eig
from .scalarfuncs import jet, k_exponent, u_jet, v_jet

PSD_TOL = 1e-8
ESTIMATES = ("es1", "es2", "es4", "es7", "h1", "h2", "h3", "h4")


# ---------------------------------------------------------------- FD oracle

def _coord_derivatives(f, Z0, h):
    n, m = Z0.shape
    N = n * m
    E = np.eye(N).reshape(N, n, m)
    pairs = [(a, b) for a in range(N) for b in range(a + 1, N)]
    pts = [Z0[None]]
    pts.append(Z0 + h * E)
    pts.append(Z0 - h * E)
    if pairs:
        A = np.array([a for a, _ in pairs])
        B = np.array([b for _, b in pairs])
        for sa, sb in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
            pts.append(Z0 + h * (sa * E[A] + sb * E[B]))
    vals = np.asarray(f(np.concatenate(pts)), dtype=float)
    if not np.all(np.isfinite(vals)):
        raise DomainError("finite-difference stencil left the domain of f")
    f0 = vals[0]
    fp = vals[1:1 + N]
    fm = vals[1 + N:1 + 2 * N]
    grad = (fp - fm) / (2 * h)
    H = np.diag((fp - 2 * f0 + fm) / h**2)
    if pairs:
        K = len(pairs)
        q = vals[1 + 2 * N:].reshape(4, K)
        mixed = (q[0] - q[1] - q[2] + q[3]) / (4 * h * h)
        H[A, B] = mixed
        H[B, A] = mixed
    return grad, H


def fd_derivatives(f, angles, step=1e-3):
    """Finite-difference gradient and covariant Hessian at a diagonal point.

    ``f`` maps a stack ``(K, n, m)`` of chart coordinates to ``K`` values.
    Central differences at ``step`` and ``step/2`` are combined by
    Richardson extrapolation; the Christoffel correction is then applied
    with the finite-difference gradient.
    """
    if not 1e-6 <= step <= 1e-2:
        raise DomainError(f"step {step} outside [1e-6, 1e-2]")
    Z0 = angles.diagonal_point()
    g1, H1 = _coord_derivatives(f, Z0, step)
    g2, H2 = _coord_derivatives(f, Z0, step / 2)
    grad = (4 * g2 - g1) / 3
    coord = (4 * H2 - H1) / 3
    hess = coord - christoffel_contract(angles, grad)
    return grad.reshape(Z0.shape), 0.5 * (hess + hess.T)


def fd_hessian(f, angles, step=1e-3):
    return fd_derivatives(f, angles, step)[1]


# ---------------------------------------------------------------- gap forms

def es4_ratio(v, p):
    """``(v - 1) / (v^(2/p) - 1)`` with its limit ``p/2`` at ``v = 1``."""
    if v - 1.0 < 1e-13:
        return p / 2.0
    return (v - 1.0) / np.expm1((2.0 / p) * np.log(v))


def es4_coefficient(v, p):
    return es4_ratio(v, p) / (p * v) + (p + 1) / (p * v)


def es7_coefficient(u, p):
    return ((3 + p * p / 4) * u + 4 * p) / (2 * (u + p) ** 2)


@dataclass(frozen=True)
class GapForm:
    """``A`` should be positive semidefinite relative to the metric ``G``."""

    label: str
    A: np.ndarray
    G: np.ndarray
    angles: JordanAngles
    normalization: object = None

    def eigenvalues(self):
        return gen_sym_eig(self.A, self.G)

    def min_eig(self):
        return float(self.eigenvalues()[0])

    def scale(self):
        return 1.0 + float(np.max(np.abs(self.eigenvalues())))

    def holds(self, tol=PSD_TOL):
        ev = self.eigenvalues()
        return bool(ev[0] >= -tol * (1.0 + np.max(np.abs(ev))))


def _require(value, bound, name):
    if value > bound:
        raise DomainError(f"{name} = {value:.12g} violates {name} <= {bound}")


def gap_form_at_angles(label, angles):
    p = angles.p
    G = metric_gram(angles.diagonal_point())
    if label in ("es1", "es4"):
        j = v_jet(angles)
        v = j.value
        _require(v, 2.0, "v")
        dd = np.outer(j.covector, j.covector)
        coef = 1.0 / v if label == "es1" else es4_coefficient(v, p)
        A = j.hessian - v * (2 - v) * G - coef * dd
    elif label in ("es2", "es7"):
        j = u_jet(angles)
        u = j.value
        _require(u, 2.0, "u")
        A = j.hessian - (2 - u * u / 2) * G
        if label == "es7":
            A = A - es7_coefficient(u, p) * np.outer(j.covector, j.covector)
    elif label in ("h1", "h3"):
        j = jet(label, angles)
        c = 1.5 + 1.0 / p if label == "h1" else 1.0 + 2.0 / p
        A = -(j.hessian + c * j.value * G)
    elif label in ("h2", "h4"):
        j = jet(label, angles)
        c = 1.5 + 1.0 / (3 * p) if label == "h2" else 4.0 / 3 + 2.0 / (3 * p)
        A = j.hessian - 3 * j.value * G - c / j.value * np.outer(j.covector, j.covector)
    else:
        raise DomainError(f"unknown estimate {label!r}; expected one of {ESTIMATES}")
    return GapForm(label, 0.5 * (A + A.T), G, angles)


def gap_form(label, Z):
    """Gap form of estimate ``label`` at the chart point ``Z``."""
    norm = normalize_diagonal(as_chart_point(Z))
    g = gap_form_at_angles(label, norm.angles)
    return GapForm(g.label, g.A, g.G, g.angles, norm)


# ---------------------------------------------------------------- radial compensation

@dataclass(frozen=True)
class RadialCompensation:
    pairing: float          # omega(omega*)
    coefficient: float      # omega(omega*)^-1, 0 when omega vanishes
    omega_star: np.ndarray
    residual_min_eig: float


def radial_compensation(h, omega, V1, V2=None, G=None, tol=1e-10):
    """Sharpest ``c`` with ``h >= c omega (x) omega`` via the split ``V = V1 (+) V2``.

    ``V1`` and ``V2`` are matrices whose columns span the two summands;
    ``V2`` defaults to the Euclidean complement of ``V1``. ``G`` is the
    inner product used for the PSD checks (identity by default).
    """
    h = 0.5 * (np.asarray(h, float) + np.asarray(h, float).T)
    omega = np.asarray(omega, float).ravel()
    V1 = np.atleast_2d(np.asarray(V1, float))
    N = h.shape[0]
    if V1.shape[0] != N:
        V1 = V1.T
    if V2 is None:
        Q = np.linalg.qr(np.hstack([V1, np.eye(N)]))[0]
        V2 = Q[:, V1.shape[1]:N]
    V2 = np.asarray(V2, float).reshape(N, -1)
    G = np.eye(N) if G is None else np.asarray(G, float)
    scale = 1.0 + np.max(np.abs(h))

    ev = gen_sym_eig(h, G)
    if ev[0] < -tol * scale:
        raise DomainError(f"h is not nonnegative definite (min eigenvalue {ev[0]:.3g})")
    h11 = V1.T @ h @ V1
    if sym_eig(h11).eigenvalues[0] <= tol * scale:
        raise DomainError("h is not positive definite on V1")
    if V2.shape[1] and np.max(np.abs(V1.T @ h @ V2)) > tol * scale:
        raise DomainError("h(V1, V2) != 0")
    if V2.shape[1] and np.max(np.abs(omega @ V2)) > tol * (1 + np.max(np.abs(omega))):
        raise DomainError("omega(V2) != 0")

    c = np.linalg.solve(h11, V1.T @ omega)
    star = V1 @ c
    pairing = float(omega @ star)
    coef = 0.0 if pairing == 0.0 else 1.0 / pairing
    resid = gen_sym_eig(h - coef * np.outer(omega, omega), G)[0]
    if resid < -tol * scale:
        raise DomainError(f"h - omega(omega*)^-1 omega(x)omega not PSD ({resid:.3g})")
    return RadialCompensation(pairing, coef, star, float(resid))


def diagonal_split(n, m):
    """Basis columns of ``V1 = span E[a, a]`` and ``V2 = span E[i, a], i != a``."""
    N = n * m
    diag = [a * m + a for a in range(min(n, m))]
    rest = [k for k in range(N) if k not in diag]
    I = np.eye(N)
    return I[:, diag], I[:, rest]


def v_compensation(angles):
    """Radial compensation of the es1 remainder of ``Hess(v)`` at a diagonal point."""
    g = gap_form_at_angles("es1", angles)
    j = v_jet(angles)
    V1, V2 = diagonal_split(angles.n, angles.m)
    return radial_compensation(g.A, j.covector, V1, V2, g.G)


def u_compensation(angles):
    g = gap_form_at_angles("es2", angles)
    j = u_jet(angles)
    V1, V2 = diagonal_split(angles.n, angles.m)
    return radial_compensation(g.A, j.covector, V1, V2, g.G)


# ---------------------------------------------------------------- symmetric maximization

@dataclass(frozen=True)
class SimplexDomain:
    """``{nu in R^m : nu >= 0, sum(nu) = budget}``; compact, convex, permutation invariant."""

    dimension: int
    budget: float

    def barycenter(self):
        return np.full(self.dimension, self.budget / self.dimension)

    def vertices(self):
        return self.budget * np.eye(self.dimension)

    def sample(self, rng, count):
        return self.budget * rng.dirichlet(np.ones(self.dimension), size=count)

    def grid(self, resolution=None):
        m = self.dimension
        if resolution is None:
            resolution = 200 if m <= 3 else 50
        return self.budget * barycentric_grid(m, resolution)


def barycentric_grid(m, resolution):
    """All points ``k / resolution`` with nonnegative integer ``k`` summing to ``resolution``."""
    if m == 1:
        return np.ones((1, 1))
    rows = []
    # stars and bars: choose m-1 bar positions among resolution + m - 1 slots
    for bars in combinations_with_replacement(range(resolution + 1), m - 1):
        b = (0,) + bars + (resolution,)
        rows.append(np.diff(b))
    return np.asarray(rows, dtype=float) / resolution


def v_case_function(v):
    """``sum_a (e^nu_a - 1) / (v - 2 + e^nu_a)`` on the v-case simplex."""
    def f(nu):
        e = np.exp(np.asarray(nu, float))
        return np.sum((e - 1) / (v - 2 + e), axis=-1)
    return f


def v_case_hessian_diag(v):
    def d2(nu):
        e = np.exp(np.asarray(nu, float))
        return (v - 1) * e * (v - 2 - e) / (v - 2 + e) ** 3
    return d2


def u_case_function(u):
    C = u * u / 4

    def f(nu):
        nu = np.asarray(nu, float)
        return np.sum(2 * nu * (1 + nu) ** 2 / (3 * nu**2 + 4 * nu + C), axis=-1)
    return f


def u_case_hessian_diag(u):
    C = u * u / 4

    def d2(nu):
        nu = np.asarray(nu, float)
        return -4 * f_polynomial(nu, u) / (3 * nu**2 + 4 * nu + C) ** 3
    return d2


def v_case_closed_form(v, m):
    """Barycenter value ``m (q - 1) / (v - 2 + q)``, ``q = v^(2/m)``; ``2m/(m+2)`` at ``v = 1``."""
    if v - 1.0 < 1e-13:
        return 2.0 * m / (m + 2)
    q = np.exp((2.0 / m) * np.log(v))
    return m * np.expm1((2.0 / m) * np.log(v)) / (v - 2 + q)


def u_case_closed_form(u, m):
    return 2 * (u + m) ** 2 / ((3 + m * m / 4) * u + 4 * m)


@dataclass(frozen=True)
class SymmetricSup:
    argmax: np.ndarray
    value: float
    checked_points: int
    max_other: float


def symmetric_sup(domain, f, hess_diag, rng=None, samples=2000, tol=1e-10):
    """Supremum of a symmetric concave function at the barycenter.

    ``hess_diag`` evaluates the (diagonal) second derivatives of the
    separable ``f``; concavity is checked on sampled points before the
    barycenter is certified against vertices and random feasible points.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    pts = np.vstack([domain.vertices(), domain.sample(rng, samples)])
    curv = hess_diag(pts)
    if np.max(curv) > tol:
        raise DomainError(f"f is not concave on the domain (D2f = {np.max(curv):.3g})")
    x0 = domain.barycenter()
    val = float(f(x0))
    other = float(np.max(f(pts)))
    if other > val + tol * (1 + abs(val)):
        raise DomainError(f"barycenter value {val} beaten by a feasible point ({other})")
    return SymmetricSup(x0, val, len(pts), other)


def simplex_bruteforce_max(domain, f, rng=None, random_points=10_000, polish=True):
    """Grid plus random search over the simplex, optionally polished by SLSQP.

    Uses no knowledge of where the maximum sits; the local refinement starts
    from the best few grid points and stays on the simplex.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    m = domain.dimension
    pts = np.vstack([domain.grid(), domain.sample(rng, random_points)])
    vals = f(pts)
    best = float(np.max(vals))
    if not polish or m == 1:
        return best
    cons = ({"type": "eq", "fun": lambda x: np.sum(x) - domain.budget},)
    bounds = [(0.0, domain.budget)] * m
    for k in np.argsort(vals)[-5:]:
        res = minimize(lambda x: -f(x), pts[k], method="SLSQP", bounds=bounds,
                       constraints=cons, options={"ftol": 1e-15, "maxiter": 500})
        x = np.clip(res.x, 0.0, None)
        x *= domain.budget / np.sum(x)
        best = max(best, float(f(x)))
    return best


# ---------------------------------------------------------------- F polynomial, ratio

def f_polynomial(t, u):
    """``F(t) = (3C-1)t^3 + 6Ct^2 + (9C-3C^2)t + 4C - 2C^2`` with ``C = u^2/4``."""
    C = u * u / 4
    t = np.asarray(t, float)
    return (3 * C - 1) * t**3 + 6 * C * t**2 + (9 * C - 3 * C * C) * t + 4 * C - 2 * C * C


def f_polynomial_nonneg(u):
    """Minimum of ``F`` over ``[0, u]`` from endpoints and real critical points."""
    if not 0 < u <= 2:
        raise DomainError(f"u = {u} outside (0, 2]")
    C = u * u / 4
    cands = [0.0, float(u)]
    for r in np.roots([3 * (3 * C - 1), 12 * C, 9 * C - 3 * C * C]):
        if abs(r.imag) < 1e-12 and 0 < r.real < u:
            cands.append(float(r.real))
    vals = f_polynomial(np.array(cands), u)
    k = int(np.argmin(vals))
    return float(vals[k]), cands[k]


def monotone_ratio_check(p, points=100, v_max=2.0):
    """Whether ``(v-1)/(v^(2/p)-1)`` is nondecreasing and ``>= p/2`` on ``[1, v_max]``."""
    grid = np.linspace(1.0, v_max, points)
    r = np.array([es4_ratio(v, p) for v in grid])
    slack = 1e-12 * np.maximum(1.0, np.abs(r))
    nondecreasing = bool(np.all(np.diff(r) >= -slack[1:]))
    return nondecreasing and bool(np.all(r >= p / 2 - slack))
