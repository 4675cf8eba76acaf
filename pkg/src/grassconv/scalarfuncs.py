"""The functions w, v, u on the chart and the auxiliary functions h1..h4.

Value functions accept a single ``n x m`` coordinate or a stack of them
with shape ``(..., n, m)``; they are what the finite-difference oracle
samples. Jets (value, gradient, covariant Hessian) are closed forms valid at
diagonal chart points; :func:`jet_at` transports an arbitrary point there
first and attaches the normalization.
"""
from dataclasses import dataclass

import numpy as np

from .grassmann import (
    DiagonalNormalization,
    JordanAngles,
    as_chart_point,
    metric_gram,
    normalize_diagonal,
)
from .numerics import DomainError

DOMAIN_EPS = 1e-9
H_KINDS = ("h1", "h2", "h3", "h4")


def _gram_det(Z):
    Z = np.asarray(Z, dtype=float)
    n, m = Z.shape[-2:]
    if n <= m:
        M = np.eye(n) + Z @ np.swapaxes(Z, -1, -2)
    else:
        M = np.eye(m) + np.swapaxes(Z, -1, -2) @ Z
    return np.linalg.det(M)


def v_value(Z):
    """``v = det(I + Z Z^T)^(1/2)``, the reciprocal of the Plucker height w."""
    return np.sqrt(_gram_det(Z))


def w_value(Z):
    return 1.0 / v_value(Z)


def u_value(Z):
    """``u = tr(Z Z^T)``, the sum of squared tangents of the Jordan angles."""
    Z = np.asarray(Z, dtype=float)
    return np.sum(Z * Z, axis=(-2, -1))


def k_exponent(p):
    return 0.75 + 0.5 / p


def _check_domain(s, name):
    s = np.asarray(s)
    bad = s >= 2.0 - DOMAIN_EPS
    if np.any(bad):
        worst = float(np.max(s))
        raise DomainError(f"{name} = {worst:.12g} violates {name} < 2 - {DOMAIN_EPS:g}")


def _phi(kind, s, p):
    """Outer function of ``h = phi(s)`` with its first two derivatives."""
    if kind == "h1":
        k = k_exponent(p)
        val = s ** (-k) * (2 - s) ** k
        d1 = -2 * k * s ** (-k - 1) * (2 - s) ** (k - 1)
        d2 = 4 * k * s ** (-k - 2) * (2 - s) ** (k - 2) * (k + 1 - s)
    elif kind == "h2":
        val = s**1.5 * (2 - s) ** -1.5
        d1 = 3 * s**0.5 * (2 - s) ** -2.5
        d2 = 3 * s**-0.5 * (2 - s) ** -3.5 * (1 + 2 * s)
    elif kind == "h3":
        val = (2 - s) / (s + p)
        d1 = -(2 + p) / (s + p) ** 2
        d2 = 2 * (2 + p) / (s + p) ** 3
    elif kind == "h4":
        c = 3 * p / (p + 2)
        r = (s + p) / (2 - s)
        r1 = (2 + p) / (2 - s) ** 2
        r2 = 2 * (2 + p) / (2 - s) ** 3
        val = r**c
        d1 = c * r ** (c - 1) * r1
        d2 = c * (c - 1) * r ** (c - 2) * r1**2 + c * r ** (c - 1) * r2
    else:
        raise DomainError(f"unknown auxiliary function {kind!r}")
    return val, d1, d2


def base_of(kind):
    """Which of v, u the auxiliary function is built from."""
    if kind in ("h1", "h2"):
        return "v"
    if kind in ("h3", "h4"):
        return "u"
    raise DomainError(f"unknown auxiliary function {kind!r}")


def h_value(kind, Z):
    """Value of h1..h4 at one or many chart points (domain-checked)."""
    Z = np.asarray(Z, dtype=float)
    p = min(Z.shape[-2:])
    base = base_of(kind)
    s = v_value(Z) if base == "v" else u_value(Z)
    _check_domain(s, base)
    return _phi(kind, s, p)[0]


@dataclass(frozen=True)
class ScalarJet2:
    """Value, gradient and covariant Hessian in the flattened E basis.

    ``gradient`` is ``n x m`` (the components ``df(E[i, a])``); ``hessian``
    is ``(nm, nm)`` and already includes the Christoffel correction.
    ``normalization`` is set when the jet was computed at a point that had
    to be brought to diagonal form first; the jet then lives at ``Z0``.
    """

    value: float
    gradient: np.ndarray
    hessian: np.ndarray
    angles: JordanAngles
    normalization: DiagonalNormalization = None

    @property
    def covector(self):
        return self.gradient.ravel()

    def gram(self):
        return metric_gram(self.angles.diagonal_point())


def v_jet(angles):
    n, m, p = angles.n, angles.m, angles.p
    rows, cols = angles.padded()
    lam = angles.lam
    v = float(np.prod(np.sqrt(1 + lam**2)))
    grad = np.zeros((n, m))
    idx = np.arange(p)
    grad[idx, idx] = lam / (1 + lam**2) * v

    H = np.diag(np.outer(1 / (1 + rows**2), 1 / (1 + cols**2)).ravel() * v)
    for a in range(p):
        q = 1 + lam[a] ** 2
        H[a * m + a, a * m + a] = (1 + 2 * lam[a] ** 2) / q**2 * v
        for b in range(p):
            if a == b:
                continue
            c = lam[a] * lam[b] / ((1 + lam[a] ** 2) * (1 + lam[b] ** 2)) * v
            H[b * m + a, a * m + b] = c
            H[a * m + a, b * m + b] = c
    return ScalarJet2(v, grad, H, angles)


def u_jet(angles):
    n, m, p = angles.n, angles.m, angles.p
    lam = angles.lam
    u = float(np.sum(lam**2))
    grad = np.zeros((n, m))
    idx = np.arange(p)
    grad[idx, idx] = 2 * lam

    H = 2.0 * np.eye(n * m)
    for a in range(p):
        H[a * m + a, a * m + a] = 2 + 4 * lam[a] ** 2 / (1 + lam[a] ** 2)
        for b in range(p):
            if a != b:
                H[b * m + a, a * m + b] = 2 * lam[a] * lam[b] * (
                    1 / (1 + lam[a] ** 2) + 1 / (1 + lam[b] ** 2)
                )
    return ScalarJet2(u, grad, H, angles)


def h_jet(kind, angles):
    """Jet of ``h = phi(s)`` by the chain rule ``phi' Hess(s) + phi'' ds (x) ds``."""
    base = base_of(kind)
    s_jet = v_jet(angles) if base == "v" else u_jet(angles)
    _check_domain(s_jet.value, base)
    val, d1, d2 = _phi(kind, s_jet.value, angles.p)
    ds = s_jet.covector
    H = d1 * s_jet.hessian + d2 * np.outer(ds, ds)
    return ScalarJet2(float(val), d1 * s_jet.gradient, H, angles)


def jet(kind, angles):
    if kind == "v":
        return v_jet(angles)
    if kind == "u":
        return u_jet(angles)
    return h_jet(kind, angles)


def jet_at(kind, Z):
    """Jet of ``kind`` at an arbitrary chart point, reported in its diagonal frame."""
    norm = normalize_diagonal(as_chart_point(Z))
    j = jet(kind, norm.angles)
    return ScalarJet2(j.value, j.gradient, j.hessian, j.angles, norm)


def value_function(kind):
    """Batched value function for ``kind`` in ``{v, u, h1, h2, h3, h4}``."""
    if kind == "v":
        return v_value
    if kind == "u":
        return u_value
    base_of(kind)
    return lambda Z: h_value(kind, Z)
