"""Seeded sampling of chart points for verification campaigns.

Generator: numpy's PCG64 (``np.random.default_rng``). Sample ``i`` of
stream ``s`` under seed ``seed`` draws from
``SeedSequence(seed, spawn_key=(s, i))``, so every sample is reproducible
on its own and independent of how samples are split across workers.
"""
import numpy as np

from .grassmann import JordanAngles, random_orthogonal

DELTA = 1e-3


def sample_rng(seed, stream, index):
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(stream, index)))


def angles_uniform_v(rng, n, m, delta=DELTA, v_max=2.0):
    """Angles with ``v`` uniform on ``[1, v_max - delta]``, spread by a Dirichlet draw."""
    p = min(n, m)
    v = rng.uniform(1.0, v_max - delta)
    nu = 2 * np.log(v) * rng.dirichlet(np.ones(p))
    return JordanAngles.from_lambda(np.sqrt(np.expm1(nu)), n, m)


def angles_uniform_u(rng, n, m, delta=DELTA, u_max=2.0):
    p = min(n, m)
    u = rng.uniform(0.0, u_max - delta)
    return JordanAngles.from_lambda(np.sqrt(u * rng.dirichlet(np.ones(p))), n, m)


def angles_sharp(rng, n, m, base, delta=DELTA, jitter=1e-7):
    """Near-equality points: two equal angles carrying all of v (or u), the rest ~0."""
    p = min(n, m)
    lam = np.zeros(p)
    if base == "v":
        v = rng.uniform(1.0, 2.0 - delta)
        lam[:2] = np.sqrt(v - 1.0)
    else:
        u = rng.uniform(0.0, 2.0 - delta)
        lam[:2] = np.sqrt(u / 2.0)
    lam = np.abs(lam + jitter * rng.standard_normal(p))
    # keep the jittered point inside the sampled domain
    if base == "v":
        while np.prod(1 + lam**2) >= (2.0 - delta / 2) ** 2:
            lam *= 1 - 1e-9
    else:
        while np.sum(lam**2) >= 2.0 - delta / 2:
            lam *= 1 - 1e-9
    return JordanAngles.from_lambda(lam, n, m)


def scramble(rng, angles):
    """A general chart point ``U^T Z0 V^T`` whose normal form is ``angles``."""
    U = random_orthogonal(rng, angles.n)
    V = random_orthogonal(rng, angles.m)
    return U.T @ angles.diagonal_point() @ V.T


def straddling_angles(rng, n, m, margin, inside):
    """Angles whose two largest members sum to ``pi/2 -/+ margin``.

    The remaining angles are drawn below the smaller of the two, so the
    largest pair decides membership in the convexity domain.
    """
    p = min(n, m)
    total = np.pi / 2 + (-margin if inside else margin)
    lo = max(0.05, total - (np.pi / 2 - 0.05))
    hi = min(np.pi / 2 - 0.05, total - 0.05)
    t1 = rng.uniform(lo, hi)
    t2 = total - t1
    rest = rng.uniform(0.0, min(t1, t2), size=p - 2) if p > 2 else np.zeros(0)
    return JordanAngles.from_theta(np.concatenate([[t1, t2], rest]), n, m)
