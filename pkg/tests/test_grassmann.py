import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from grassconv.grassmann import (
    JordanAngles,
    christoffel_contract,
    christoffel_diag,
    in_bjx,
    jordan_angles,
    metric_derivative,
    metric_gram,
    metric_inner,
    normalize_diagonal,
    random_orthogonal,
)
from grassconv.numerics import gen_sym_eig
from grassconv.scalarfuncs import u_value, v_value, w_value

from helpers import SIZES, random_angles


def chart_points():
    return st.tuples(st.integers(1, 5), st.integers(1, 5)).flatmap(
        lambda s: arrays(float, s, elements=st.floats(-3, 3, allow_nan=False))
    )


def E(n, m, i, a):
    X = np.zeros((n, m))
    X[i, a] = 1.0
    return X


def frame_angles(Z):
    # independent oracle: principal angles between span[I; Z^T] and span[I; 0]
    n, m = Z.shape
    A = np.linalg.qr(np.vstack([np.eye(n), Z.T]))[0]
    B = np.vstack([np.eye(n), np.zeros((m, n))])
    cos = np.linalg.svd(A.T @ B, compute_uv=False)
    ang = np.sort(np.arccos(np.clip(cos, -1, 1)))[::-1]
    return ang[: min(n, m)]


def test_jordan_angles_examples(rng):
    np.testing.assert_allclose(jordan_angles(np.zeros((3, 2))).theta, [0, 0])
    np.testing.assert_allclose(jordan_angles(np.eye(2)).theta, [np.pi / 4] * 2)
    Z = rng.standard_normal((4, 2))
    np.testing.assert_allclose(jordan_angles(Z).theta, frame_angles(Z), atol=1e-8)


@pytest.mark.parametrize("n,m", SIZES)
def test_jordan_angles_match_frames(rng, n, m):
    for _ in range(20):
        Z = rng.standard_normal((n, m))
        ja = jordan_angles(Z)
        np.testing.assert_allclose(ja.theta, frame_angles(Z), atol=1e-8)
        np.testing.assert_allclose(ja.lam, np.tan(ja.theta), rtol=1e-12)


def test_jordan_angles_orthogonal_invariance(rng):
    for n, m in SIZES:
        Z = rng.standard_normal((n, m))
        U, V = random_orthogonal(rng, n), random_orthogonal(rng, m)
        np.testing.assert_allclose(jordan_angles(U @ Z @ V).theta, jordan_angles(Z).theta, atol=1e-8)


def test_metric_inner_examples():
    assert metric_inner(np.zeros((3, 2)), E(3, 2, 0, 0), E(3, 2, 0, 0)) == pytest.approx(1.0)
    Z0 = np.zeros((3, 2))
    Z0[0, 0] = 1.0
    assert metric_inner(Z0, E(3, 2, 0, 0), E(3, 2, 0, 0)) == pytest.approx(0.25)


def test_metric_isometry(rng):
    for n, m in SIZES:
        Z, X, Y = (rng.standard_normal((n, m)) for _ in range(3))
        U, V = random_orthogonal(rng, n), random_orthogonal(rng, m)
        a = metric_inner(Z, X, Y)
        b = metric_inner(U @ Z @ V, U @ X @ V, U @ Y @ V)
        assert a == pytest.approx(b, abs=1e-10)
        assert a == pytest.approx(metric_inner(Z, Y, X), abs=1e-12)


def test_metric_gram_examples(rng):
    np.testing.assert_array_equal(metric_gram(np.zeros((3, 2))), np.eye(6))
    Z0 = np.zeros((3, 3))
    Z0[0, 0] = 1.0
    expect = np.ones((3, 3))
    expect[0, :] = 0.5
    expect[:, 0] = 0.5
    expect[0, 0] = 0.25
    np.testing.assert_allclose(metric_gram(Z0), np.diag(expect.ravel()), atol=1e-15)
    n, m = 3, 4
    Z = rng.standard_normal((n, m))
    G = metric_gram(Z)
    for a in range(n * m):
        for b in range(n * m):
            Ea, Eb = E(n, m, *divmod(a, m)), E(n, m, *divmod(b, m))
            assert G[a, b] == pytest.approx(metric_inner(Z, Ea, Eb), abs=1e-12)


def test_metric_gram_at_diagonal_point_matches_closed_form(rng):
    for n, m in SIZES:
        ang = random_angles(rng, n, m, scale=2.0)
        G = metric_gram(ang.diagonal_point())
        rows, cols = ang.padded()
        expect = np.outer(1 / (1 + rows**2), 1 / (1 + cols**2)).ravel()
        np.testing.assert_allclose(G, np.diag(expect), atol=1e-15)


@settings(max_examples=1000, deadline=None)
@given(chart_points())
def test_metric_gram_positive_definite(Z):
    n, m = Z.shape
    assert gen_sym_eig(metric_gram(Z), np.eye(n * m))[0] > 0


@settings(max_examples=300, deadline=None)
@given(chart_points())
def test_v_times_w_is_one(Z):
    assert v_value(Z) * w_value(Z) == pytest.approx(1.0, abs=1e-12)


def test_metric_derivative_matches_fd(rng):
    for n, m in SIZES:
        Z, W = rng.standard_normal((n, m)), rng.standard_normal((n, m))
        h = 1e-5
        fd = (metric_gram(Z + h * W) - metric_gram(Z - h * W)) / (2 * h)
        np.testing.assert_allclose(metric_derivative(Z, W), fd, atol=1e-8)


def test_christoffel_examples():
    ang = JordanAngles.from_lambda([0.0, 0.0], 3, 2)
    assert not np.any(christoffel_diag(ang))
    ang = JordanAngles.from_lambda([1.0], 2, 1)
    assert christoffel_diag(ang)[0, 0, 0] == pytest.approx(-1.0)


def koszul_oracle(ang, h=1e-5):
    """Christoffel symbols from central differences of the metric Gram matrix."""
    n, m = ang.n, ang.m
    N = n * m
    Z0 = ang.diagonal_point()
    dG = np.empty((N, N, N))   # dG[l] = d/dz_l G
    for l in range(N):
        D = np.zeros(N)
        D[l] = h
        D = D.reshape(n, m)
        dG[l] = (metric_gram(Z0 + D) - metric_gram(Z0 - D)) / (2 * h)
    Ginv = np.linalg.inv(metric_gram(Z0))
    # first kind: [a b, l] = 1/2 (-d_l g_ab + d_a g_bl + d_b g_al)
    first = 0.5 * (-dG.transpose(1, 2, 0) + dG + dG.transpose(1, 0, 2))
    return np.einsum("abl,lc->abc", first, Ginv)


@pytest.mark.parametrize("n,m", SIZES)
def test_christoffel_matches_koszul_fd(rng, n, m):
    ang = random_angles(rng, n, m, scale=1.5)
    np.testing.assert_allclose(christoffel_diag(ang), koszul_oracle(ang), atol=1e-6)


@pytest.mark.parametrize("n,m", SIZES)
def test_christoffel_torsion_free_and_contraction(rng, n, m):
    ang = random_angles(rng, n, m, scale=1.5)
    Gam = christoffel_diag(ang)
    np.testing.assert_array_equal(Gam, Gam.transpose(1, 0, 2))
    g = rng.standard_normal(n * m)
    np.testing.assert_allclose(christoffel_contract(ang, g), Gam @ g, atol=1e-14)


def test_normalize_diagonal_identity_when_sorted():
    Z = np.zeros((3, 2))
    Z[0, 0], Z[1, 1] = 2.0, 1.0
    norm = normalize_diagonal(Z)
    np.testing.assert_array_equal(norm.U, np.eye(3))
    np.testing.assert_array_equal(norm.V, np.eye(2))


def test_normalize_diagonal_signed_permuted():
    Z = np.zeros((3, 3))
    Z[0, 0], Z[1, 1], Z[2, 2] = 0.5, -2.0, 0.5
    norm = normalize_diagonal(Z)
    np.testing.assert_allclose(norm.U @ Z @ norm.V, norm.Z0, atol=1e-15)
    np.testing.assert_allclose(norm.angles.lam, [2.0, 0.5, 0.5])


def test_normalize_diagonal_recovers_constructed(rng):
    U, V = random_orthogonal(rng, 4), random_orthogonal(rng, 2)
    D = np.zeros((4, 2))
    D[0, 0], D[1, 1] = 2.0, 1.0
    Z = U.T @ D @ V.T
    norm = normalize_diagonal(Z)
    np.testing.assert_allclose(norm.angles.lam, [2.0, 1.0], atol=1e-12)


@pytest.mark.parametrize("n,m", SIZES)
def test_normalize_diagonal_invariants(rng, n, m):
    for _ in range(10):
        Z = rng.standard_normal((n, m))
        norm = normalize_diagonal(Z)
        np.testing.assert_allclose(norm.U @ Z @ norm.V, norm.Z0, atol=1e-10)
        np.testing.assert_allclose(norm.U @ norm.U.T, np.eye(n), atol=1e-10)
        np.testing.assert_allclose(norm.V @ norm.V.T, np.eye(m), atol=1e-10)
        assert np.all(np.diff(norm.angles.lam) <= 0)
        d0 = np.linalg.det(np.eye(n) + norm.Z0 @ norm.Z0.T)
        assert d0 == pytest.approx(np.linalg.det(np.eye(n) + Z @ Z.T), rel=1e-10)
        assert v_value(norm.Z0) == pytest.approx(v_value(Z), rel=1e-12)
        assert u_value(norm.Z0) == pytest.approx(u_value(Z), rel=1e-12)
        X = rng.standard_normal((n, m))
        np.testing.assert_allclose(norm.pull(norm.push(X)), X, atol=1e-12)


def test_in_bjx_examples():
    assert in_bjx(JordanAngles.from_theta([0.0, 0.0], 2, 2))
    assert not in_bjx(JordanAngles.from_theta([np.pi / 3, np.pi / 4], 2, 2))
    assert in_bjx(JordanAngles.from_theta([np.pi / 4 - 0.01] * 2, 2, 2))
    assert in_bjx(JordanAngles.from_theta([1.5], 3, 1))
