import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from grassconv.estimates import fd_derivatives
from grassconv.grassmann import JordanAngles, random_orthogonal
from grassconv.numerics import DomainError
from grassconv.scalarfuncs import (
    H_KINDS,
    h_value,
    jet,
    jet_at,
    k_exponent,
    u_value,
    v_value,
    value_function,
    w_value,
)
from helpers import SIZES, random_angles

KINDS = ("v", "u") + H_KINDS


def test_values_examples():
    Z = np.zeros((2, 2))
    Z[0, 0] = 1.0
    assert v_value(Z) == pytest.approx(np.sqrt(2))
    assert w_value(Z) == pytest.approx(1 / np.sqrt(2))
    assert u_value(Z) == pytest.approx(1.0)
    assert v_value(np.zeros((3, 2))) == 1.0
    assert u_value(np.eye(2)) == 2.0


def test_values_batched(rng):
    Zs = rng.standard_normal((7, 3, 2))
    np.testing.assert_allclose(v_value(Zs), [v_value(Z) for Z in Zs])
    np.testing.assert_allclose(u_value(Zs), [u_value(Z) for Z in Zs])


def test_v_from_lambda(rng):
    for n, m in SIZES:
        ang = random_angles(rng, n, m, scale=2.0)
        assert v_value(ang.diagonal_point()) == pytest.approx(np.prod(np.sqrt(1 + ang.lam**2)))
        assert v_value(ang.diagonal_point()) == pytest.approx(1 / np.prod(np.cos(ang.theta)))


def test_hadamard_bound(rng):
    # det(I + Z Z^T) <= prod over rows of (1 + |z_i|^2)
    for n, m in SIZES:
        Z = rng.standard_normal((n, m))
        assert v_value(Z) ** 2 <= np.prod(1 + np.sum(Z * Z, axis=1)) * (1 + 1e-12)


@settings(max_examples=300, deadline=None)
@given(st.lists(st.floats(0, 1.2), min_size=1, max_size=4), st.integers(0, 3))
def test_u_at_least_log_v_squared(lam, extra):
    # 1 + x <= e^x gives v^2 <= e^u
    p = len(lam)
    ang = JordanAngles.from_lambda(lam, p + extra, p)
    Z = ang.diagonal_point()
    assert 2 * np.log(v_value(Z)) <= u_value(Z) + 1e-12


def test_k_exponent():
    assert k_exponent(2) == 1.0
    assert k_exponent(1) == 1.25


def test_h_values_at_pole():
    Z = np.zeros((3, 2))
    assert h_value("h1", Z) == pytest.approx(1.0)
    assert h_value("h2", Z) == pytest.approx(1.0)
    assert h_value("h3", Z) == pytest.approx(1.0)
    assert h_value("h4", Z) == pytest.approx(1.0)


def test_h_values_examples():
    ang = JordanAngles.from_lambda([1.0, 0.0], 2, 2)   # v = sqrt 2, u = 1
    Z = ang.diagonal_point()
    v = np.sqrt(2)
    assert h_value("h1", Z) == pytest.approx(((2 - v) / v) ** 1.0)
    assert h_value("h2", Z) == pytest.approx((v / (2 - v)) ** 1.5)
    assert h_value("h3", Z) == pytest.approx(1 / 3)
    assert h_value("h4", Z) == pytest.approx(3.0 ** 1.5)


@pytest.mark.parametrize("kind", H_KINDS)
def test_h_domain_error(kind):
    Z = np.eye(2) * 1.01   # u > 2 and v > 2
    with pytest.raises(DomainError, match="< 2"):
        h_value(kind, Z)


def test_unknown_kind():
    with pytest.raises(DomainError):
        value_function("h9")


@pytest.mark.parametrize("kind", KINDS)
@pytest.mark.parametrize("n,m", SIZES)
def test_jets_match_finite_differences(rng, kind, n, m):
    ang = random_angles(rng, n, m, scale=0.5 / max(1, min(n, m)) ** 0.5)
    j = jet(kind, ang)
    g, H = fd_derivatives(value_function(kind), ang)
    np.testing.assert_allclose(j.gradient, g, atol=1e-8 * (1 + np.abs(j.gradient).max()))
    np.testing.assert_allclose(j.hessian, H, atol=1e-7 * (1 + np.abs(j.hessian).max()))
    assert j.value == pytest.approx(float(value_function(kind)(ang.diagonal_point())))


@pytest.mark.parametrize("kind", KINDS)
def test_jets_are_symmetric(rng, kind):
    for n, m in SIZES:
        ang = random_angles(rng, n, m, scale=0.3)
        H = jet(kind, ang).hessian
        np.testing.assert_allclose(H, H.T, atol=1e-14)


def test_jet_at_pole():
    j = jet("v", JordanAngles.from_lambda([0.0, 0.0], 3, 2))
    np.testing.assert_allclose(j.hessian, np.eye(6))
    np.testing.assert_allclose(j.gradient, 0)
    ju = jet("u", JordanAngles.from_lambda([0.0, 0.0], 3, 2))
    np.testing.assert_allclose(ju.hessian, 2 * np.eye(6))


def test_jet_at_general_point(rng):
    U, V = random_orthogonal(rng, 3), random_orthogonal(rng, 2)
    ang = JordanAngles.from_lambda([0.7, 0.2], 3, 2)
    Z = U.T @ ang.diagonal_point() @ V.T
    j = jet_at("v", Z)
    np.testing.assert_allclose(j.angles.lam, ang.lam, atol=1e-12)
    np.testing.assert_allclose(j.hessian, jet("v", ang).hessian, atol=1e-10)
    assert j.normalization is not None


def test_u_hessian_trace_lower_bound(rng):
    # Hess(u) >= 2I in the E basis and G <= I, so its metric trace is at least 2nm
    for n, m in SIZES:
        ang = random_angles(rng, n, m)
        G = jet("u", ang).gram()
        tr = np.trace(np.linalg.solve(G, jet("u", ang).hessian))
        assert tr > 2 * n * m - 1e-9
