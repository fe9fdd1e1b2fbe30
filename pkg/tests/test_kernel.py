import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from msqglab.errors import DomainError, SingularityError
from msqglab.kernel import (
    AlphaParam,
    green,
    kernel_gradient_bound,
    kernel_regularized,
    kernel_velocity,
    phi_alpha,
    phi_formula,
)

mpmath.mp.dps = 50


def phi_oracle(alpha):
    a = mpmath.mpf(alpha)
    return mpmath.gamma(a / 2) / (mpmath.gamma((2 - a) / 2) * mpmath.pi * mpmath.power(2, 2 - a))


@pytest.mark.parametrize("alpha", [0.1, 0.25, 0.5, 0.75, 0.9, 0.999])
def test_phi_matches_high_precision(alpha):
    assert phi_formula(alpha) == pytest.approx(float(phi_oracle(alpha)), rel=1e-13)
    c = phi_alpha(alpha)
    assert c.alpha_phi == pytest.approx(float(alpha * phi_oracle(alpha)), rel=1e-13)


def test_phi_at_one_is_inverse_two_pi():
    assert phi_formula(1.0) == pytest.approx(1.0 / (2.0 * math.pi), rel=1e-14)


def test_alpha_phi_continuous_at_zero():
    assert phi_alpha(0.0).alpha_phi == 1.0 / (2.0 * math.pi)
    assert phi_alpha(0.0).phi is None
    assert phi_alpha(1e-6).alpha_phi == pytest.approx(1.0 / (2.0 * math.pi), rel=1e-4)


@pytest.mark.parametrize("bad", [-0.1, 1.0, 1.5, float("nan")])
def test_alpha_out_of_range(bad):
    with pytest.raises(DomainError):
        AlphaParam(bad)


def test_green_log_limit_and_domain():
    assert green(0.0, math.e) == pytest.approx(-1.0 / (2.0 * math.pi))
    with pytest.raises(DomainError):
        green(0.5, 0.0)


@pytest.mark.parametrize("alpha", [0.0, 0.3, 0.5, 0.8])
def test_kernel_is_perp_gradient_of_green(alpha):
    # K = (d2 G, -d1 G), checked by central differences
    x = np.array([0.37, -0.61])
    h = 1e-5

    def G(p):
        return green(alpha, float(np.hypot(*p)))

    d1 = (G(x + [h, 0]) - G(x - [h, 0])) / (2 * h)
    d2 = (G(x + [0, h]) - G(x - [0, h])) / (2 * h)
    np.testing.assert_allclose(kernel_velocity(alpha, x), [d2, -d1], rtol=1e-8)


def test_kernel_singular_at_origin():
    with pytest.raises(SingularityError):
        kernel_velocity(0.5, [0.0, 0.0])


def test_regularized_kernel():
    assert np.all(kernel_regularized(0.5, 0.1, [0.0, 0.0]) == 0.0)
    far = np.array([3.0, 4.0])
    np.testing.assert_allclose(kernel_regularized(0.5, 1e-9, far), kernel_velocity(0.5, far), rtol=1e-12)
    with pytest.raises(DomainError):
        kernel_regularized(0.5, -1.0, far)


def test_gradient_bound_matches_jacobian_norm():
    alpha, x = 0.5, np.array([0.3, 0.4])
    h = 1e-6
    J = np.stack([(kernel_velocity(alpha, x + e) - kernel_velocity(alpha, x - e)) / (2 * h)
                  for e in (np.array([h, 0]), np.array([0, h]))], axis=1)
    assert np.linalg.norm(J, 2) == pytest.approx(float(kernel_gradient_bound(alpha, 0.5)), rel=1e-6)


coords = st.floats(-10, 10, allow_nan=False).filter(lambda v: abs(v) > 1e-3)
alphas = st.floats(0.0, 0.99)


@settings(max_examples=200, deadline=None)
@given(alphas, coords, coords)
def test_orthogonal_and_antisymmetric(alpha, x1, x2):
    x = np.array([x1, x2])
    k = kernel_velocity(alpha, x)
    assert abs(k @ x) <= 1e-12 * np.linalg.norm(k) * np.linalg.norm(x)
    np.testing.assert_array_equal(kernel_velocity(alpha, -x), -k)


@settings(max_examples=200, deadline=None)
@given(alphas, coords, coords, st.floats(0.1, 10.0))
def test_homogeneity(alpha, x1, x2, lam):
    x = np.array([x1, x2])
    lhs = kernel_velocity(alpha, lam * x)
    rhs = lam ** (-(alpha + 1.0)) * kernel_velocity(alpha, x)
    np.testing.assert_allclose(lhs, rhs, rtol=1e-10)
