"""Green function and velocity kernel of (-Laplacian)^(1 - alpha/2) on the plane.

The Green function is ``G(r) = phi(alpha) * r**-alpha`` with

    phi(alpha) = Gamma(alpha/2) / (Gamma((2 - alpha)/2) * pi * 2**(2 - alpha))

and the velocity kernel is ``K = grad_perp G`` with ``grad_perp = (d/dx2, -d/dx1)``.

Sign convention, derived once here and used everywhere else::

    grad G        = -alpha * phi * r**(-alpha-2) * (x1, x2)
    grad_perp G   = (dG/dx2, -dG/dx1)
                  = -alpha * phi * r**(-alpha-2) * (x2, -x1)
                  =  alpha * phi * r**(-alpha-2) * (-x2, x1)

so ``K(x) = alpha*phi * perp(x) / |x|**(alpha+2)`` with ``perp(x) = (-x2, x1)``.
For alpha = 0 the same formula with ``alpha*phi = 1/(2 pi)`` is the Euler
Biot-Savart kernel, the perpendicular gradient of ``-log(r) / (2 pi)``.

Only the product ``alpha*phi`` enters any velocity. It is evaluated through
``alpha * Gamma(alpha/2) = 2 * Gamma(1 + alpha/2)``, which stays finite and
accurate down to alpha = 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .errors import DomainError, SingularityError

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class AlphaParam:
    """Interpolation exponent, 0 <= alpha < 1 (0 is 2-D Euler)."""

    alpha: float

    def __post_init__(self):
        a = float(self.alpha)
        if not (0.0 <= a < 1.0) or math.isnan(a):
            raise DomainError(f"alpha must lie in [0, 1), got {self.alpha!r}")
        object.__setattr__(self, "alpha", a)

    def __float__(self):
        return self.alpha


AlphaLike = Union[AlphaParam, float]


def as_alpha(alpha: AlphaLike) -> AlphaParam:
    return alpha if isinstance(alpha, AlphaParam) else AlphaParam(alpha)


@dataclass(frozen=True)
class KernelCoefficients:
    """``phi`` is None at alpha = 0, where it diverges."""

    alpha: float
    phi: Optional[float]
    alpha_phi: float


def phi_formula(alpha: float) -> float:
    """Raw phi(alpha) for alpha in (0, 1]; no AlphaParam validation.

    Kept separate so the SQG endpoint alpha = 1, where phi = 1/(2 pi),
    can be evaluated even though the dynamics is restricted to alpha < 1.
    """
    alpha = float(alpha)
    if not (0.0 < alpha <= 1.0):
        raise DomainError(f"phi is defined for alpha in (0, 1], got {alpha!r}")
    return math.gamma(alpha / 2.0) / (
        math.gamma((2.0 - alpha) / 2.0) * math.pi * 2.0 ** (2.0 - alpha)
    )


def _alpha_phi(alpha: float) -> float:
    if alpha == 0.0:
        return 1.0 / TWO_PI
    return 2.0 * math.gamma(1.0 + alpha / 2.0) / (
        math.gamma((2.0 - alpha) / 2.0) * math.pi * 2.0 ** (2.0 - alpha)
    )


def phi_alpha(alpha: AlphaLike) -> KernelCoefficients:
    a = as_alpha(alpha).alpha
    phi = None if a == 0.0 else phi_formula(a)
    return KernelCoefficients(alpha=a, phi=phi, alpha_phi=_alpha_phi(a))


def green(alpha: AlphaLike, r: float) -> float:
    """G(r); for alpha = 0 the Euler Green function -log(r)/(2 pi)."""
    a = as_alpha(alpha).alpha
    r = float(r)
    if not r > 0.0:
        raise DomainError(f"green requires r > 0, got {r!r}")
    if a == 0.0:
        return -math.log(r) / TWO_PI
    return phi_formula(a) * r ** (-a)


def _perp(x: np.ndarray) -> np.ndarray:
    return np.stack([-x[..., 1], x[..., 0]], axis=-1)


def kernel_velocity(alpha: AlphaLike, x) -> np.ndarray:
    """Exact K(x); raises SingularityError at x = 0.

    Accepts a single 2-vector or an array of shape (..., 2).
    """
    a = as_alpha(alpha).alpha
    x = np.asarray(x, dtype=float)
    r2 = np.sum(x * x, axis=-1)
    if np.any(r2 == 0.0):
        raise SingularityError("kernel_velocity evaluated at x = 0")
    scale = _alpha_phi(a) * r2 ** (-(a + 2.0) / 2.0)
    return _perp(x) * scale[..., None]


def kernel_regularized(alpha: AlphaLike, smoothing: float, x) -> np.ndarray:
    """Mollified kernel alpha*phi * perp(x) * (|x|^2 + s^2)**(-(alpha+2)/2).

    It is the perpendicular gradient of ``phi * (|x|^2 + s^2)**(-alpha/2)``,
    hence divergence free. Returns zero at x = 0 for every smoothing.
    """
    a = as_alpha(alpha).alpha
    s = float(smoothing)
    if s < 0.0:
        raise DomainError(f"smoothing must be >= 0, got {smoothing!r}")
    x = np.asarray(x, dtype=float)
    r2 = np.sum(x * x, axis=-1) + s * s
    with np.errstate(divide="ignore"):
        scale = np.where(r2 > 0.0, r2, 1.0) ** (-(a + 2.0) / 2.0)
    scale = np.where(r2 > 0.0, _alpha_phi(a) * scale, 0.0)
    return _perp(x) * scale[..., None]


def kernel_gradient_bound(alpha: AlphaLike, distance) -> np.ndarray:
    """Operator norm of the Jacobian of K at distance ``distance``.

    In polar frame the Jacobian is r**-(alpha+2) * [[0, -1], [-(alpha+1), 0]],
    so its norm is (alpha + 1) * alpha*phi / r**(alpha+2).
    """
    a = as_alpha(alpha).alpha
    d = np.asarray(distance, dtype=float)
    return (a + 1.0) * _alpha_phi(a) * d ** (-(a + 2.0))
