"""Divergence-free external fields F(x, t) with explicit Lipschitz bounds D_t.

Every field exposes ``velocity(x, t)`` (vectorised over the leading axes of
``x``) and ``lipschitz(t)``. Rotations use ``perp(x) = (-x2, x1)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ExtrapolationError
from .kernel import kernel_gradient_bound, phi_alpha
from .pseudo_vortex import Trajectory


def _perp(x):
    return np.stack([-x[..., 1], x[..., 0]], axis=-1)


@dataclass(frozen=True)
class ZeroField:
    kind = "zero"

    def velocity(self, x, t):
        return np.zeros_like(np.asarray(x, dtype=float))

    def lipschitz(self, t):
        return 0.0


@dataclass(frozen=True)
class UniformTranslation:
    velocity_vector: tuple = (0.0, 0.0)
    kind = "uniform_translation"

    def velocity(self, x, t):
        x = np.asarray(x, dtype=float)
        return np.broadcast_to(np.asarray(self.velocity_vector, dtype=float), x.shape).copy()

    def lipschitz(self, t):
        return 0.0


@dataclass(frozen=True)
class RigidRotation:
    omega: float = 1.0
    center: tuple = (0.0, 0.0)
    kind = "rigid_rotation"

    def velocity(self, x, t):
        x = np.asarray(x, dtype=float)
        return self.omega * _perp(x - np.asarray(self.center, dtype=float))

    def lipschitz(self, t):
        return abs(self.omega)


@dataclass(frozen=True)
class LinearStrain:
    """F = s * (x1, -x2) about ``center``."""

    rate: float = 1.0
    center: tuple = (0.0, 0.0)
    kind = "linear_strain"

    def velocity(self, x, t):
        d = np.asarray(x, dtype=float) - np.asarray(self.center, dtype=float)
        return self.rate * np.stack([d[..., 0], -d[..., 1]], axis=-1)

    def lipschitz(self, t):
        return abs(self.rate)


@dataclass(frozen=True)
class OtherVortices:
    """Field of every pseudo-vortex except ``excluded``, along a stored trajectory.

    The Lipschitz bound is taken over the protected disk of radius
    ``protect_radius`` around the excluded vortex: source j contributes
    |a_j| (alpha+1) alpha*phi / rho_j**(alpha+2), with rho_j the distance from
    source j to that disk.
    """

    trajectory: Trajectory
    excluded: int
    protect_radius: float = 0.0
    kind = "other_vortices"

    def __post_init__(self):
        n = self.trajectory.intensities.size
        if not 0 <= self.excluded < n:
            raise DomainError(f"excluded index {self.excluded} out of range for {n} vortices")

    @property
    def alpha(self):
        return self.trajectory.alpha

    def positions_at(self, t: float) -> np.ndarray:
        times = self.trajectory.times
        pos = self.trajectory.positions
        if times[0] > times[-1]:
            times, pos = times[::-1], pos[::-1]
        lo, hi = float(times[0]), float(times[-1])
        tol = 1e-12 * max(1.0, abs(lo), abs(hi))
        if t < lo - tol or t > hi + tol:
            raise ExtrapolationError(f"t={t} outside trajectory span [{lo}, {hi}]")
        t = min(max(t, lo), hi)
        k = int(np.searchsorted(times, t, side="right")) - 1
        k = min(max(k, 0), times.size - 2) if times.size > 1 else 0
        if times.size == 1:
            return np.array(pos[0])
        t0, t1 = times[k], times[k + 1]
        lam = 0.0 if t1 == t0 else (t - t0) / (t1 - t0)
        return (1.0 - lam) * pos[k] + lam * pos[k + 1]

    def velocity(self, x, t):
        coeffs = phi_alpha(self.alpha)
        x = np.asarray(x, dtype=float)
        z = self.positions_at(t)
        a = self.trajectory.intensities
        out = np.zeros_like(x)
        for j in range(a.size):
            if j == self.excluded:
                continue
            d = x - z[j]
            r2 = np.sum(d * d, axis=-1)
            out += (a[j] * coeffs.alpha_phi * r2 ** (-(coeffs.alpha + 2.0) / 2.0))[..., None] * _perp(d)
        return out

    def lipschitz(self, t):
        z = self.positions_at(t)
        a = self.trajectory.intensities
        total = 0.0
        for j in range(a.size):
            if j == self.excluded:
                continue
            rho = float(np.linalg.norm(z[j] - z[self.excluded])) - self.protect_radius
            if rho <= 0.0:
                raise DomainError(
                    f"source {j} lies within the protected disk of vortex {self.excluded}"
                )
            total += abs(a[j]) * float(kernel_gradient_bound(self.alpha, rho))
        return total


def eval_field(spec, x, t) -> np.ndarray:
    return spec.velocity(x, t)


def lipschitz_bound(spec, t) -> float:
    return spec.lipschitz(t)


def field_from_dict(cfg: dict, trajectory=None):
    """Build a field from a config mapping with a ``kind`` key."""
    kind = cfg.get("kind", "zero")
    if kind == "zero":
        return ZeroField()
    if kind == "uniform_translation":
        return UniformTranslation(tuple(cfg.get("velocity", (0.0, 0.0))))
    if kind == "rigid_rotation":
        return RigidRotation(float(cfg.get("omega", 1.0)), tuple(cfg.get("center", (0.0, 0.0))))
    if kind == "linear_strain":
        return LinearStrain(float(cfg.get("rate", 1.0)), tuple(cfg.get("center", (0.0, 0.0))))
    if kind == "other_vortices":
        if trajectory is None:
            raise DomainError("other_vortices needs a pseudo-vortex trajectory")
        return OtherVortices(trajectory, int(cfg.get("excluded", 0)),
                             float(cfg.get("protect_radius", 0.0)))
    raise DomainError(f"unknown external field kind {kind!r}")


FIELD_KINDS = ("zero", "uniform_translation", "rigid_rotation", "linear_strain", "other_vortices")
FIELD_KEYS = {
    "zero": {"kind"},
    "uniform_translation": {"kind", "velocity"},
    "rigid_rotation": {"kind", "omega", "center"},
    "linear_strain": {"kind", "rate", "center"},
    "other_vortices": {"kind", "excluded", "protect_radius"},
}

__all__ = [
    "ZeroField", "UniformTranslation", "RigidRotation", "LinearStrain", "OtherVortices",
    "eval_field", "lipschitz_bound", "field_from_dict", "FIELD_KINDS", "FIELD_KEYS",
]
