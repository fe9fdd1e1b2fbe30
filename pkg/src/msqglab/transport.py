"""Lagrangian particle discretisation of the active scalar.

Each blob is sampled on a square lattice clipped to its disk; particle
weights ``w_k = theta(x_k, 0) * cell_area`` are rescaled so each blob sums
exactly to its intensity and never change afterwards. Particles move with
the regularised self-induced velocity plus an optional external field.
"""
from __future__ import annotations

import csv
import math
import struct
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numba
import numpy as np

from ._rk4 import rk4_step
from .errors import DisjointnessError, DomainError, ProfileError
from .kernel import AlphaLike, phi_alpha

# Prefer OpenMP/workqueue; the bundled TBB may be too old and only warns.
numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]

PROFILES = ("uniform", "radial_taper")

# Peak of the normalised profile in units of |a| / eps^2.
_PEAK = {"uniform": 1.0 / math.pi, "radial_taper": 3.0 / math.pi}


@dataclass(frozen=True)
class BlobSpec:
    center: tuple
    radius: float
    intensity: float
    profile: str = "uniform"
    max_density: Optional[float] = None  # the constant M; None means the profile's own peak

    def __post_init__(self):
        c = tuple(float(v) for v in self.center)
        if len(c) != 2:
            raise DomainError("blob center must be a 2-vector")
        object.__setattr__(self, "center", c)
        if not self.radius > 0.0:
            raise DomainError(f"blob radius must be positive, got {self.radius!r}")
        if self.intensity == 0.0:
            raise DomainError("blob intensity must be nonzero")
        if self.profile not in PROFILES:
            raise ProfileError(f"unknown profile {self.profile!r}; expected one of {PROFILES}")

    @property
    def peak_density(self) -> float:
        return _PEAK[self.profile] * abs(self.intensity) / self.radius ** 2

    def density(self, x: np.ndarray) -> np.ndarray:
        """theta(x, 0) for this blob; zero outside the open disk."""
        d = np.asarray(x, dtype=float) - np.asarray(self.center)
        rho2 = np.sum(d * d, axis=-1) / self.radius ** 2
        if self.profile == "uniform":
            shape = np.ones_like(rho2)
        else:
            shape = 3.0 * (1.0 - rho2) ** 2
        dens = shape * self.intensity / (math.pi * self.radius ** 2)
        return np.where(rho2 < 1.0, dens, 0.0)


@dataclass(frozen=True)
class ParticleField:
    positions: np.ndarray  # (P, 2)
    weights: np.ndarray  # (P,), read-only
    blob_id: np.ndarray  # (P,), read-only
    smoothing: float
    time: float = 0.0

    def __post_init__(self):
        self.weights.setflags(write=False)
        self.blob_id.setflags(write=False)

    @property
    def n_particles(self) -> int:
        return self.weights.size

    @property
    def blob_ids(self) -> np.ndarray:
        return np.unique(self.blob_id)

    def blob_mask(self, i: int) -> np.ndarray:
        return self.blob_id == i

    def blob_sums(self) -> dict:
        return {int(i): float(self.weights[self.blob_id == i].sum()) for i in self.blob_ids}

    def moved(self, positions: np.ndarray, time: float) -> "ParticleField":
        """Same weights and ids (shared, not copied) at new positions."""
        return replace(self, positions=positions, time=float(time))


def check_disjoint(specs: Sequence[BlobSpec]) -> None:
    for i in range(len(specs)):
        for j in range(i + 1, len(specs)):
            d = math.dist(specs[i].center, specs[j].center)
            if not d > specs[i].radius + specs[j].radius:
                raise DisjointnessError(
                    f"blobs {i} and {j} overlap: distance {d:.6g} <= "
                    f"{specs[i].radius + specs[j].radius:.6g}"
                )


def lattice_nodes(center, radius: float, spacing: float) -> np.ndarray:
    """Cell centres of a square lattice, symmetric about ``center``, inside
    the open disk."""
    n = int(math.ceil(radius / spacing)) + 1
    g = (np.arange(-n, n) + 0.5) * spacing
    gx, gy = np.meshgrid(g, g, indexing="ij")
    pts = np.stack([gx.ravel(), gy.ravel()], axis=-1)
    pts = pts[np.sum(pts * pts, axis=1) < radius * radius]
    return pts + np.asarray(center, dtype=float)


def init_blobs(
    specs: Sequence[BlobSpec], particles_per_diameter: int, smoothing_factor: float = 2.0
) -> ParticleField:
    specs = list(specs)
    if not specs:
        raise DomainError("at least one blob is required")
    if particles_per_diameter < 8:
        raise DomainError("particles_per_diameter must be >= 8")
    check_disjoint(specs)
    pos, w, ids = [], [], []
    spacing_max = 0.0
    for i, spec in enumerate(specs):
        if spec.max_density is not None and spec.peak_density > spec.max_density / spec.radius ** 2:
            raise ProfileError(
                f"blob {i}: peak density {spec.peak_density:.6g} exceeds "
                f"M/eps^2 = {spec.max_density / spec.radius ** 2:.6g}"
            )
        h = 2.0 * spec.radius / particles_per_diameter
        spacing_max = max(spacing_max, h)
        nodes = lattice_nodes(spec.center, spec.radius, h)
        wi = spec.density(nodes) * h * h
        wi = wi * (spec.intensity / wi.sum())
        pos.append(nodes)
        w.append(wi)
        ids.append(np.full(nodes.shape[0], i, dtype=np.int64))
    return ParticleField(
        positions=np.concatenate(pos),
        weights=np.concatenate(w),
        blob_id=np.concatenate(ids),
        smoothing=smoothing_factor * spacing_max,
        time=0.0,
    )


def _dyadic_power(alpha: float, max_level: int = 6):
    """(n_sqrt, k) with r2**(alpha/2) == (r2**(1/2**n_sqrt))**k, or None.

    Repeated square roots are exact to a few ulp and several times cheaper
    than a general ``pow`` in the pair loop.
    """
    for m in range(max_level + 1):
        k = alpha * 2 ** m
        if k == int(k):
            return (m + 1 if k else 0), int(k)
    return None


@numba.njit(parallel=True, cache=True)
def _sum_kernel(targets, sx, sy, weights, alpha_phi, half_power, n_sqrt, k_mul, s2):
    # Each target accumulates its sources sequentially in index order, so the
    # result does not depend on the thread count.
    m = targets.shape[0]
    n = sx.shape[0]
    out = np.zeros((m, 2))
    for i in numba.prange(m):
        tx = targets[i, 0]
        ty = targets[i, 1]
        ux = 0.0
        uy = 0.0
        for j in range(n):
            dx = tx - sx[j]
            dy = ty - sy[j]
            r2 = dx * dx + dy * dy + s2
            if r2 > 0.0:
                if n_sqrt >= 0:
                    q = r2
                    for _ in range(n_sqrt):
                        q = np.sqrt(q)
                    p = 1.0
                    for _ in range(k_mul):
                        p *= q
                    f = weights[j] / (r2 * p)
                else:
                    f = weights[j] * r2 ** (-half_power)
                ux -= f * dy
                uy += f * dx
        out[i, 0] = alpha_phi * ux
        out[i, 1] = alpha_phi * uy
    return out


def field_velocities(field: ParticleField, alpha: AlphaLike, targets) -> np.ndarray:
    """sum_k w_k K_s(target - x_k) for each target row, shape (M, 2)."""
    coeffs = phi_alpha(alpha)
    t = np.ascontiguousarray(np.asarray(targets, dtype=float).reshape(-1, 2))
    pos = np.asarray(field.positions, dtype=float)
    dy = _dyadic_power(coeffs.alpha)
    n_sqrt, k_mul = dy if dy is not None else (-1, 0)
    return _sum_kernel(
        t,
        np.ascontiguousarray(pos[:, 0]),
        np.ascontiguousarray(pos[:, 1]),
        np.ascontiguousarray(field.weights, dtype=float),
        coeffs.alpha_phi,
        (coeffs.alpha + 2.0) / 2.0,
        n_sqrt,
        k_mul,
        field.smoothing ** 2,
    )


def field_velocity(field: ParticleField, alpha: AlphaLike, point) -> np.ndarray:
    return field_velocities(field, alpha, np.asarray(point, dtype=float)[None, :])[0]


def advect_step(field: ParticleField, alpha: AlphaLike, external, dt: float) -> ParticleField:
    """One RK4 step of dx/dt = u(x, t) + F(x, t); u is re-evaluated from the
    stage positions at every stage."""
    if not dt > 0.0:
        raise DomainError(f"dt must be positive, got {dt!r}")

    def rhs(t, x):
        stage = field.moved(x, t)
        u = field_velocities(stage, alpha, x)
        if external is not None:
            u = u + external.velocity(x, t)
        return u

    x_new = rk4_step(rhs, field.time, np.asarray(field.positions, dtype=float), dt)
    return field.moved(x_new, field.time + dt)


def write_snapshot_csv(field: ParticleField, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "blob_id", "x_1", "x_2", "w"])
        t = repr(float(field.time))
        for (x1, x2), b, wk in zip(field.positions, field.blob_id, field.weights):
            w.writerow([t, int(b), repr(float(x1)), repr(float(x2)), repr(float(wk))])


_MAGIC = b"MSQGSNP1"
_HEADER = struct.Struct("<8sqddd")


def write_snapshot_binary(field: ParticleField, path, alpha: AlphaLike) -> None:
    """Little-endian restart file.

    Layout: magic (8 bytes), P (int64), alpha, smoothing, time (float64),
    then x_1[P], x_2[P], w[P] (float64) and blob_id[P] (int64).
    """
    coeffs = phi_alpha(alpha)
    p = field.n_particles
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(_MAGIC, p, coeffs.alpha, field.smoothing, field.time))
        fh.write(np.ascontiguousarray(field.positions[:, 0], dtype="<f8").tobytes())
        fh.write(np.ascontiguousarray(field.positions[:, 1], dtype="<f8").tobytes())
        fh.write(np.ascontiguousarray(field.weights, dtype="<f8").tobytes())
        fh.write(np.ascontiguousarray(field.blob_id, dtype="<i8").tobytes())


def read_snapshot_binary(path):
    """Returns (ParticleField, alpha)."""
    with open(path, "rb") as fh:
        raw = fh.read()
    magic, p, alpha, smoothing, time = _HEADER.unpack_from(raw, 0)
    if magic != _MAGIC:
        raise DomainError(f"{path}: not a particle snapshot")
    off = _HEADER.size
    expected = off + p * 8 * 4
    if len(raw) != expected:
        raise DomainError(f"{path}: expected {expected} bytes, found {len(raw)}")
    arr = np.frombuffer(raw, dtype="<f8", count=3 * p, offset=off)
    ids = np.frombuffer(raw, dtype="<i8", count=p, offset=off + 3 * p * 8)
    pos = np.stack([arr[:p], arr[p:2 * p]], axis=-1).astype(float)
    field = ParticleField(pos, arr[2 * p:].astype(float), ids.astype(np.int64), smoothing, time)
    return field, alpha
