"""Blob-level observables and localization horizons.

Per blob, weights enter through |w_k| normalised to unit mass, so the
quantities below are those of a unit, nonnegative blob even when the
intensity is negative:

    B   = sum |w| x / sum |w|                   (centre of the blob)
    I   = sum |w| |x - B|^2 / sum |w|           (moment of inertia about B)
    m(h)= sum_{|x - B| > h} |w| / sum |w|       (exterior mass)
    R   = max |x - B|                           (support radius)
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence

import numpy as np

from ._rk4 import rk4_step
from .errors import AlignmentError, DomainError
from .kernel import AlphaLike, as_alpha
from .transport import ParticleField


@dataclass(frozen=True)
class DiagnosticsRecord:
    time: float
    blob_id: int
    center_B_eps: np.ndarray
    inertia_I_eps: float
    exterior_mass: Dict[float, float]
    support_radius_R: float
    reduced_center_B: Optional[np.ndarray] = None
    max_tracking_error: Optional[float] = None


@dataclass(frozen=True)
class LocalizationSpec:
    epsilon: float
    beta: float
    tracking_target: str = "pseudo_vortex"  # or "reduced_center"

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0:
            raise DomainError(f"epsilon must lie in (0, 1), got {self.epsilon!r}")
        if not 0.0 < self.beta < 0.5:
            raise DomainError(f"beta must lie in (0, 1/2), got {self.beta!r}")
        if self.tracking_target not in ("pseudo_vortex", "reduced_center"):
            raise DomainError(f"unknown tracking target {self.tracking_target!r}")

    @property
    def radius(self) -> float:
        return self.epsilon ** self.beta

    def in_regime(self, alpha: AlphaLike) -> bool:
        return self.beta < beta_bound(alpha)


def beta_bound(alpha: AlphaLike) -> float:
    """Upper end (2 - 2 alpha) / (4 - alpha) of the admissible beta interval."""
    a = as_alpha(alpha).alpha
    return (2.0 - 2.0 * a) / (4.0 - a)


def blob_moments(x: np.ndarray, w: np.ndarray, probe_radii: Sequence[float] = ()):
    """(B, I, {h: m(h)}, R) for one blob's positions and weights."""
    if w.size == 0:
        raise DomainError("empty blob")
    aw = np.abs(w)
    mass = aw.sum()
    center = (aw[:, None] * x).sum(axis=0) / mass
    d2 = np.sum((x - center) ** 2, axis=1)
    inertia = float(np.dot(aw, d2) / mass)
    dist = np.sqrt(d2)
    ext = {float(h): float(aw[dist > h].sum() / mass) for h in probe_radii}
    return center, inertia, ext, float(dist.max())


def compute_diagnostics(
    field: ParticleField,
    probe_radii: Sequence[float] = (),
    reduced_centers: Optional[Mapping[int, np.ndarray]] = None,
    targets: Optional[Mapping[int, np.ndarray]] = None,
) -> List[DiagnosticsRecord]:
    """One record per blob, ordered by blob id.

    ``reduced_centers`` are the current solutions of dB/dt = F(B, t) (see
    :func:`advance_reduced_center`); ``targets`` are the points each blob is
    tracked against (pseudo-vortex positions or reduced centres).
    """
    records = []
    for i in field.blob_ids:
        i = int(i)
        mask = field.blob_id == i
        x = field.positions[mask]
        center, inertia, ext, radius = blob_moments(x, field.weights[mask], probe_radii)
        red = None if reduced_centers is None else np.asarray(reduced_centers[i], dtype=float)
        err = None
        if targets is not None:
            err = float(np.max(np.linalg.norm(x - np.asarray(targets[i]), axis=1)))
        records.append(DiagnosticsRecord(field.time, i, center, inertia, ext, radius, red, err))
    return records


def advance_reduced_center(center, external, t: float, dt: float) -> np.ndarray:
    """One RK4 step of dB/dt = F(B, t)."""
    return rk4_step(lambda s, b: external.velocity(b, s), t, np.asarray(center, dtype=float), dt)


@dataclass(frozen=True)
class LocalizationResult:
    exit_times: List[Optional[float]]  # None where censored
    T: float
    censored: bool
    t_max: float
    radius: float


def exit_times_from_distances(
    times: np.ndarray, max_distances: Sequence[np.ndarray], radius: float, t_max: float
) -> LocalizationResult:
    """First sample time where a blob's max distance reaches ``radius``."""
    times = np.asarray(times, dtype=float)
    exits: List[Optional[float]] = []
    for d in max_distances:
        d = np.asarray(d, dtype=float)
        if d.shape != times.shape:
            raise AlignmentError(f"distance series of shape {d.shape} vs times {times.shape}")
        hit = np.nonzero((d >= radius) & (times <= t_max))[0]
        exits.append(float(times[hit[0]]) if hit.size else None)
    finite = [e for e in exits if e is not None]
    if finite:
        return LocalizationResult(exits, min(finite), False, t_max, radius)
    return LocalizationResult(exits, t_max, True, t_max, radius)


def localization_time(
    times,
    blob_trajectories: Sequence[np.ndarray],
    targets: Sequence[np.ndarray],
    spec: LocalizationSpec,
    t_max: float,
    pad: float = 0.0,
) -> LocalizationResult:
    """Per-blob first exit from the disk of radius epsilon**beta about the target.

    ``blob_trajectories[i]`` has shape (S, P_i, 2) and ``targets[i]`` shape
    (S, 2), both sampled at ``times`` (S,). ``pad`` is added to every
    distance (the smoothing length, for conservative verdicts). Exit times
    are resolved to one sample; if nothing exits by ``t_max`` the result is
    censored at ``t_max``.
    """
    times = np.asarray(times, dtype=float)
    if len(blob_trajectories) != len(targets):
        raise AlignmentError("one target trajectory per blob is required")
    dists = []
    for traj, tgt in zip(blob_trajectories, targets):
        traj = np.asarray(traj, dtype=float)
        tgt = np.asarray(tgt, dtype=float)
        if traj.shape[0] != times.size or tgt.shape != (times.size, 2):
            raise AlignmentError(
                f"trajectory {traj.shape} / target {tgt.shape} do not match {times.size} samples"
            )
        dists.append(np.max(np.linalg.norm(traj - tgt[:, None, :], axis=-1), axis=1) + pad)
    return exit_times_from_distances(times, dists, spec.radius, t_max)


def fit_log_law(epsilons: Sequence[float], horizons: Sequence[float]):
    """Least squares T = c0 + c1 |log eps|; returns (c0, c1)."""
    x = np.abs(np.log(np.asarray(epsilons, dtype=float)))
    y = np.asarray(horizons, dtype=float)
    if x.size < 2:
        return float(y[0]) if y.size else math.nan, math.nan
    A = np.stack([np.ones_like(x), x], axis=1)
    (c0, c1), *_ = np.linalg.lstsq(A, y, rcond=None)
    return float(c0), float(c1)


@dataclass
class DiagnosticsWriter:
    """Streams records to the diagnostics CSV.

    Columns: t, blob_id, B1, B2, Bred1, Bred2, I, R, one ``m@h`` per probe
    radius, max_tracking_error. Missing optional values are written empty.
    """

    path: str
    probe_radii: Sequence[float]
    _fh: object = field(default=None, repr=False)
    _w: object = field(default=None, repr=False)

    def __enter__(self):
        self._fh = open(self.path, "w", newline="")
        self._w = csv.writer(self._fh, lineterminator="\n")
        self._w.writerow(
            ["t", "blob_id", "B1", "B2", "Bred1", "Bred2", "I", "R"]
            + [f"m@{h!r}" for h in self.probe_radii]
            + ["max_tracking_error"]
        )
        return self

    def write(self, records: Sequence[DiagnosticsRecord]) -> None:
        for r in records:
            red = ["", ""] if r.reduced_center_B is None else [repr(float(v)) for v in r.reduced_center_B]
            self._w.writerow(
                [repr(float(r.time)), r.blob_id, repr(float(r.center_B_eps[0])),
                 repr(float(r.center_B_eps[1]))]
                + red
                + [repr(r.inertia_I_eps), repr(r.support_radius_R)]
                + [repr(r.exterior_mass[float(h)]) for h in self.probe_radii]
                + ["" if r.max_tracking_error is None else repr(r.max_tracking_error)]
            )

    def __exit__(self, *exc):
        self._fh.close()
        return False
