"""N-point pseudo-vortex system.

    dz_i/dt = sum_{j != i} a_j K(z_i - z_j)

with K the exact kernel of :mod:`msqglab.kernel`. The system is Hamiltonian,
``a_i dz_i/dt = grad_perp_i H`` with ``H = sum_{i<j} a_i a_j G(|z_i - z_j|)``,
and conserves H, the linear impulse sum a_i z_i and the angular impulse
sum a_i |z_i|^2.
"""
from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import optimize

from ._rk4 import rk4_step
from .errors import DomainError, SearchFailure, SingularityError, StepRejected
from .kernel import AlphaLike, as_alpha, green, phi_alpha

TRIPLE_PAIRS = ((0, 1), (1, 2), (0, 2))


@dataclass(frozen=True)
class PseudoVortexState:
    positions: np.ndarray
    intensities: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        pos = np.array(self.positions, dtype=float).reshape(-1, 2)
        a = np.array(self.intensities, dtype=float).reshape(-1)
        if a.size == 0:
            raise DomainError("at least one pseudo-vortex is required")
        if a.size != pos.shape[0]:
            raise DomainError(
                f"{pos.shape[0]} positions but {a.size} intensities"
            )
        if np.any(a == 0.0):
            raise DomainError("intensities must be nonzero")
        if not np.all(np.isfinite(pos)):
            raise DomainError("positions must be finite")
        d, pair = _min_pair_distance(pos)
        if d == 0.0:
            raise SingularityError(f"pseudo-vortices {pair} coincide", pair=pair)
        pos.setflags(write=False)
        a.setflags(write=False)
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "intensities", a)
        object.__setattr__(self, "time", float(self.time))

    @property
    def n(self) -> int:
        return self.intensities.size

    def with_positions(self, positions, time) -> "PseudoVortexState":
        return PseudoVortexState(positions, self.intensities, time)


@dataclass(frozen=True)
class ConservedQuantities:
    hamiltonian: float
    linear_impulse: np.ndarray
    angular_impulse: float


@dataclass(frozen=True)
class EventReport:
    kind: str  # "collapse", "escape" or "none"
    time: float
    index: Optional[object] = None
    threshold: Optional[float] = None


@dataclass(frozen=True)
class Thresholds:
    collapse: float
    escape: float

    @classmethod
    def default_for(cls, state: PseudoVortexState) -> "Thresholds":
        """Scale-free defaults from the initial configuration."""
        pos = state.positions
        dmin, _ = _min_pair_distance(pos)
        radius = float(np.max(np.linalg.norm(pos, axis=1)))
        if state.n < 2:
            return cls(collapse=0.0, escape=math.inf)
        diameter = float(np.max(_pair_distances(pos)))
        return cls(collapse=1e-4 * dmin, escape=radius + 1e4 * diameter)


def _pair_distances(pos: np.ndarray) -> np.ndarray:
    n = pos.shape[0]
    i, j = np.triu_indices(n, k=1)
    return np.linalg.norm(pos[i] - pos[j], axis=-1)


def _min_pair_distance(pos: np.ndarray) -> Tuple[float, Optional[Tuple[int, int]]]:
    n = pos.shape[0]
    if n < 2:
        return math.inf, None
    i, j = np.triu_indices(n, k=1)
    d = np.linalg.norm(pos[i] - pos[j], axis=-1)
    k = int(np.argmin(d))
    return float(d[k]), (int(i[k]), int(j[k]))


def _velocities(pos: np.ndarray, a: np.ndarray, alpha: float, alpha_phi: float,
                guard: float = 0.0):
    diff = pos[:, None, :] - pos[None, :, :]
    r2 = np.einsum("ijk,ijk->ij", diff, diff)
    np.fill_diagonal(r2, np.inf)
    if a.size > 1:
        k = int(np.argmin(r2))
        if r2.flat[k] <= guard * guard:
            i, j = divmod(k, a.size)
            pair = (min(i, j), max(i, j))
            if r2.flat[k] == 0.0:
                raise SingularityError(f"pseudo-vortices {pair} coincide", pair=pair)
            raise StepRejected(
                f"RK stage brought pair {pair} to distance {math.sqrt(r2.flat[k]):.3e} "
                f"(guard {guard:.3e}); reduce dt", min_distance=math.sqrt(r2.flat[k]))
    w = alpha_phi * a[None, :] * r2 ** (-(alpha + 2.0) / 2.0)
    return np.stack(
        [-(w * diff[..., 1]).sum(axis=1), (w * diff[..., 0]).sum(axis=1)], axis=-1
    )


def pv_rhs(state: PseudoVortexState, alpha: AlphaLike) -> np.ndarray:
    """Velocities v_i = sum_{j != i} a_j K(z_i - z_j), shape (N, 2)."""
    coeffs = phi_alpha(alpha)
    return _velocities(state.positions, state.intensities, coeffs.alpha, coeffs.alpha_phi)


def hamiltonian(
    state: PseudoVortexState, alpha: AlphaLike, normalization: str = "generator"
) -> ConservedQuantities:
    """Hamiltonian plus linear and angular impulse.

    ``normalization="generator"`` gives sum_{i<j} a_i a_j G(r_ij), the exact
    generator of :func:`pv_rhs`. ``"minus_inv_2pi"`` gives the alternative
    form -(1/2pi) sum_{i != j} a_i a_j r_ij**-alpha, which generates the same
    orbits only after rescaling time; never mix the two in one run.
    """
    a_par = as_alpha(alpha)
    pos, a = state.positions, state.intensities
    n = a.size
    i, j = np.triu_indices(n, k=1)
    r = np.linalg.norm(pos[i] - pos[j], axis=-1)
    if np.any(r == 0.0):
        k = int(np.argmin(r))
        raise SingularityError("coincident pseudo-vortices", pair=(int(i[k]), int(j[k])))
    if normalization == "generator":
        g = np.array([green(a_par, rr) for rr in r])
        h = float(np.sum(a[i] * a[j] * g))
    elif normalization == "minus_inv_2pi":
        h = float(-2.0 / (2.0 * math.pi) * np.sum(a[i] * a[j] * r ** (-a_par.alpha)))
    else:
        raise DomainError(f"unknown normalization {normalization!r}")
    return ConservedQuantities(
        hamiltonian=h,
        linear_impulse=(a[:, None] * pos).sum(axis=0),
        angular_impulse=float(np.sum(a * np.sum(pos * pos, axis=1))),
    )


@dataclass
class Trajectory:
    """Sampled pseudo-vortex trajectory; arrays are read-only once built."""

    times: np.ndarray
    positions: np.ndarray  # (S, N, 2)
    intensities: np.ndarray
    alpha: float
    event: EventReport = field(default_factory=lambda: EventReport("none", math.nan))

    def __post_init__(self):
        for arr in (self.times, self.positions, self.intensities):
            arr.setflags(write=False)

    def __len__(self):
        return self.times.size

    def state_at(self, k: int) -> PseudoVortexState:
        return PseudoVortexState(self.positions[k], self.intensities, self.times[k])

    @property
    def final_state(self) -> PseudoVortexState:
        return self.state_at(-1)

    def pair_distances(self, pairs: Optional[Sequence[Tuple[int, int]]] = None) -> np.ndarray:
        """(S, n_pairs) distances; all pairs i<j in row-major order by default."""
        if pairs is None:
            pairs = list(itertools.combinations(range(self.intensities.size), 2))
        i = np.array([p[0] for p in pairs])
        j = np.array([p[1] for p in pairs])
        return np.linalg.norm(self.positions[:, i] - self.positions[:, j], axis=-1)

    def conserved(self) -> List[ConservedQuantities]:
        return [hamiltonian(self.state_at(k), self.alpha) for k in range(len(self))]

    def to_csv(self, path) -> None:
        n = self.intensities.size
        header = ["t"]
        for i in range(1, n + 1):
            header += [f"z{i}_1", f"z{i}_2"]
        header += ["H", "P_1", "P_2", "angular_impulse"]
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for k in range(len(self)):
                c = hamiltonian(self.state_at(k), self.alpha)
                row = [repr(float(self.times[k]))]
                row += [repr(float(v)) for v in self.positions[k].reshape(-1)]
                row += [
                    repr(c.hamiltonian),
                    repr(float(c.linear_impulse[0])),
                    repr(float(c.linear_impulse[1])),
                    repr(c.angular_impulse),
                ]
                w.writerow(row)

    @staticmethod
    def concatenate(parts: Sequence["Trajectory"]) -> "Trajectory":
        """Join consecutive pieces, dropping each duplicated junction sample."""
        times = [parts[0].times]
        pos = [parts[0].positions]
        for p in parts[1:]:
            times.append(p.times[1:])
            pos.append(p.positions[1:])
        return Trajectory(
            np.concatenate(times),
            np.concatenate(pos),
            parts[0].intensities.copy(),
            parts[0].alpha,
            parts[-1].event,
        )


def pv_integrate(
    state: PseudoVortexState,
    alpha: AlphaLike,
    dt: float,
    t_end: float,
    thresholds: Optional[Thresholds] = None,
) -> Trajectory:
    """Fixed-step RK4 from ``state.time`` to ``t_end``, sampled at every step.

    A negative ``dt`` integrates backward (then ``t_end < state.time``). The
    final step is shortened to land on ``t_end``. Integration halts at the
    first sample where the minimum pair distance drops below the collapse
    threshold or some |z_i| exceeds the escape threshold; the trajectory's
    ``event`` says which. Raises StepRejected when any RK stage comes within
    1e-3 * collapse threshold of a coincidence.
    """
    coeffs = phi_alpha(alpha)
    dt = float(dt)
    t0 = state.time
    span = float(t_end) - t0
    if dt == 0.0 or span == 0.0 or math.copysign(1.0, dt) != math.copysign(1.0, span):
        raise DomainError(
            f"dt={dt} must be nonzero and point from t={t0} towards t_end={t_end}"
        )
    if thresholds is None:
        thresholds = Thresholds.default_for(state)
    guard = 1e-3 * thresholds.collapse
    a = np.array(state.intensities)
    n_steps = max(1, int(math.ceil(abs(span / dt) - 1e-9)))

    def rhs(t, y):
        try:
            return _velocities(y, a, coeffs.alpha, coeffs.alpha_phi, guard)
        except SingularityError as exc:
            raise StepRejected(f"RK stage hit a coincidence at t={t:.6g}", time=t,
                               min_distance=0.0) from exc
        except StepRejected as exc:
            raise StepRejected(f"{exc} at t={t:.6g}", time=t,
                               min_distance=exc.min_distance) from None

    times = np.empty(n_steps + 1)
    traj = np.empty((n_steps + 1,) + state.positions.shape)
    times[0] = t0
    traj[0] = state.positions
    y = np.array(state.positions)
    event = EventReport("none", math.nan)
    k = 0
    for k in range(1, n_steps + 1):
        t = times[k - 1]
        h = dt if k < n_steps else (t0 + span) - t
        y = rk4_step(rhs, t, y, h)
        times[k] = t0 + span if k == n_steps else t0 + k * dt
        traj[k] = y
        if a.size > 1:
            dmin, pair = _min_pair_distance(y)
            if dmin < thresholds.collapse:
                event = EventReport("collapse", float(times[k]), pair, float(thresholds.collapse))
                break
        radii = np.linalg.norm(y, axis=1)
        if radii.max() > thresholds.escape:
            event = EventReport("escape", float(times[k]), int(np.argmax(radii)),
                                float(thresholds.escape))
            break
    return Trajectory(times[: k + 1].copy(), traj[: k + 1].copy(), a, coeffs.alpha, event)


def pv_step(state: PseudoVortexState, alpha: AlphaLike, dt: float) -> PseudoVortexState:
    """One RK4 step; used to co-evolve targets alongside the particle method."""
    coeffs = phi_alpha(alpha)
    a = np.asarray(state.intensities)
    y = rk4_step(lambda t, z: _velocities(z, a, coeffs.alpha, coeffs.alpha_phi), state.time,
                 np.array(state.positions), dt)
    return state.with_positions(y, state.time + dt)


def dynamical_time(state: PseudoVortexState, alpha: AlphaLike) -> float:
    """Time for the fastest pair to move by its own separation."""
    coeffs = phi_alpha(alpha)
    dmin, _ = _min_pair_distance(state.positions)
    return dmin ** (coeffs.alpha + 2.0) / (np.sum(np.abs(state.intensities)) * coeffs.alpha_phi)


def pv_integrate_rescaled(
    state: PseudoVortexState,
    alpha: AlphaLike,
    t_limit: float,
    thresholds: Optional[Thresholds] = None,
    steps_per_chunk: int = 50,
    safety: float = 0.01,
) -> Trajectory:
    """Chain fixed-step RK4 chunks whose step tracks the dynamical time.

    Each chunk runs ``steps_per_chunk`` steps of size ``safety *
    dynamical_time`` (signed towards ``t_limit``). Used to follow
    self-similar expansion and collapse, where the natural time scale
    changes by orders of magnitude.
    """
    if thresholds is None:
        thresholds = Thresholds.default_for(state)
    direction = math.copysign(1.0, t_limit - state.time)
    parts = []
    cur = state
    while True:
        dt = direction * safety * dynamical_time(cur, alpha)
        t_end = cur.time + steps_per_chunk * dt
        if (t_end - t_limit) * direction >= 0.0:
            t_end = t_limit
            dt = min(abs(dt), abs(t_end - cur.time)) * direction
        part = pv_integrate(cur, alpha, dt, t_end, thresholds)
        parts.append(part)
        if part.event.kind != "none" or part.times[-1] == t_limit:
            break
        cur = part.final_state
    return Trajectory.concatenate(parts)


@dataclass(frozen=True)
class SelfSimilarFit:
    is_self_similar: bool
    g: float
    exponent: float
    residual: float
    ratio_spread: float


def _fit_power_growth(t: np.ndarray, y: np.ndarray) -> Tuple[float, float, float]:
    """Least squares of y ~ p*log(1 + g t) over g > 0 and p.

    For fixed g the best p is linear, so only g is searched (on a log grid,
    then bounded Brent, then a joint Gauss-Newton polish).
    """
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    span = float(t.max())

    def profile(log_g):
        x = np.log1p(np.exp(log_g) * t)
        xx = float(np.dot(x.ravel(), x.ravel()))
        p = float(np.dot(x.ravel(), y.ravel())) / xx if xx > 0 else 0.0
        return float(np.sum((y - p * x) ** 2)), p

    grid = np.linspace(math.log(1e-6 / span), math.log(1e8 / span), 400)
    costs = np.array([profile(u)[0] for u in grid])
    k = int(np.argmin(costs))
    lo = grid[max(k - 1, 0)]
    hi = grid[min(k + 1, grid.size - 1)]
    res = optimize.minimize_scalar(lambda u: profile(u)[0], bounds=(lo, hi),
                                   method="bounded", options={"xatol": 1e-13})
    log_g = float(res.x)
    _, p = profile(log_g)

    def resid(params):
        lg, pp = params
        return (y - pp * np.log1p(np.exp(lg) * t)).ravel()

    ls = optimize.least_squares(resid, x0=[log_g, p], xtol=1e-15, ftol=1e-15, gtol=1e-15)
    log_g, p = ls.x
    return math.exp(log_g), float(p), float(np.sum(ls.fun ** 2))


def detect_self_similar_expansion(
    trajectory: Trajectory, ratio_tol: float = 0.01, residual_tol: float = 1e-3
) -> SelfSimilarFit:
    """Fit L_ij(t) = L_ij(0) * (1 + g t)**p jointly over the three pairs.

    ``residual`` is the RMS misfit of log L_ij relative to the RMS of the
    log-growth itself. The flag requires growth (g, p > 0), pairwise ratio
    curves agreeing within ``ratio_tol`` and ``residual <= residual_tol``.
    """
    if trajectory.intensities.size != 3:
        raise DomainError("self-similar detection needs exactly three pseudo-vortices")
    if len(trajectory) < 10:
        raise DomainError("self-similar detection needs at least 10 samples")
    t = trajectory.times - trajectory.times[0]
    lengths = trajectory.pair_distances(TRIPLE_PAIRS)
    ratios = lengths / lengths[0]
    y = np.log(ratios)
    spread = float(np.max(np.abs(ratios / ratios.mean(axis=1, keepdims=True) - 1.0)))
    if np.max(np.abs(y)) < 1e-12 or t[-1] <= 0.0:
        return SelfSimilarFit(False, 0.0, 0.0, math.inf, spread)
    g, p, cost = _fit_power_growth(t[:, None] * np.ones((1, 3)), y)
    rel = math.sqrt(cost / float(np.sum(y * y)))
    flag = g > 0.0 and p > 0.0 and spread <= ratio_tol and rel <= residual_tol
    return SelfSimilarFit(bool(flag), g, p, rel, spread)


@dataclass(frozen=True)
class TripleSearchConfig:
    intensity_range: Tuple[float, float] = (-3.0, 3.0)
    min_abs_intensity: float = 0.1
    side_ratio_range: Tuple[float, float] = (0.5, 2.0)
    grid_points: int = 9
    refine_top: int = 3
    tolerance: float = 1e-3
    horizon_growth: float = 1.2
    horizon_steps: int = 100
    validation_factor: float = 10.0
    min_rate: float = 1e-3


@dataclass(frozen=True)
class TripleCandidate:
    state: PseudoVortexState
    residual: float
    g_estimate: float
    accepted: bool
    validation_residual: float = math.nan
    residual_log: Tuple[str, ...] = ()


def _triangle_state(params, orientation=1.0) -> Optional[PseudoVortexState]:
    """Sides L01 = 1, L12 = rho12, L02 = rho02; intensities (1, a1, a2)."""
    rho12, rho02, a1, a2 = params
    if not (rho12 + rho02 > 1.0 and 1.0 + rho12 > rho02 and 1.0 + rho02 > rho12):
        return None
    x = (1.0 + rho02 ** 2 - rho12 ** 2) / 2.0
    y2 = rho02 ** 2 - x ** 2
    if y2 <= 1e-10:
        return None
    pos = np.array([[0.0, 0.0], [1.0, 0.0], [x, orientation * math.sqrt(y2)]])
    pos -= pos.mean(axis=0)
    return PseudoVortexState(pos, [1.0, a1, a2])


def _log_rates(state: PseudoVortexState, alpha) -> np.ndarray:
    v = pv_rhs(state, alpha)
    z = state.positions
    out = []
    for i, j in TRIPLE_PAIRS:
        d = z[i] - z[j]
        out.append(float(np.dot(d, v[i] - v[j]) / np.dot(d, d)))
    return np.array(out)


def _rate_scale(state: PseudoVortexState, alpha) -> float:
    return 1.0 / dynamical_time(state, alpha)


def instantaneous_shape_residual(state: PseudoVortexState, alpha: AlphaLike) -> Tuple[float, float]:
    """(spread of d/dt log L_ij relative to their mean, mean rate / natural rate)."""
    r = _log_rates(state, alpha)
    m = float(r.mean())
    scale = _rate_scale(state, alpha)
    if abs(m) <= 1e-14 * scale:
        return math.inf, 0.0
    return float(np.max(np.abs(r - m)) / abs(m)), m / scale


def shape_change(trajectory: Trajectory) -> Tuple[float, float]:
    """Max relative deviation of L_ij/L_ij(0) from their common mean, per
    unit of growth; returns (residual, growth factor)."""
    lengths = trajectory.pair_distances(TRIPLE_PAIRS)
    ratios = lengths / lengths[0]
    mean = ratios.mean(axis=1, keepdims=True)
    dev = float(np.max(np.abs(ratios / mean - 1.0)))
    growth = float(mean[-1, 0])
    if abs(growth - 1.0) < 1e-14:
        return math.inf, growth
    return dev / abs(growth - 1.0), growth


def _horizon(state, alpha, growth, factor=1.0):
    """Time for growth factor ``growth`` under the self-similar law, using
    the instantaneous rate as g / (2 + alpha)."""
    a = as_alpha(alpha).alpha
    m = float(_log_rates(state, alpha).mean())
    g = (2.0 + a) * m
    return ((growth ** (2.0 + a) - 1.0) / g) * factor, g


def evaluate_triple(
    state: PseudoVortexState, alpha: AlphaLike, config: TripleSearchConfig = TripleSearchConfig()
) -> TripleCandidate:
    """Integrated self-similarity residual over the short horizon.

    Configurations with no net growth (e.g. a rotating equilateral triple
    of equal intensities) are rejected outright.
    """
    if state.n != 3:
        raise DomainError("triple evaluation needs exactly three pseudo-vortices")
    inst, rate = instantaneous_shape_residual(state, alpha)
    if not math.isfinite(inst) or abs(rate) < config.min_rate:
        return TripleCandidate(state, math.inf, 0.0, False,
                               residual_log=(f"rejected: no growth (rate {rate:.3e})",))
    t_h, g = _horizon(state, alpha, config.horizon_growth)
    if g < 0.0:
        return TripleCandidate(state, math.inf, g, False,
                               residual_log=("rejected: contracts forward in time",))
    try:
        traj = pv_integrate(state, alpha, t_h / config.horizon_steps, state.time + t_h)
    except (StepRejected, SingularityError) as exc:
        return TripleCandidate(state, math.inf, g, False, residual_log=(str(exc),))
    res, _ = shape_change(traj)
    return TripleCandidate(state, res, g, res <= config.tolerance)


def search_self_similar_triple(
    alpha: AlphaLike, config: TripleSearchConfig = TripleSearchConfig()
) -> TripleCandidate:
    """Search triangle shape and intensities for a self-similar expanding triple.

    Parametrisation: side ratios (L12/L01, L02/L01) and intensity ratios
    (a1/a0, a2/a0); overall scale and a0 are fixed by scaling symmetry.
    A coarse grid screened by the instantaneous shape-change rate is followed
    by Nelder-Mead on the integrated shape change over a short horizon, and
    the winner is re-checked over a horizon ``validation_factor`` times longer.
    Mirror images are used to turn collapsing triples into expanding ones.
    """
    lo_r, hi_r = config.side_ratio_range
    lo_a, hi_a = config.intensity_range
    rho = np.linspace(lo_r, hi_r, config.grid_points)
    ints = np.linspace(lo_a, hi_a, config.grid_points)
    ints = ints[np.abs(ints) >= config.min_abs_intensity]
    log: List[str] = []
    if ints.size == 0:
        raise SearchFailure("intensity range excludes every admissible value",
                            residual_log=["empty intensity grid"])

    def admissible(params):
        _, _, a1, a2 = params
        return (lo_a <= a1 <= hi_a and lo_a <= a2 <= hi_a
                and abs(a1) >= config.min_abs_intensity
                and abs(a2) >= config.min_abs_intensity
                and lo_r <= params[0] <= hi_r and lo_r <= params[1] <= hi_r)

    def oriented(params):
        st = _triangle_state(params)
        if st is None:
            return None
        try:
            _, rate = instantaneous_shape_residual(st, alpha)
        except SingularityError:
            return None
        if rate < 0.0:
            st = _triangle_state(params, orientation=-1.0)
        return st

    screened = []
    for params in itertools.product(rho, rho, ints, ints):
        st = _triangle_state(params)
        if st is None:
            continue
        res, rate = instantaneous_shape_residual(st, alpha)
        if math.isfinite(res) and abs(rate) >= config.min_rate:
            screened.append((res, params))
    if not screened:
        raise SearchFailure("coarse grid produced no growing triangle",
                            residual_log=["no admissible grid point"])
    screened.sort(key=lambda item: item[0])
    log.append(f"grid: {len(screened)} admissible points, best instantaneous "
               f"residual {screened[0][0]:.3e}")

    def inst_objective(params):
        if not admissible(params):
            return 1e6
        st = _triangle_state(params)
        if st is None:
            return 1e6
        res, rate = instantaneous_shape_residual(st, alpha)
        if not math.isfinite(res) or abs(rate) < config.min_rate:
            return 1e6
        return res

    def integ_objective(params):
        if not admissible(params):
            return 1e6
        st = oriented(params)
        if st is None:
            return 1e6
        cand = evaluate_triple(st, alpha, config)
        return cand.residual if math.isfinite(cand.residual) else 1e6

    best: Optional[TripleCandidate] = None
    for res0, params0 in screened[: config.refine_top]:
        loc = optimize.minimize(inst_objective, np.array(params0), method="Nelder-Mead",
                                options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 4000})
        loc = optimize.minimize(integ_objective, loc.x, method="Nelder-Mead",
                                options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 150})
        st = oriented(loc.x)
        if st is None:
            continue
        cand = evaluate_triple(st, alpha, config)
        log.append(f"seed {np.round(params0, 3).tolist()} (inst {res0:.2e}) -> "
                   f"params {np.round(loc.x, 6).tolist()} residual {cand.residual:.3e}")
        if best is None or cand.residual < best.residual:
            best = cand
        if best.residual <= 1e-3 * config.tolerance:
            break
    if best is None or not best.accepted:
        raise SearchFailure(
            f"best residual {best.residual if best else math.inf:.3e} exceeds "
            f"tolerance {config.tolerance:.1e}", best=best, residual_log=log)

    # Validation over a longer horizon.
    t_h, _ = _horizon(best.state, alpha, config.horizon_growth, config.validation_factor)
    traj = pv_integrate(best.state, alpha, t_h / (config.horizon_steps * config.validation_factor),
                        best.state.time + t_h)
    val, growth = shape_change(traj)
    log.append(f"validation over {config.validation_factor:g}x horizon: residual {val:.3e}, "
               f"growth {growth:.3f}")
    if val > config.tolerance:
        raise SearchFailure(f"validation residual {val:.3e} exceeds tolerance",
                            best=best, residual_log=log)
    return TripleCandidate(best.state, best.residual, best.g_estimate, True, val, tuple(log))
