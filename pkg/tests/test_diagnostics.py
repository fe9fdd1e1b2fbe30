import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from msqglab.diagnostics import (
    DiagnosticsWriter,
    LocalizationSpec,
    advance_reduced_center,
    beta_bound,
    blob_moments,
    compute_diagnostics,
    exit_times_from_distances,
    fit_log_law,
    localization_time,
)
from msqglab.errors import AlignmentError, DomainError
from msqglab.external import RigidRotation
from msqglab.transport import BlobSpec, init_blobs

# 11 * 2^k avoids the Gauss-circle oscillations that make other doubling
# sequences non-monotone at these resolutions
REFINEMENT = (11, 22, 44, 88)


def disk_errors(ppd, eps=0.1):
    f = init_blobs([BlobSpec((0.0, 0.0), eps, 1.0)], ppd)
    _, I, m, _ = blob_moments(f.positions, f.weights, [eps / 2])
    return abs(I - eps ** 2 / 2) / (eps ** 2 / 2), abs(m[eps / 2] - 0.75) / 0.75


def test_uniform_disk_refinement():
    errs = np.array([disk_errors(p) for p in REFINEMENT])
    assert np.all(np.diff(errs[:, 0]) < 0) and np.all(np.diff(errs[:, 1]) < 0)
    assert errs[-1, 0] <= 5e-3 and errs[-1, 1] <= 5e-3


def test_trivial_exterior_masses():
    f = init_blobs([BlobSpec((0.4, 0.0), 0.1, -2.0)], 16)
    B, I, m, R = blob_moments(f.positions, f.weights, [0.0, 0.2])
    assert m[0.0] == 1.0 and m[0.2] == 0.0
    assert R < 0.1
    with pytest.raises(DomainError):
        blob_moments(np.zeros((0, 2)), np.zeros(0))


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 60))
def test_chebyshev_and_monotone_on_random_measures(seed, n):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(n, 2))
    w = rng.uniform(0.01, 1.0, size=n) * rng.choice([-1, 1])
    h = np.sort(rng.uniform(0.01, 3.0, size=5))
    _, I, m, _ = blob_moments(x, w, h)
    vals = [m[float(v)] for v in h]
    assert all(b <= a for a, b in zip(vals, vals[1:]))
    assert all(m[float(v)] <= I / v ** 2 for v in h)


def test_beta_bound():
    assert beta_bound(0.0) == 0.5
    assert beta_bound(0.5) == pytest.approx(2 / 7, rel=1e-15)
    grid = [beta_bound(a) for a in np.linspace(0, 0.999, 100)]
    assert all(b < a for a, b in zip(grid, grid[1:]))
    assert 0 < beta_bound(0.999999) < 1e-5


def test_localization_spec():
    s = LocalizationSpec(0.01, 0.25)
    assert s.radius == pytest.approx(0.01 ** 0.25)
    assert s.in_regime(0.5) and not LocalizationSpec(0.01, 0.4).in_regime(0.5)
    with pytest.raises(DomainError):
        LocalizationSpec(1.0, 0.2)
    with pytest.raises(DomainError):
        LocalizationSpec(0.1, 0.5)


def test_synthetic_crossing_and_censoring():
    spec = LocalizationSpec(0.1, 0.2)
    times = np.linspace(0, 5, 501)
    dist = spec.radius * (1 + (times - 3) * (times >= 3)) * np.where(times < 3, 0.5, 1.0)
    traj = np.stack([dist, np.zeros_like(dist)], axis=-1)[:, None, :]
    res = localization_time(times, [traj], [np.zeros((times.size, 2))], spec, 5.0)
    assert not res.censored and abs(res.exit_times[0] - 3.0) <= times[1] - times[0]
    inside = np.full_like(traj, 0.5 * spec.radius)
    res = localization_time(times, [inside], [np.zeros((times.size, 2))], spec, 5.0)
    assert res.censored and res.T == 5.0 and res.exit_times == [None]
    with pytest.raises(AlignmentError):
        localization_time(times[:-1], [traj], [np.zeros((times.size, 2))], spec, 5.0)


def test_horizon_non_increasing_in_beta():
    times = np.linspace(0, 10, 1001)
    d = [0.02 * np.exp(0.5 * times)]
    Ts = [exit_times_from_distances(times, d, LocalizationSpec(0.1, b).radius, 10.0).T
          for b in (0.05, 0.1, 0.2, 0.3, 0.45)]
    assert all(b <= a for a, b in zip(Ts, Ts[1:]))


def test_fit_log_law_recovers_line():
    eps = np.array([0.1, 0.05, 0.025, 0.0125])
    c0, c1 = fit_log_law(eps, 1.5 + 2.0 * np.abs(np.log(eps)))
    assert c0 == pytest.approx(1.5) and c1 == pytest.approx(2.0)


def test_reduced_centre_rotation():
    b = np.array([1.0, 0.0])
    t = 0.0
    for _ in range(100):
        b = advance_reduced_center(b, RigidRotation(1.0), t, 0.01)
        t += 0.01
    np.testing.assert_allclose(b, [math.cos(1.0), math.sin(1.0)], atol=1e-10)


def test_compute_diagnostics_and_writer(tmp_path):
    f = init_blobs([BlobSpec((-1, 0), 0.1, 1.0), BlobSpec((1, 0), 0.1, -1.0)], 12)
    recs = compute_diagnostics(f, [0.05], {0: [-1, 0], 1: [1, 0]}, {0: [-1, 0], 1: [1, 0]})
    assert [r.blob_id for r in recs] == [0, 1]
    assert recs[1].max_tracking_error == pytest.approx(recs[1].support_radius_R, abs=1e-12)
    p = tmp_path / "d.csv"
    with DiagnosticsWriter(str(p), [0.05]) as w:
        w.write(recs)
        w.write(compute_diagnostics(f, [0.05]))
    lines = p.read_text().splitlines()
    assert lines[0] == "t,blob_id,B1,B2,Bred1,Bred2,I,R,m@0.05,max_tracking_error"
    assert len(lines) == 5
    assert lines[-1].split(",")[4] == "" and lines[-1].endswith(",")
