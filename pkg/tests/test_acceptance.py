"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v``; the verdicts are
repeated under "acceptance criteria" in the terminal summary. Total runtime
is roughly eight minutes on one core.
"""
import filecmp
import math

import numpy as np
import pytest

import oracles
from msqglab.diagnostics import beta_bound, blob_moments, compute_diagnostics
from msqglab.harness.config import validate_config
from msqglab.harness.scenarios import run_scenario
from msqglab.kernel import kernel_velocity, phi_alpha
from msqglab.pseudo_vortex import PseudoVortexState, hamiltonian, pv_integrate
from msqglab.transport import BlobSpec, advect_step, init_blobs


def test_c1_kernel_suite(criterion):
    rng = np.random.default_rng(1)
    x = rng.uniform(-5, 5, size=(2000, 2))
    lam = rng.uniform(0.1, 10, size=2000)
    orth = anti = homog = 0.0
    for alpha in (0.0, 0.25, 0.5, 0.75, 0.99):
        k = kernel_velocity(alpha, x)
        nk, nx = np.linalg.norm(k, axis=1), np.linalg.norm(x, axis=1)
        orth = max(orth, float(np.max(np.abs(np.sum(k * x, axis=1)) / (nk * nx))))
        anti = max(anti, float(np.max(np.abs(kernel_velocity(alpha, -x) + k))))
        scaled = kernel_velocity(alpha, lam[:, None] * x)
        ref = lam[:, None] ** (-(alpha + 1)) * k
        homog = max(homog, float(np.max(np.abs(scaled - ref) / np.abs(ref).max(axis=1, keepdims=True))))
    limit = abs(phi_alpha(1e-6).alpha_phi * 2 * math.pi - 1.0)
    ok = orth <= 1e-12 and anti == 0.0 and homog <= 1e-10 and limit <= 1e-4
    criterion(1, "kernel suite", ok,
              f"orthogonality {orth:.2e} <= 1e-12, antisymmetry {anti:.1e}, homogeneity {homog:.2e} <= 1e-10, "
              f"|2 pi alpha phi(1e-6) - 1| = {limit:.2e} <= 1e-4")
    assert ok


def test_c2_two_vortex_calibration(criterion, tmp_path):
    worst_T = worst_d = 0.0
    for alpha in (0.25, 0.5, 0.75):
        cfg = validate_config(f"scenario: two_vortex_calibration\nalpha: {alpha}\nintegration: {{dt: 0.001}}\n"
                              "calibration: {intensity: 1.0, separation: 1.0}\n")
        rep = run_scenario(cfg, str(tmp_path / f"a{alpha}"))
        # the analytic period is recomputed from the high-precision oracle
        T_ref = oracles.pair_period(alpha, 1.0, 1.0)
        worst_T = max(worst_T, abs(rep.results["period_measured"] - T_ref) / T_ref)
        worst_d = max(worst_d, rep.results["separation_drift"])
    ok = worst_T <= 1e-4 and worst_d <= 1e-8
    criterion(2, "two-vortex calibration", ok,
              f"max period rel. error {worst_T:.2e} <= 1e-4, max separation drift {worst_d:.2e} <= 1e-8")
    assert ok


def random_systems(n_systems=5, seed=20261015):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n_systems:
        pos = rng.uniform(0, 1, size=(5, 2))
        d = np.linalg.norm(pos[:, None] - pos[None], axis=-1)[np.triu_indices(5, 1)]
        if d.min() >= 0.3:
            out.append(PseudoVortexState(pos, rng.uniform(0.5, 1.5, size=5)))
    return out


def test_c3_conservation_and_order(criterion):
    dH = dA = dP = 0.0
    ratios = []
    systems = random_systems()
    for alpha in (0.25, 0.5, 0.75):
        for s in systems:
            tr = pv_integrate(s, alpha, 1e-3, 10.0)
            c0, c1 = hamiltonian(s, alpha), hamiltonian(tr.final_state, alpha)
            scale = float(np.sum(np.abs(s.intensities) * np.linalg.norm(s.positions, axis=1)))
            dH = max(dH, abs(c1.hamiltonian - c0.hamiltonian) / abs(c0.hamiltonian))
            dA = max(dA, abs(c1.angular_impulse - c0.angular_impulse) / abs(c0.angular_impulse))
            dP = max(dP, float(np.max(np.abs(c1.linear_impulse - c0.linear_impulse))) / scale)
        ref = pv_integrate(systems[0], alpha, 1e-3, 1.0).positions[-1]
        e1, e2 = (np.max(np.abs(pv_integrate(systems[0], alpha, dt, 1.0).positions[-1] - ref))
                  for dt in (0.02, 0.01))
        ratios.append(e1 / e2)
    ok = dH <= 1e-6 and dA <= 1e-6 and dP <= 1e-8 and all(8 <= r <= 32 for r in ratios)
    criterion(3, "conservation and RK4 order", ok,
              f"H drift {dH:.2e}, angular impulse drift {dA:.2e} (<= 1e-6), linear impulse {dP:.2e} "
              f"(<= 1e-8), error ratios {', '.join(f'{r:.1f}' for r in ratios)} in [8, 32]")
    assert ok


BLOB_RUN = """
alpha: 0.5
integration: {{dt: 0.005, t_end: 1.0, scale_dt_with_epsilon: false}}
discretization: {{particles_per_diameter: 80}}
localization: {{epsilons: [0.1]}}
blobs: [{{center: [0.3, -0.2], intensity: 1.0}}]
{extra}
"""


def test_c4_single_free_blob(criterion, tmp_path):
    cfg = validate_config("scenario: single_blob_free\n" + BLOB_RUN.format(extra=""))
    rep = run_scenario(cfg, str(tmp_path / "free"))
    res = rep.results["per_epsilon"][0]
    ok = rep.status == "completed" and res["center_drift"] <= 1e-3 * 0.1 and res["inertia_drift"] <= 1e-2
    criterion(4, "single free blob", ok,
              f"P = {res['particles']}, max |B(t)-B(0)| = {res['center_drift']:.2e} <= 1e-4, "
              f"max |I(t)-I(0)|/I(0) = {res['inertia_drift']:.2e} <= 1e-2")
    assert ok


def test_c5_inertia_envelope(criterion, tmp_path):
    cfg = validate_config("scenario: single_blob_driven\n"
                          + BLOB_RUN.format(extra="external: {kind: rigid_rotation, omega: 1.0}"))
    rep = run_scenario(cfg, str(tmp_path / "driven"))
    res = rep.results["per_epsilon"][0]
    ok = (rep.status == "completed" and res["inertia_envelope_ratio"] <= 1.0
          and res["center_envelope_ratio"] <= 1.0 and abs(res["integrated_lipschitz"] - 1.0) < 1e-12)
    criterion(5, "inertia and centre envelopes", ok,
              f"max I / (4 eps^2 e^2t 1.1) = {res['inertia_envelope_ratio']:.3f} <= 1, "
              f"max |B_eps - B| / (2 eps (1+t) e^t 1.1) = {res['center_envelope_ratio']:.2e} <= 1")
    assert ok


N_BLOB = """
scenario: n_blob_localization
alpha: 0.5
integration: {{dt: 0.005, t_end: 5.0}}
discretization: {{particles_per_diameter: 16}}
localization: {{epsilons: {eps}, beta: 0.2}}
blobs:
  - {{center: [-1.0, 0.0], intensity: 1.0}}
  - {{center: [1.0, 0.0], intensity: 1.0}}
"""


def test_c6_localization_trend(criterion, tmp_path):
    cfg = validate_config(N_BLOB.format(eps="[0.1, 0.05, 0.025]"))
    assert cfg.warnings == []  # beta = 0.2 < 2/7
    rep = run_scenario(cfg, str(tmp_path / "loc"))
    loc = rep.localization
    censored = all(r["censored"] for r in loc)
    errs = np.array([r["final_max_tracking_error"] for r in loc])  # rows ordered 0.1, 0.05, 0.025
    decreasing = bool(np.all(np.diff(errs, axis=0) < 0))
    ok = rep.status == "completed" and censored and decreasing
    detail = ", ".join(f"eps={r['epsilon']}: T={r['T']:g}{' (censored)' if r['censored'] else ''}, "
                       f"err={max(r['final_max_tracking_error']):.4f} < eps^b={r['radius']:.3f}" for r in loc)
    criterion(6, "localization trend", ok, detail + f"; per-blob errors decreasing in eps: {decreasing}")
    assert ok


@pytest.mark.parametrize("alpha", [0.25, 0.5])
def test_c7_expanding_triple(criterion, tmp_path, alpha):
    cfg = validate_config(f"scenario: expanding_triple\nalpha: {alpha}\n")
    rep = run_scenario(cfg, str(tmp_path / "triple"))
    if rep.status == "blocked":
        criterion(7, f"expanding triple alpha={alpha}", False,
                  "BLOCKED, search residual log: " + " | ".join(rep.results["search_residual_log"][-5:]))
        pytest.fail(rep.abort_reason)
    r = rep.results
    target = 1.0 / (2.0 + alpha)
    rel = abs(r["exponent"] - target) / target
    g = r["g_fit"]
    t_c = r["collapse_time"]
    collapse_ok = t_c <= -(1.0 - 1e-2) / g and t_c >= -(1.0 + 1e-2) / g
    ok = rep.status == "completed" and rel <= 0.05 and collapse_ok
    criterion(7, f"expanding triple alpha={alpha}", ok,
              f"exponent {r['exponent']:.6f} vs {target:.6f} (rel. {rel:.1e} <= 5e-2); min distance < 1e-2 L(0) "
              f"at t = {t_c:.5f}, -1/g = {-1.0 / g:.5f}, required <= {-(1 - 1e-2) / g:.5f}")
    assert ok


def test_c8_diagnostics_oracles(criterion):
    eps = 0.1
    errs = []
    for ppd in (11, 22, 44, 88):
        f = init_blobs([BlobSpec((0.0, 0.0), eps, 1.0)], ppd)
        _, I, m, _ = blob_moments(f.positions, f.weights, [eps / 2])
        errs.append((abs(I / (eps ** 2 / 2) - 1), abs(m[eps / 2] / 0.75 - 1)))
    errs = np.array(errs)
    monotone = bool(np.all(np.diff(errs, axis=0) < 0))
    # Chebyshev on every record of an evolving two-blob run
    f = init_blobs([BlobSpec((-0.5, 0.0), eps, 1.0), BlobSpec((0.5, 0.0), eps, -0.6, "radial_taper")], 20)
    probes = list(np.linspace(0.01, 3.0, 40) * eps)
    worst = -math.inf
    for _ in range(40):
        for r in compute_diagnostics(f, probes):
            worst = max(worst, max(r.exterior_mass[h] - r.inertia_I_eps / h ** 2 for h in probes))
        f = advect_step(f, 0.5, None, 0.01)
    ok = monotone and errs[-1].max() <= 5e-3 and worst <= 0.0
    criterion(8, "diagnostics oracles", ok,
              f"I errors {', '.join(f'{e:.1e}' for e in errs[:, 0])}; m(eps/2) errors "
              f"{', '.join(f'{e:.1e}' for e in errs[:, 1])}; monotone {monotone}; "
              f"max m(h) - I/h^2 = {worst:.3f} <= 0")
    assert ok


def test_c9_beta_bound(criterion):
    grid = np.linspace(0.0, 0.99, 100)
    vals = np.array([beta_bound(a) for a in grid])
    ok = beta_bound(0.0) == 0.5 and beta_bound(0.5) == 2.0 / 7.0 and bool(np.all(np.diff(vals) < 0))
    criterion(9, "beta bound", ok,
              f"beta_bound(0) = {beta_bound(0.0)!r}, beta_bound(0.5) = {beta_bound(0.5)!r} (2/7 = {2 / 7!r}), "
              f"strictly decreasing on 100 points: {bool(np.all(np.diff(vals) < 0))}")
    assert ok


def test_c10_determinism(criterion, tmp_path):
    text = N_BLOB.format(eps="[0.1]")
    files = []
    for name in ("first", "second"):
        rep = run_scenario(validate_config(text), str(tmp_path / name))
        files.append(sorted(f for f in rep.manifest if f.endswith(".csv")))
    same_names = files[0] == files[1]
    match, mismatch, errors = filecmp.cmpfiles(tmp_path / "first", tmp_path / "second", files[0], shallow=False)
    ok = same_names and not mismatch and not errors and len(match) == len(files[0]) > 0
    criterion(10, "determinism", ok, f"{len(match)} of {len(files[0])} CSV files bit-identical ({', '.join(match)})")
    assert ok
