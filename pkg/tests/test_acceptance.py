"""Acceptance gate: every release-blocking behavior, one test per criterion.

Each criterion prints a single PASS/FAIL line (plus measured values) so the
suite run doubles as an acceptance report.  Criteria 2 and 4 encode targets
that the mathematics does not support at the stated parameters; they are
implemented exactly as stated and left to fail (see notes in the assertions
and the measured numbers they print).
"""

import time
import warnings

import numpy as np
import pytest

import driftbeam as db
from driftbeam.anm1d import AdmmParams, dual_feasibility_check, solve_sdp_1d
from driftbeam.anm2d import atomic_decomposition_cost, dual_polynomial_2d, solve_sdp_2d
from driftbeam.beamform import (cluster_frequencies, dual_polynomial_1d,
                                pattern_gain_db)
from driftbeam.ivdst import IvdstParams, ivdst_solve
from driftbeam.pipeline import cluster_peaks_2d, run_anm1d, run_ivdst
from driftbeam.tensor_ops import apply_L, apply_L_adjoint

from conftest import exact_atom_instance

warnings.filterwarnings("ignore", message="data matrix rank")

BAR_DB = -20.0
OFFSET_TYPES = ("static", "linear", "zigzag", "random")
TRUTH_120 = np.array([0.1, 0.3, 0.5])
ANGLES = (-20.0, -60.0, 20.0)

# structured-SDP runs for the nulling study are scaled to M=64 to stay in
# budget (the fast route runs at full scale); basis pairs probed per type
ANM_M64 = {"static": (0.022, 7), "linear": (0.022, 10),
           "zigzag": (0.022, 10), "random": (0.04, 13)}


def _report(criterion, ok, detail):
    print(f"\n[criterion {criterion}] {'PASS' if ok else 'FAIL'} - {detail}")
    return ok


def _preset_scene(typ, method="ivdst", m=None):
    cfg_dict = db.preset_config(f"exp1-{typ}", method)
    if m is not None:
        cfg_dict["m"] = m
    sc = db.parse_config(cfg_dict)
    xstar = db.build_data_matrix(sc.sources, sc.array, sc.m)
    return sc, xstar


def test_criterion_1_adjoint_correctness():
    rng = np.random.default_rng(0)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(100):
        m = int(rng.integers(4, 33))
        l = int(rng.integers(1, 9))
        l = min(l, m)
        n = int(rng.integers(1, 5))
        w = min(0.45, 0.49 * max(l, 1) / m) if l < m else 0.45
        basis = db.dpss_basis(m, w, l)
        x = rng.standard_normal((n, m, l)) + 1j * rng.standard_normal((n, m, l))
        y = rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))
        lhs = np.vdot(y, apply_L(x, basis)).real
        rhs = np.vdot(apply_L_adjoint(y, basis), x).real
        worst = max(worst, abs(lhs - rhs) / max(1.0, abs(lhs)))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-10 and elapsed < 5.0
    assert _report(1, ok, f"adjoint identity worst rel err {worst:.2e} over 100 "
                          f"instances in {elapsed:.2f}s")


def test_criterion_2_dpss_quality():
    t0 = time.perf_counter()
    m, w, l = 120, 0.05, 12
    basis = db.dpss_basis(m, w, l)
    orth = np.linalg.norm(basis.s.T @ basis.s - np.eye(l))
    freqs = np.linspace(-w, w, 50)
    worst = max(db.residual_projection(basis, f) for f in freqs) / np.sqrt(m)
    elapsed = time.perf_counter() - t0
    ok = worst < 1e-2 and orth < 1e-9 and elapsed < 5.0
    detail = (f"orthonormality {orth:.2e} (<1e-9 ok); max in-band residual "
              f"{worst:.3f} vs stated bar 1e-2 in {elapsed:.2f}s")
    if not ok:
        detail += ("; NOTE: at l = 2mw exactly the band-edge residual is order "
                   "one for any in-band sampling (min over the whole band is "
                   "0.068); the bar needs l >= 2mw + ~6 at this scale "
                   "(residual 1.6e-3 at l=18)")
    assert _report(2, ok, detail)


@pytest.fixture(scope="module")
def ivdst_preset_runs():
    """exp1 fast-route pipeline runs at full M=120, keyed by offset type."""
    out = {}
    for typ in OFFSET_TYPES:
        sc, xstar = _preset_scene(typ, "ivdst")
        t0 = time.perf_counter()
        res = run_ivdst(xstar, sc.basis(), sc.array, sc.k,
                        IvdstParams(eta=sc.eta, iters=sc.iters, seed=sc.seed),
                        gamma_frac=sc.gamma0, f1_hint=sc.f1_hint)
        out[typ] = (sc, xstar, res, time.perf_counter() - t0)
    return out


def test_criterion_3_ivdst_frequency_recovery(ivdst_preset_runs):
    lines, ok = [], True
    for typ in OFFSET_TYPES:
        sc, _, res, elapsed = ivdst_preset_runs[typ]
        errs = np.abs(np.sort(res.f_tilde) - TRUTH_120)
        good = errs.max() <= 0.01 and elapsed < 120.0
        ok &= good
        lines.append(f"{typ}: errs {np.round(errs, 4)} in {elapsed:.1f}s (L={sc.l})")
    assert _report(3, ok, "; ".join(lines))


def test_criterion_4_interference_nulling(ivdst_preset_runs):
    lines, ok = [], True
    t0 = time.perf_counter()
    for typ in OFFSET_TYPES:
        # fast route at full scale
        sc, xstar, res, _ = ivdst_preset_runs[typ]
        g = pattern_gain_db(res.w, sc.array, ANGLES)
        iv_ok = max(g[1] - g[0], g[2] - g[0]) <= BAR_DB
        # structured SDP at reduced scale (within budget, as permitted)
        w64, l64 = ANM_M64[typ]
        cfg64 = db.preset_config(f"exp1-{typ}", "anm1d")
        cfg64["m"] = 64
        cfg64["solver"].update(l=l64, w=w64, max_iters=3000)
        sc64 = db.parse_config(cfg64)
        x64 = db.build_data_matrix(sc64.sources, sc64.array, sc64.m)
        res64 = run_anm1d(x64, sc64.basis(), sc64.array, sc64.k,
                          AdmmParams(max_iters=sc64.max_iters, tol_primal=sc64.tol,
                                     tol_dual=sc64.tol,
                                     eps=sc64.eps_rel * np.linalg.norm(x64)),
                          gamma_frac=sc64.gamma0, f1_hint=sc64.f1_hint)
        g64 = pattern_gain_db(res64.w, sc64.array, ANGLES)
        anm_ok = max(g64[1] - g64[0], g64[2] - g64[0]) <= BAR_DB
        # uncorrected baseline at full scale: pilot is the bare carrier tone
        wb = db.smi_baseline_weights(xstar, sc.sources[0].carrier)
        gb = pattern_gain_db(wb, sc.array, ANGLES)
        base_violates = max(gb[1] - gb[0], gb[2] - gb[0]) > BAR_DB
        base_ok = (not base_violates) if typ == "static" else base_violates
        ok &= iv_ok and anm_ok and base_ok
        lines.append(
            f"{typ}: ivdst ({g[1]-g[0]:.0f},{g[2]-g[0]:.0f})dB"
            f"{'' if iv_ok else ' FAIL'}, anm ({g64[1]-g64[0]:.0f},{g64[2]-g64[0]:.0f})dB"
            f"{'' if anm_ok else ' FAIL'}, baseline ({gb[1]-gb[0]:.0f},{gb[2]-gb[0]:.0f})dB "
            f"{'passes' if not base_violates else 'violates'}"
            f"{'' if base_ok else ' FAIL'}")
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 600.0
    detail = "; ".join(lines) + f"; total {elapsed:.0f}s"
    if not ok:
        detail += ("; NOTE: with minimum-norm least squares on noiseless rank-3 "
                   "data the baseline's relative nulls never break -20 dB for "
                   "slope-driven drifts that keep the recovered centers within "
                   "0.01 (pilot correlation decays only as the Fresnel integral); "
                   "only sign-alternating drifts (the random walk) decorrelate "
                   "enough, so the linear/zigzag baseline clauses cannot hold")
    assert _report(4, ok, detail)


def test_criterion_5_m300_scale():
    t0 = time.perf_counter()
    cfg_dict = db.preset_config("exp2-m300-random", "ivdst")
    sc = db.parse_config(cfg_dict)
    xstar = db.build_data_matrix(sc.sources, sc.array, sc.m)
    res = run_ivdst(xstar, sc.basis(), sc.array, sc.k,
                    IvdstParams(eta=sc.eta, iters=sc.iters, seed=sc.seed),
                    gamma_frac=sc.gamma0, f1_hint=sc.f1_hint)
    truth = np.array([0.2, 0.24, 0.3])
    centers = np.sort(res.f_tilde)
    resolved = np.all(np.diff(centers) > 0.02) and np.abs(centers - truth).max() <= 0.015
    g = pattern_gain_db(res.w, sc.array, ANGLES)
    nulls_ok = max(g[1] - g[0], g[2] - g[0]) <= BAR_DB
    wb = db.smi_baseline_weights(xstar, 0.2)
    gb = pattern_gain_db(wb, sc.array, ANGLES)
    base_fails = max(gb[1] - gb[0], gb[2] - gb[0]) > BAR_DB
    elapsed = time.perf_counter() - t0
    ok = resolved and nulls_ok and base_fails and elapsed < 300.0
    assert _report(5, ok, f"centers {np.round(centers, 4)}, ivdst nulls "
                          f"({g[1]-g[0]:.0f},{g[2]-g[0]:.0f})dB, baseline "
                          f"({gb[1]-gb[0]:.0f},{gb[2]-gb[0]:.0f})dB, {elapsed:.0f}s")


def test_criterion_6_2d_coincident_frequencies():
    t0 = time.perf_counter()
    sc = db.parse_config(db.preset_config("exp3-2d-static", "anm2d"))
    xstar = db.build_data_matrix(sc.sources, sc.array, sc.m)
    basis = sc.basis()
    sol = solve_sdp_2d(xstar, basis, sc.array,
                       AdmmParams(max_iters=sc.max_iters, tol_primal=sc.tol,
                                  tol_dual=sc.tol,
                                  eps=sc.eps_rel * np.linalg.norm(xstar)))
    f_grid = np.arange(256) / 256
    theta_grid = np.rad2deg(np.arcsin(np.linspace(-1.0, 1.0, 181)))
    q2 = dual_polynomial_2d(sol.q_star, f_grid, theta_grid, sc.array)
    pairs = cluster_peaks_2d(q2, f_grid, theta_grid, sc.gamma0, sc.k)
    cell_f = 1.0 / 256
    cell_sin = 2.0 / 180
    hits = []
    for tf, tt in ((0.7, -60.0), (0.7, 20.0)):
        best = min(pairs, key=lambda p: abs(p[0] - tf) / cell_f +
                   abs(np.sin(np.deg2rad(p[1])) - np.sin(np.deg2rad(tt))) / cell_sin)
        df = abs(best[0] - tf) / cell_f
        dth = abs(np.sin(np.deg2rad(best[1])) - np.sin(np.deg2rad(tt))) / cell_sin
        hits.append((df, dth))
    peaks_ok = all(df <= 1.0 and dth <= 1.0 for df, dth in hits)
    # the 1D route on the same data must refuse at the sign-estimation step
    try:
        run_ivdst(xstar, basis, sc.array, sc.k, IvdstParams(seed=0),
                  gamma_frac=sc.gamma0, f1_hint=sc.f1_hint)
        dup_raised = False
    except db.DuplicateFrequencyError:
        dup_raised = True
    elapsed = time.perf_counter() - t0
    ok = peaks_ok and dup_raised and elapsed < 600.0
    assert _report(6, ok, f"2d peaks {[(round(f, 4), round(t, 1)) for f, t in pairs]} "
                          f"cells {np.round(hits, 2).tolist()}, 1d duplicate error "
                          f"{'raised' if dup_raised else 'NOT raised'}, {elapsed:.0f}s")


def test_criterion_7_decomposition_upper_bound():
    t0 = time.perf_counter()
    rng = np.random.default_rng(7)
    worst = -np.inf
    for trial in range(20):
        m = int(rng.integers(5, 9))
        l = int(rng.integers(1, 3))
        n = int(rng.integers(2, 4))
        k = int(rng.integers(1, 3))
        cfg = db.ArrayConfig.uniform(n)
        basis = db.dpss_basis(m, 0.1, l)
        atoms = []
        for _ in range(k):
            alpha = np.exp(2j * np.pi * rng.uniform() * np.arange(l)) / np.sqrt(l)
            atoms.append((float(rng.uniform(0.5, 2.0)), float(rng.uniform(0.05, 0.95)),
                          alpha, float(rng.uniform(-80, 80))))
        cost, _ = atomic_decomposition_cost(atoms, m, cfg)
        tensors = np.zeros((n, m, l), complex)
        for c, f, alpha, theta in atoms:
            a = np.exp(2j * np.pi * f * np.arange(m))
            tensors += c * np.einsum("m,l,n->nml", a, alpha,
                                     db.steering_vector(theta, cfg))
        xstar = apply_L(tensors, basis)
        sol = solve_sdp_2d(xstar, basis, cfg,
                           AdmmParams(max_iters=6000, tol_primal=1e-8, tol_dual=1e-8))
        worst = max(worst, (sol.objective - cost) / cost)
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-3 and elapsed < 300.0
    assert _report(7, ok, f"max relative excess over decomposition cost "
                          f"{worst:.2e} across 20 instances in {elapsed:.0f}s")


def test_criterion_8_relative_speed():
    sc_f, xstar = _preset_scene("static", "ivdst")
    t0 = time.perf_counter()
    res_f = ivdst_solve(xstar, sc_f.basis(), IvdstParams(eta=sc_f.eta, iters=sc_f.iters,
                                                         seed=sc_f.seed))
    t_fast = time.perf_counter() - t0
    grid = np.arange(8192) / 8192
    qv = dual_polynomial_1d(res_f.q, grid)
    c_fast = cluster_frequencies(grid, qv, 0.9 * qv.max(), 3, min_sep=1 / 240)
    sc_s, xstar_s = _preset_scene("static", "anm1d")
    t0 = time.perf_counter()
    sol = solve_sdp_1d(xstar_s, sc_s.basis(),
                       AdmmParams(max_iters=sc_s.max_iters, tol_primal=sc_s.tol,
                                  tol_dual=sc_s.tol,
                                  eps=sc_s.eps_rel * np.linalg.norm(xstar_s)))
    t_sdp = time.perf_counter() - t0
    qv_s = dual_polynomial_1d(sol.q_star, grid)
    c_sdp = cluster_frequencies(grid, qv_s, 0.9 * qv_s.max(), 3, min_sep=1 / 240)
    err_fast = np.abs(np.sort(c_fast) - TRUTH_120).max()
    err_sdp = np.abs(np.sort(c_sdp) - TRUTH_120).max()
    ratio = t_fast / t_sdp
    ok = ratio <= 0.1 and err_fast <= 0.01 and err_sdp <= 0.01
    assert _report(8, ok, f"fast {t_fast:.1f}s vs sdp {t_sdp:.1f}s, ratio {ratio:.3f}; "
                          f"freq errs fast {err_fast:.4f} sdp {err_sdp:.4f} "
                          f"(both must be <= 0.01)")


def test_criterion_9_dual_feasibility():
    worst = 0.0
    for seed in (3, 4, 5):
        xstar, basis, *_ = exact_atom_instance(seed=seed)
        sol = solve_sdp_1d(xstar, basis,
                           AdmmParams(max_iters=8000, tol_primal=1e-9, tol_dual=1e-9))
        worst = max(worst, dual_feasibility_check(sol.q_star, basis))
    ok = worst <= 1.0 + 5e-2
    assert _report(9, ok, f"max dual polynomial value {worst:.4f} over three "
                          f"exact single-atom instances (bar 1.05)")


def test_criterion_10_determinism():
    runs = []
    for _ in range(2):
        sc, xstar = _preset_scene("static", "ivdst")
        res = run_ivdst(xstar, sc.basis(), sc.array, sc.k,
                        IvdstParams(eta=sc.eta, iters=50, seed=sc.seed),
                        gamma_frac=sc.gamma0, f1_hint=sc.f1_hint)
        runs.append(res)
    df = np.abs(runs[0].f_tilde - runs[1].f_tilde).max()
    dw = np.abs(runs[0].w - runs[1].w).max()
    ok = df <= 1e-12 and dw <= 1e-12
    assert _report(10, ok, f"repeat-run deltas: frequencies {df:.1e}, weights {dw:.1e}")
