"""Acceptance criteria 1-15, one test each; every test records a PASS/FAIL line."""

from __future__ import annotations

import math
import time

import numpy as np
import pytest

from conftest import record_criterion
from hardybound import asymptotics, boundary, experiments, spectral
from hardybound.continuation import eps_grid, solve_direct, solve_spectral
from hardybound.geometry import CurveSpec, discretize, halfstrip_exponent
from hardybound.operators import (
    PLAIN,
    assemble_K,
    displacement_residual,
    displacement_rhs_norm,
    rhs_vector,
)
from hardybound.quadrature import gauss_legendre, tanh_rule


def check(k: int, ok: bool, detail: str) -> None:
    record_criterion(k, bool(ok), detail)
    assert ok, detail


def test_criterion_01_trace_identity():
    worst_err, worst_time = 0.0, 0.0
    for h in (0.5, 1.0, 2.0):
        t0 = time.perf_counter()
        su = experiments.setup(CurveSpec.segment(-1, 1, h), 80, "dd")
        total = float(su.S.lambdas.sum())
        worst_time = max(worst_time, time.perf_counter() - t0)
        exact = 1.0 / (2 * math.pi * h)
        worst_err = max(worst_err, abs(total - exact) / exact)
    check(1, worst_err < 1e-10 and worst_time < 10.0,
          f"max rel err {worst_err:.2e} (<1e-10), max runtime {worst_time:.2f}s (<10s)")


def test_criterion_02_displacement_identity():
    curve = CurveSpec.segment(-1, 1, 1.0)
    res = {}
    for mode in ("dd", "f64"):
        A = assemble_K(discretize(curve, gauss_legendre(80, mode)), PLAIN)
        res[mode] = displacement_residual(A) / displacement_rhs_norm(A)
    check(2, res["dd"] < 1e-28 and res["f64"] < 1e-13,
          f"relative residual dd {res['dd']:.2e} (<1e-28), f64 {res['f64']:.2e} (<1e-13)")


def test_criterion_03_spectrum_sanity(setup_h1_n120):
    su, _ = setup_h1_n120
    S = su.S
    lam = S.lambdas_f64[: S.rank_cutoff]
    rho1 = asymptotics.moebius_contraction(su.curve)
    ratios = lam[1:] / lam[:-1]
    ok = bool(np.all(lam > 0) and np.all(np.diff(lam) < 0) and np.all(ratios <= rho1))
    check(3, ok and S.rank_cutoff > 10,
          f"{S.rank_cutoff} resolvable eigenvalues, positive and strictly decreasing, "
          f"max ratio {ratios.max():.4f} <= rho1 {rho1:.4f}")


def test_criterion_04_sum_rule(setup_h1_n80):
    z = 1.5 + 1.5j
    S = setup_h1_n80.project(z)
    partial = spectral.sum_rule_partial_sums(S)
    target = math.pi / z.imag
    rel_final = abs(target - partial[-1]) / target
    bound = spectral.sum_rule_tail_bound(S) / target
    check(4, rel_final < 1e-4 and rel_final <= bound,
          f"rel gap {rel_final:.2e} (<1e-4), covered by truncation bound {bound:.2e}")


@pytest.fixture(scope="module")
def solves_h1(setup_h1_n80):
    """Spectral and direct solves at z = 2+i over ε ∈ [1e-12, 1e-2] (dd)."""
    z = 2 + 1j
    S = setup_h1_n80.project(z)
    p = rhs_vector(setup_h1_n80.disc, z)
    grid = eps_grid(1e-12, 1e-2, 4)
    spec = [solve_spectral(S, e) for e in grid]
    direct = [solve_direct(setup_h1_n80.A, p, e) for e in grid]
    return grid, spec, direct


def test_criterion_05_pythagorean_identity(solves_h1):
    _, spec, direct = solves_h1
    worst = max(s.pythagorean_residual for s in spec)
    check(5, worst < 1e-10, f"max relative residual {worst:.2e} over {len(spec)} solves (<1e-10)")


def test_criterion_06_solver_cross_validation(solves_h1):
    _, spec, direct = solves_h1
    du = max(abs(complex(s.u_at_z) - complex(d.u_at_z)) / abs(complex(d.u_at_z))
             for s, d in zip(spec, direct))
    dn = max(abs(float(s.norm_L2_Gamma) - float(d.norm_L2_Gamma)) / float(d.norm_L2_Gamma)
             for s, d in zip(spec, direct))
    check(6, du < 1e-10 and dn < 1e-10,
          f"max rel diff u(z) {du:.2e}, ||u||_L2 {dn:.2e} (<1e-10)")


def test_criterion_07_decay_rate_sharpness(setup_h1_n120):
    t0 = time.perf_counter()
    su, t_setup = setup_h1_n120
    fit = spectral.decay_fit(su.S)
    ln_rho = asymptotics.riemann_invariant(1.0).ln_rho
    runtime = t_setup + time.perf_counter() - t0
    rel = abs(fit.alpha_hat - ln_rho) / ln_rho
    check(7, rel < 0.05 and runtime < 60.0,
          f"alpha_hat {fit.alpha_hat:.5f} vs ln rho {ln_rho:.5f} (rel {rel:.2e} < 5%), runtime {runtime:.1f}s")


def test_criterion_08_widom_sandwich(setup_h1_n120):
    su, _ = setup_h1_n120
    alpha = spectral.decay_fit(su.S).alpha_hat
    W = asymptotics.widom_rate(1.0)
    margin = min(alpha - W, 2 * W - alpha) / W  # band width is W
    check(8, W <= alpha <= 2 * W and margin >= 0.05,
          f"W {W:.4f} <= alpha_hat {alpha:.4f} <= 2W {2 * W:.4f}, inner margin {margin:.2%} of band (>=5%)")


def test_criterion_09_powerlaw_experiment(powerlaw_h05):
    _, runs, runtime = powerlaw_h05
    g = [r.fit.gamma_hat for r in runs]
    r2 = [r.fit.r2 for r in runs]
    th = [r.theta for r in runs]
    ok = (min(r2) >= 0.99 and g[0] > g[1] > g[2]
          and all(gi <= 1.05 * ti for gi, ti in zip(g, th)) and runtime < 600)
    detail = ", ".join(f"z={r.z.real:g}+0.5i: gamma {gi:.4f} theta {ti:.4f} r2 {ri:.6f}"
                       for r, gi, ti, ri in zip(runs, g, th, r2))
    check(9, ok, f"{detail}; runtime {runtime:.1f}s")


def test_criterion_10_exponent_consistency(powerlaw_h05):
    _, runs, _ = powerlaw_h05
    parts, ok = [], True
    for r in runs:
        a, b = r.decay.alpha_hat, r.decay.beta_hat
        g = r.fit.gamma_hat
        rel = abs(g - r.predicted) / g
        ok &= a < b < 2 * a and rel <= 0.15
        parts.append(f"alpha {a:.4f} beta {b:.4f} pred {r.predicted:.4f} gamma {g:.4f} (rel {rel:.1e})")
    check(10, ok, "; ".join(parts))


def test_criterion_11_boundary_closed_forms():
    eps = 1e-2
    g = boundary.gamma_exponent(1j)
    rho = boundary.boundary_bound(1j, eps).rho
    rho_err = abs(rho - math.sqrt(18 / math.pi)) / math.sqrt(18 / math.pi)
    rule = gauss_legendre(200, "f64")
    x, w = rule.nodes_f64, rule.weights_f64
    norm_err = 0.0
    modulus_err = 0.0
    for z in (1j, 0.5 + 0.5j, 2 + 1j):
        for e in (1e-2, 1e-6):
            W = boundary.maximizer_W(x, z, e)
            norm_err = max(norm_err, abs(math.sqrt(np.sum(w * np.abs(W) ** 2)) - e) / e)
            B = boundary.boundary_bound(z, e).B
            modulus_err = max(modulus_err, abs(abs(complex(boundary.maximizer_W(z, z, e))) - B) / B)
    resid = boundary.boundary_residual(1j, eps, boundary.default_boundary_rule(200))
    ok = g == 0.5 and rho_err < 1e-14 and norm_err < 1e-10 and modulus_err < 1e-12 and resid < 1e-6
    check(11, ok, f"gamma(i)={g}, rho err {rho_err:.1e}, ||W|| err {norm_err:.1e}, "
                  f"|W(z)|-B err {modulus_err:.1e}, PV residual {resid:.2e} (N=200)")


def test_criterion_12_koppelman_pincus():
    rule = tanh_rule(4001, 0.01)
    x = rule.nodes_f64
    worst = [0.0, 0.0, 0.0]
    for c, s in ((0.0, 1.0), (0.3, 0.8), (-0.45, 0.5)):
        f = boundary.bump((x - c) / s) * np.exp(2j * x)
        nf = boundary.weighted_norm(f, rule)
        g = boundary.kp_transform(f, rule)
        back = boundary.kp_inverse(g, rule.t)
        gK = boundary.kp_transform(boundary.truncated_hilbert(f, rule), rule, s=g.s, tol=1.0)
        zg = np.tanh(g.s) * g.density
        errs = (abs(g.norm() - nf) / nf,
                boundary.weighted_norm(back - f, rule) / nf,
                math.sqrt(np.sum(np.abs(gK.density - zg) ** 2) / np.sum(np.abs(zg) ** 2)))
        worst = [max(a, b) for a, b in zip(worst, errs)]
    check(12, worst[0] < 1e-6 and worst[1] < 1e-6 and worst[2] < 1e-5,
          f"isometry {worst[0]:.1e}, round trip {worst[1]:.1e} (<1e-6), multiplier {worst[2]:.1e} (<1e-5)")


def test_criterion_13_h_limit():
    row = boundary.solve_h_galerkin(1e-4, 1j, 1e-3)
    check(13, row.gap < 0.05 and not row.flags,
          f"h=1e-4: interior bound {row.bound_h:.6f} vs boundary {row.bound_boundary:.6f} (rel {row.gap:.2e} < 5%)")


def test_criterion_14_transplant():
    g1, g2 = float(halfstrip_exponent(1.0)), float(halfstrip_exponent(2.0))
    r1, r2 = abs(g1 - 0.25) / 0.25, abs(g2 - 0.05) / 0.05
    check(14, r1 < 0.05 and r2 < 0.10,
          f"exponent(1) {g1:.5f} (rel {r1:.2%} < 5%), exponent(2) {g2:.5f} (rel {r2:.2%} < 10%)")


def test_criterion_15_a_priori_trends(solves_h1):
    grid, spec, _ = solves_h1  # ε decreasing along the grid
    n = np.array([float(s.norm_L2_Gamma) for s in spec])
    en = grid * n
    ok = bool(np.all(np.diff(n) > 0) and np.all(np.diff(en) < 0))
    check(15, ok, f"||u|| {n[0]:.3e} -> {n[-1]:.3e} increasing, eps*||u|| {en[0]:.3e} -> {en[-1]:.3e} "
                  f"decreasing on all {len(grid) - 1} pairs")
