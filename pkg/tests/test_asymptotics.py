from __future__ import annotations

import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hardybound.asymptotics import (
    AnnulusMap,
    BracketError,
    m_equation,
    m_equation_scan,
    moebius_contraction,
    moebius_contraction_detail,
    powerlaw_fit,
    predicted_exponent,
    psi_round_trip,
    rate_report,
    riemann_invariant,
    theta_exponent,
    uguess_eval,
    uguess_norm_gamma,
    widom_rate,
)
from hardybound.geometry import CurveSpec

mpmath.mp.dps = 50


def riemann_oracle(h):
    """m-equation K(m)E(φ|m) − E(m)F(φ|m) = π/(2h), sin²φ = (K−E)/(mK), solved at 50 digits."""
    def lhs(m):
        K, E = mpmath.ellipk(m), mpmath.ellipe(m)
        phi = mpmath.asin(mpmath.sqrt((K - E) / (m * K)))
        return K * mpmath.ellipe(phi, m) - E * mpmath.ellipf(phi, m) - mpmath.pi / (2 * h)
    m = mpmath.findroot(lhs, riemann_invariant(h).m_param)
    # mpmath's incomplete integrals carry a ~1e-130 imaginary residue
    assert abs(mpmath.im(m)) < 1e-40
    m = mpmath.re(m)
    tau = mpmath.ellipk(1 - m) / mpmath.ellipk(m)
    return m, 2 * mpmath.pi * tau


@pytest.mark.parametrize("h", [0.5, 1.0, 2.0])
def test_riemann_invariant_matches_oracle(h):
    ri = riemann_invariant(h)
    m, ln_rho = riemann_oracle(h)
    assert abs(ri.m_param - float(m)) < 1e-12
    assert abs(ri.ln_rho - float(ln_rho)) < 1e-10 * float(ln_rho)
    assert ri.rho_Gamma == pytest.approx(math.exp(ri.ln_rho))


def test_riemann_invariant_frozen_values():
    # frozen from the 50-digit oracle above
    assert riemann_invariant(1.0).ln_rho == pytest.approx(2.969679, abs=2e-6)
    assert riemann_invariant(0.5).ln_rho == pytest.approx(1.925309, abs=2e-6)


def test_riemann_invariant_small_h_trend():
    vals = [riemann_invariant(h).ln_rho for h in (0.5, 0.1, 0.02)]
    assert vals[0] > vals[1] > vals[2] > 0 and vals[2] < 0.2


def test_m_equation_monotone_and_errors():
    m, lhs = m_equation_scan(1.0)
    assert np.all(np.diff(lhs) > 0) or np.all(np.diff(lhs) < 0)
    assert m_equation(1.0 - riemann_invariant(1.0).m_param, 1.0) == pytest.approx(0, abs=1e-9)
    with pytest.raises(ValueError):
        riemann_invariant(0.0)
    with pytest.raises(BracketError):
        riemann_invariant(1e-320)


@pytest.mark.parametrize("h", [0.5, 1.0, 2.0])
def test_widom_rate_modulus_convention(h):
    x = mpmath.pi / (2 * h)
    want = mpmath.pi * mpmath.ellipk(mpmath.sech(x) ** 2) / mpmath.ellipk(mpmath.tanh(x) ** 2)
    assert widom_rate(h) == pytest.approx(float(want), rel=1e-13)


def test_widom_below_riemann_rate():
    for h in (0.5, 1.0, 2.0):
        W, ln_rho = widom_rate(h), riemann_invariant(h).ln_rho
        assert W < ln_rho < 2 * W


def test_moebius_contraction_brute_force():
    curve = CurveSpec.segment(-1, 1, 1.0)
    rho1, c = moebius_contraction_detail(curve)
    x = np.linspace(-1, 1, 2001) + 1j
    cs = np.linspace(0.5, 3, 5001)
    brute = min(np.max(np.abs((x - 1j * cc) / (x + 1j * cc))) ** 2 for cc in cs)
    assert rho1 <= brute + 1e-12 and rho1 == pytest.approx(brute, abs=1e-6)
    # for h = 1 the optimum is c = √2, ρ₁ = (√2 − 1)²
    assert c == pytest.approx(math.sqrt(2), rel=1e-6)
    assert rho1 == pytest.approx((math.sqrt(2) - 1) ** 2, rel=1e-9)


@given(st.floats(min_value=0.05, max_value=5))
@settings(max_examples=20, deadline=None)
def test_moebius_contraction_below_one(h):
    assert 0 < moebius_contraction(CurveSpec.segment(-1, 1, h)) < 1


@pytest.fixture(scope="module")
def amap():
    return AnnulusMap.for_h(0.5)


def test_theta_frozen_values(amap):
    # frozen from the double-double refined map; cross-checked by criterion 9
    for x, want in ((1.5, 0.296872), (2.0, 0.153890), (3.0, 0.062917)):
        assert theta_exponent(complex(x, 0.5), 0.5, amap) == pytest.approx(want, abs=2e-6)


def test_theta_root_against_theta_function_oracle(amap):
    # independent 50-digit evaluation of Ψ⁻¹(w) = −h·θ₁'(πw)/θ₁(πw), q = e^{−πτ}
    q = mpmath.exp(-mpmath.pi * amap.tau)
    z = 2 + 0.5j
    th = theta_exponent(z, 0.5, amap)
    f = lambda w: -0.5 * mpmath.jtheta(1, mpmath.pi * w, q, 1) / mpmath.jtheta(1, mpmath.pi * w, q) - z.conjugate()
    w0, _ = amap.solve_w(z.conjugate())
    w = mpmath.findroot(f, mpmath.mpc(w0))
    assert abs(th - float(-2 * w.imag / amap.tau)) < 1e-13


def test_theta_boundary_values_and_harmonicity(amap):
    assert theta_exponent(0.3 + 0.500001j, 0.5, amap) == pytest.approx(1, abs=1e-5)
    assert theta_exponent(0.3 + 0.499999j, 0.5, amap) == pytest.approx(1, abs=1e-5)
    assert theta_exponent(0.3 + 1e-6j, 0.5, amap) == pytest.approx(0, abs=1e-5)
    z, d = 2 + 0.5j, 1e-3
    t = lambda v: theta_exponent(v, 0.5, amap)  # noqa: E731
    lap = (t(z + d) + t(z - d) + t(z + 1j * d) + t(z - 1j * d) - 4 * t(z)) / d**2
    assert abs(lap) < 1e-5


def test_theta_decreasing_along_line(amap):
    vals = [theta_exponent(complex(x, 0.5), 0.5, amap) for x in (1.2, 1.5, 2, 3, 5)]
    assert all(0 < v < 1 for v in vals) and np.all(np.diff(vals) < 0)


def test_psi_round_trip(amap):
    for z in (1.5 + 0.5j, 0.2 + 0.1j, -3 + 2j, 0.7 + 0.6j):
        assert psi_round_trip(z, 0.5, amap) < 1e-25


def test_psi_maps_into_annulus(amap):
    for z in (1.5 + 0.5j, 0.2 + 0.1j, -3 + 2j):
        r = abs(amap.psi(z.conjugate()))
        assert 1 < r < math.sqrt(amap.rho)


def test_theta_rejects_bad_points(amap):
    with pytest.raises(ValueError):
        theta_exponent(0.3 + 0.5j, 0.5, amap)
    with pytest.raises(ValueError):
        theta_exponent(0.3 - 0.5j, 0.5, amap)


def test_uguess_single_term_and_convergence(amap):
    z, zeta, eps = 1.5 + 0.5j, 2 + 1j, 1e-4
    one = uguess_eval(zeta, z, eps, 0.5, terms=1, amap=amap)
    pz, pzeta = amap.psi(z), amap.psi(zeta)
    a = np.conj(pz) * pzeta
    th = theta_exponent(z, 0.5, amap)
    want = eps ** (2 - th) / (zeta + 0.5j) * a / (eps**2 + 1 / amap.rho)
    assert abs(one.value - want) < 1e-14 * abs(want)
    full = uguess_eval(zeta, z, eps, 0.5, terms=200, amap=amap)
    assert full.tail_bound < 1e-12 * abs(full.value)
    with pytest.raises(ValueError):
        uguess_eval(zeta, z, eps, 0.5, terms=0, amap=amap)


def test_uguess_scaling_matches_theta(amap):
    # ‖f‖_{L²(Γ)} ∝ ε and |f(z)| ∝ ε^θ, so |f(z)|·ε/‖f‖_Γ has log-slope θ
    z = 1.5 + 0.5j
    th = theta_exponent(z, 0.5, amap)
    vals = []
    for eps in (1e-4, 1e-8):
        fz = abs(uguess_eval(z, z, eps, 0.5, amap=amap).value)
        ng = uguess_norm_gamma(z, eps, 0.5, n_nodes=24, amap=amap)
        assert 0.1 < ng / eps < 10
        vals.append(fz * eps / ng)
    slope = math.log(vals[0] / vals[1]) / math.log(1e4)
    assert abs(slope - th) < 0.1 * th


def test_powerlaw_fit_recovers_exponent():
    eps = 10.0 ** -np.arange(3, 12, 0.25)
    fit = powerlaw_fit([(e, 3 * e**0.3) for e in eps])
    assert fit.gamma_hat == pytest.approx(0.3, abs=1e-12) and fit.r2 == pytest.approx(1)
    assert fit.monotone and not fit.flags


def test_powerlaw_fit_validation():
    with pytest.raises(ValueError):
        powerlaw_fit([(1e-3, 1), (1e-4, 1)])
    with pytest.raises(ValueError):
        powerlaw_fit([(10.0 ** -k, 1.0) for k in np.linspace(3, 4, 8)])
    fit = powerlaw_fit([(10.0 ** -k, (-1) ** int(k) + 3.0) for k in range(3, 12)])
    assert "M not increasing in eps" in fit.flags


def test_predicted_exponent_and_report():
    assert predicted_exponent(2.0, 3.0) == 0.5
    rep = rate_report(1.0)
    assert rep.ln_rho == pytest.approx(riemann_invariant(1.0).ln_rho)
    assert rep.widom_W == pytest.approx(widom_rate(1.0))
