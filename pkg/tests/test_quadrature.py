from __future__ import annotations

import math

import mpmath
import numpy as np
import pytest

from hardybound.quadrature import gauss_legendre, map_rule, tanh_rule

mpmath.mp.dps = 50


def mp(x, i):
    return mpmath.mpf(float(x.hi[i])) + mpmath.mpf(float(x.lo[i]))


@pytest.mark.parametrize("n", [7, 20])
def test_gauss_nodes_and_weights_match_mpmath(n):
    rule = gauss_legendre(n, "dd")
    # oracle: roots of P_n and w = 2/((1−x²)P_n'(x)²) at 50 digits
    for i in range(n):
        x0 = mp(rule.nodes, i)
        root = mpmath.findroot(lambda t: mpmath.legendre(n, t), x0)
        dp = mpmath.diff(lambda t: mpmath.legendre(n, t), root)
        w = 2 / ((1 - root**2) * dp**2)
        assert abs(x0 - root) < mpmath.mpf(10) ** -30
        assert abs(mp(rule.weights, i) - w) < mpmath.mpf(10) ** -29


@pytest.mark.parametrize("n", [1, 2, 5, 80])
def test_gauss_exact_for_polynomials(n):
    rule = gauss_legendre(n, "dd")
    for k in range(0, 2 * n, max(1, n // 3)):
        got = float(rule.integrate(rule.nodes**k))
        want = 0.0 if k % 2 else 2.0 / (k + 1)
        assert abs(got - want) < 1e-28 + 1e-30 * n


def test_gauss_symmetry_and_order():
    rule = gauss_legendre(31, "f64")
    x, w = rule.nodes_f64, rule.weights_f64
    assert np.all(np.diff(x) > 0)
    assert np.allclose(x, -x[::-1], atol=0) and np.allclose(w, w[::-1], rtol=0, atol=0)
    assert x[15] == 0.0


def test_gauss_f64_matches_numpy():
    x, w = np.polynomial.legendre.leggauss(40)
    rule = gauss_legendre(40, "f64")
    assert np.allclose(rule.nodes_f64, x, atol=1e-15) and np.allclose(rule.weights_f64, w, atol=1e-15)


def test_gauss_order_validation():
    with pytest.raises(ValueError):
        gauss_legendre(0)
    with pytest.raises(ValueError):
        gauss_legendre(5000)


def test_map_rule():
    rule = gauss_legendre(10, "f64")
    x, w = map_rule(rule, 1.0, 3.0)
    assert abs(np.sum(w * x**3) - (81 - 1) / 4) < 1e-13


@pytest.mark.parametrize("n", [200, 301])
def test_tanh_rule_endpoint_singularity(n):
    rule = tanh_rule(n, 0.16)
    x, w = rule.nodes_f64, rule.weights_f64
    # ∫ log(1−x) dx on (−1, 1) = 2 ln 2 − 2
    # ln(1 − tanh t) = ln 2 − ln(1 + e^{2t}), free of cancellation near x = 1
    got = np.sum(w * (math.log(2) - np.logaddexp(0.0, 2 * rule.t)))
    assert np.all(x <= 1)
    assert abs(got - (2 * math.log(2) - 2)) < 1e-8
    assert np.allclose(rule.t, -rule.t[::-1])
    if n % 2 == 0:
        assert np.min(np.abs(rule.t)) == pytest.approx(0.08)


def test_tanh_rule_rejects_dd():
    with pytest.raises(ValueError):
        tanh_rule(11, mode="dd")
