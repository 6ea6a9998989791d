"""Elliptic integrals and the Weierstrass zeta function.

Complete and incomplete integrals use the PARAMETER convention: the second
argument m is the squared modulus, K(m) = ∫₀^{π/2} (1 − m sin²θ)^{-1/2} dθ.
Functions with a ``_modulus`` suffix take the modulus k (so m = k²).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .xprec import (
    DDComplex,
    DDReal,
    as_ddcomplex,
    dd_cexp,
    dd_pi,
    get_mode,
)


@dataclass(frozen=True)
class EllipticArg:
    """An elliptic parameter m ∈ [0, 1) (squared modulus)."""

    value: float

    def __post_init__(self):
        if not 0.0 <= float(self.value) < 1.0:
            raise ValueError(f"elliptic parameter must lie in [0, 1), got {self.value!r}")

    @classmethod
    def from_modulus(cls, k: float) -> "EllipticArg":
        return cls(float(k) ** 2)

    @property
    def complement(self) -> float:
        return 1.0 - float(self.value)


def _check_m(m) -> None:
    v = float(m.hi) if isinstance(m, DDReal) else float(m)
    if not 0.0 <= v < 1.0:
        raise ValueError(f"elliptic parameter must lie in [0, 1), got {v!r}")


def _agm_terms(a, b, mode):
    """AGM(a, b) and the list of c_n = (a_{n-1} − b_{n-1})/2, n ≥ 1."""
    m = get_mode(mode)
    tol = 4 * m.unit_roundoff
    cs = []
    for it in range(40):
        c = (a - b) * 0.5
        if abs(float(c)) <= tol * abs(float(a)):
            return a, cs, it
        a, b = (a + b) * 0.5, m.sqrt(a * b)
        cs.append(c)
    raise ArithmeticError("AGM did not converge")


def agm_iterations(m_param: float, mode: str = "f64") -> int:
    """Number of AGM steps used for K(m) (quadratic convergence diagnostic)."""
    md = get_mode(mode)
    mm = md.real(m_param)
    _, _, it = _agm_terms(md.real(1.0), md.sqrt(1.0 - mm), md)
    return it


def ellip_K(m_param, mode: str = "f64"):
    """Complete elliptic integral of the first kind K(m) = π/(2·AGM(1, √(1−m)))."""
    md = get_mode(mode)
    _check_m(m_param)
    mm = md.real(m_param)
    a, _, _ = _agm_terms(md.real(1.0), md.sqrt(1.0 - mm), md)
    return md.pi / (a * 2.0)


def ellip_K_complement(m_param, mode: str = "f64"):
    """K(1 − m) = π/(2·AGM(1, √m)), accurate also when 1 − m is close to 1."""
    md = get_mode(mode)
    mm = md.real(m_param)
    if not float(mm) > 0:
        raise ValueError("K(1-m) diverges at m = 0")
    a, _, _ = _agm_terms(md.real(1.0), md.sqrt(mm), md)
    return md.pi / (a * 2.0)


def ellip_E(m_param, mode: str = "f64"):
    """Complete elliptic integral of the second kind, E = K·(1 − Σ 2^{n−1} c_n²)."""
    md = get_mode(mode)
    _check_m(m_param)
    mm = md.real(m_param)
    a, cs, _ = _agm_terms(md.real(1.0), md.sqrt(1.0 - mm), md)
    s = mm * 0.5  # n = 0 term: c₀² = m
    for n, c in enumerate(cs, start=1):
        s = s + c * c * float(2 ** (n - 1))
    return md.pi / (a * 2.0) * (1.0 - s)


def ellip_K_modulus(k, mode: str = "f64"):
    """K in the modulus convention: K(k) with k² the parameter."""
    md = get_mode(mode)
    kk = md.real(k)
    return ellip_K(kk * kk, mode)


# --------------------------------------------------------------------------
# incomplete integrals via Carlson's symmetric forms
# --------------------------------------------------------------------------


def carlson_rf(x, y, z, mode: str = "f64"):
    """R_F(x,y,z) by duplication; at most one argument may vanish."""
    md = get_mode(mode)
    x, y, z = md.real(x), md.real(y), md.real(z)
    A = (x + y + z) / 3.0
    Q = (3.0 * md.unit_roundoff) ** (-1.0 / 6.0) * max(abs(float(A - v)) for v in (x, y, z))
    f = 1.0
    while f * Q >= abs(float(A)):
        sx, sy, sz = md.sqrt(x), md.sqrt(y), md.sqrt(z)
        lam = sx * sy + sx * sz + sy * sz
        x, y, z, A = (x + lam) * 0.25, (y + lam) * 0.25, (z + lam) * 0.25, (A + lam) * 0.25
        f *= 0.25
    X = (A - x) / A
    Y = (A - y) / A
    Z = (X + Y) * -1.0
    E2 = X * Y - Z * Z
    E3 = X * Y * Z
    series = 1.0 - E2 / 10.0 + E3 / 14.0 + E2 * E2 / 24.0 - E2 * E3 * (3.0 / 44.0)
    return series / md.sqrt(A)


def carlson_rd(x, y, z, mode: str = "f64"):
    """R_D(x,y,z) by duplication; z > 0."""
    md = get_mode(mode)
    x, y, z = md.real(x), md.real(y), md.real(z)
    A = (x + y + z * 3.0) / 5.0
    Q = (0.25 * md.unit_roundoff) ** (-1.0 / 6.0) * max(abs(float(A - v)) for v in (x, y, z))
    f = 1.0
    acc = md.real(0.0)
    while f * Q >= abs(float(A)):
        sx, sy, sz = md.sqrt(x), md.sqrt(y), md.sqrt(z)
        lam = sx * sy + sx * sz + sy * sz
        acc = acc + f / (sz * (z + lam))
        x, y, z, A = (x + lam) * 0.25, (y + lam) * 0.25, (z + lam) * 0.25, (A + lam) * 0.25
        f *= 0.25
    X = (A - x) / A
    Y = (A - y) / A
    Z = (X + Y) * (-1.0 / 3.0)
    XY = X * Y
    Z2 = Z * Z
    E2 = XY - Z2 * 6.0
    E3 = (XY * 3.0 - Z2 * 8.0) * Z
    E4 = (XY - Z2) * Z2 * 3.0
    E5 = XY * Z2 * Z
    series = (1.0 - E2 * (3.0 / 14.0) + E3 / 6.0 + E2 * E2 * (9.0 / 88.0) - E4 * (3.0 / 22.0)
              - E2 * E3 * (9.0 / 52.0) + E5 * (3.0 / 26.0))
    return series * f / (A * md.sqrt(A)) + acc * 3.0


def _sin_phi(phi: float) -> float:
    if not 0.0 <= phi <= math.pi / 2:
        raise ValueError("amplitude phi must lie in [0, π/2]")
    return math.sin(phi)


def ellip_F_sin(s, m_param, mode: str = "f64"):
    """F(φ|m) given s = sin φ ∈ [0, 1]."""
    md = get_mode(mode)
    _check_m(m_param)
    s = md.real(s)
    if not 0.0 <= float(s) <= 1.0:
        raise ValueError("sin(phi) must lie in [0, 1]")
    if float(s) == 0.0:
        return md.real(0.0)
    s2 = s * s
    return s * carlson_rf(1.0 - s2, 1.0 - s2 * m_param, 1.0, md)


def ellip_Einc_sin(s, m_param, mode: str = "f64"):
    """E(φ|m) given s = sin φ ∈ [0, 1]."""
    md = get_mode(mode)
    _check_m(m_param)
    s = md.real(s)
    if not 0.0 <= float(s) <= 1.0:
        raise ValueError("sin(phi) must lie in [0, 1]")
    if float(s) == 0.0:
        return md.real(0.0)
    s2 = s * s
    c2 = 1.0 - s2
    d2 = 1.0 - s2 * m_param
    mm = md.real(m_param)
    return s * carlson_rf(c2, d2, 1.0, md) - mm * s2 * s * carlson_rd(c2, d2, 1.0, md) / 3.0


def ellip_F(phi: float, m_param, mode: str = "f64"):
    """Incomplete integral of the first kind F(φ|m), φ ∈ [0, π/2]."""
    if float(phi) == math.pi / 2:
        return ellip_K(m_param, mode)
    return ellip_F_sin(_sin_phi(float(phi)), m_param, mode)


def ellip_Einc(phi: float, m_param, mode: str = "f64"):
    """Incomplete integral of the second kind E(φ|m), φ ∈ [0, π/2]."""
    if float(phi) == math.pi / 2:
        return ellip_E(m_param, mode)
    return ellip_Einc_sin(_sin_phi(float(phi)), m_param, mode)


# --------------------------------------------------------------------------
# Weierstrass zeta with periods 1 and iτ
# --------------------------------------------------------------------------


def nome(tau: float) -> float:
    """q = e^{−πτ} for the lattice ℤ + iτℤ."""
    if not tau > 0:
        raise ValueError("tau must be positive")
    return math.exp(-math.pi * tau)


def _series_len(q: float, mode) -> int:
    # terms decay like q^n at the edge |Im w| ≤ τ/2 of the fundamental strip
    eps = get_mode(mode).unit_roundoff
    return max(4, int(math.ceil(math.log(eps) / math.log(q))) + 4)


def eta1(tau: float, mode: str = "f64"):
    """η₁ = ζ(1/2) = (π²/6)·(1 − 24 Σ n q^{2n}/(1 − q^{2n}))."""
    md = get_mode(mode)
    q = nome(tau)
    nmax = _series_len(q, md)
    if md.is_dd():
        qd = _dd_nome(tau)
        q2 = qd * qd
        qn = q2
        s = DDReal(0.0)
        for n in range(1, nmax + 1):
            s = s + qn * float(n) / (1.0 - qn)
            qn = qn * q2
        pi = dd_pi()
        return pi * pi / 6.0 * (1.0 - s * 24.0)
    n = np.arange(1, nmax + 1)
    q2n = q ** (2 * n)
    return np.pi**2 / 6.0 * (1.0 - 24.0 * np.sum(n * q2n / (1.0 - q2n)))


def _dd_nome(tau):
    from .xprec import dd_exp

    return dd_exp(dd_pi() * (-float(tau)))


class LatticePoleError(ValueError):
    pass


def _reduce(w, tau: float):
    """Nearest lattice translate j + k·iτ and the distance to it."""
    wc = complex(w)
    k = round(wc.imag / tau)
    j = round(wc.real - 0.0)
    return j, k, abs(wc - (j + 1j * k * tau))


def weierstrass_zeta(zv, tau: float, mode: str = "f64"):
    """ζ(w | 1, iτ) = 2η₁w + π·θ₁'(πw)/θ₁(πw) with q = e^{−πτ}.

    θ₁'/θ₁(u) = cot u + 4 Σ q^{2n}/(1 − q^{2n})·sin 2nu.  The argument is first
    reduced by whole periods 1 (exact, the sum being π-periodic in u), and
    translates by iτ use ζ(w + iτ) = ζ(w) + 2η₃ with η₃ from the Legendre
    relation, η₃ = iτη₁ − iπ.
    """
    md = get_mode(mode)
    if isinstance(zv, DDComplex):
        md = get_mode("dd")
    if isinstance(zv, np.ndarray) and zv.ndim > 0:
        return np.array([complex(weierstrass_zeta(complex(v), tau, mode)) for v in zv.ravel()]).reshape(zv.shape)
    j, k, dist = _reduce(zv if not isinstance(zv, DDComplex) else zv.to_complex(), tau)
    scale = 1e-300 if md.is_dd() else 0.0
    if dist <= max(64 * md.unit_roundoff, scale):
        raise LatticePoleError(
            f"w = {complex(zv if not isinstance(zv, DDComplex) else zv.to_complex())!r} is a lattice pole "
            f"(distance {dist:.3e} to {j}+{k}·iτ)"
        )
    q = nome(tau)
    nmax = _series_len(q, md)
    e1 = eta1(tau, md)
    if md.is_dd():
        w = as_ddcomplex(zv)
        wr = DDComplex(w.re - float(j), w.im - DDReal(float(tau)) * float(k))
        periodic = _periodic_dd(wr, tau, nmax)
        out = wr * (e1 * 2.0) + periodic
        if j:
            out = out + DDComplex(e1 * (2.0 * j), DDReal(0.0))
        if k:
            out = out + _eta3_dd(tau, e1) * (2.0 * k)
        return out
    wc = complex(zv)
    wr = wc - j - 1j * k * tau
    u = np.pi * wr
    n = np.arange(1, nmax + 1)
    a = q ** (2 * n) / (1.0 - q ** (2 * n))
    periodic = np.pi * (1.0 / np.tan(u) + 4.0 * np.sum(a * np.sin(2 * n * u)))
    eta3 = e1 * 1j * tau - 1j * np.pi
    return 2 * e1 * wr + periodic + 2 * j * e1 + 2 * k * eta3


def _periodic_dd(wr: DDComplex, tau: float, nmax: int) -> DDComplex:
    """π·θ₁'/θ₁(πw) in double-double from powers of E = e^{2iπw}."""
    pi = dd_pi()
    E = dd_cexp(wr * DDComplex(DDReal(0.0), pi * 2.0))
    Einv = 1.0 / E
    i = DDComplex(DDReal(0.0), DDReal(1.0))
    cot = i * (E + 1.0) / (E - 1.0)
    q2 = _dd_nome(tau) ** 2
    qn = q2
    En, Emn = E, Einv
    s = DDComplex(DDReal(0.0), DDReal(0.0))
    for _ in range(nmax):
        # sin 2nu = (Eⁿ − E⁻ⁿ)/(2i)
        s = s + (En - Emn) * DDComplex(DDReal(0.0), DDReal(-0.5)) * (qn / (1.0 - qn))
        qn = qn * q2
        En, Emn = En * E, Emn * Einv
    return (cot + s * 4.0) * pi


def _eta3_dd(tau, e1):
    # η₃ = iτη₁ − iπ (Legendre relation η₁ω₃ − η₃ω₁ = iπ/2, ω₁ = 1/2, ω₃ = iτ/2)
    return DDComplex(DDReal(0.0), e1 * float(tau) - dd_pi())


def weierstrass_zeta_prime(zv: complex, tau: float) -> complex:
    """ζ'(w) = −℘(w) = 2η₁ − π²/sin²(πw) + 8π² Σ n·q^{2n}/(1 − q^{2n})·cos 2nπw (binary64)."""
    q = nome(tau)
    nmax = _series_len(q, "f64")
    n = np.arange(1, nmax + 1)
    a = q ** (2 * n) / (1.0 - q ** (2 * n))
    u = np.pi * complex(zv)
    return 2 * eta1(tau) + np.pi**2 * (-1.0 / np.sin(u) ** 2 + 8.0 * np.sum(n * a * np.cos(2 * n * u)))


__all__ = [
    "EllipticArg",
    "ellip_K",
    "ellip_E",
    "ellip_K_complement",
    "ellip_K_modulus",
    "ellip_F",
    "ellip_Einc",
    "ellip_F_sin",
    "ellip_Einc_sin",
    "carlson_rf",
    "carlson_rd",
    "agm_iterations",
    "nome",
    "eta1",
    "weierstrass_zeta",
    "weierstrass_zeta_prime",
    "LatticePoleError",
]
