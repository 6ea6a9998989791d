"""Theoretical decay rates and exponents for Γ = [−1,1] + ih, and power-law fits.

Conformal map.  With q = e^{−πτ}, the function

    Ψ⁻¹(w) = −h·θ₁'(πw)/θ₁(πw) = −(h/π)(ζ(w|τ) − 2ζ(½|τ)w),   v = e^{2πiw},

maps the rectangle |Re w| < ½, |Im w| < τ/2 onto the plane with the two
segments [−1,1] ± ih removed.  The lines Im w = ±τ/2 (|v| = ρ^{∓1/2}) cover
the upper and lower segment; the upper half-plane corresponds to |v| < 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import CurveSpec
from .specfun import (
    carlson_rd,
    carlson_rf,
    eta1,
    nome,
    weierstrass_zeta,
)
from .xprec import DDComplex, DDReal, as_ddcomplex, dd_pi

# --------------------------------------------------------------------------
# Möbius contraction
# --------------------------------------------------------------------------

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _curve_samples(curve: CurveSpec, n: int = 2001) -> np.ndarray:
    if curve.kind == "segment_shifted":
        x = np.linspace(curve.a, curve.b, n)
        return x + 1j * curve.h
    if curve.kind == "polyline":
        pts = []
        for p, q in zip(curve.vertices, curve.vertices[1:]):
            s = np.linspace(0.0, 1.0, n)
            pts.append(p + s * (q - p))
        return np.concatenate(pts)
    raise ValueError("Möbius contraction needs an interior curve")


def _max_moebius(c: float, pts: np.ndarray) -> float:
    return float(np.max(np.abs((pts - 1j * c) / (pts + 1j * c))))


def moebius_contraction_detail(curve: CurveSpec, tol: float = 1e-12) -> tuple[float, float]:
    """(ρ₁, c*): min over c > 0 of (max_Γ |(τ − ci)/(τ + ci)|)², by golden section in ln c."""
    pts = _curve_samples(curve)
    scale = float(np.max(np.abs(pts)))
    a, b = math.log(scale) - 12.0, math.log(scale) + 12.0
    f = lambda t: _max_moebius(math.exp(t), pts)  # noqa: E731
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    while b - a > tol:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = f(x2)
    c = math.exp(0.5 * (a + b))
    return _max_moebius(c, pts) ** 2, c


def moebius_contraction(curve: CurveSpec) -> float:
    """Upper estimate ρ₁ of the per-index eigenvalue contraction λ_{n+1}/λ_n."""
    return moebius_contraction_detail(curve)[0]


# --------------------------------------------------------------------------
# Riemann invariant of [−1,1] ± ih
# --------------------------------------------------------------------------


def _agm(a: float, b: float) -> float:
    for _ in range(60):
        if abs(a - b) <= 4e-16 * a:
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return a


def _complete_from_complement(mc: float) -> tuple[float, float, float]:
    """K(m), E(m) and K(1 − m) from the complementary parameter mc = 1 − m."""
    a0, b0 = 1.0, math.sqrt(mc)
    a, b = a0, b0
    s = 0.5 * (1.0 - mc)  # c₀² = m
    p = 0.5
    for _ in range(60):
        c = 0.5 * (a - b)
        if abs(c) <= 4e-16 * a:
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
        p *= 2.0
        s += p * c * c
    K = math.pi / (2.0 * a)
    E = K * (1.0 - s)
    Kc = math.pi / (2.0 * _agm(1.0, math.sqrt(1.0 - mc)))
    return K, E, Kc


def m_equation(mc: float, h: float) -> float:
    """K(m)E(x|m) − E(m)F(x|m) − π/(2h) with x = √((K−E)/(mK)) = sin φ, mc = 1 − m."""
    m = 1.0 - mc
    K, E, _ = _complete_from_complement(mc)
    x2 = (K - E) / (m * K)
    c2 = (E - mc * K) / (m * K)  # 1 − x², formed without cancellation
    d2 = c2 + x2 * mc  # 1 − m x²
    x = math.sqrt(x2)
    rf = float(carlson_rf(c2, d2, 1.0))
    rd = float(carlson_rd(c2, d2, 1.0))
    F = x * rf
    Einc = x * rf - m * x2 * x * rd / 3.0
    return K * Einc - E * F - math.pi / (2.0 * h)


@dataclass(frozen=True)
class RiemannInvariant:
    h: float
    m_param: float
    m_complement: float
    tau: float
    rho_Gamma: float
    ln_rho: float


class BracketError(RuntimeError):
    pass


def riemann_invariant(h: float) -> RiemannInvariant:
    """Solve the m-equation by bisection in ln(1 − m); τ = K(1−m)/K(m), ρ_Γ = e^{2πτ}."""
    if not h > 0:
        raise ValueError("h must be positive")
    lo, hi = math.log(1e-300), math.log(1.0 - 1e-12)
    g = lambda t: m_equation(math.exp(t), h)  # noqa: E731
    glo, ghi = g(lo), g(hi)
    if not (glo > 0 > ghi):
        raise BracketError(
            f"m-equation bracket failed for h={h}: sign at 1-m=1e-300 is {np.sign(glo):+.0f}, "
            f"at 1-m≈1 is {np.sign(ghi):+.0f} (expected +, -)"
        )
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if g(mid) > 0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-15:
            break
    mc = math.exp(0.5 * (lo + hi))
    K, _, Kc = _complete_from_complement(mc)
    tau = Kc / K
    return RiemannInvariant(h, 1.0 - mc, mc, tau, math.exp(2 * math.pi * tau), 2 * math.pi * tau)


def m_equation_scan(h: float, n: int = 200) -> tuple[np.ndarray, np.ndarray]:
    """Left side of the m-equation on a grid of 1 − m (for monotonicity checks)."""
    mc = np.logspace(-30, -1e-3, n)
    vals = np.array([m_equation(v, h) + math.pi / (2 * h) for v in mc])
    return 1.0 - mc, vals


# --------------------------------------------------------------------------
# Widom rate
# --------------------------------------------------------------------------


def widom_rate(h: float) -> float:
    """W = π·K(sech(π/2h))/K(tanh(π/2h)), K in the modulus convention.

    K(k) = π/(2·AGM(1, k')) with k' the complementary modulus, so
    W = π·AGM(1, sech)/AGM(1, tanh).
    """
    if not h > 0:
        raise ValueError("h must be positive")
    x = math.pi / (2.0 * h)
    sech = 1.0 / math.cosh(x) if x < 700 else 0.0
    th = math.tanh(x)
    if sech == 0.0:
        return 0.0
    return math.pi * _agm(1.0, sech) / _agm(1.0, th)


# --------------------------------------------------------------------------
# conformal map Ψ and transplant exponent θ(z)
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class AnnulusMap:
    """Ψ for Γ = [−1,1] + ih in terms of w = ln v/(2πi)."""

    h: float
    tau: float
    nterms: int = field(default=0)

    def __post_init__(self):
        q = nome(self.tau)
        n = max(8, int(math.ceil(math.log(1e-18) / math.log(q))) + 4)
        object.__setattr__(self, "nterms", n)

    @classmethod
    def for_h(cls, h: float) -> "AnnulusMap":
        return cls(h, riemann_invariant(h).tau)

    @property
    def rho(self) -> float:
        return math.exp(2 * math.pi * self.tau)

    def _a(self):
        q = nome(self.tau)
        n = np.arange(1, self.nterms + 1)
        return n, q ** (2 * n) / (1.0 - q ** (2 * n))

    def inverse_w(self, w):
        """Ψ⁻¹ as a function of w (binary64, array-capable)."""
        w = np.asarray(w, dtype=complex)
        n, a = self._a()
        u = np.pi * w[..., None]
        g = 1.0 / np.tan(u[..., 0]) + 4.0 * np.sum(a * np.sin(2 * n * u), axis=-1)
        return -self.h * g

    def inverse_w_dd(self, w) -> DDComplex:
        """Ψ⁻¹(w) in double-double via the Weierstrass zeta function."""
        wd = as_ddcomplex(w)
        zeta = weierstrass_zeta(wd, self.tau, "dd")
        e1 = eta1(self.tau, "dd")
        return (zeta - wd * (e1 * 2.0)) * (DDReal(-self.h) / dd_pi())

    def dinverse_w(self, w):
        w = np.asarray(w, dtype=complex)
        n, a = self._a()
        u = np.pi * w[..., None]
        gp = -1.0 / np.sin(u[..., 0]) ** 2 + 8.0 * np.sum(n * a * np.cos(2 * n * u), axis=-1)
        return -self.h * np.pi * gp

    def inverse(self, v):
        """Ψ⁻¹(v) for v in the annulus."""
        v = np.asarray(v, dtype=complex)
        return self.inverse_w(np.log(v) / (2j * np.pi))

    def solve_w(self, zeta: complex, refine_dd: bool = True) -> tuple[complex, float]:
        """w with Ψ⁻¹(w) = ζ by damped Newton from 8 rays × 5 radii of the annulus.

        Returns (w, residual).  With ``refine_dd`` two Newton steps in
        double-double polish the root; the residual is then measured in
        double-double as well.
        """
        zeta = complex(zeta)
        tau = self.tau
        best = None
        for k in range(8):
            for frac in (-0.3, 0.0, 0.3, -0.49, 0.49):
                w = (k + 0.5) / 8.0 - 0.5 + 1j * frac * tau
                w, res = self._newton(w, zeta)
                if res is not None and (best is None or res < best[1]):
                    best = (w, res)
                    if res < 1e-13 * max(1.0, abs(zeta)):
                        break
            if best is not None and best[1] < 1e-13 * max(1.0, abs(zeta)):
                break
        if best is None or not best[1] < 1e-9 * max(1.0, abs(zeta)):
            grid = self._residual_map(zeta)
            raise ArithmeticError(f"Ψ inversion failed for ζ={zeta!r}; residual map (w → |Ψ⁻¹(w)−ζ|): {grid}")
        w, res = best
        if refine_dd:
            wd = as_ddcomplex(w)
            for _ in range(2):
                F = self.inverse_w_dd(wd) - zeta
                wd = wd - as_ddcomplex(F.to_complex() / self.dinverse_w(wd.to_complex()))
            res = float(abs((self.inverse_w_dd(wd) - zeta)))
            w = complex(wd.to_complex())
        return w, res

    def _newton(self, w, zeta):
        tau = self.tau
        F = self.inverse_w(w) - zeta
        r = abs(F)
        for _ in range(80):
            step = F / self.dinverse_w(w)
            lam = 1.0
            while True:
                wn = w - lam * step
                if abs(wn.imag) < tau / 2 and np.isfinite(wn):
                    Fn = self.inverse_w(wn) - zeta
                    if abs(Fn) < r:
                        break
                lam *= 0.5
                if lam < 1e-6:
                    break
            if lam < 1e-6:
                break  # stalled: at rounding level or stuck; the caller checks the residual
            w, F, r = wn, Fn, abs(Fn)
            # keep the real part in the fundamental period
            w = complex((w.real + 0.5) % 1.0 - 0.5, w.imag)
            if abs(lam * step) < 1e-15:
                break
        if not abs(w.imag) < tau / 2:
            return w, None
        return w, float(abs(self.inverse_w(w) - zeta))

    def _residual_map(self, zeta):
        xs = np.linspace(-0.45, 0.45, 5)
        ys = np.linspace(-0.45, 0.45, 5) * self.tau
        return {f"{x:+.2f}{y:+.3f}i": float(abs(self.inverse_w(x + 1j * y) - zeta)) for x in xs for y in ys}

    def psi(self, zeta: complex) -> complex:
        """Ψ(ζ) = e^{2πiw} for ζ off the two segments."""
        w, _ = self.solve_w(zeta, refine_dd=False)
        return complex(np.exp(2j * np.pi * w))

    def _slit_turning_point(self) -> float:
        """s_c in (−½, 0) where w = s + iτ/2 maps to the endpoint 1 + ih."""
        from scipy.optimize import brentq

        y = 0.5 * self.tau
        g = lambda s: float(self.dinverse_w(s + 1j * y).real)  # noqa: E731
        return brentq(g, -0.5 + 1e-9, -1e-9, xtol=1e-16)

    def psi_on_gamma(self, x: float, side: int = 1) -> complex:
        """Boundary value of Ψ at x + ih from one face of the slit (side = ±1).

        The circle w = s + iτ/2 runs over the slit twice; the arc
        s ∈ (s_c, −s_c) is one face and its complement the other.
        """
        from scipy.optimize import brentq

        if not -1.0 < x < 1.0:
            raise ValueError("x must lie inside (-1, 1)")
        y = 0.5 * self.tau
        sc = self._slit_turning_point()
        xa = abs(x)
        f = lambda s: float(self.inverse_w(s + 1j * y).real) - xa  # noqa: E731
        lo, hi = (sc, 0.0) if side > 0 else (-0.5, sc)
        flo, fhi = f(lo), f(hi)
        if flo * fhi > 0:  # x at an arc end, up to rounding
            s = lo if abs(flo) < abs(fhi) else hi
        else:
            s = brentq(f, lo, hi, xtol=1e-16)
        if x < 0:
            s = -s  # Re Ψ⁻¹ is odd in s on this line
        return complex(np.exp(2j * np.pi * (s + 1j * y)))


def theta_exponent(z: complex, h: float, amap: AnnulusMap | None = None) -> float:
    """θ(z) = ln|Ψ(z̄)|/(πτ) ∈ (0, 1)."""
    z = complex(z)
    if not z.imag > 0:
        raise ValueError("z must lie in the upper half-plane")
    amap = amap or AnnulusMap.for_h(h)
    if CurveSpec.segment(-1, 1, h).contains(z, 1e-12):
        raise ValueError("z lies on Γ")
    w, _ = amap.solve_w(z.conjugate())
    return float(-2.0 * w.imag / amap.tau)


def psi_round_trip(z: complex, h: float, amap: AnnulusMap | None = None) -> float:
    """|Ψ⁻¹(Ψ(z̄)) − z̄| with the double-double refinement."""
    amap = amap or AnnulusMap.for_h(h)
    _, res = amap.solve_w(complex(z).conjugate())
    return res


# --------------------------------------------------------------------------
# transplanted test function
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class UguessValue:
    value: complex
    terms: int
    ratio: float  # |Ψ(z)‾Ψ(ζ)|, the geometric ratio of the tail
    tail_bound: float


def uguess_eval(zeta: complex, z: complex, eps: float, h: float, terms: int = 200,
                amap: AnnulusMap | None = None, psi_zeta: complex | None = None,
                psi_z: complex | None = None) -> UguessValue:
    """Partial sum of ε^{2−θ(z)}/(ζ+ih)·Σ_{n≥1} (conj Ψ(z)·Ψ(ζ))ⁿ/(ε² + ρ⁻ⁿ).

    ``psi_zeta`` overrides Ψ(ζ) (used for boundary values on Γ).
    """
    if not 1 <= terms <= 200:
        raise ValueError("terms must lie in [1, 200]")
    if not eps > 0:
        raise ValueError("eps must be positive")
    amap = amap or AnnulusMap.for_h(h)
    z = complex(z)
    th = theta_exponent(z, h, amap)
    pz = psi_z if psi_z is not None else amap.psi(z)
    pzeta = psi_zeta if psi_zeta is not None else amap.psi(complex(zeta))
    a = np.conj(pz) * pzeta
    r = abs(a)
    if not r < 1.0:
        raise ValueError(f"divergent parameters: |conj Ψ(z)·Ψ(ζ)| = {r:.6g} ≥ 1")
    n = np.arange(1, terms + 1)
    rho = amap.rho
    # ρ⁻ⁿ underflows harmlessly to 0 for large n
    with np.errstate(under="ignore"):
        denom = eps**2 + rho ** (-n.astype(float))
    s = np.sum(a**n / denom)
    pref = eps ** (2.0 - th) / (complex(zeta) + 1j * h)
    tail = abs(pref) * r ** (terms + 1) / (eps**2 * (1.0 - r))
    return UguessValue(complex(pref * s), terms, r, float(tail))


def uguess_norm_gamma(z: complex, eps: float, h: float, n_nodes: int = 64,
                      amap: AnnulusMap | None = None) -> float:
    """‖f‖_{L²(Γ)} of the test function, the larger of the two slit faces."""
    amap = amap or AnnulusMap.for_h(h)
    x, w = np.polynomial.legendre.leggauss(n_nodes)
    pz = amap.psi(complex(z))
    norms = []
    for side in (1, -1):
        vals = np.array([
            uguess_eval(xi + 1j * h, z, eps, h, amap=amap, psi_zeta=amap.psi_on_gamma(xi, side), psi_z=pz).value
            for xi in x
        ])
        norms.append(math.sqrt(float(np.sum(w * np.abs(vals) ** 2))))
    return max(norms)


# --------------------------------------------------------------------------
# power-law fits and the rate report
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class PowerLawFit:
    gamma_hat: float
    intercept: float
    r2: float
    monotone: bool
    flags: tuple[str, ...] = ()


def powerlaw_fit(points) -> PowerLawFit:
    """Least-squares slope of ln M against ln ε."""
    pts = sorted((float(e), float(m)) for e, m in points)
    if len(pts) < 6:
        raise ValueError("power-law fit needs at least 6 points")
    eps = np.array([p[0] for p in pts])
    M = np.array([p[1] for p in pts])
    if np.any(eps <= 0) or np.any(M <= 0):
        raise ValueError("eps and M must be positive")
    if math.log10(eps.max() / eps.min()) < 3.0 - 1e-9:
        raise ValueError("power-law fit needs ε spanning at least 3 decades")
    flags = []
    monotone = bool(np.all(np.diff(M) > 0))
    if not monotone:
        flags.append("M not increasing in eps")
    x, y = np.log(eps), np.log(M)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss if ss > 0 else 1.0
    return PowerLawFit(float(slope), float(intercept), r2, monotone, tuple(flags))


def predicted_exponent(alpha: float, beta: float) -> float:
    """(β − α)/α, the exponent implied by λ_n ~ e^{−αn}, |π_n|² ~ e^{−βn}."""
    return (beta - alpha) / alpha


@dataclass
class RateReport:
    h: float
    rho1: float
    rho_Gamma: float
    tau: float
    m_param: float
    widom_W: float
    alpha_hat: float | None = None
    gamma_hat: dict = field(default_factory=dict)
    theta: dict = field(default_factory=dict)

    @property
    def ln_rho(self) -> float:
        return math.log(self.rho_Gamma)


def rate_report(h: float) -> RateReport:
    ri = riemann_invariant(h)
    return RateReport(h, moebius_contraction(CurveSpec.segment(-1, 1, h)), ri.rho_Gamma, ri.tau,
                      ri.m_param, widom_rate(h))


__all__ = [
    "moebius_contraction",
    "moebius_contraction_detail",
    "riemann_invariant",
    "RiemannInvariant",
    "m_equation",
    "m_equation_scan",
    "widom_rate",
    "AnnulusMap",
    "theta_exponent",
    "psi_round_trip",
    "uguess_eval",
    "uguess_norm_gamma",
    "UguessValue",
    "PowerLawFit",
    "powerlaw_fit",
    "predicted_exponent",
    "RateReport",
    "rate_report",
    "BracketError",
]
