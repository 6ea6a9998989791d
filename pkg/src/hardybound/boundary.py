"""Closed forms for Γ = [−1,1] on the real axis and the h → 0 limit of Γ_h = [−1,1] + ih.

Notation: L(x) = ln((1+x)/(1−x)), p(x) = i/(x − z̄), K the truncated Hilbert
transform (Ku)(x) = (i/π) PV∫_{−1}^{1} u(y)/(x−y) dy.  The regularized
equation on the boundary interval reads ½(Ku + u) + ε²u = p.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse.linalg import LinearOperator, cg, eigsh

from .quadrature import QuadratureRule, tanh_rule

# --------------------------------------------------------------------------
# exponent and constants
# --------------------------------------------------------------------------


def _check_z(z: complex) -> complex:
    z = complex(z)
    if not z.imag > 0:
        raise ValueError("z must lie in the upper half-plane")
    return z


def subtended_angle(z: complex) -> float:
    """arctan((Re z+1)/Im z) − arctan((Re z−1)/Im z): the angle [−1,1] subtends at z."""
    z = _check_z(z)
    return math.atan((z.real + 1.0) / z.imag) - math.atan((z.real - 1.0) / z.imag)


def gamma_exponent(z: complex, formula: str = "arg") -> float:
    """γ(z) = −(1/π)·arg((z+1)/(z−1)), or the same via the subtended angle."""
    z = _check_z(z)
    if formula == "arg":
        return -math.atan2(((z + 1) / (z - 1)).imag, ((z + 1) / (z - 1)).real) / math.pi
    if formula == "angle":
        return subtended_angle(z) / math.pi
    raise ValueError("formula must be 'arg' or 'angle'")


def p_norm_sq(z: complex) -> float:
    """‖p‖²_{L²(−1,1)} = (1/Im z)·(subtended angle)."""
    z = _check_z(z)
    return subtended_angle(z) / z.imag


@dataclass(frozen=True)
class BoundaryBound:
    z: complex
    eps: float
    gamma: float
    rho: float
    bound: float  # ρ·ε^γ
    B: float  # asymptotic constant: ε^γ / (2√(Im z)·√angle)
    alpha_half_log: complex  # ½ ln((z̄+1)/(z̄−1))
    beta: float  # ½ ln(1 + ε⁻²)
    continuation_value: float  # ε·u(z)/‖u‖_{L²(−1,1)} for the explicit solution u

    @property
    def rigorous(self) -> float:
        """(3/2)·ε·u(z)/‖u‖, the bound carried over from the interior problem."""
        return 1.5 * self.continuation_value


def _alpha(z: complex) -> complex:
    zb = complex(z).conjugate()
    return 0.5 * complex(np.log((zb + 1) / (zb - 1)))


def _beta(eps: float) -> float:
    return 0.5 * math.log1p(eps**-2)


def boundary_bound(z: complex, eps: float) -> BoundaryBound:
    z = _check_z(z)
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    ang = subtended_angle(z)
    g = gamma_exponent(z)
    rho = 1.0 / math.sqrt(z.imag * ang / 9.0)
    B = eps**g / (2.0 * math.sqrt(z.imag) * math.sqrt(ang))
    # ε·e^{β(1−γ)}/(2 Im z·‖p‖) = B·(1+ε²)^{(1−γ)/2}
    cont = B * (1.0 + eps**2) ** (0.5 * (1.0 - g))
    return BoundaryBound(z, eps, g, rho, rho * eps**g, B, _alpha(z), _beta(eps), cont)


# --------------------------------------------------------------------------
# maximizer and explicit solution
# --------------------------------------------------------------------------


def _L(zeta) -> np.ndarray:
    """ln((1+ζ)/(1−ζ)), principal branch; on the real axis the limit from ℍ₊."""
    zeta = np.asarray(zeta, dtype=complex)
    if np.any(np.abs(zeta * zeta - 1.0) == 0):
        raise ValueError("ζ = ±1 are branch points")
    out = np.array(np.log((1 + zeta) / (1 - zeta)), dtype=complex)
    real = zeta.imag == 0
    if np.any(real):
        x = zeta.real[real]
        out[real] = np.log(np.abs((1 + x) / (1 - x))) + 1j * np.pi * (np.abs(x) > 1)
    return out


def maximizer_W(zeta, z: complex, eps: float):
    """W(ζ) = ε·p(ζ)/‖p‖·exp((i/π)·ln ε·L(ζ)); attains |W(z)| = B."""
    z = _check_z(z)
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    zeta = np.asarray(zeta, dtype=complex)
    if np.any(zeta.imag < 0):
        raise ValueError("ζ must lie in the closed upper half-plane")
    p = 1j / (zeta - z.conjugate())
    return eps * p / math.sqrt(p_norm_sq(z)) * np.exp(1j / math.pi * math.log(eps) * _L(zeta))


def maximizer_H2_norm_sq(z: complex, eps: float) -> float:
    """Closed form ‖W‖²_{H²} = ε² − 1 + π/angle."""
    return eps**2 - 1.0 + math.pi / subtended_angle(z)


def explicit_u(x, z: complex, eps: float):
    """u(x) = 2p(x)·sinh β·exp(−i(β/π)(L(x) − 2α)), solving ½(Ku+u) + ε²u = p on (−1,1)."""
    z = _check_z(z)
    if not eps > 0:
        raise ValueError("eps must be positive")
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) >= 1):
        raise ValueError("explicit_u needs |x| < 1")
    return _explicit_u(x, np.log1p(x) - np.log1p(-x), z, eps)


def explicit_u_tanh(t, z: complex, eps: float):
    """explicit_u at x = tanh t, with L = 2t exact (usable where tanh t rounds to ±1)."""
    z = _check_z(z)
    if not eps > 0:
        raise ValueError("eps must be positive")
    t = np.asarray(t, dtype=float)
    return _explicit_u(np.tanh(t), 2.0 * t, z, eps)


def _explicit_u(x, L, z: complex, eps: float):
    beta = _beta(eps)
    p = 1j / (x - z.conjugate())
    return 2.0 * p * math.sinh(beta) * np.exp(-1j * beta / math.pi * (L - 2.0 * _alpha(z)))


def explicit_u_norm(z: complex, eps: float) -> float:
    """‖u‖_{L²(−1,1)} = 2 sinh β·e^{−2β Im α/π}·‖p‖ (|exp| is constant on (−1,1))."""
    beta = _beta(eps)
    return 2.0 * math.sinh(beta) * math.exp(-2.0 * beta * _alpha(z).imag / math.pi) * math.sqrt(p_norm_sq(z))


# --------------------------------------------------------------------------
# truncated Hilbert transform
# --------------------------------------------------------------------------


def _tanh_differences(ti: np.ndarray, tj: np.ndarray) -> np.ndarray:
    """tanh tᵢ − tanh tⱼ = sinh(tᵢ−tⱼ)/(cosh tᵢ cosh tⱼ), free of cancellation near ±1."""
    return np.sinh(ti[:, None] - tj[None, :]) / (np.cosh(ti)[:, None] * np.cosh(tj)[None, :])


def _bary_diff(x: np.ndarray) -> np.ndarray:
    diff = x[:, None] - x[None, :]
    np.fill_diagonal(diff, 1.0)
    wb = 1.0 / np.prod(diff, axis=1)
    D = (wb[None, :] / wb[:, None]) / diff
    np.fill_diagonal(D, 0.0)
    np.fill_diagonal(D, -D.sum(axis=1))
    return D


def truncated_hilbert(u_nodes, rule: QuadratureRule, block: int = 512) -> np.ndarray:
    """(Ku)(xᵢ) at the nodes of ``rule`` by singularity subtraction.

    (Ku)(x) = (i/π)[∫(u(y) − u(x))/(x − y) dy + u(x)·L(x)].  On a tanh rule the
    smooth quotient is integrated by the trapezoid rule on the sublattice
    tⱼ − tᵢ ∈ step·(2ℤ+1) with doubled weights, which never touches y = x.  On
    a Gauss rule the diagonal uses −u'(xᵢ) from barycentric differentiation.
    """
    u = np.asarray(u_nodes, dtype=complex)
    x = np.asarray(rule.nodes_f64, dtype=float)
    w = np.asarray(rule.weights_f64, dtype=float)
    if u.shape != x.shape:
        raise ValueError("u_nodes must match the rule nodes")
    if rule.kind == "tanh":
        return _pv_tanh(u, rule.t, 0, rule.step, block)
    else:
        L = np.log1p(x) - np.log1p(-x)
        diff = x[:, None] - x[None, :]
        np.fill_diagonal(diff, 1.0)
        q = (u[None, :] - u[:, None]) / diff
        np.fill_diagonal(q, -(_bary_diff(x) @ u))
        out = q @ w
    return 1j / math.pi * (out + u * L)


def _pv_tanh(u_src: np.ndarray, t_src: np.ndarray, pad: int, step: float, block: int = 512) -> np.ndarray:
    """(Ku) at t_src[pad:len−pad] using all of t_src as integration lattice."""
    n = len(t_src) - 2 * pad
    w = step / np.cosh(t_src) ** 2
    j = np.arange(len(t_src))
    out = np.empty(n, dtype=complex)
    for s in range(0, n, block):
        i = np.arange(pad + s, pad + min(s + block, n))
        d = _tanh_differences(t_src[i], t_src)
        odd = ((i[:, None] - j[None, :]) % 2) == 1
        with np.errstate(divide="ignore", invalid="ignore"):
            q = np.where(odd, (u_src[None, :] - u_src[i, None]) / np.where(odd, d, 1.0), 0.0)
        out[s:s + len(i)] = 2.0 * (q @ w)
    u = u_src[pad:pad + n]
    return 1j / math.pi * (out + u * 2.0 * t_src[pad:pad + n])


def boundary_residual(z: complex, eps: float, rule: QuadratureRule, pad: int = 0) -> float:
    """‖½(Ku+u) + ε²u − p‖/‖p‖ in the discrete L²(−1,1) norm for u = explicit_u.

    With ``pad > 0`` (tanh rules only) the integration lattice is extended by
    ``pad`` steps on each side while the residual is still taken at the rule
    nodes.  u oscillates like e^{−2iβt/π} up to x = ±1, so the part of the PV
    integral beyond the lattice end is O(|u|) at the outermost nodes; padding
    removes that truncation.
    """
    x = np.asarray(rule.nodes_f64, dtype=float)
    w = np.asarray(rule.weights_f64, dtype=float)
    p = 1j / (x - complex(z).conjugate())
    if pad:
        if rule.kind != "tanh" or pad < 0:
            raise ValueError("pad needs a tanh rule and a non-negative count")
        k = np.arange(-pad, len(x) + pad)
        t_src = rule.t[0] + rule.step * k
        u_src = explicit_u_tanh(t_src, z, eps)
        u = u_src[pad:pad + len(x)]
        Ku = _pv_tanh(u_src, t_src, pad, rule.step)
    else:
        u = explicit_u_tanh(rule.t, z, eps) if rule.kind == "tanh" else explicit_u(x, z, eps)
        Ku = truncated_hilbert(u, rule)
    r = 0.5 * (Ku + u) + eps**2 * u - p
    return math.sqrt(float(np.sum(w * np.abs(r) ** 2)) / float(np.sum(w * np.abs(p) ** 2)))


# --------------------------------------------------------------------------
# Koppelman–Pincus transform
# --------------------------------------------------------------------------


class KPAccuracyWarning(UserWarning):
    pass


@dataclass(frozen=True)
class KPImage:
    """g on ζ = tanh s, stored as the flat density g(ζ)·√(1−ζ²) on an s-lattice."""

    s: np.ndarray
    step: float
    density: np.ndarray
    truncation_estimate: float = 0.0

    @property
    def zeta(self) -> np.ndarray:
        return np.tanh(self.s)

    @property
    def values(self) -> np.ndarray:
        with np.errstate(over="ignore"):
            return self.density * np.cosh(self.s)

    def norm(self) -> float:
        """‖g‖_{L²(−1,1)}."""
        return math.sqrt(self.step * float(np.sum(np.abs(self.density) ** 2)))


def default_s_grid(rule: QuadratureRule) -> tuple[np.ndarray, float]:
    """s-lattice resolving the t-extent and the frequency range of the rule."""
    tmax = float(np.max(np.abs(rule.t)))
    ds = math.pi**2 / (4.0 * (tmax + 1.0))
    smax = math.pi**2 / (2.0 * rule.step)
    k = int(math.ceil(smax / ds))
    return ds * np.arange(-k, k + 1), ds


def _fourier(values: np.ndarray, src: np.ndarray, dst: np.ndarray, sign: float, block: int = 1024):
    out = np.empty(len(dst), dtype=complex)
    for s in range(0, len(dst), block):
        d = dst[s:s + block]
        out[s:s + block] = np.exp(sign * 2j / math.pi * np.outer(d, src)) @ values
    return out


def kp_transform(f_nodes, rule: QuadratureRule, s: np.ndarray | None = None,
                 tol: float = 1e-6) -> KPImage:
    """g(ζ) = ∫ f(x)·conj σ(x,ζ) dx, σ(x,ζ) = e^{(i/2π)L(x)L(ζ)}/(π√((1−x²)(1−ζ²))).

    With x = tanh t and ζ = tanh s this is a Fourier integral,
    g(ζ)√(1−ζ²) = (1/π)∫ f(tanh t)·sech t·e^{−2its/π} dt, done by the trapezoid
    rule of the tanh ``rule``.
    """
    if rule.kind != "tanh":
        raise ValueError("kp_transform needs a tanh rule")
    f = np.asarray(f_nodes, dtype=complex)
    if s is None:
        s, ds = default_s_grid(rule)
    else:
        s = np.asarray(s, dtype=float)
        ds = float(s[1] - s[0])
    F = f / np.cosh(rule.t)
    scale = float(np.max(np.abs(F))) or 1.0
    edge = float(max(abs(F[0]), abs(F[-1]))) / scale
    dens = rule.step / math.pi * _fourier(F, rule.t, s, -1.0)
    dscale = float(np.max(np.abs(dens))) or 1.0
    dedge = float(max(abs(dens[0]), abs(dens[-1]))) / dscale
    est = max(edge, dedge)
    if est > tol:
        warnings.warn(f"slow decay near ±1: estimated truncation error {est:.2e}", KPAccuracyWarning, stacklevel=2)
    return KPImage(s, ds, dens, est)


def kp_inverse(image: KPImage, t: np.ndarray) -> np.ndarray:
    """f(x) = ∫ g(ζ)·σ(x,ζ) dζ at x = tanh t."""
    t = np.asarray(t, dtype=float)
    F = image.step / math.pi * _fourier(image.density, image.s, t, 1.0)
    return F * np.cosh(t)


def bump(x) -> np.ndarray:
    """exp(−1/(1−4x²)) on (−½, ½), zero elsewhere."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    inside = np.abs(x) < 0.5
    out[inside] = np.exp(-1.0 / (1.0 - 4.0 * x[inside] ** 2))
    return out


def weighted_norm(values, rule: QuadratureRule) -> float:
    return math.sqrt(float(np.sum(rule.weights_f64 * np.abs(values) ** 2)))


# --------------------------------------------------------------------------
# h → 0 limit
# --------------------------------------------------------------------------


def _F(t: np.ndarray) -> np.ndarray:
    """F(t) = t ln t − t (principal log), F(0) = 0; F'' = 1/t."""
    t = np.asarray(t, dtype=complex)
    out = np.zeros_like(t)
    nz = t != 0
    out[nz] = t[nz] * np.log(t[nz]) - t[nz]
    return out


def galerkin_symbol(n: int, d: float, c: complex) -> np.ndarray:
    """(i/2π)∫∫ dx dy/(x − y + c) over cell pairs, indexed by offset m = −(n−1)..n−1.

    c = 2ih gives 𝒦_h; c = 0 (with the +i0 branch of the log) gives ½(K + 1).
    """
    m = np.arange(-(n - 1), n)
    t = m * d + c
    if c == 0:
        t = t + 0j  # +0 imaginary part selects ln|t| + iπ for t < 0
    G = _F(t + d) - 2.0 * _F(t) + _F(t - d)
    far = np.abs(m) > 20
    tf = t[far]
    G[far] = d**2 * (1 / tf + d**2 / (6 * tf**3) + d**4 / (15 * tf**5))
    return G * 1j / (2.0 * math.pi)


class _Toeplitz:
    """Hermitian Toeplitz matrix with FFT matvec and T. Chan circulant preconditioner."""

    def __init__(self, symbol: np.ndarray, shift: float = 0.0):
        n = (len(symbol) + 1) // 2
        self.n = n
        col = symbol[n - 1:]
        row = symbol[n - 1::-1]
        self.col, self.row = col, row
        self.shift = shift
        self._fc = np.fft.fft(np.concatenate([col, [0], row[:0:-1]]))
        k = np.arange(n)
        cc = ((n - k) * col + k * np.concatenate([[0], row[:0:-1]])) / n
        self._pre = np.fft.fft(cc).real + shift

    def matvec(self, x):
        n = self.n
        y = np.fft.ifft(self._fc * np.fft.fft(np.concatenate([x, np.zeros(n)])))[:n]
        return y + self.shift * x

    def precondition(self, x):
        return np.fft.ifft(np.fft.fft(x) / self._pre)

    def dense(self) -> np.ndarray:
        from scipy.linalg import toeplitz

        return toeplitz(self.col, self.row) + self.shift * np.eye(self.n)


@dataclass(frozen=True)
class HLimitRow:
    h: float
    cells: int
    u_z: float
    norm_L2: float
    norm_H2: float
    M_h: float
    bound_h: float  # 3/2·M_h
    bound_boundary: float
    gap: float  # |bound_h − bound_boundary|/bound_boundary
    lambda_max: float
    cg_iterations: int
    flags: tuple[str, ...] = ()


@dataclass
class HLimitStudy:
    z: complex
    eps: float
    rows: list[HLimitRow] = field(default_factory=list)

    def monotone(self) -> bool:
        g = [r.gap for r in self.rows]
        return all(b < a for a, b in zip(g, g[1:]))


def solve_h_galerkin(h: float, z: complex, eps: float, cells_per_h: float = 2.0,
                     rtol: float = 1e-13) -> HLimitRow:
    """Piecewise-constant Galerkin solve of (𝒦_h + ε²)u = p_z on [−1,1] + ih.

    Cells of width h/cells_per_h; all cell integrals exact.  The Toeplitz system
    is solved by preconditioned CG.
    """
    z = _check_z(z)
    n = int(round(2.0 / (h / cells_per_h)))
    d = 2.0 / n
    a = -1.0 + d * np.arange(n)
    b = a + d
    T = _Toeplitz(galerkin_symbol(n, d, 2j * h), eps**2 * d)
    zb = z.conjugate()
    rhs = 1j * (np.log(b + 1j * h - zb) - np.log(a + 1j * h - zb))
    it = [0]

    def count(_):
        it[0] += 1

    A = LinearOperator((n, n), matvec=T.matvec, dtype=complex)
    P = LinearOperator((n, n), matvec=T.precondition, dtype=complex)
    c, info = cg(A, rhs, rtol=rtol, maxiter=20000, M=P, callback=count)
    flags = []
    if info != 0:
        flags.append(f"cg did not converge (info={info})")
    if eps**2 < n * np.finfo(float).eps:
        flags.append("eps below binary64 resolution for this cell count")
    Ku = 1j / (2 * math.pi) * np.sum(c * (np.log(z + 1j * h - a) - np.log(z + 1j * h - b)))
    uz = ((1j / (z - zb) - Ku) / eps**2).real
    l2sq = float(np.sum(np.abs(c) ** 2) * d)
    h2sq = (2 * math.pi * uz - l2sq) / eps**2
    nL2, nH2 = math.sqrt(l2sq), math.sqrt(max(h2sq, 0.0))
    M = uz * min(1.0 / nH2 if nH2 > 0 else math.inf, eps / nL2)
    # largest eigenvalue of 𝒦_h: Galerkin mass matrix is d·I
    Kop = LinearOperator((n, n), matvec=lambda x: (T.matvec(x) - T.shift * x) / d, dtype=complex)
    lam = float(eigsh(Kop, k=1, which="LA", return_eigenvectors=False, tol=1e-10)[0])
    bb = boundary_bound(z, eps).rigorous
    return HLimitRow(h, n, uz, nL2, nH2, M, 1.5 * M, bb, abs(1.5 * M - bb) / bb, lam, it[0], tuple(flags))


def h_limit_study(z: complex, eps: float, h_list, cells_per_h: float = 2.0) -> HLimitStudy:
    hs = [float(h) for h in h_list]
    if any(h <= 0 for h in hs) or any(b >= a for a, b in zip(hs, hs[1:])):
        raise ValueError("h_list must be positive and decreasing")
    study = HLimitStudy(complex(z), eps)
    for h in hs:
        study.rows.append(solve_h_galerkin(h, z, eps, cells_per_h))
    return study


def limit_operator_min_eigenvalue(n: int = 400) -> float:
    """Smallest eigenvalue of the Galerkin matrix of ½(K+1) (mass-normalized)."""
    d = 2.0 / n
    T = _Toeplitz(galerkin_symbol(n, d, 0.0))
    return float(np.linalg.eigvalsh(T.dense() / d)[0])


def limit_operator_matrix(n: int = 400) -> np.ndarray:
    d = 2.0 / n
    return _Toeplitz(galerkin_symbol(n, d, 0.0)).dense() / d


def default_boundary_rule(n: int = 200, step: float = 0.16) -> QuadratureRule:
    return tanh_rule(n, step)


__all__ = [
    "BoundaryBound",
    "boundary_bound",
    "gamma_exponent",
    "subtended_angle",
    "p_norm_sq",
    "maximizer_W",
    "maximizer_H2_norm_sq",
    "explicit_u",
    "explicit_u_norm",
    "explicit_u_tanh",
    "truncated_hilbert",
    "boundary_residual",
    "KPImage",
    "KPAccuracyWarning",
    "kp_transform",
    "kp_inverse",
    "default_s_grid",
    "bump",
    "weighted_norm",
    "galerkin_symbol",
    "HLimitRow",
    "HLimitStudy",
    "solve_h_galerkin",
    "h_limit_study",
    "limit_operator_min_eigenvalue",
    "limit_operator_matrix",
    "default_boundary_rule",
]
