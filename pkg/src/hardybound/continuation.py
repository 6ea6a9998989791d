"""Solutions of (𝒦 + ε²)u = p_z, the bound M_{ε,z}, and the dual function Φ(η).

Spectral sums run over the resolved modes n ≤ rank_cutoff.  Modes beyond the
cutoff have λ_n far below ε², so their contribution is completed to second
order in λ/ε² from two numbers stored with the spectral data:

    T = π/Im z − Σ_{n≤M} |π_n|²/λ_n     (sum rule remainder)
    P = Σ_{n>M} |π_n|²                   (L²(Γ) mass outside the resolved span)

giving 2πu(z) += T/ε² − P/ε⁴, ‖u‖² += P/ε⁴ and ‖u‖²_{H²} += T/ε⁴ − 2P/ε⁶.  The
completion keeps 2πu(z) = ‖u‖² + ε²‖u‖²_{H²} exact; what it neglects is
bounded by ``truncation_bound``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from .linalg import cholesky, cholesky_solve
from .operators import SQRT_WEIGHT, OperatorMatrix, RHSVector, nystrom_extend
from .spectral import SpectralData
from .xprec import get_mode

# ε² must exceed this multiple of the noise floor
EPS_FLOOR_FACTOR = 1e-2


class PrecisionFloorError(ValueError):
    pass


@dataclass(frozen=True)
class ContinuationSolution:
    """Solution u = u_{ε,z} of (𝒦 + ε²)u = p_z and the derived bound.

    Scalars are stored in the arithmetic mode of the solve (binary64 floats
    or 0-d double-double values); use ``float()``/``complex()`` to round.
    """

    eps: float
    z: complex
    u_coeffs: Any  # π_n/(λ_n+ε²), n ≤ rank_cutoff (spectral solves only)
    u_nodes: Any  # u(τⱼ)
    u_at_z: Any
    norm_L2_Gamma: Any
    norm_H2: Any
    M_value: Any
    mode: str
    method: str
    truncation_bound: float = 0.0  # relative error bound from the tail completion
    two_pi_u: Any = None  # 2π u(z) as a real scalar

    @property
    def pythagorean_residual(self) -> float:
        """|2π Re u(z) − (‖u‖² + ε²‖u‖²_{H²})| / (2π Re u(z))."""
        m = get_mode(self.mode)
        eps2 = m.real(self.eps) * self.eps
        lhs = m.pi * 2.0 * self.u_at_z.real
        rhs = self.norm_L2_Gamma * self.norm_L2_Gamma + eps2 * self.norm_H2 * self.norm_H2
        return abs(float(lhs - rhs)) / abs(float(lhs))


def _check_eps(S_floor: float, eps: float, mode: str) -> None:
    if not eps > 0 or not math.isfinite(eps):
        raise ValueError("eps must be positive and finite")
    if eps * eps <= EPS_FLOOR_FACTOR * S_floor:
        hint = " switch to mode 'dd'" if get_mode(mode).name == "f64" else " no wider mode is available"
        raise PrecisionFloorError(
            f"eps² = {eps * eps:.3e} is below the precision floor "
            f"{EPS_FLOOR_FACTOR * S_floor:.3e} of mode {mode!r};{hint}"
        )


def _bound(m, u, nH2, nL2, eps):
    return u * min(1.0 / nH2, eps / nL2) if m.name == "f64" else _dd_min(u / nH2, u * eps / nL2)


def _dd_min(a, b):
    return a if float(a - b) <= 0 else b


def solve_spectral(S: SpectralData, eps: float) -> ContinuationSolution:
    """Eigen-expansion solution u_n = π_n/(λ_n + ε²) with tail completion."""
    if S.pis is None:
        raise ValueError("spectral data carries no projections; call project_rhs first")
    m = get_mode(S.mode)
    eps = float(eps)
    _check_eps(S.noise_floor, eps, S.mode)
    M = S.rank_cutoff
    lam = S.lambdas[:M]
    a2 = m.abs2(S.pis[:M])
    e2 = m.real(eps) * eps
    d = lam + e2
    T, P = S.tail_mass, S.tail_proj
    e4 = e2 * e2
    two_pi_u = m.sum(a2 / (lam * d)) + T / e2 - P / e4
    l2sq = m.sum(a2 / (d * d)) + P / e4
    h2sq = m.sum(a2 / (lam * d * d)) + T / e4 - (P * 2.0) / (e4 * e2)
    u_coeffs = S.pis[:M] / d
    nL2, nH2 = m.sqrt(l2sq), m.sqrt(h2sq)
    u = two_pi_u / (m.pi * 2.0)
    trunc = _truncation_bound(S, eps, float(two_pi_u), float(l2sq), float(h2sq))
    u_nodes = None
    if S.vectors is not None:
        # all discrete modes, resolved or not: unresolved ones carry π_n/ε²
        lam_all = S.lambdas
        coeffs = S.pis / (lam_all + e2)
        V = S.vectors
        if m.is_dd():
            vals = (V * coeffs.reshape(1, -1)).sum(axis=1)
        else:
            vals = V @ coeffs
        u_nodes = vals / m.sqrt(S.curve.arc_weights)
    return ContinuationSolution(
        eps, complex(S.z) if S.z is not None else None, u_coeffs, u_nodes,
        m.complex(u, u * 0.0), nL2, nH2, _bound(m, u, nH2, nL2, eps), m.name,
        "spectral", trunc, two_pi_u,
    )


def _truncation_bound(S: SpectralData, eps: float, two_pi_u: float, l2sq: float, h2sq: float) -> float:
    """Relative size of the terms dropped by the second-order tail completion.

    With λ_n ≤ λ_c (the resolution threshold) for n > M the neglected parts are
    at most Pλ_c/ε⁶ in 2πu(z), 2Pλ_c/ε⁶ in ‖u‖² and 3Pλ_c/ε⁸ in ‖u‖²_{H²}.
    """
    if S.tail_proj == 0.0 and S.tail_mass == 0.0:
        return 0.0
    lam_c = S.resolved_threshold
    e2 = eps * eps
    base = S.tail_proj * lam_c / e2**3
    rel = max(base / two_pi_u, 2 * base / l2sq, 3 * base / (e2 * h2sq))
    return float(rel)


def solve_direct(A: OperatorMatrix, p: RHSVector, eps: float) -> ContinuationSolution:
    """Cholesky solve of (A + ε²I)x = p in the √w-scaled coordinates.

    u(z) comes from the equation itself, u(z) = (p_z(z) − (𝒦u)(z))/ε², with
    𝒦u extended off Γ by the Nyström formula.  ‖u‖_{H²} is obtained from the
    identity 2πu(z) = ‖u‖² + ε²‖u‖²_{H²}, which this path cannot check.
    """
    if A.symmetrization != SQRT_WEIGHT:
        raise ValueError("solve_direct needs the Hermitian sqrt_weight form")
    if not A.curve.same_as(p.curve) or not p.scaled:
        raise ValueError("right-hand side must be √w-scaled on the same discretization")
    m = get_mode(A.mode)
    eps = float(eps)
    n = A.dim
    floor = n * m.unit_roundoff * _norm_estimate(A)
    _check_eps(floor, eps, m.name)
    e2 = m.real(eps) * eps
    B = A.entries.copy()
    idx = np.arange(n)
    B[idx, idx] = B[idx, idx] + e2
    L = cholesky(B, m)
    x = cholesky_solve(L, p.values, m)
    u_nodes = x / m.sqrt(A.curve.arc_weights)
    l2sq = m.sum(m.abs2(x))
    z = p.z
    Ku = nystrom_extend(A.curve, u_nodes, [z])[0]
    pz = 0.5 / m.real(z.imag)  # p_z(z) = i/(z − z̄) = 1/(2 Im z)
    u_at_z = (Ku * -1.0 + pz) / e2
    two_pi_u = u_at_z.real * m.pi * 2.0
    h2sq = (two_pi_u - l2sq) / e2
    nL2, nH2 = m.sqrt(l2sq), m.sqrt(h2sq)
    u = u_at_z.real
    return ContinuationSolution(eps, z, None, u_nodes, u_at_z, nL2, nH2,
                                _bound(m, u, nH2, nL2, eps), m.name, "direct", 0.0, two_pi_u)


def _norm_estimate(A: OperatorMatrix) -> float:
    return float(np.linalg.norm(A.to_complex(), 2))


def bound_M(sol: ContinuationSolution) -> float:
    """M_{ε,z} = u(z)·min(1/‖u‖_{H²}, ε/‖u‖_{L²(Γ)})."""
    return float(sol.M_value)


@dataclass(frozen=True)
class BoundReport:
    """The bound and its two branches.

    ``branch_UB1`` = (3/2)u(z)/‖u‖_{H²} and ``branch_UB2`` = (3/2)εu(z)/‖u‖_{L²(Γ)}
    each bound |f(z)|; ``rigorous`` is their minimum, (3/2)M.  The ``sharp_*``
    values are the unsimplified branch estimates u/(2‖u‖_{H²}) + ε²‖u‖_{H²}/(2π)
    and εu/(2‖u‖) + ε‖u‖/(2π), also valid bounds.
    """

    M: float
    rigorous: float
    branch_UB1: float
    branch_UB2: float
    sharp_UB1: float
    sharp_UB2: float
    branch_ratio: float  # UB1/UB2 = ‖u‖_{L²(Γ)}/(ε‖u‖_{H²})


def bound_report(sol: ContinuationSolution) -> BoundReport:
    u = float(sol.u_at_z.real)
    h2 = float(sol.norm_H2)
    l2 = float(sol.norm_L2_Gamma)
    e = sol.eps
    ub1 = 1.5 * u / h2
    ub2 = 1.5 * e * u / l2
    s1 = u / (2 * h2) + e * e * h2 / (2 * np.pi)
    s2 = e * u / (2 * l2) + e * l2 / (2 * np.pi)
    M = bound_M(sol)
    return BoundReport(M, 1.5 * M, ub1, ub2, s1, s2, l2 / (e * h2))


def eps_grid(eps_min: float, eps_max: float, per_decade: int = 4) -> np.ndarray:
    """Logarithmic ε-grid from ``eps_max`` down to ``eps_min`` (decreasing)."""
    if not 0 < eps_min <= eps_max:
        raise ValueError("need 0 < eps_min ≤ eps_max")
    lo, hi = math.log10(eps_min), math.log10(eps_max)
    k = int(round((hi - lo) * per_decade))
    return 10.0 ** np.linspace(hi, lo, k + 1)


# --------------------------------------------------------------------------
# dual function Φ(η)
# --------------------------------------------------------------------------


def _phi_parts(S: SpectralData, eta: float):
    """Numerator ‖(𝒦+η)⁻¹p‖²_{L²(Γ)} and denominator ‖(𝒦+η)⁻¹p‖²_{H²} of Φ."""
    m = get_mode(S.mode)
    M = S.rank_cutoff
    lam = S.lambdas[:M]
    a2 = m.abs2(S.pis[:M])
    d = lam + m.real(eta)
    T, P = S.tail_mass, S.tail_proj
    num = float(m.sum(a2 / (d * d))) + P / eta**2
    den = float(m.sum(a2 / (lam * d * d))) + T / eta**2 - 2 * P / eta**3
    return num, den


def phi(S: SpectralData, eta: float) -> float:
    """Φ(η) = Σ|π_n|²/(λ_n+η)² / Σ|π_n|²/(λ_n(λ_n+η)²), increasing in η."""
    if not eta > 0:
        raise ValueError("eta must be positive")
    num, den = _phi_parts(S, float(eta))
    return num / den


def phi_infinity(S: SpectralData) -> float:
    """lim_{η→∞} Φ(η) = ‖p‖²_{L²(Γ)}/‖p‖²_{H²} = (𝒦p, p)_{H²}/‖p‖²_{H²}."""
    m = get_mode(S.mode)
    M = S.rank_cutoff
    a2 = m.abs2(S.pis[:M])
    num = float(m.sum(a2)) + S.tail_proj
    den = float(m.sum(a2 / S.lambdas[:M])) + S.tail_mass
    return num / den


@dataclass(frozen=True)
class DualCertificate:
    """Multipliers (μ, ν) with η = μ/ν for the two-constraint maximization."""

    eta: float
    mu: float
    nu: float
    phi_value: float
    variant: str = "nu1"


def certificate(S: SpectralData, eta: float, eps: float, variant: str = "nu1") -> DualCertificate:
    """ν² = ‖(𝒦+η)⁻¹p‖²_{H²} (nu1) or ε⁻²‖(𝒦+η)⁻¹p‖²_{L²(Γ)} (nu2); μ = ην."""
    num, den = _phi_parts(S, eta)
    if variant == "nu1":
        nu = math.sqrt(den)
    elif variant == "nu2":
        nu = math.sqrt(num) / eps
    else:
        raise ValueError(f"unknown certificate variant {variant!r}")
    return DualCertificate(eta, eta * nu, nu, num / den, variant)


@dataclass(frozen=True)
class EtaStarReport:
    default: DualCertificate  # η = ε²
    root: DualCertificate | None  # Φ(η*) = ε²
    root_found: bool
    ratio: float | None  # η*/ε²
    phi_inf: float
    diagnostic: str = ""


def eta_star(S: SpectralData, eps: float, rtol: float = 1e-15) -> EtaStarReport:
    """Root of Φ(η) = ε² by bisection in log η, next to the default η = ε²."""
    eps = float(eps)
    target = eps * eps
    default = certificate(S, target, eps)
    pinf = phi_infinity(S)
    if not target < pinf:
        return EtaStarReport(default, None, False, None, pinf,
                             f"no root: eps² = {target:.6e} ≥ Φ(∞) = {pinf:.6e}")
    lo_floor = max(S.resolved_threshold * 1e2, 1e-300)
    lo = target
    while phi(S, lo) >= target:
        lo *= 1e-2
        if lo < lo_floor:
            return EtaStarReport(default, None, False, None, pinf,
                                 f"no root: Φ ≥ eps² down to η = {lo_floor:.3e} (Φ constant or unresolved)")
    hi = target
    while phi(S, hi) < target:
        hi *= 1e2
        if hi > 1e300:
            return EtaStarReport(default, None, False, None, pinf, "no root below η = 1e300")
    a, b = math.log(lo), math.log(hi)
    for _ in range(200):
        if b - a <= rtol * max(1.0, abs(a)):
            break
        c = 0.5 * (a + b)
        if not a < c < b:
            break
        if phi(S, math.exp(c)) < target:
            a = c
        else:
            b = c
    root = math.exp(0.5 * (a + b))
    return EtaStarReport(default, certificate(S, root, eps), True, root / target, pinf)


__all__ = [
    "ContinuationSolution",
    "PrecisionFloorError",
    "solve_spectral",
    "solve_direct",
    "bound_M",
    "BoundReport",
    "bound_report",
    "eps_grid",
    "phi",
    "phi_infinity",
    "DualCertificate",
    "certificate",
    "EtaStarReport",
    "eta_star",
]
