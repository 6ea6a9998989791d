"""End-to-end pipelines: discretize → assemble → decompose → solve over ε-grids."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import asymptotics, spectral
from .continuation import (
    BoundReport,
    ContinuationSolution,
    EtaStarReport,
    bound_report,
    eta_star,
    solve_spectral,
)
from .geometry import SEGMENT, CurveDiscretization, CurveSpec, discretize
from .operators import OperatorMatrix, assemble_K, rhs_vector
from .quadrature import gauss_legendre
from .spectral import DecayFit, SpectralData


@dataclass(frozen=True)
class SpectralSetup:
    curve: CurveSpec
    disc: CurveDiscretization
    A: OperatorMatrix
    S: SpectralData

    def project(self, z: complex) -> SpectralData:
        z = complex(z)
        if self.curve.contains(z, 1e-12):
            raise ValueError(f"z = {z} lies on Γ")
        return spectral.project_rhs(self.S, rhs_vector(self.disc, z))


def setup(curve: CurveSpec, n: int, mode: str = "dd") -> SpectralSetup:
    disc = discretize(curve, gauss_legendre(n, mode))
    A = assemble_K(disc)
    return SpectralSetup(curve, disc, A, spectral.eigendecompose(A))


def normalized_h(curve: CurveSpec) -> float | None:
    """h/((b−a)/2) for a horizontal segment, the height after scaling to [−1,1]; else None."""
    if curve.kind != SEGMENT:
        return None
    return curve.h / ((curve.b - curve.a) / 2.0)


def normalized_z(curve: CurveSpec, z: complex) -> complex:
    """z in the coordinates where the segment is [−1,1] + ih'."""
    half = (curve.b - curve.a) / 2.0
    mid = (curve.b + curve.a) / 2.0
    return (complex(z) - mid) / half


@dataclass(frozen=True)
class SolveRecord:
    eps: float
    solution: ContinuationSolution
    report: BoundReport
    eta: EtaStarReport

    def as_dict(self) -> dict:
        sol, rep = self.solution, self.report
        return {
            "eps": self.eps,
            "z": [sol.z.real, sol.z.imag],
            "u_at_z": [sol.u_at_z.real, sol.u_at_z.imag],
            "norm_L2_Gamma": sol.norm_L2_Gamma,
            "norm_H2": sol.norm_H2,
            "M": sol.M_value,
            "branch_UB1": rep.branch_UB1,
            "branch_UB2": rep.branch_UB2,
            "eta_star_ratio": self.eta.ratio,
            "truncation_bound": sol.truncation_bound,
        }


def sweep(S: SpectralData, eps_list) -> list[SolveRecord]:
    out = []
    for e in eps_list:
        sol = solve_spectral(S, float(e))
        out.append(SolveRecord(float(e), sol, bound_report(sol), eta_star(S, float(e))))
    return out


@dataclass
class PowerLawResult:
    z: complex
    records: list[SolveRecord]
    fit: asymptotics.PowerLawFit
    decay: DecayFit | None
    predicted: float | None  # (β̂ − α̂)/α̂
    theta: float | None
    flags: list[str] = field(default_factory=list)

    @property
    def points(self) -> list[tuple[float, float]]:
        return [(r.eps, float(r.solution.M_value)) for r in self.records]


def powerlaw_study(su: SpectralSetup, z: complex, eps_list, with_theta: bool = True) -> PowerLawResult:
    S = su.project(z)
    recs = sweep(S, eps_list)
    fit = asymptotics.powerlaw_fit([(r.eps, float(r.solution.M_value)) for r in recs])
    flags = list(fit.flags)
    decay = pred = None
    try:
        decay = spectral.decay_fit(S)
        if decay.beta_hat is not None:
            pred = asymptotics.predicted_exponent(decay.alpha_hat, decay.beta_hat)
    except ValueError as exc:
        flags.append(f"decay fit unavailable: {exc}")
    theta = None
    hn = normalized_h(su.curve)
    if with_theta and hn is not None:
        theta = asymptotics.theta_exponent(normalized_z(su.curve, z), hn)
    return PowerLawResult(complex(z), recs, fit, decay, pred, theta, flags)


def rates_block(curve: CurveSpec, S: SpectralData | None = None) -> dict:
    """ln ρ_Γ, W, 2W, ρ₁ (and α̂ when spectra are given) for a segment curve."""
    out: dict = {"rho1": asymptotics.moebius_contraction(curve)}
    hn = normalized_h(curve)
    if hn is not None:
        ri = asymptotics.riemann_invariant(hn)
        W = asymptotics.widom_rate(hn)
        out.update({"h_normalized": hn, "m_param": ri.m_param, "tau": ri.tau,
                    "ln_rho_Gamma": ri.ln_rho, "W": W, "two_W": 2 * W})
    if S is not None:
        try:
            fit = spectral.decay_fit(S)
            out.update({"alpha_hat": fit.alpha_hat, "r2_alpha": fit.r2_alpha,
                        "fit_window": list(fit.window)})
        except ValueError:
            pass
        lam = S.lambdas_f64[: S.rank_cutoff]
        if len(lam) > 1:
            out["max_step_ratio"] = float(np.max(lam[1:] / lam[:-1]))
    return out


__all__ = [
    "SpectralSetup",
    "setup",
    "normalized_h",
    "normalized_z",
    "SolveRecord",
    "sweep",
    "PowerLawResult",
    "powerlaw_study",
    "rates_block",
]
