"""Eigen-decomposition of the discretized 𝒦, projections π_n of p_z, decay fits."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Any

import numpy as np

from .linalg import jacobi_eigh
from .operators import SQRT_WEIGHT, OperatorMatrix, RHSVector
from .xprec import DDComplex, DDReal, get_mode

# eigenvalues below NOISE_FACTOR × noise floor are treated as unresolved
NOISE_FACTOR = 10.0


@dataclass(frozen=True)
class SpectralData:
    """Eigenpairs of 𝒦 (descending) and, after projection, π_n = (p_z, e_n)_{L²(Γ)}.

    ``vectors`` holds √w-scaled node samples of the orthonormal eigenfunctions
    as columns.  ``rank_cutoff`` is the number of eigenvalues above
    ``NOISE_FACTOR·noise_floor``; later entries are rounding artifacts.

    ``tail_mass`` T = π/Im z − Σ_{n≤cutoff}|π_n|²/λ_n is the part of the sum
    rule carried by unresolved modes; ``tail_proj`` P = Σ_{n>cutoff}|π_n|² is
    the L²(Γ) mass of p_z outside the resolved eigenspace.
    """

    lambdas: Any
    vectors: Any
    mode: str
    rank_cutoff: int
    noise_floor: float
    matrix_norm: float
    curve: Any = None
    sweeps: int = 0
    pis: Any = None
    z: complex | None = None
    tail_mass: float = 0.0
    tail_proj: float = 0.0

    @property
    def n(self) -> int:
        return len(self.lambdas)

    @property
    def lambdas_f64(self) -> np.ndarray:
        return np.asarray(get_mode(self.mode).to_float(self.lambdas), dtype=float)

    @property
    def pis_c128(self) -> np.ndarray:
        return np.asarray(get_mode(self.mode).to_complex(self.pis), dtype=complex)

    @property
    def resolved_threshold(self) -> float:
        return NOISE_FACTOR * self.noise_floor

    def abs_pi_sq(self):
        """|π_n|² in the mode of the data."""
        return get_mode(self.mode).abs2(self.pis)

    @classmethod
    def synthetic(cls, lambdas, pis, mode: str = "f64", z: complex | None = None) -> "SpectralData":
        """Spectral data from given λ_n and π_n (no eigenvectors, no tail)."""
        m = get_mode(mode)
        lam = m.real(np.asarray(lambdas, dtype=float)) if not isinstance(lambdas, DDReal) else lambdas
        pi = m.complex(np.asarray(pis, dtype=complex)) if not isinstance(pis, DDComplex) else pis
        return cls(lam, None, m.name, len(np.atleast_1d(m.to_float(lam))), 0.0,
                   float(np.max(np.abs(m.to_float(lam)))), pis=pi, z=z)


def noise_floor(n: int, matrix_norm: float, mode) -> float:
    """Absolute rounding level of computed eigenvalues: n·u·‖A‖."""
    return n * get_mode(mode).unit_roundoff * matrix_norm


def eigendecompose(A: OperatorMatrix, max_sweeps: int = 60) -> SpectralData:
    """Jacobi eigen-decomposition of the Hermitian (√w-scaled) Nyström matrix."""
    if A.symmetrization != SQRT_WEIGHT:
        raise ValueError("eigendecompose needs the Hermitian sqrt_weight form")
    res = jacobi_eigh(A.entries, A.mode, max_sweeps=max_sweeps)
    lam_f = np.asarray(get_mode(A.mode).to_float(res.eigenvalues), dtype=float)
    norm2 = float(abs(lam_f[0])) if len(lam_f) else 0.0
    floor = noise_floor(len(lam_f), norm2, A.mode)
    below = np.flatnonzero(lam_f < NOISE_FACTOR * floor)
    cutoff = int(below[0]) if below.size else len(lam_f)
    return SpectralData(res.eigenvalues, res.eigenvectors, A.mode, cutoff, floor, norm2,
                        curve=A.curve, sweeps=res.sweeps)


def project_rhs(S: SpectralData, p: RHSVector) -> SpectralData:
    """Attach π_n = Σⱼ √wⱼ p_z(τⱼ) conj(e_n(τⱼ)√wⱼ) to the spectral data."""
    if S.curve is None or not S.curve.same_as(p.curve):
        raise ValueError("right-hand side was assembled on a different discretization")
    if not p.scaled:
        raise ValueError("projection needs the √w-scaled right-hand side")
    m = get_mode(S.mode)
    V = S.vectors
    if m.is_dd():
        pis = (V.conj() * p.values.reshape(-1, 1)).sum(axis=0)
    else:
        pis = V.conj().T @ p.values
    M = S.rank_cutoff
    abs2 = m.to_float(m.abs2(pis))
    # tail of the sum rule, formed in the mode to avoid cancellation
    tail = m.pi / p.z.imag
    if M:
        tail = tail - m.sum(m.abs2(pis[:M]) / S.lambdas[:M])
    tail = max(float(m.to_float(tail)), 0.0)
    tail_proj = float(np.sum(abs2[M:]))
    return dataclasses.replace(S, pis=pis, z=p.z, tail_mass=tail, tail_proj=tail_proj)


def sum_rule_partial_sums(S: SpectralData) -> np.ndarray:
    """Σ_{n≤k} |π_n|²/λ_n for k = 1..rank_cutoff (binary64)."""
    m = get_mode(S.mode)
    M = S.rank_cutoff
    terms = m.abs2(S.pis[:M]) / S.lambdas[:M]
    if m.is_dd():
        # cumulative sums in double-double, reported in binary64
        out = np.empty(M)
        acc = DDReal(0.0)
        for k in range(M):
            acc = acc + terms[k]
            out[k] = float(acc)
        return out
    return np.cumsum(terms)


def sum_rule_tail_bound(S: SpectralData, last: int = 6) -> float:
    """Bound on the gap π/Im z − Σ_{n≤cutoff} |π_n|²/λ_n.

    Geometric tail: the largest ratio of consecutive terms among the last
    ``last`` resolved terms is used as the ratio of a dominating series.
    Rounding: each computed λ_n carries an absolute error up to the noise
    floor, so the partial sum is uncertain by Σ (|π_n|²/λ_n)·floor/λ_n.
    """
    M = S.rank_cutoff
    lam = S.lambdas_f64[:M]
    terms = np.abs(S.pis_c128[:M]) ** 2 / lam
    k = min(last, M - 1)
    if k < 1:
        return float("inf")
    ratios = terms[M - k:] / terms[M - k - 1:M - 1]
    r = float(np.max(ratios))
    if r >= 1:
        return float("inf")
    rounding = float(np.sum(terms * S.noise_floor / lam))
    return float(terms[-1] * r / (1 - r)) + rounding


def eigenfunction_at(S: SpectralData, k: int, z: complex):
    """Nyström extension e_k(z) = (1/λ_k) Σⱼ √wⱼ·i/(2π(z − conj τⱼ))·v_k[j] (k 0-based)."""
    m = get_mode(S.mode)
    disc = S.curve
    sw = m.sqrt(disc.arc_weights)
    t = disc.points
    z = complex(z)
    if m.is_dd():
        dre = t.re * -1.0 + z.real
        dim = t.im + z.imag
        den = (dre * dre + dim * dim) * (m.pi * 2.0)
        kern = DDComplex(dim / den, dre / den)
        return (kern * sw * S.vectors[:, k]).sum() / S.lambdas[k]
    kern = 1j / (2 * np.pi * (z - np.conj(t)))
    return np.sum(kern * sw * S.vectors[:, k]) / S.lambdas[k]


def orthonormality_error(S: SpectralData, upto: int | None = None) -> float:
    """max |⟨vᵢ, vⱼ⟩ − δᵢⱼ| over the first ``upto`` eigenvectors."""
    m = get_mode(S.mode)
    k = S.rank_cutoff if upto is None else upto
    V = S.vectors[:, :k]
    if m.is_dd():
        from .xprec import matmul

        G = matmul(V.conj().T, V).to_complex()
    else:
        G = V.conj().T @ V
    return float(np.max(np.abs(G - np.eye(k)))) if k else 0.0


@dataclass(frozen=True)
class DecayFit:
    """Least-squares slopes: ln λ_n ≈ c₁ − α̂n and ln|π_n|² ≈ c₂ − β̂n."""

    alpha_hat: float
    beta_hat: float | None
    r2_alpha: float
    r2_beta: float | None
    window: tuple[int, int]
    admissible: bool | None  # α̂ < β̂ < 2α̂
    flags: tuple[str, ...] = ()


def _linfit(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(intercept), r2


def default_window(S: SpectralData) -> tuple[int, int]:
    return (5, S.rank_cutoff - 3)


def decay_fit(S: SpectralData, window: tuple[int, int] | None = None) -> DecayFit:
    """Fit exponential decay rates on 1-based indices ``window = (first, last)``."""
    lo, hi = default_window(S) if window is None else window
    if lo < 2 and window is not None:
        raise ValueError("fit window must start at n ≥ 2")
    if hi > S.rank_cutoff:
        raise ValueError(f"fit window end {hi} exceeds rank cutoff {S.rank_cutoff}")
    if hi - lo + 1 < 8:
        raise ValueError(f"fit window [{lo}, {hi}] shorter than 8 points")
    n = np.arange(lo, hi + 1, dtype=float)
    lam = S.lambdas_f64[lo - 1:hi]
    flags = []
    if np.any(lam <= 0):
        raise ValueError("non-positive eigenvalue inside fit window")
    slope, _, r2a = _linfit(n, np.log(lam))
    alpha = -slope
    if alpha <= 0:
        flags.append("non-positive alpha")
    beta = r2b = adm = None
    if S.pis is not None:
        a2 = np.abs(S.pis_c128[lo - 1:hi]) ** 2
        if np.all(a2 > 0):
            sb, _, r2b = _linfit(n, np.log(a2))
            beta = -sb
            if beta <= 0:
                flags.append("non-positive beta")
            adm = bool(alpha < beta < 2 * alpha)
    return DecayFit(alpha, beta, r2a, r2b, (lo, hi), adm, tuple(flags))


def switchover_index(S: SpectralData, eps: float) -> int:
    """J(ε): the number of eigenvalues with λ_n ≥ ε² (so λ_J ≥ ε² > λ_{J+1})."""
    lam = S.lambdas_f64[: S.rank_cutoff]
    return int(np.sum(lam >= eps**2))


def spectrum_rows(S: SpectralData) -> list[dict]:
    """Per-eigenvalue records for tabular output (all n, resolved or not)."""
    m = get_mode(S.mode)
    rows = []
    for k in range(S.n):
        lam = S.lambdas[k]
        lf = float(m.to_float(lam))
        row = {"n": k + 1, "lambda": lam, "ln_lambda": np.log(lf) if lf > 0 else float("nan")}
        if S.pis is not None:
            pi = S.pis[k]
            row["re_pi"] = pi.real
            row["im_pi"] = pi.imag
            row["abs_pi_sq"] = m.abs2(pi)
        rows.append(row)
    return rows


__all__ = [
    "SpectralData",
    "DecayFit",
    "eigendecompose",
    "project_rhs",
    "decay_fit",
    "default_window",
    "sum_rule_partial_sums",
    "sum_rule_tail_bound",
    "eigenfunction_at",
    "orthonormality_error",
    "switchover_index",
    "spectrum_rows",
    "noise_floor",
]
