"""Nyström matrices of the operator 𝒦 on Γ and the right-hand side p_z."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from .geometry import CurveDiscretization, CurveSpec, discretize
from .quadrature import QuadratureRule
from .xprec import DDComplex, DDReal, get_mode

PLAIN = "plain"
SQRT_WEIGHT = "sqrt_weight"


@dataclass(frozen=True)
class OperatorMatrix:
    """Dense Nyström matrix of 𝒦 (complex, mode arrays).

    ``sqrt_weight`` entries are √wⱼ·k(τⱼ,τₖ)·√wₖ (Hermitian); ``plain``
    entries are k(τⱼ,τₖ)·wₖ, the matrix acting on node values.
    """

    entries: Any
    symmetrization: str
    curve: CurveDiscretization

    @property
    def dim(self) -> int:
        return self.curve.n

    @property
    def mode(self) -> str:
        return self.curve.mode

    def to_complex(self) -> np.ndarray:
        return get_mode(self.mode).to_complex(self.entries)


@dataclass(frozen=True)
class RHSVector:
    """Values p_z(τⱼ) = i/(τⱼ − z̄) at the nodes (optionally √w-scaled)."""

    values: Any
    z: complex
    curve: CurveDiscretization
    scaled: bool


def _kernel_denominator(disc: CurveDiscretization):
    """Matrix τⱼ − conj(τₖ) in the mode of the discretization."""
    t = disc.points
    if isinstance(t, DDComplex):
        re = t.re.reshape(-1, 1) - t.re.reshape(1, -1)
        im = t.im.reshape(-1, 1) + t.im.reshape(1, -1)
        return DDComplex(re, im)
    return t[:, None] - np.conj(t)[None, :]


def _check_interior(disc: CurveDiscretization) -> None:
    if not disc.curve.is_interior:
        raise ValueError("𝒦 on Γ needs an interior curve; use the boundary module for Γ ⊂ ℝ")
    im = get_mode(disc.mode).to_complex(disc.points).imag
    if np.any(im <= 0):
        raise ValueError("node on or below the real axis: τⱼ = conj(τₖ) possible")


def assemble_K(disc: CurveDiscretization, symmetrization: str = SQRT_WEIGHT) -> OperatorMatrix:
    """Assemble 𝒦 with kernel i/(2π(τ − conj τ′)) on the nodes of ``disc``."""
    _check_interior(disc)
    m = get_mode(disc.mode)
    den = _kernel_denominator(disc)
    two_pi = m.pi * 2.0
    if m.is_dd():
        # i/(2π d) = (d.im + i d.re)/(2π |d|²)
        scale = two_pi * den.abs2()
        kern = DDComplex(den.im / scale, den.re / scale)
    else:
        kern = 1j / (two_pi * den)
    w = disc.arc_weights
    if symmetrization == SQRT_WEIGHT:
        sw = m.sqrt(w)
        entries = kern * (sw.reshape(-1, 1) * sw.reshape(1, -1))
        entries = _hermitize(entries)
    elif symmetrization == PLAIN:
        entries = kern * w.reshape(1, -1)
    else:
        raise ValueError(f"unknown symmetrization {symmetrization!r}")
    return OperatorMatrix(entries, symmetrization, disc)


def _hermitize(A):
    """Copy the upper triangle onto the lower one so that A = A* exactly."""
    n = A.shape[0]
    iu = np.triu_indices(n, 1)
    il = (iu[1], iu[0])
    if isinstance(A, DDComplex):
        A = A.copy()
        for part, sign in ((A.re, 1.0), (A.im, -1.0)):
            part.hi[il] = sign * part.hi[iu]
            part.lo[il] = sign * part.lo[iu]
        d = np.arange(n)
        A.im.hi[d, d] = 0.0
        A.im.lo[d, d] = 0.0
        return A
    A = A.copy()
    A[il] = np.conj(A[iu])
    A[np.diag_indices(n)] = A.diagonal().real
    return A


def displacement_residual(A: OperatorMatrix) -> float:
    """‖M·A − A·M* − R‖_F with M = diag(τⱼ) and Rⱼₖ = i·wₖ/(2π) (plain form)."""
    if A.symmetrization != PLAIN:
        raise ValueError("displacement residual is defined for the plain form")
    disc = A.curve
    m = get_mode(disc.mode)
    t = disc.points
    K = A.entries
    if m.is_dd():
        lhs = K * (t.reshape(-1, 1) - t.conj().reshape(1, -1))
        R = DDComplex(DDReal.zeros((disc.n, disc.n)), disc.arc_weights.reshape(1, -1) / (m.pi * 2.0))
        D = lhs - R
        return float(np.sqrt(D.abs2().sum().to_float()))
    lhs = t[:, None] * K - K * np.conj(t)[None, :]
    R = np.broadcast_to(1j * disc.arc_weights[None, :] / (2 * np.pi), K.shape)
    return float(np.linalg.norm(lhs - R))


def displacement_rhs_norm(A: OperatorMatrix) -> float:
    """‖R‖_F of the displacement identity (for relative residuals)."""
    w = A.curve.weights_f64
    return float(np.sqrt(len(w) * np.sum(w**2)) / (2 * np.pi))


def assemble_Kh_boundary(a: float, b: float, h: float, rule: QuadratureRule,
                         symmetrization: str = SQRT_WEIGHT) -> OperatorMatrix:
    """Nyström matrix of 𝒦_h v(x) = (1/2π)∫ i v(y)/(x − y + 2ih) dy on (a, b).

    The kernel equals the interior kernel on [a,b] + ih, so this is that
    operator expressed in the real variable.
    """
    if not h > 0:
        raise ValueError("h must be positive; the h = 0 operator lives in the boundary module")
    return assemble_K(discretize(CurveSpec.segment(a, b, h), rule), symmetrization)


def rhs_vector(disc: CurveDiscretization, z: complex, scaled: bool = True) -> RHSVector:
    """p_z(τⱼ) = i/(τⱼ − z̄), multiplied by √wⱼ when ``scaled``."""
    z = complex(z)
    if not z.imag > 0:
        raise ValueError("extrapolation point must satisfy Im z > 0")
    m = get_mode(disc.mode)
    t = disc.points
    if m.is_dd():
        dre = t.re - z.real
        dim = t.im + z.imag
        den = dre * dre + dim * dim
        vals = DDComplex(dim / den, dre / den)  # i/(dre + i dim)
    else:
        vals = 1j / (t - np.conj(z))
    if scaled:
        vals = vals * m.sqrt(disc.arc_weights)
    return RHSVector(vals, z, disc, scaled)


def p_z(zeta, z: complex):
    """p_z(ζ) = i/(ζ − z̄) in binary64."""
    return 1j / (np.asarray(zeta, dtype=complex) - np.conj(complex(z)))


def nystrom_extend(disc: CurveDiscretization, node_values, points):
    """(𝒦v)(ζ) = (1/2π) Σₖ wₖ·i/(ζ − conj τₖ)·v(τₖ) at arbitrary ζ (mode arithmetic).

    ``node_values`` are plain (unscaled) values v(τₖ).
    """
    m = get_mode(disc.mode)
    pts = np.atleast_1d(np.asarray(points, dtype=complex))
    t = disc.points
    if m.is_dd():
        dre = t.re.reshape(1, -1) * -1.0 + pts.real.reshape(-1, 1)
        dim = t.im.reshape(1, -1) + pts.imag.reshape(-1, 1)
        den = (dre * dre + dim * dim) * (m.pi * 2.0)
        kern = DDComplex(dim / den, dre / den)
        terms = kern * (node_values * disc.arc_weights).reshape(1, -1)
        return terms.sum(axis=1)
    kern = 1j / (2 * np.pi * (pts[:, None] - np.conj(t)[None, :]))
    return kern @ (disc.arc_weights * node_values)
