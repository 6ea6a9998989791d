"""Quadrature rules: Gauss-Legendre at arbitrary order and a tanh-substitution rule."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Any

import numpy as np

from .xprec import DD, DDReal, Mode, get_mode

MAX_ORDER = 2048
_NEWTON_BUDGET = 12


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and weights on (-1, 1) in a given scalar mode.

    ``nodes``/``weights`` are numpy float arrays (f64 mode) or :class:`DDReal`
    arrays (dd mode).  ``kind`` is ``"gauss"`` or ``"tanh"``; tanh rules also
    carry the substitution variable ``t`` (with ``x = tanh t``) and the step.
    """

    order: int
    nodes: Any
    weights: Any
    mode: str
    kind: str = "gauss"
    t: np.ndarray | None = None
    step: float | None = None

    @property
    def nodes_f64(self) -> np.ndarray:
        return get_mode(self.mode).to_float(self.nodes)

    @property
    def weights_f64(self) -> np.ndarray:
        return get_mode(self.mode).to_float(self.weights)

    def integrate(self, values):
        """Σ wᵢ fᵢ for node values ``values`` (mode of the rule)."""
        m = get_mode(self.mode)
        return m.sum(self.weights * values)


class QuadratureError(RuntimeError):
    pass


def _legendre_dd(n: int, x: DDReal):
    """P_n(x) and P_n'(x) by the three-term recurrence in double-double."""
    p0 = DDReal(np.ones(x.shape))
    p1 = x
    for k in range(2, n + 1):
        p0, p1 = p1, (x * p1 * (2 * k - 1) - p0 * (k - 1)) / float(k)
    dp = (x * p1 - p0) * float(n) / (x * x - 1.0)
    return p1, dp


def _legendre_f64(n: int, x: np.ndarray):
    p0 = np.ones_like(x)
    p1 = x.copy()
    for k in range(2, n + 1):
        p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
    dp = n * (x * p1 - p0) / (x * x - 1.0)
    return p1, dp


@lru_cache(maxsize=64)
def _gauss_dd(n: int) -> tuple[DDReal, DDReal]:
    # positive half of the nodes (including 0 for odd n), largest first
    m = (n + 1) // 2
    i = np.arange(1, m + 1)
    x0 = np.cos(np.pi * (i - 0.25) / (n + 0.5))  # Chebyshev-type initial guesses
    # a few binary64 Newton steps make the double-double refinement cheap
    for _ in range(6):
        p, dp = _legendre_f64(n, x0)
        x0 = x0 - p / dp
    if n % 2:
        x0[-1] = 0.0
    x = DDReal(x0)
    done = np.zeros(m, dtype=bool)
    tol = 2.0**-100
    for _ in range(_NEWTON_BUDGET):
        p, dp = _legendre_dd(n, x)
        dx = p / dp
        x = x - dx
        small = np.abs(dx.hi) <= tol * np.maximum(np.abs(x.hi), 1e-300)
        done = done | small | (x.hi == 0)
        if done.all():
            break
    else:
        bad = int(np.flatnonzero(~done)[0])
        raise QuadratureError(
            f"Gauss-Legendre root refinement did not converge for node index {bad} (order {n})"
        )
    _, dp = _legendre_dd(n, x)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    return x, w


@lru_cache(maxsize=64)
def _gauss_rule(n: int, mode_name: str) -> QuadratureRule:
    xp, wp = _gauss_dd(n)
    m = len(xp)
    # assemble increasing nodes: negatives of the positive half, then the half
    order = np.arange(m)
    if n % 2:
        neg = -(xp[order[:-1]])
        nodes = _dd_concat([neg, xp[order[::-1]]])
        weights = _dd_concat([wp[order[:-1]], wp[order[::-1]]])
    else:
        nodes = _dd_concat([-xp, xp[order[::-1]]])
        weights = _dd_concat([wp, wp[order[::-1]]])
    if mode_name == "f64":
        return QuadratureRule(n, nodes.to_float(), weights.to_float(), "f64")
    return QuadratureRule(n, nodes, weights, "dd")


def _dd_concat(parts):
    return DDReal._raw(
        np.concatenate([np.atleast_1d(p.hi) for p in parts]),
        np.concatenate([np.atleast_1d(p.lo) for p in parts]),
    )


def gauss_legendre(n: int, mode: Mode | str = DD) -> QuadratureRule:
    """N-point Gauss-Legendre rule on [-1, 1].

    Roots are always refined in double-double; binary64 rules are rounded
    from the refined values.
    """
    n = int(n)
    if not 1 <= n <= MAX_ORDER:
        raise ValueError(f"Gauss-Legendre order must be in [1, {MAX_ORDER}], got {n}")
    return _gauss_rule(n, get_mode(mode).name)


def map_rule(rule: QuadratureRule, a: float, b: float):
    """Affine image of a rule on [-1,1] onto [a, b]: returns (nodes, weights)."""
    half = (b - a) / 2.0
    mid = (b + a) / 2.0
    return rule.nodes * half + mid, rule.weights * half


def tanh_rule(n: int, step: float | None = None, mode: Mode | str = "f64") -> QuadratureRule:
    """Trapezoid rule in t with x = tanh t on (-1, 1).

    ``n`` equally spaced points ``t_k = (k − (n−1)/2)·step`` symmetric about 0
    (the lattice contains 0 for odd n and is shifted by step/2 for even n),
    weights ``step·sech²t``.  Exponentially accurate for integrands analytic in
    a strip around the t-line that decay at t → ±∞; the endpoint clustering
    makes it the natural rule for functions with logarithmic behaviour at ±1.
    """
    n = int(n)
    if n < 1:
        raise ValueError("tanh rule needs a positive number of points")
    half = (n - 1) / 2.0
    if step is None:
        # balance discretization error exp(-π²/step) against truncation exp(-2T)
        step = np.pi / np.sqrt(2.0 * max(half, 1))
    t = step * (np.arange(n, dtype=np.float64) - half)
    m = get_mode(mode)
    if m.is_dd():
        raise ValueError("tanh rule is provided in binary64 mode only")
    x = np.tanh(t)
    w = step / np.cosh(t) ** 2
    return QuadratureRule(n, x, w, m.name, kind="tanh", t=t, step=float(step))
