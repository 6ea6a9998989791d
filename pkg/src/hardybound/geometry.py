"""Constraint curves Γ, their discretization, and the half-strip transplant."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .quadrature import QuadratureRule, map_rule
from .xprec import DDReal, get_mode

SEGMENT = "segment_shifted"
POLYLINE = "polyline"
INTERVAL = "boundary_interval"


@dataclass(frozen=True)
class CurveSpec:
    """A left-to-right oriented curve.

    ``kind`` is one of ``segment_shifted`` ([a,b] + ih), ``polyline`` (through
    ``vertices``) or ``boundary_interval`` ([a,b] on the real axis).  Polylines
    are only piecewise C¹; quadrature accuracy at corners is not improved.
    """

    kind: str
    a: float = -1.0
    b: float = 1.0
    h: float = 0.0
    vertices: tuple[complex, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.kind == SEGMENT:
            if not self.h > 0:
                raise ValueError("shifted segment needs h > 0")
            if not self.b > self.a:
                raise ValueError("segment needs a < b")
        elif self.kind == INTERVAL:
            if not self.b > self.a:
                raise ValueError("interval needs a < b")
        elif self.kind == POLYLINE:
            v = tuple(complex(p) for p in self.vertices)
            object.__setattr__(self, "vertices", v)
            if len(v) < 2:
                raise ValueError("polyline needs at least two vertices")
            if any(p.imag <= 0 for p in v):
                raise ValueError("polyline vertices must lie in the open upper half-plane")
            if any(abs(q - p) == 0 for p, q in zip(v, v[1:])):
                raise ValueError("polyline has a zero-length leg")
        else:
            raise ValueError(f"unknown curve kind {self.kind!r}")

    @classmethod
    def segment(cls, a: float, b: float, h: float) -> "CurveSpec":
        return cls(SEGMENT, float(a), float(b), float(h))

    @classmethod
    def interval(cls, a: float, b: float) -> "CurveSpec":
        return cls(INTERVAL, float(a), float(b))

    @classmethod
    def polyline(cls, vertices) -> "CurveSpec":
        return cls(POLYLINE, vertices=tuple(complex(v) for v in vertices))

    @property
    def is_interior(self) -> bool:
        return self.kind != INTERVAL

    def length(self) -> float:
        if self.kind == POLYLINE:
            v = np.array(self.vertices)
            return float(np.abs(np.diff(v)).sum())
        return self.b - self.a

    def contains(self, z: complex, tol: float = 1e-14) -> bool:
        """Whether the point z lies on the curve (within ``tol``)."""
        z = complex(z)
        if self.kind == POLYLINE:
            v = self.vertices
            for p, q in zip(v, v[1:]):
                d = q - p
                s = ((z - p) * d.conjugate()).real / abs(d) ** 2
                if -tol <= s <= 1 + tol and abs(z - (p + min(max(s, 0), 1) * d)) <= tol:
                    return True
            return False
        y = self.h if self.kind == SEGMENT else 0.0
        return abs(z.imag - y) <= tol and self.a - tol <= z.real <= self.b + tol

    def literal(self) -> str:
        if self.kind == SEGMENT:
            return f"segment:{self.a!r},{self.b!r}@h={self.h!r}"
        if self.kind == INTERVAL:
            return f"interval:{self.a!r},{self.b!r}"
        pts = ",".join(f"({p.real!r},{p.imag!r})" for p in self.vertices)
        return f"polyline:{pts}"


_NUM = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"


def parse_curve(text: str) -> CurveSpec:
    """Parse a curve literal such as ``segment:-1,1@h=0.5``, ``interval:-1,1``
    or ``polyline:(-1,1),(0,2),(1,1)``.  Dot is the only decimal separator."""
    s = text.strip().replace(" ", "")
    m = re.fullmatch(rf"segment:({_NUM}),({_NUM})@h=({_NUM})", s)
    if m:
        return CurveSpec.segment(float(m[1]), float(m[2]), float(m[3]))
    m = re.fullmatch(rf"interval:({_NUM}),({_NUM})", s)
    if m:
        return CurveSpec.interval(float(m[1]), float(m[2]))
    if s.startswith("polyline:"):
        body = s[len("polyline:") :]
        pair = rf"\(({_NUM}),({_NUM})\)"
        if re.fullmatch(rf"{pair}(?:,{pair})*", body):
            pts = [complex(float(x), float(y)) for x, y in re.findall(pair, body)]
            return CurveSpec.polyline(pts)
    raise ValueError(f"cannot parse curve literal {text!r}")


@dataclass(frozen=True)
class CurveDiscretization:
    """Quadrature points τⱼ on Γ with arc-length weights wⱼ (mode arrays)."""

    curve: CurveSpec
    points: Any
    arc_weights: Any
    source_rule: QuadratureRule
    mode: str

    @property
    def n(self) -> int:
        return len(self.arc_weights)

    @property
    def points_c128(self) -> np.ndarray:
        return get_mode(self.mode).to_complex(self.points)

    @property
    def weights_f64(self) -> np.ndarray:
        return np.asarray(get_mode(self.mode).to_float(self.arc_weights), dtype=float)

    def same_as(self, other: "CurveDiscretization") -> bool:
        return (
            other is self
            or (
                self.curve == other.curve
                and self.mode == other.mode
                and self.n == other.n
                and np.array_equal(self.points_c128, other.points_c128)
            )
        )


def discretize(curve: CurveSpec, rule: QuadratureRule) -> CurveDiscretization:
    """Map a rule on [-1,1] onto Γ (per leg for polylines)."""
    m = get_mode(rule.mode)
    if curve.length() <= 0:
        raise ValueError("degenerate curve of zero length")
    if curve.kind in (SEGMENT, INTERVAL):
        x, w = map_rule(rule, curve.a, curve.b)
        y = np.full(np.shape(m.to_float(x)), curve.h if curve.kind == SEGMENT else 0.0)
        pts = m.complex(x, y)
        return CurveDiscretization(curve, pts, w, rule, m.name)
    xs, ys, ws = [], [], []
    for p, q in zip(curve.vertices, curve.vertices[1:]):
        dre, dim = m.real(q.real) - p.real, m.real(q.imag) - p.imag
        length = m.sqrt(dre * dre + dim * dim)
        xs.append(_leg(m, rule.nodes, p.real, q.real))
        ys.append(_leg(m, rule.nodes, p.imag, q.imag))
        ws.append(rule.weights * (length * 0.5))
    pts = m.complex(_cat(m, xs), _cat(m, ys))
    return CurveDiscretization(curve, pts, _cat(m, ws), rule, m.name)


def _leg(m, s, p: float, q: float):
    # p + (s+1)(q-p)/2 evaluated with the difference formed in the mode
    d = m.real(q) - p
    return (s + 1.0) * (d * 0.5) + p


def _cat(m, parts):
    if m.is_dd():
        return DDReal._raw(
            np.concatenate([np.atleast_1d(p.hi) for p in parts]),
            np.concatenate([np.atleast_1d(p.lo) for p in parts]),
        )
    return np.concatenate(parts)


# --------------------------------------------------------------------------
# half-strip transplant
# --------------------------------------------------------------------------


def halfstrip_map(z):
    """Conformal map of the half-strip {Re z > 0, |Im z| < 1} onto ℍ₊.

    ζ = i·sinh(πz/2).  The segment [-i, i] goes onto [-1, 1] with i ↦ -1 and
    -i ↦ 1 (orientation forced by conformality); the positive real axis goes
    onto the positive imaginary axis.
    """
    return 1j * np.sinh(np.pi * np.asarray(z, dtype=complex) / 2.0)


def halfstrip_exponent(x):
    """γ(x) = (2/π)·arccot(sinh(πx/2)) for x > 0, with arccot(y) = arctan(1/y)."""
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ValueError("halfstrip_exponent needs x > 0")
    return (2.0 / np.pi) * np.arctan(1.0 / np.sinh(np.pi * x / 2.0))
