"""Double-word ("double-double") real and complex arithmetic on numpy arrays.

A value is represented as an unevaluated sum ``hi + lo`` of two binary64
numbers with ``|lo| <= ulp(hi)/2``, giving roughly 31 significant decimal
digits.  All operations are vectorized: ``hi`` and ``lo`` are numpy arrays
of identical shape (0-d arrays for scalars).

The module also defines the two scalar *modes* used by every numeric kernel
in the package: ``F64`` (plain numpy binary64) and ``DD`` (this module's
types).  Kernels are written once against the small :class:`Mode` interface.
"""

from __future__ import annotations

import decimal
from dataclasses import dataclass
from typing import Any, Callable

import numpy as np

_SPLITTER = 134217729.0  # 2**27 + 1

# --------------------------------------------------------------------------
# error-free transforms on binary64 arrays
# --------------------------------------------------------------------------


def two_sum(a, b):
    """Return ``(s, e)`` with ``s = fl(a+b)`` and ``a + b = s + e`` exactly."""
    s = a + b
    bb = s - a
    e = (a - (s - bb)) + (b - bb)
    return s, e


def quick_two_sum(a, b):
    """Two-sum assuming ``|a| >= |b|`` (or ``a == 0``)."""
    s = a + b
    e = b - (s - a)
    return s, e


def split(a):
    """Dekker split of ``a`` into two 26-bit halves."""
    t = _SPLITTER * a
    hi = t - (t - a)
    return hi, a - hi


def two_prod(a, b):
    """Return ``(p, e)`` with ``p = fl(a*b)`` and ``a * b = p + e`` exactly."""
    p = a * b
    ah, al = split(a)
    bh, bl = split(b)
    e = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, e


def _f64(x) -> np.ndarray:
    return np.asarray(x, dtype=np.float64)


# --------------------------------------------------------------------------
# DDReal
# --------------------------------------------------------------------------


class DDReal:
    """Array of double-double real numbers."""

    __slots__ = ("hi", "lo")
    __array_priority__ = 1000  # make numpy defer to our reflected operators

    def __init__(self, hi, lo=None, *, normalize: bool = True):
        hi = _f64(hi)
        if lo is None:
            self.hi, self.lo = hi, np.zeros_like(hi)
            return
        lo = _f64(lo)
        if normalize:
            hi, lo = two_sum(hi, lo)
        self.hi, self.lo = np.broadcast_arrays(hi, lo)
        if self.hi.base is not None or self.lo.base is not None:
            self.hi, self.lo = self.hi.copy(), self.lo.copy()

    # -- construction helpers ------------------------------------------
    @classmethod
    def _raw(cls, hi, lo) -> "DDReal":
        obj = cls.__new__(cls)
        obj.hi, obj.lo = hi, lo
        return obj

    @classmethod
    def from_string(cls, text) -> "DDReal":
        """Parse a decimal string (or array of strings) to the nearest double-double."""
        arr = np.asarray(text, dtype=object)
        hi = np.empty(arr.shape)
        lo = np.empty(arr.shape)
        with decimal.localcontext() as ctx:
            ctx.prec = 80
            for idx, s in np.ndenumerate(arr):
                d = decimal.Decimal(str(s).strip())
                h = float(d)
                if not np.isfinite(h):
                    hi[idx], lo[idx] = h, 0.0
                    continue
                lo_d = float(d - decimal.Decimal(h))
                hi[idx], lo[idx] = quick_two_sum(h, lo_d)
        return cls._raw(hi, lo)

    @classmethod
    def zeros(cls, shape) -> "DDReal":
        return cls._raw(np.zeros(shape), np.zeros(shape))

    # -- array protocol --------------------------------------------------
    @property
    def shape(self):
        return self.hi.shape

    @property
    def ndim(self):
        return self.hi.ndim

    @property
    def size(self):
        return self.hi.size

    def __len__(self):
        return len(self.hi)

    def __getitem__(self, key) -> "DDReal":
        return DDReal._raw(self.hi[key], self.lo[key])

    def __setitem__(self, key, value) -> None:
        v = as_ddreal(value)
        self.hi[key] = v.hi
        self.lo[key] = v.lo

    def copy(self) -> "DDReal":
        return DDReal._raw(self.hi.copy(), self.lo.copy())

    def reshape(self, *shape) -> "DDReal":
        return DDReal._raw(self.hi.reshape(*shape), self.lo.reshape(*shape))

    @property
    def T(self) -> "DDReal":
        return DDReal._raw(self.hi.T, self.lo.T)

    def __iter__(self):
        for k in range(len(self)):
            yield self[k]

    # -- conversions -----------------------------------------------------
    def to_float(self) -> np.ndarray:
        return self.hi + self.lo

    def __float__(self) -> float:
        return float(self.hi + self.lo)

    def to_strings(self, digits: int = 33) -> np.ndarray:
        return np.vectorize(lambda h, l: format_dd(h, l, digits), otypes=[object])(
            self.hi, self.lo
        )

    def __repr__(self) -> str:
        if self.ndim == 0:
            return f"DDReal({format_dd(float(self.hi), float(self.lo))})"
        return f"DDReal(shape={self.shape}, hi={self.hi!r})"

    @property
    def real(self) -> "DDReal":
        return self

    @property
    def imag(self) -> "DDReal":
        return DDReal.zeros(self.shape)

    def conj(self) -> "DDReal":
        return self

    # -- arithmetic ------------------------------------------------------
    def __neg__(self) -> "DDReal":
        return DDReal._raw(-self.hi, -self.lo)

    def __pos__(self) -> "DDReal":
        return self

    def __abs__(self) -> "DDReal":
        neg = self.hi < 0
        return DDReal._raw(np.where(neg, -self.hi, self.hi), np.where(neg, -self.lo, self.lo))

    def __add__(self, other):
        if isinstance(other, DDComplex):
            return NotImplemented
        if isinstance(other, DDReal):
            return _add(self, other)
        if np.iscomplexobj(other):
            return DDComplex(self, DDReal.zeros(self.shape)) + other
        return _add_d(self, _f64(other))

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, DDComplex):
            return NotImplemented
        if isinstance(other, DDReal):
            return _add(self, -other)
        if np.iscomplexobj(other):
            return DDComplex(self, DDReal.zeros(self.shape)) - other
        return _add_d(self, -_f64(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, DDComplex):
            return NotImplemented
        if isinstance(other, DDReal):
            return _mul(self, other)
        if np.iscomplexobj(other):
            return DDComplex(self, DDReal.zeros(self.shape)) * other
        return _mul_d(self, _f64(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, DDComplex):
            return NotImplemented
        if np.iscomplexobj(other):
            return DDComplex(self, DDReal.zeros(self.shape)) / other
        return _div(self, as_ddreal(other))

    def __rtruediv__(self, other):
        if np.iscomplexobj(other):
            return as_ddcomplex(other) / self
        return _div(as_ddreal(other), self)

    def __pow__(self, n):
        if not isinstance(n, (int, np.integer)):
            raise TypeError("DDReal supports only integer powers")
        if n < 0:
            return 1.0 / (self ** (-n))
        result = DDReal(np.ones(self.shape))
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- comparisons (return boolean numpy arrays) ---------------------
    def _cmp(self, other):
        d = self - other
        return d.hi

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __eq__(self, other):  # type: ignore[override]
        o = as_ddreal(other)
        return (self.hi == o.hi) & (self.lo == o.lo)

    def __ne__(self, other):  # type: ignore[override]
        return ~self.__eq__(other)

    __hash__ = None  # mutable container

    # -- reductions ------------------------------------------------------
    def sum(self, axis=None) -> "DDReal":
        return dd_sum(self, axis)


def _add(a: DDReal, b: DDReal) -> DDReal:
    s1, s2 = two_sum(a.hi, b.hi)
    t1, t2 = two_sum(a.lo, b.lo)
    s2 = s2 + t1
    s1, s2 = quick_two_sum(s1, s2)
    s2 = s2 + t2
    s1, s2 = quick_two_sum(s1, s2)
    return DDReal._raw(s1, s2)


def _add_d(a: DDReal, b: np.ndarray) -> DDReal:
    s1, s2 = two_sum(a.hi, b)
    s2 = s2 + a.lo
    s1, s2 = quick_two_sum(s1, s2)
    return DDReal._raw(s1, s2)


def _mul(a: DDReal, b: DDReal) -> DDReal:
    p1, p2 = two_prod(a.hi, b.hi)
    p2 = p2 + (a.hi * b.lo + a.lo * b.hi)
    p1, p2 = quick_two_sum(p1, p2)
    return DDReal._raw(p1, p2)


def _mul_d(a: DDReal, b: np.ndarray) -> DDReal:
    p1, p2 = two_prod(a.hi, b)
    p2 = p2 + a.lo * b
    p1, p2 = quick_two_sum(p1, p2)
    return DDReal._raw(p1, p2)


def _div(a: DDReal, b: DDReal) -> DDReal:
    q1 = a.hi / b.hi
    r = a - b * q1  # one Newton correction of the binary64 quotient
    q2 = r.hi / b.hi
    with np.errstate(invalid="ignore"):
        s1, s2 = quick_two_sum(q1, q2)
    return DDReal._raw(s1, s2)


def dd_sqrt(a) -> DDReal:
    """Square root by one Newton correction of the binary64 estimate."""
    a = as_ddreal(a)
    with np.errstate(invalid="ignore"):
        x = np.sqrt(a.hi)
    zero = a.hi == 0
    xs = np.where(zero, 1.0, x)
    p, e = two_prod(xs, xs)
    r = (a - DDReal._raw(p, e)).hi / (2.0 * xs)
    s1, s2 = quick_two_sum(x, np.where(zero, 0.0, r))
    return DDReal._raw(s1, s2)


def dd_sum(x, axis=None):
    """Pairwise double-double summation along ``axis`` (all axes if None)."""
    if axis is None:
        x = x.reshape(-1)
        axis = 0
    n = x.shape[axis]
    if n == 0:
        shape = list(x.shape)
        del shape[axis]
        return type(x).zeros(tuple(shape)) if isinstance(x, DDReal) else DDComplex.zeros(tuple(shape))
    idx = [slice(None)] * x.ndim
    while n > 1:
        half = n // 2
        idx[axis] = slice(0, 2 * half, 2)
        even = x[tuple(idx)]
        idx[axis] = slice(1, 2 * half, 2)
        odd = x[tuple(idx)]
        s = even + odd
        if n % 2:
            idx[axis] = slice(n - 1, n)
            last = x[tuple(idx)]
            idx[axis] = slice(0, 1)
            s0 = s[tuple(idx)] + last
            s = _concat(s0, s[tuple(_slice_from(idx, axis, 1))], axis)
        x = s
        n = x.shape[axis]
    idx[axis] = 0
    return x[tuple(idx)]


def _slice_from(idx, axis, start):
    out = list(idx)
    out[axis] = slice(start, None)
    return out


def _concat(a, b, axis):
    if isinstance(a, DDReal):
        return DDReal._raw(
            np.concatenate([a.hi, b.hi], axis=axis), np.concatenate([a.lo, b.lo], axis=axis)
        )
    return DDComplex(_concat(a.re, b.re, axis), _concat(a.im, b.im, axis))


# --------------------------------------------------------------------------
# DDComplex
# --------------------------------------------------------------------------


class DDComplex:
    """Array of double-double complex numbers stored as two :class:`DDReal`."""

    __slots__ = ("re", "im")
    __array_priority__ = 1000

    def __init__(self, re, im=None):
        self.re = as_ddreal(re)
        self.im = DDReal.zeros(self.re.shape) if im is None else as_ddreal(im)
        if self.re.shape != self.im.shape:
            shape = np.broadcast_shapes(self.re.shape, self.im.shape)
            self.re = _broadcast(self.re, shape)
            self.im = _broadcast(self.im, shape)

    @classmethod
    def zeros(cls, shape) -> "DDComplex":
        return cls(DDReal.zeros(shape), DDReal.zeros(shape))

    @property
    def shape(self):
        return self.re.shape

    @property
    def ndim(self):
        return self.re.ndim

    @property
    def size(self):
        return self.re.size

    def __len__(self):
        return len(self.re)

    def __getitem__(self, key) -> "DDComplex":
        return DDComplex(self.re[key], self.im[key])

    def __setitem__(self, key, value) -> None:
        v = as_ddcomplex(value)
        self.re[key] = v.re
        self.im[key] = v.im

    def __iter__(self):
        for k in range(len(self)):
            yield self[k]

    def copy(self) -> "DDComplex":
        return DDComplex(self.re.copy(), self.im.copy())

    def reshape(self, *shape) -> "DDComplex":
        return DDComplex(self.re.reshape(*shape), self.im.reshape(*shape))

    @property
    def T(self) -> "DDComplex":
        return DDComplex(self.re.T, self.im.T)

    @property
    def real(self) -> DDReal:
        return self.re

    @property
    def imag(self) -> DDReal:
        return self.im

    def conj(self) -> "DDComplex":
        return DDComplex(self.re, -self.im)

    def to_complex(self) -> np.ndarray:
        return self.re.to_float() + 1j * self.im.to_float()

    def __complex__(self) -> complex:
        return complex(self.to_complex())

    def __repr__(self) -> str:
        if self.ndim == 0:
            return f"DDComplex({self.re!r}, {self.im!r})"
        return f"DDComplex(shape={self.shape})"

    def abs2(self) -> DDReal:
        return self.re * self.re + self.im * self.im

    def __abs__(self) -> DDReal:
        return dd_sqrt(self.abs2())

    def __neg__(self) -> "DDComplex":
        return DDComplex(-self.re, -self.im)

    def __pos__(self) -> "DDComplex":
        return self

    def __add__(self, other) -> "DDComplex":
        o = _as_operand(other)
        if isinstance(o, DDReal):
            return DDComplex(self.re + o, self.im)
        return DDComplex(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other) -> "DDComplex":
        o = _as_operand(other)
        if isinstance(o, DDReal):
            return DDComplex(self.re - o, self.im)
        return DDComplex(self.re - o.re, self.im - o.im)

    def __rsub__(self, other) -> "DDComplex":
        return (-self) + other

    def __mul__(self, other) -> "DDComplex":
        o = _as_operand(other)
        if isinstance(o, DDReal):
            return DDComplex(self.re * o, self.im * o)
        return DDComplex(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "DDComplex":
        o = _as_operand(other)
        if isinstance(o, DDReal):
            return DDComplex(self.re / o, self.im / o)
        # scale by the larger component of the divisor to avoid overflow
        scale = np.maximum(np.abs(o.re.hi), np.abs(o.im.hi))
        scale = np.where(scale == 0, 1.0, scale)
        pw = np.exp2(np.floor(np.log2(scale)))
        cr, ci = o.re * (1.0 / pw), o.im * (1.0 / pw)
        den = cr * cr + ci * ci
        nr = self.re * cr + self.im * ci
        ni = self.im * cr - self.re * ci
        return DDComplex(nr / den * (1.0 / pw), ni / den * (1.0 / pw))

    def __rtruediv__(self, other) -> "DDComplex":
        return as_ddcomplex(other) / self

    def __pow__(self, n):
        if not isinstance(n, (int, np.integer)) or n < 0:
            raise TypeError("DDComplex supports only non-negative integer powers")
        result = as_ddcomplex(np.ones(self.shape, dtype=complex))
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def sum(self, axis=None) -> "DDComplex":
        return DDComplex(dd_sum(self.re, axis), dd_sum(self.im, axis))


def _broadcast(x: DDReal, shape) -> DDReal:
    return DDReal._raw(
        np.broadcast_to(x.hi, shape).copy(), np.broadcast_to(x.lo, shape).copy()
    )


def _as_operand(x):
    if isinstance(x, (DDReal, DDComplex)):
        return x
    if np.iscomplexobj(x):
        return as_ddcomplex(x)
    return DDReal(x)


def as_ddreal(x) -> DDReal:
    """Convert a binary64 scalar/array (or DDReal) to :class:`DDReal`."""
    if isinstance(x, DDReal):
        return x
    if isinstance(x, DDComplex):
        raise TypeError("cannot convert DDComplex to DDReal")
    if np.iscomplexobj(x):
        raise TypeError("cannot convert complex value to DDReal")
    return DDReal(x)


def as_ddcomplex(x) -> DDComplex:
    """Convert a binary64 scalar/array, DDReal or DDComplex to :class:`DDComplex`."""
    if isinstance(x, DDComplex):
        return x
    if isinstance(x, DDReal):
        return DDComplex(x, DDReal.zeros(x.shape))
    arr = np.asarray(x)
    if np.iscomplexobj(arr):
        return DDComplex(DDReal(arr.real), DDReal(arr.imag))
    return DDComplex(DDReal(arr), DDReal.zeros(arr.shape))


def dd_pi() -> DDReal:
    """π to double-double precision."""
    return DDReal(3.141592653589793, 1.2246467991473532e-16)


_LN2 = DDReal(0.6931471805599453, 2.3190468138462996e-17)


def _taylor(r: DDReal, coeffs) -> DDReal:
    """Horner evaluation of Σ cₖ rᵏ with binary64 or DDReal coefficients."""
    acc = DDReal(np.zeros(r.shape)) + coeffs[-1]
    for c in coeffs[-2::-1]:
        acc = acc * r + c
    return acc


_INV_FACT = [DDReal(1.0)]
for _k in range(1, 40):
    _INV_FACT.append(_INV_FACT[-1] / float(_k))


def dd_exp(x) -> DDReal:
    """exp in double-double: x = k·ln2 + r, Taylor on r/2⁵, then five squarings."""
    x = as_ddreal(x)
    k = np.round(x.hi / 0.6931471805599453)
    r = (x - _LN2 * k) * (1.0 / 32.0)
    e = _taylor(r, _INV_FACT[:20])
    for _ in range(5):
        e = e * e
    return DDReal._raw(np.ldexp(e.hi, k.astype(int)), np.ldexp(e.lo, k.astype(int)))


def dd_log(x) -> DDReal:
    """Natural logarithm in double-double by one Newton step on exp."""
    x = as_ddreal(x)
    if np.any(x.hi <= 0):
        raise ValueError("dd_log needs positive arguments")
    y = DDReal(np.log(x.hi))
    return y + x * dd_exp(-y) - 1.0


def dd_sincos(x) -> tuple[DDReal, DDReal]:
    """(sin x, cos x) in double-double via reduction modulo π/2 and Taylor series."""
    x = as_ddreal(x)
    half_pi = dd_pi() * 0.5
    k = np.round(x.hi / (np.pi / 2))
    r = x - half_pi * k
    r2 = r * r
    # sin r = r Σ (-1)^j r^{2j}/(2j+1)!, cos r = Σ (-1)^j r^{2j}/(2j)!
    sc = [_INV_FACT[2 * j + 1] * (-1.0) ** j for j in range(16)]
    cc = [_INV_FACT[2 * j] * (-1.0) ** j for j in range(16)]
    s = r * _taylor(r2, sc)
    c = _taylor(r2, cc)
    q = np.mod(k, 4).astype(int)
    sin = DDReal._raw(np.choose(q, [s.hi, c.hi, -s.hi, -c.hi]), np.choose(q, [s.lo, c.lo, -s.lo, -c.lo]))
    cos = DDReal._raw(np.choose(q, [c.hi, -s.hi, -c.hi, s.hi]), np.choose(q, [c.lo, -s.lo, -c.lo, s.lo]))
    return sin, cos


def dd_cexp(z) -> "DDComplex":
    """Complex exponential in double-double."""
    z = as_ddcomplex(z)
    mag = dd_exp(z.re)
    s, c = dd_sincos(z.im)
    return DDComplex(mag * c, mag * s)


# --------------------------------------------------------------------------
# text serialization
# --------------------------------------------------------------------------


def _exact_decimal(hi: float, lo: float) -> decimal.Decimal:
    with decimal.localcontext() as ctx:
        ctx.prec = 1200
        return decimal.Decimal(hi) + decimal.Decimal(lo)


def format_dd(hi: float, lo: float = 0.0, digits: int = 33) -> str:
    """Decimal string with at least ``digits`` significant digits.

    Extra digits are added in the rare cases where ``digits`` is not enough
    to parse back to exactly the same ``(hi, lo)`` pair.
    """
    hi, lo = float(hi), float(lo)
    if not np.isfinite(hi):
        return repr(hi)
    if hi == 0.0:
        return "0.0" if np.copysign(1.0, hi) > 0 else "-0.0"
    exact = _exact_decimal(hi, lo)
    for d in range(digits, 41):
        text = _sci(exact, d)
        back = DDReal.from_string(text)
        if float(back.hi) == hi and float(back.lo) == lo:
            return text
    return _sci(exact, 800)


def _sci(value: decimal.Decimal, digits: int) -> str:
    with decimal.localcontext() as ctx:
        ctx.prec = digits
        ctx.rounding = decimal.ROUND_HALF_EVEN
        v = +value
    return f"{v:.{digits - 1}E}".replace("E", "e")


def format_number(x, digits: int = 33) -> str:
    """Format a binary64 or double-double real scalar for text output."""
    if isinstance(x, DDReal):
        return format_dd(float(x.hi), float(x.lo), digits)
    x = float(x)
    if not np.isfinite(x):
        return repr(x)
    if x == 0.0:
        return format_dd(x)
    # 17 digits already round-trip a binary64 value
    return _sci(decimal.Decimal(x), digits)


def parse_number(text: str, mode: "Mode | str" = "dd"):
    """Inverse of :func:`format_number` for the given mode."""
    m = get_mode(mode)
    if m.name == "dd":
        return DDReal.from_string(text)
    return float(text)


# --------------------------------------------------------------------------
# scalar modes
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Mode:
    """Scalar arithmetic backend used by generic numeric kernels."""

    name: str
    unit_roundoff: float
    real: Callable[[Any], Any]
    complex: Callable[..., Any]
    sqrt: Callable[[Any], Any]
    to_float: Callable[[Any], np.ndarray]
    to_complex: Callable[[Any], np.ndarray]
    pi: Any

    def zeros(self, shape, complex_: bool = False):
        if self.name == "dd":
            return DDComplex.zeros(shape) if complex_ else DDReal.zeros(shape)
        return np.zeros(shape, dtype=np.complex128 if complex_ else np.float64)

    def abs2(self, x):
        if isinstance(x, DDComplex):
            return x.abs2()
        if isinstance(x, DDReal):
            return x * x
        return (x * np.conj(x)).real

    def sum(self, x, axis=None):
        if isinstance(x, (DDReal, DDComplex)):
            return x.sum(axis)
        return np.sum(x, axis=axis)

    def sign_hi(self, x) -> np.ndarray:
        """Sign of a real value (as binary64 array)."""
        return np.sign(x.hi if isinstance(x, DDReal) else x)

    def is_dd(self) -> bool:
        return self.name == "dd"


def _f64_complex(re, im=None):
    if im is None:
        return np.asarray(re, dtype=np.complex128)
    return np.asarray(re, dtype=np.float64) + 1j * np.asarray(im, dtype=np.float64)


def _dd_complex(re, im=None):
    if im is None:
        return as_ddcomplex(re)
    return DDComplex(as_ddreal(re), as_ddreal(im))


def _dd_to_float(x):
    if isinstance(x, DDComplex):
        return x.to_complex()
    if isinstance(x, DDReal):
        return x.to_float()
    return np.asarray(x)


def _dd_to_complex(x):
    if isinstance(x, DDComplex):
        return x.to_complex()
    if isinstance(x, DDReal):
        return x.to_float().astype(complex)
    return np.asarray(x, dtype=complex)


F64 = Mode(
    name="f64",
    unit_roundoff=2.0**-53,
    real=lambda x: np.asarray(x, dtype=np.float64) if not isinstance(x, DDReal) else x.to_float(),
    complex=_f64_complex,
    sqrt=np.sqrt,
    to_float=lambda x: np.asarray(x),
    to_complex=lambda x: np.asarray(x, dtype=complex),
    pi=np.pi,
)

DD = Mode(
    name="dd",
    unit_roundoff=2.0**-106,
    real=as_ddreal,
    complex=_dd_complex,
    sqrt=dd_sqrt,
    to_float=_dd_to_float,
    to_complex=_dd_to_complex,
    pi=dd_pi(),
)

_MODES = {"f64": F64, "binary64": F64, "dd": DD, "ddreal": DD}


def get_mode(mode: "Mode | str") -> Mode:
    """Look up a scalar mode by name (``"f64"`` or ``"dd"``)."""
    if isinstance(mode, Mode):
        return mode
    try:
        return _MODES[str(mode).lower()]
    except KeyError:
        raise ValueError(f"unknown scalar mode {mode!r}; use 'f64' or 'dd'") from None


# --------------------------------------------------------------------------
# dense linear-algebra helpers (generic over modes)
# --------------------------------------------------------------------------


def matvec(A, x):
    """``A @ x`` for numpy arrays or double-double arrays."""
    if isinstance(A, (DDReal, DDComplex)) or isinstance(x, (DDReal, DDComplex)):
        prod = _as_operand(A) * _as_operand(x).reshape(1, -1)
        return prod.sum(axis=1)
    return A @ x


def matmul(A, B):
    """``A @ B`` by rank-one accumulation (double-double) or numpy (binary64)."""
    if not (isinstance(A, (DDReal, DDComplex)) or isinstance(B, (DDReal, DDComplex))):
        return A @ B
    A, B = _as_operand(A), _as_operand(B)
    n = A.shape[1]
    acc = A[:, 0:1] * B[0:1, :]
    for k in range(1, n):
        acc = acc + A[:, k : k + 1] * B[k : k + 1, :]
    return acc


def vdot(x, y):
    """``sum(conj(x) * y)`` in the mode of the operands."""
    if isinstance(x, (DDReal, DDComplex)) or isinstance(y, (DDReal, DDComplex)):
        return (_as_operand(x).conj() * _as_operand(y)).sum()
    return np.vdot(x, y)


def conj_transpose(A):
    if isinstance(A, (DDReal, DDComplex)):
        return A.conj().T
    return np.conj(A).T
