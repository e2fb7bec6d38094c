"""Exact arithmetic in Q[sqrt(delta), sqrt(delta^2 - 1)].

Every normalisation constant that shows up in the cup-subalgebra formulas
(sqrt(delta), sqrt(delta - 1/delta), sqrt(1 - delta^-2), delta^(k/2)) lives in
this ring, so all algebraic identities can be checked with zero tolerance.

An element is stored as four rationals ``(q, s, e, p)`` standing for

    q + s*sqrt(delta) + e*sqrt(delta^2-1) + p*sqrt(delta)*sqrt(delta^2-1)

When one of the radicals happens to be rational the representation is folded
on construction, which keeps the ring a field in every case.
"""

from __future__ import annotations

import decimal
import math
from fractions import Fraction
from functools import lru_cache
from numbers import Rational as _RationalABC
from typing import Iterable, Union

__all__ = [
    "ContextMismatch",
    "Field",
    "FieldScalar",
    "as_fraction",
    "field",
    "fs_add",
    "fs_inv",
    "fs_mul",
    "fs_to_float",
    "rational_sqrt",
]

Scalarish = Union["FieldScalar", int, Fraction]


class ContextMismatch(ValueError):
    """Two scalars (or elements) built over different delta values were combined."""


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, _RationalABC)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        raise TypeError("refusing to build an exact scalar from a float")
    raise TypeError(f"cannot interpret {x!r} as a rational")


def rational_sqrt(x: Fraction) -> Fraction | None:
    """Exact square root of a non-negative rational, or None if irrational."""
    if x < 0:
        return None
    n, d = x.numerator, x.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def _sign_quadratic(a: Fraction, b: Fraction, rad: Fraction) -> int:
    """Sign of a + b*sqrt(rad) for rad > 0."""
    sa = (a > 0) - (a < 0)
    sb = (b > 0) - (b < 0)
    if sb == 0:
        return sa
    if sa == 0 or sa == sb:
        return sb
    n = a * a - b * b * rad
    return sa * ((n > 0) - (n < 0))


class Field:
    """Context object for one value of delta (delta > 1).

    Instances are cached per delta, so identity comparison is enough to decide
    whether two scalars may be combined.
    """

    __slots__ = ("delta", "d2m1", "root_delta", "root_d2m1", "root_prod", "zero", "one", "__weakref__")

    def __init__(self, delta: Fraction):
        if delta <= 1:
            raise ValueError(f"delta must exceed 1, got {delta}")
        self.delta = delta
        self.d2m1 = delta * delta - 1
        self.root_delta = rational_sqrt(delta)
        self.root_d2m1 = rational_sqrt(self.d2m1)
        self.root_prod = rational_sqrt(delta * self.d2m1)
        self.zero = FieldScalar._raw(self, Fraction(0), Fraction(0), Fraction(0), Fraction(0))
        self.one = FieldScalar._raw(self, Fraction(1), Fraction(0), Fraction(0), Fraction(0))

    def __repr__(self) -> str:
        return f"Field(delta={self.delta})"

    @property
    def degenerate(self) -> bool:
        return not (self.root_delta is None and self.root_d2m1 is None and self.root_prod is None)

    # -- constructors -----------------------------------------------------
    def __call__(self, q=0, s=0, e=0, p=0) -> "FieldScalar":
        return FieldScalar(self, q, s, e, p)

    def rational(self, q) -> "FieldScalar":
        return FieldScalar._raw(self, as_fraction(q), Fraction(0), Fraction(0), Fraction(0))

    def sqrt_delta(self) -> "FieldScalar":
        return self(0, 1, 0, 0)

    def sqrt_d2m1(self) -> "FieldScalar":
        return self(0, 0, 1, 0)

    def sqrt_delta_minus_inv(self) -> "FieldScalar":
        """sqrt(delta - 1/delta) = sqrt(delta)*sqrt(delta^2-1)/delta."""
        return self(0, 0, 0, 1 / self.delta)

    def sqrt_one_minus_inv_sq(self) -> "FieldScalar":
        """sqrt(1 - delta^-2) = sqrt(delta^2-1)/delta."""
        return self(0, 0, 1 / self.delta, 0)

    def delta_power_half(self, k: int) -> "FieldScalar":
        """delta^(k/2) for any integer k."""
        whole, half = divmod(k, 2)
        base = self.delta ** whole
        return self(0, base, 0, 0) if half else self.rational(base)

    def coerce(self, x: Scalarish) -> "FieldScalar":
        if isinstance(x, FieldScalar):
            if x.field is not self:
                raise ContextMismatch(f"delta {x.field.delta} != {self.delta}")
            return x
        return self.rational(x)

    def from_json(self, obj: dict) -> "FieldScalar":
        return self(
            as_fraction(obj.get("q", 0)),
            as_fraction(obj.get("sqrt_delta", 0)),
            as_fraction(obj.get("sqrt_d2m1", 0)),
            as_fraction(obj.get("sqrt_prod", 0)),
        )


@lru_cache(maxsize=None)
def _field_cached(delta: Fraction) -> Field:
    return Field(delta)


def field(delta) -> Field:
    return _field_cached(as_fraction(delta))


class FieldScalar:
    """Immutable exact element of Q[sqrt(delta), sqrt(delta^2-1)]."""

    __slots__ = ("field", "q", "s", "e", "p")

    def __init__(self, fld: Field, q=0, s=0, e=0, p=0):
        q, s, e, p = as_fraction(q), as_fraction(s), as_fraction(e), as_fraction(p)
        q, s, e, p = _fold(fld, q, s, e, p)
        self.field = fld
        self.q, self.s, self.e, self.p = q, s, e, p

    @classmethod
    def _raw(cls, fld: Field, q: Fraction, s: Fraction, e: Fraction, p: Fraction) -> "FieldScalar":
        obj = object.__new__(cls)
        obj.field = fld
        obj.q, obj.s, obj.e, obj.p = q, s, e, p
        return obj

    # -- inspection -------------------------------------------------------
    @property
    def delta(self) -> Fraction:
        return self.field.delta

    @property
    def coeffs(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        return (self.q, self.s, self.e, self.p)

    def is_rational(self) -> bool:
        return not (self.s or self.e or self.p)

    def __bool__(self) -> bool:
        return bool(self.q or self.s or self.e or self.p)

    def sign(self) -> int:
        """Exact sign, decided through the conjugate norms (no floating point)."""
        fld = self.field
        # x = A + B*sqrt(d2m1) with A, B in Q(sqrt(delta))
        sa = _sign_quadratic(self.q, self.s, fld.delta)
        sb = _sign_quadratic(self.e, self.p, fld.delta)
        if sb == 0:
            return sa
        if sa == 0 or sa == sb:
            return sb
        # A^2 - d2m1 * B^2, as an element of Q(sqrt(delta))
        a0, a1 = self.q, self.s
        b0, b1 = self.e, self.p
        d = fld.delta
        n0 = a0 * a0 + a1 * a1 * d - fld.d2m1 * (b0 * b0 + b1 * b1 * d)
        n1 = 2 * a0 * a1 - fld.d2m1 * 2 * b0 * b1
        return sa * _sign_quadratic(n0, n1, d)

    # -- arithmetic -------------------------------------------------------
    def _other(self, other) -> "FieldScalar | None":
        if isinstance(other, FieldScalar):
            if other.field is not self.field:
                raise ContextMismatch(f"delta {other.field.delta} != {self.field.delta}")
            return other
        if isinstance(other, (int, Fraction)):
            return FieldScalar._raw(self.field, Fraction(other), Fraction(0), Fraction(0), Fraction(0))
        return None

    def __add__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return FieldScalar._raw(self.field, self.q + o.q, self.s + o.s, self.e + o.e, self.p + o.p)

    __radd__ = __add__

    def __neg__(self):
        return FieldScalar._raw(self.field, -self.q, -self.s, -self.e, -self.p)

    def __sub__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return FieldScalar._raw(self.field, self.q - o.q, self.s - o.s, self.e - o.e, self.p - o.p)

    def __rsub__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        fld = self.field
        if not (o.s or o.e or o.p):
            c = o.q
            return FieldScalar._raw(fld, self.q * c, self.s * c, self.e * c, self.p * c)
        if not (self.s or self.e or self.p):
            c = self.q
            return FieldScalar._raw(fld, o.q * c, o.s * c, o.e * c, o.p * c)
        d, E = fld.delta, fld.d2m1
        a1, b1, c1, d1 = self.q, self.s, self.e, self.p
        a2, b2, c2, d2 = o.q, o.s, o.e, o.p
        q = a1 * a2 + b1 * b2 * d + c1 * c2 * E + d1 * d2 * d * E
        s = a1 * b2 + b1 * a2 + (c1 * d2 + d1 * c2) * E
        e = a1 * c2 + c1 * a2 + (b1 * d2 + d1 * b2) * d
        p = a1 * d2 + d1 * a2 + b1 * c2 + c1 * b2
        if fld.degenerate:
            q, s, e, p = _fold(fld, q, s, e, p)
        return FieldScalar._raw(fld, q, s, e, p)

    __rmul__ = __mul__

    def inverse(self) -> "FieldScalar":
        """Multiplicative inverse via the two quadratic conjugations."""
        if not self:
            raise ZeroDivisionError("inverse of zero FieldScalar")
        fld = self.field
        d, E = fld.delta, fld.d2m1
        a0, a1, b0, b1 = self.q, self.s, self.e, self.p
        # x = A + B*r, x^-1 = (A - B*r) / (A^2 - E*B^2)
        n0 = a0 * a0 + a1 * a1 * d - E * (b0 * b0 + b1 * b1 * d)
        n1 = 2 * a0 * a1 - 2 * E * b0 * b1
        den = n0 * n0 - d * n1 * n1
        if den == 0:
            raise ZeroDivisionError("degenerate extension: element is a zero divisor")
        m0, m1 = n0 / den, -n1 / den
        # (a0 + a1 s - b0 r - b1 s r) * (m0 + m1 s)
        q = a0 * m0 + a1 * m1 * d
        s = a0 * m1 + a1 * m0
        e = -(b0 * m0 + b1 * m1 * d)
        p = -(b0 * m1 + b1 * m0)
        return FieldScalar(fld, q, s, e, p)

    def __truediv__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        if o.is_rational():
            if o.q == 0:
                raise ZeroDivisionError("division by zero FieldScalar")
            c = 1 / o.q
            return FieldScalar._raw(self.field, self.q * c, self.s * c, self.e * c, self.p * c)
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result = self.field.one
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def conjugate(self) -> "FieldScalar":
        # coefficients are real
        return self

    # -- comparison -------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, FieldScalar):
            return (
                other.field is self.field
                and self.q == other.q
                and self.s == other.s
                and self.e == other.e
                and self.p == other.p
            )
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and self.q == other
        return NotImplemented

    def __hash__(self):
        if self.is_rational():
            return hash(self.q)
        return hash((self.field.delta, self.q, self.s, self.e, self.p))

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __le__(self, other):
        return (self - other).sign() <= 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __ge__(self, other):
        return (self - other).sign() >= 0

    # -- conversion -------------------------------------------------------
    def __float__(self) -> float:
        return fs_to_float(self)

    def to_json(self) -> dict:
        return {
            "q": str(self.q),
            "sqrt_delta": str(self.s),
            "sqrt_d2m1": str(self.e),
            "sqrt_prod": str(self.p),
        }

    def __repr__(self) -> str:
        if self.is_rational():
            return f"FieldScalar({self.q})"
        return f"FieldScalar({self.q}, {self.s}, {self.e}, {self.p}; delta={self.field.delta})"

    def __str__(self) -> str:
        parts = []
        for c, sym in ((self.q, ""), (self.s, "sqrt(d)"), (self.e, "sqrt(d^2-1)"), (self.p, "sqrt(d)sqrt(d^2-1)")):
            if not c:
                continue
            if not sym:
                parts.append(str(c))
            elif c == 1:
                parts.append(sym)
            else:
                parts.append(f"{c}*{sym}")
        return " + ".join(parts) if parts else "0"


def _fold(fld: Field, q: Fraction, s: Fraction, e: Fraction, p: Fraction):
    """Absorb rational radicals so the representation stays canonical."""
    rd, re_, rp = fld.root_delta, fld.root_d2m1, fld.root_prod
    if rd is None and re_ is None and rp is None:
        return q, s, e, p
    if rd is not None and re_ is not None:
        return q + s * rd + e * re_ + p * rd * re_, Fraction(0), Fraction(0), Fraction(0)
    if rd is not None:
        return q + s * rd, Fraction(0), e + p * rd, Fraction(0)
    if re_ is not None:
        return q + e * re_, s + p * re_, Fraction(0), Fraction(0)
    # sqrt(delta)*sqrt(delta^2-1) = rp is rational, sqrt(delta^2-1) = rp/delta * sqrt(delta)
    return q + p * rp, s + e * rp / fld.delta, Fraction(0), Fraction(0)


def fs_add(x: FieldScalar, y: FieldScalar) -> FieldScalar:
    return x + y


def fs_mul(x: FieldScalar, y: FieldScalar) -> FieldScalar:
    return x * y


def fs_inv(x: FieldScalar) -> FieldScalar:
    return x.inverse()


_DEC_CTX = decimal.Context(prec=60)


def _dec(x: Fraction) -> decimal.Decimal:
    return _DEC_CTX.divide(decimal.Decimal(x.numerator), decimal.Decimal(x.denominator))


def fs_to_float(x: FieldScalar) -> float:
    """Float value, evaluated at 60 digits so the sign always agrees with ``x.sign()``."""
    if x.is_rational():
        return float(x.q)
    ctx = _DEC_CTX
    d = _dec(x.field.delta)
    rd = ctx.sqrt(d)
    re_ = ctx.sqrt(_dec(x.field.d2m1))
    total = _dec(x.q) + _dec(x.s) * rd + _dec(x.e) * re_ + _dec(x.p) * rd * re_
    val = float(total)
    sgn = x.sign()
    if sgn == 0:
        return 0.0
    if (val > 0) - (val < 0) != sgn:
        # below double resolution: keep the exact sign
        return math.copysign(5e-324, sgn)
    return val


def sum_scalars(fld: Field, items: Iterable[FieldScalar]) -> FieldScalar:
    total = fld.zero
    for it in items:
        total = total + it
    return total
