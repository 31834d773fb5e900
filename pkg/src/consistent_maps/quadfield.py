"""Quadratic fields Q(sqrt d), their elements, units and torsion.

``QQ`` stands for the rational field; its elements are plain Fractions.  The
real embedding of a real quadratic field is fixed as sqrt(d) -> +sqrt(d).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Union

from .errors import DivisionByZero, InvalidD, NotRealField, ParseError, ZeroElement
from .numerics import Rational, as_fraction, factor_int


class RationalField:
    """The field Q.  A singleton; compare with ``is QQ``."""

    degree = 1
    d = 1
    is_real = True
    n_arch = 1

    def __repr__(self) -> str:
        return "QQ"

    def __reduce__(self):
        return "QQ"


QQ = RationalField()


def _is_squarefree(n: int) -> bool:
    n = abs(n)
    if n == 1:
        return True
    return all(e == 1 for e in factor_int(n).values())


@dataclass(frozen=True)
class QuadField:
    d: int

    def __post_init__(self):
        if self.d in (0, 1) or not _is_squarefree(self.d):
            raise InvalidD(f"d={self.d} must be a squarefree integer other than 0, 1")

    degree = 2

    @property
    def discriminant(self) -> int:
        return self.d if self.d % 4 == 1 else 4 * self.d

    @property
    def is_real(self) -> bool:
        return self.d > 0

    @property
    def n_arch(self) -> int:
        return 2 if self.d > 0 else 1

    @property
    def omega(self) -> "FieldElement":
        if self.d % 4 == 1:
            return FieldElement(self, Fraction(1, 2), Fraction(1, 2))
        return FieldElement(self, 0, 1)

    @property
    def sqrt_d(self) -> "FieldElement":
        return FieldElement(self, 0, 1)

    def __call__(self, a: Rational = 0, b: Rational = 0) -> "FieldElement":
        return FieldElement(self, a, b)

    def __repr__(self) -> str:
        return f"Q(sqrt({self.d}))"


Field = Union[RationalField, QuadField]


def make_field(d: int) -> QuadField:
    return QuadField(int(d))


class FieldElement:
    """``a + b*sqrt(d)`` with rational coordinates; immutable."""

    __slots__ = ("field", "a", "b")

    def __init__(self, field: QuadField, a: Rational = 0, b: Rational = 0):
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "a", as_fraction(a))
        object.__setattr__(self, "b", as_fraction(b))

    def __setattr__(self, name, value):
        raise AttributeError("FieldElement is immutable")

    # -- coercion -----------------------------------------------------------
    def _coerce(self, other) -> "FieldElement":
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise ValueError(f"elements of {self.field} and {other.field} do not mix")
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return FieldElement(self.field, other, 0)
        return NotImplemented

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.field, self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.field, -self.a, -self.b)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.field, self.a - o.a, self.b - o.b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        d = self.field.d
        return FieldElement(
            self.field, self.a * o.a + d * self.b * o.b, self.a * o.b + self.b * o.a
        )

    __rmul__ = __mul__

    def inverse(self) -> "FieldElement":
        n = self.norm()
        if n == 0:
            raise DivisionByZero("inverse of zero")
        return FieldElement(self.field, self.a / n, -self.b / n)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, k: int):
        k = int(k)
        if k < 0:
            return self.inverse() ** (-k)
        result = FieldElement(self.field, 1, 0)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def conj(self) -> "FieldElement":
        return FieldElement(self.field, self.a, -self.b)

    def norm(self) -> Fraction:
        return self.a * self.a - self.field.d * self.b * self.b

    def trace(self) -> Fraction:
        return 2 * self.a

    # -- predicates ---------------------------------------------------------
    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def is_rational(self) -> bool:
        return self.b == 0

    def is_integral(self) -> bool:
        if self.field.d % 4 == 1:
            return (2 * self.b).denominator == 1 and (self.a - self.b).denominator == 1
        return self.a.denominator == 1 and self.b.denominator == 1

    def is_unit(self) -> bool:
        return self.is_integral() and abs(self.norm()) == 1

    # -- integer form -------------------------------------------------------
    def integer_form(self) -> tuple[int, int, int]:
        """(A, B, D) with D > 0 and self == (A + B*sqrt(d)) / D."""
        den = math.lcm(self.a.denominator, self.b.denominator)
        return int(self.a * den), int(self.b * den), den

    # -- embeddings ---------------------------------------------------------
    def embed(self, index: int = 1) -> complex | float:
        d = self.field.d
        s = 1 if index == 1 else -1
        if d > 0:
            return float(self.a) + s * float(self.b) * math.sqrt(d)
        return complex(float(self.a), s * float(self.b) * math.sqrt(-d))

    def log_abs_embedding(self, index: int = 1) -> float:
        """ln|sigma_index(x)|, robust against cancellation and huge coordinates."""
        if self.is_zero():
            raise ZeroElement("log of zero")
        A, B, D = self.integer_form()
        d = self.field.d
        if d < 0:
            return 0.5 * math.log(A * A - d * B * B) - math.log(D)
        s = 1 if index == 1 else -1
        sb = s * B
        if A == 0 or sb == 0 or (A > 0) == (sb > 0):
            return _log_pos_combo(abs(A), abs(B), d) - math.log(D)
        # cancellation: go through the conjugate, which has none
        other = _log_pos_combo(abs(A), abs(B), d)
        return math.log(abs(A * A - d * B * B)) - other - math.log(D)

    # -- dunder -------------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field == other.field and self.a == other.a and self.b == other.b
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.b == 0 and self.a == other
        return NotImplemented

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.field.d, self.a, self.b))

    def __repr__(self) -> str:
        return f"FieldElement({format_element(self)})"

    def __str__(self) -> str:
        return format_element(self)


def _log_pos_combo(P: int, Q: int, d: int) -> float:
    """ln(P + Q*sqrt(d)) for nonnegative integers, not both zero."""
    shift = max(0, max(P.bit_length(), Q.bit_length()) - 900)
    p, q = P >> shift, Q >> shift
    return math.log(float(p) + float(q) * math.sqrt(d)) + shift * math.log(2)


# ----------------------------------------------------------------------------
# Text format "a+b*sqrt(d)"
# ----------------------------------------------------------------------------

_ELEM_RE = re.compile(
    r"""^\s*
    (?P<a>[+-]?\s*\d+(?:/\d+)?)?\s*
    (?:(?P<bsign>[+-])?\s*(?:(?P<b>\d+(?:/\d+)?)\s*\*\s*)?sqrt\(\s*(?P<d>[+-]?\d+)\s*\))?
    \s*$""",
    re.VERBOSE,
)


def parse_element(text: str, field: QuadField | None = None):
    """Parse ``"a+b*sqrt(d)"``; returns a Fraction when no sqrt term is given.

    A bare rational is lifted into ``field`` when one is supplied.
    """
    m = _ELEM_RE.match(text)
    if not m or (m.group("a") is None and m.group("d") is None):
        raise ParseError(f"cannot parse element {text!r}")
    a = Fraction(m.group("a").replace(" ", "")) if m.group("a") else Fraction(0)
    if m.group("d") is None:
        return FieldElement(field, a, 0) if field is not None else a
    if m.group("a") and m.group("bsign") is None:
        raise ParseError(f"missing sign before sqrt term in {text!r}")
    b = Fraction(m.group("b")) if m.group("b") else Fraction(1)
    if m.group("bsign") == "-":
        b = -b
    K = make_field(int(m.group("d")))
    if field is not None and field != K:
        raise ParseError(f"{text!r} does not live in {field}")
    return FieldElement(K, a, b)


def format_element(x) -> str:
    if not isinstance(x, FieldElement):
        return str(as_fraction(x))
    sign = "-" if x.b < 0 else "+"
    return f"{x.a}{sign}{abs(x.b)}*sqrt({x.field.d})"


# ----------------------------------------------------------------------------
# Units and torsion
# ----------------------------------------------------------------------------


def torsion_order(K: QuadField) -> int:
    if K.d == -1:
        return 4
    if K.d == -3:
        return 6
    return 2


def roots_of_unity(K: QuadField) -> list[FieldElement]:
    if K.d == -1:
        return [K(1), K(0, 1), K(-1), K(0, -1)]
    if K.d == -3:
        h = Fraction(1, 2)
        return [K(1), K(h, h), K(-h, h), K(-1), K(-h, -h), K(h, -h)]
    return [K(1), K(-1)]


def _cf_quadratic(P: int, Q: int, D: int):
    """Partial quotients of (P + sqrt(D)) / Q, requiring Q | D - P**2."""
    r = math.isqrt(D)
    while True:
        a = (P + r) // Q
        yield a
        P = a * Q - P
        Q = (D - P * P) // Q


@lru_cache(maxsize=None)
def fundamental_unit(K: QuadField) -> FieldElement:
    """Least unit > 1, read off the convergents of omega's continued fraction."""
    if not K.is_real:
        raise NotRealField(f"{K} is imaginary; its unit group is finite")
    d = K.d
    if d % 4 == 1:
        # omega = (1 + sqrt d)/2 = (P + sqrt D)/Q with P=1, Q=2, D=d
        quotients = _cf_quadratic(1, 2, d)
    else:
        quotients = _cf_quadratic(0, 1, d)
    omega = K.omega
    p_prev, p = 1, next(quotients)
    q_prev, q = 0, 1
    while True:
        u = p - q * omega
        if abs(u.norm()) == 1 and u != 1 and u != -1:
            break
        a = next(quotients)
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
    candidates = [u, -u, u.conj(), -u.conj()]
    return next(c for c in candidates if c.embed(1) > 1)
