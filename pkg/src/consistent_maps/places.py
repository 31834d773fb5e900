"""Places of Q and of quadratic fields, valuations and normalized absolute values.

For a place v over p the absolute value is the extension of the p-adic one,
so ``||p||_v = 1/p`` for every v | p and ``||x||_w = p**(-v_P(x)/e)``.  Only
logarithms are ever materialized: a :class:`LogAbsValue` holds the exponent
``r`` with ``||x||_w = p**r`` at finite places and ``ln|sigma(x)|`` at
infinite ones.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional

from .errors import GeneratorNotFound, ParseError, ZeroElement
from .numerics import Rational, as_fraction, factor_rational, is_prime, vp
from .quadfield import QQ, Field, FieldElement, QuadField, fundamental_unit, roots_of_unity

SPLIT, INERT, RAMIFIED = "split", "inert", "ram"
DEFAULT_GENERATOR_BOUND = 10**4


@dataclass(frozen=True)
class Place:
    """A place of ``field``.

    ``p`` is 0 for archimedean places.  ``kind`` is one of ``"arch"``,
    ``"prime"`` (finite place of Q), ``"split"``, ``"inert"``, ``"ram"``;
    ``index`` numbers the two archimedean embeddings or the two split places.
    """

    field: Field
    p: int
    kind: str
    index: int = 1

    @property
    def is_archimedean(self) -> bool:
        return self.p == 0

    @property
    def local_degree(self) -> int:
        if self.kind in (INERT, RAMIFIED):
            return 2
        if self.kind == "arch" and self.field is not QQ and not self.field.is_real:
            return 2
        return 1

    @property
    def ramification(self) -> int:
        return 2 if self.kind == RAMIFIED else 1

    def below(self) -> "Place":
        return q_place(self.p)

    def label(self) -> str:
        if self.field is QQ:
            return "inf" if self.p == 0 else str(self.p)
        if self.p == 0:
            return f"inf:{self.index}"
        if self.kind == SPLIT:
            return f"{self.p}:split:{self.index}"
        return f"{self.p}:{self.kind}"

    def __str__(self) -> str:
        return self.label()

    def __lt__(self, other: "Place") -> bool:
        return (self.p, self.index) < (other.p, other.index)


def q_place(p: int) -> Place:
    return Place(QQ, 0, "arch") if p == 0 else Place(QQ, p, "prime")


Q_INF = q_place(0)


@dataclass(frozen=True)
class LogAbsValue:
    """log ||x||_v at one place.

    Finite places populate ``nonarch_exponent`` (``||x||_v = p**r``).
    Infinite places populate ``arch_value`` (a float) and, when x is rational,
    ``arch_exact`` with the exact expansion ``{p: v_p(x)}`` of ``ln|x|``.
    """

    place: Place
    nonarch_exponent: Optional[Fraction] = None
    arch_value: Optional[float] = None
    arch_exact: Optional[dict] = None

    def to_float(self) -> float:
        if self.nonarch_exponent is not None:
            return float(self.nonarch_exponent) * math.log(self.place.p)
        return self.arch_value

    def to_json(self):
        if self.nonarch_exponent is not None:
            return {"exponent": str(self.nonarch_exponent), "p": self.place.p}
        return {"log": self.arch_value}


# ----------------------------------------------------------------------------
# Splitting
# ----------------------------------------------------------------------------


def kronecker(D: int, p: int) -> int:
    """Kronecker symbol (D/p) for a prime p."""
    if p == 2:
        if D % 2 == 0:
            return 0
        return 1 if D % 8 in (1, 7) else -1
    r = D % p
    if r == 0:
        return 0
    return 1 if pow(r, (p - 1) // 2, p) == 1 else -1


def splitting_type(K: QuadField, p: int) -> str:
    k = kronecker(K.discriminant, p)
    return RAMIFIED if k == 0 else (SPLIT if k == 1 else INERT)


def arch_places(F: Field) -> list[Place]:
    if F is QQ:
        return [Q_INF]
    return [Place(F, 0, "arch", i) for i in range(1, F.n_arch + 1)]


def places_above(K: Field, q: Place) -> list[Place]:
    """Places of K dividing the place q of Q, in canonical order."""
    if K is QQ:
        return [q]
    if q.p == 0:
        return arch_places(K)
    kind = splitting_type(K, q.p)
    if kind == SPLIT:
        return [Place(K, q.p, SPLIT, 1), Place(K, q.p, SPLIT, 2)]
    return [Place(K, q.p, kind)]


@lru_cache(maxsize=1 << 16)
def _places_over_prime(F: Field, p: int) -> tuple:
    return tuple(places_above(F, q_place(p)))


def places_over_prime(F: Field, p: int) -> list[Place]:
    return list(_places_over_prime(F, p))


def parse_place(text: str, F: Field) -> Place:
    """Inverse of :meth:`Place.label` for the field ``F``."""
    t = text.strip()
    if F is QQ:
        if t in ("inf", "inf:1"):
            return Q_INF
        if t.isdigit() and is_prime(int(t)):
            return q_place(int(t))
        raise ParseError(f"bad place label {text!r} for QQ")
    m = re.fullmatch(r"inf:(\d)|(\d+):(split):([12])|(\d+):(inert|ram)", t)
    if not m:
        raise ParseError(f"bad place label {text!r}")
    if m.group(1):
        i = int(m.group(1))
        if not 1 <= i <= F.n_arch:
            raise ParseError(f"{F} has no archimedean place {i}")
        return Place(F, 0, "arch", i)
    p = int(m.group(2) or m.group(5))
    if not is_prime(p):
        raise ParseError(f"{p} is not prime")
    kind = m.group(3) or m.group(6)
    if splitting_type(F, p) != kind:
        raise ParseError(f"{p} is {splitting_type(F, p)} in {F}, not {kind}")
    return Place(F, p, kind, int(m.group(4)) if m.group(4) else 1)


# ----------------------------------------------------------------------------
# p-adic embeddings of sqrt(d) at split primes
# ----------------------------------------------------------------------------


def _sqrt_mod_prime(n: int, p: int) -> int:
    """Tonelli-Shanks square root of a quadratic residue modulo an odd prime."""
    n %= p
    if n == 0:
        return 0
    if p % 4 == 3:
        return pow(n, (p + 1) // 4, p)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(n, q, p), pow(n, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c, t, r = i, b * b % p, t * b * b % p, r * b % p
    return r


@lru_cache(maxsize=4096)
def _omega_root(d: int, p: int, index: int, prec: int) -> int:
    """Root of omega's minimal polynomial mod p**prec for split place ``index``.

    Place 1 is the one where sqrt(d) reduces to the residue in (0, p/2); for
    p = 2 (d = 1 mod 8) it is the one with omega = 1 mod 2.
    """
    if d % 4 == 1:
        c0 = (d - 1) // 4

        def f(x):
            return x * x - x - c0

        def df(x):
            return 2 * x - 1

        if p == 2:
            rho = 1 if index == 1 else 0
        else:
            r = _sqrt_mod_prime(d, p)
            if r > p // 2:
                r = p - r
            if index == 2:
                r = p - r
            rho = (r + 1) * pow(2, -1, p) % p
    else:

        def f(x):
            return x * x - d

        def df(x):
            return 2 * x

        r = _sqrt_mod_prime(d, p)
        if r > p // 2:
            r = p - r
        rho = r if index == 1 else p - r
    k = 1
    while k < prec:
        k = min(2 * k, prec)
        mod = p**k
        rho = (rho - f(rho) * pow(df(rho), -1, mod)) % mod
    return rho % p**prec


def sqrt_d_padic(d: int, p: int, index: int, prec: int) -> int:
    """Image of sqrt(d) in Z/p**prec under split place ``index``."""
    rho = _omega_root(d, p, index, prec + 1)
    mod = p**prec
    return (2 * rho - 1) % mod if d % 4 == 1 else rho % mod


# ----------------------------------------------------------------------------
# Valuations and absolute values
# ----------------------------------------------------------------------------


def _check_nonzero(x):
    if (isinstance(x, FieldElement) and x.is_zero()) or (not isinstance(x, FieldElement) and x == 0):
        raise ZeroElement("the zero element has no valuation")


def valuation(x, w: Place) -> int:
    """Prime-ideal valuation v_P(x) at the finite place w."""
    _check_nonzero(x)
    if w.is_archimedean:
        raise ValueError("valuation needs a non-archimedean place")
    p = w.p
    if not isinstance(x, FieldElement):
        v = vp(x, p)
        return v * w.ramification
    if x.field != w.field:
        raise ValueError(f"{x} is not in {w.field}")
    if x.b == 0 and w.field is not QQ:
        return vp(x.a, p) * w.ramification
    if w.kind != SPLIT:
        n = vp(x.norm(), p)
        # inert: N(P) = p**2 so v_p(N x) = 2 v_P(x); ramified: N(P) = p
        return n // 2 if w.kind == INERT else n
    A, B, D = x.integer_form()
    N = A * A - w.field.d * B * B
    prec = vp(N, p) + 1
    s = sqrt_d_padic(w.field.d, p, w.index, prec)
    t = (A + B * s) % p**prec
    v = 0
    while t % p == 0 and v < prec:
        t //= p
        v += 1
    return v - vp(D, p)


def lambda_weight(v: Place) -> Fraction:
    return Fraction(v.local_degree, v.field.degree)


def log_abs(x, v: Place, exponent: Rational = 1) -> LogAbsValue:
    """log ||x**exponent||_v."""
    _check_nonzero(x)
    exponent = as_fraction(exponent)
    if not v.is_archimedean:
        r = -exponent * Fraction(valuation(x, v), v.ramification)
        return LogAbsValue(v, nonarch_exponent=r)
    if isinstance(x, FieldElement) and x.b != 0:
        return LogAbsValue(v, arch_value=float(exponent) * x.log_abs_embedding(v.index))
    q = x.a if isinstance(x, FieldElement) else as_fraction(x)
    exact = {p: e * exponent for p, e in factor_rational(q).items()}
    value = float(exponent) * (math.log(abs(q.numerator)) - math.log(q.denominator))
    return LogAbsValue(v, arch_value=value, arch_exact=exact)


def support_primes(x) -> list[int]:
    """Primes p such that some place over p has ||x|| != 1."""
    n = x.norm() if isinstance(x, FieldElement) else as_fraction(x)
    return sorted(factor_rational(n))


def finite_support(x, F: Field) -> list[Place]:
    out = []
    for p in support_primes(x):
        for w in places_over_prime(F, p):
            if valuation(x, w) != 0:
                out.append(w)
    return out


# ----------------------------------------------------------------------------
# Generators of prime ideals
# ----------------------------------------------------------------------------


def _unit_normal_key(x: FieldElement):
    return (abs(x.b), abs(x.a), x.a < 0, x.a == 0 and x.b < 0)


def normalize_associate(x: FieldElement) -> FieldElement:
    """Canonical representative of x up to units and sign.

    Minimizes |b|, then |a|, then prefers a > 0 (b > 0 when a = 0).  For a
    real field the orbit is walked with the fundamental unit until |b| stops
    decreasing.
    """
    K = x.field
    cands = [x * z for z in roots_of_unity(K)]
    if K.is_real:
        eps = fundamental_unit(K)
        for step in (eps, eps.inverse()):
            y = x
            best = abs(x.b)
            while True:
                y = y * step
                if abs(y.b) > best:
                    break
                best = abs(y.b)
                cands.extend([y, -y])
    return min(cands, key=_unit_normal_key)


@lru_cache(maxsize=8192)
def _generator_cached(K: QuadField, p: int, kind: str, index: int, bound: int) -> FieldElement:
    w = Place(K, p, kind, index)
    if kind == INERT:
        return K(p, 0)
    d = K.d
    half = d % 4 == 1
    # elements (A + B sqrt d)/den with |A^2 - d B^2| = target
    den = 2 if half else 1
    target = 4 * p if half else p
    for B in range(0, bound + 1):
        found = []
        for sgn in (1, -1):
            A2 = d * B * B + sgn * target
            if A2 < 0:
                continue
            A = math.isqrt(A2)
            if A * A != A2 or (half and (A - B) % 2):
                continue
            for a_ in {A, -A}:
                for b_ in {B, -B}:
                    x = K(Fraction(a_, den), Fraction(b_, den))
                    if valuation(x, w) >= 1:
                        found.append(x)
        if found:
            return min(found, key=_unit_normal_key)
        if d < 0 and -d * B * B > target:
            break
    raise GeneratorNotFound(
        f"no generator of the prime over {p} at {w.label()} in {K} with coordinates up to "
        f"{bound}; the ideal may be non-principal (class number > 1)"
    )


def ideal_generator_search(K: QuadField, w: Place, bound: int = DEFAULT_GENERATOR_BOUND) -> FieldElement:
    """Integral beta with v_w(beta) = 1 and beta a unit at every other finite place.

    Scans the sqrt(d)-coordinate upward, so the first hit already has the
    least |b| in its associate class; ties go to the least |a|, then a > 0.
    """
    if w.is_archimedean:
        raise ValueError("generators exist only for finite places")
    if w.field != K:
        raise ValueError(f"{w} is not a place of {K}")
    return _generator_cached(K, w.p, w.kind, w.index, bound)
