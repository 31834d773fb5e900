"""Exact rationals, formal log-linear numbers, prime tables and rational detection.

Rationals are plain :class:`fractions.Fraction` values.  A
:class:`LogLinearNumber` is ``q0 + sum(q_p * log p) + float_part``; the
non-archimedean part of every functional value stays in the exact slots and
only genuinely irrational archimedean logs end up in ``float_part``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Optional, Union

import numpy as np

from .errors import FactorTooLarge, ZeroArgument

ExactRational = Fraction
Rational = Union[int, Fraction]

DEFAULT_TOL = 1e-9
DEFAULT_MAX_DEN = 10**6
SIEVE_LIMIT = 10**6

_ZERO = Fraction(0)


def as_fraction(x) -> Fraction:
    """Coerce ints, Fractions, floats (exactly) and ``"p/q"`` strings."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a rational")
    if isinstance(x, (int, float, str)):
        return Fraction(x)
    raise TypeError(f"cannot coerce {type(x).__name__} to a rational")


def format_fraction(q: Fraction) -> str:
    return str(q)


# ----------------------------------------------------------------------------
# Primes and factorization
# ----------------------------------------------------------------------------


@lru_cache(maxsize=1)
def _spf_table() -> np.ndarray:
    spf = np.zeros(SIEVE_LIMIT + 1, dtype=np.int64)
    spf[2::2] = 2
    for p in range(3, math.isqrt(SIEVE_LIMIT) + 1, 2):
        if spf[p] == 0:
            block = spf[p * p :: 2 * p]
            block[block == 0] = p
            spf[p] = p
    odd = np.arange(SIEVE_LIMIT + 1)
    mask = (spf == 0) & (odd >= 2)
    spf[mask] = odd[mask]
    return spf


@lru_cache(maxsize=1)
def _prime_array() -> np.ndarray:
    spf = _spf_table()
    idx = np.arange(SIEVE_LIMIT + 1)
    return idx[(spf == idx) & (idx >= 2)]


def primes_up_to(n: int) -> list[int]:
    if n > SIEVE_LIMIT:
        raise FactorTooLarge(f"prime tables only reach {SIEVE_LIMIT}")
    arr = _prime_array()
    return arr[: np.searchsorted(arr, n, side="right")].tolist()


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n <= SIEVE_LIMIT:
        return int(_spf_table()[n]) == n
    return factor_int(n) == {n: 1}


def factor_int(n: int) -> dict[int, int]:
    """Factor a nonzero integer (sign dropped).

    Uses the smallest-prime-factor sieve below 10**6 and trial division by the
    sieved primes above it, so anything up to 10**12 (or with at most one prime
    factor beyond the sieve) is handled; otherwise :class:`FactorTooLarge`.
    """
    n = abs(int(n))
    if n == 0:
        raise ZeroArgument("cannot factor 0")
    out: dict[int, int] = {}
    if n > SIEVE_LIMIT:
        for p in _prime_array().tolist():
            if p * p > n:
                break
            if n % p == 0:
                e = 0
                while n % p == 0:
                    n //= p
                    e += 1
                out[p] = e
                if n <= SIEVE_LIMIT:
                    break
        if n > SIEVE_LIMIT:
            if n > SIEVE_LIMIT * SIEVE_LIMIT:
                raise FactorTooLarge(
                    f"cofactor {n} exceeds the trial-division range ({SIEVE_LIMIT}**2)"
                )
            out[n] = out.get(n, 0) + 1
            return out
    spf = _spf_table()
    while n > 1:
        p = int(spf[n])
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        out[p] = out.get(p, 0) + e
    return out


def factor_rational(q: Rational) -> dict[int, int]:
    """p-adic valuations of a nonzero rational: {p: v_p(q)}."""
    if type(q) is int:
        if q == 0:
            raise ZeroArgument("cannot factor 0")
        return factor_int(q) if q not in (1, -1) else {}
    q = as_fraction(q)
    if q == 0:
        raise ZeroArgument("cannot factor 0")
    out = factor_int(q.numerator) if abs(q.numerator) > 1 else {}
    if q.denominator > 1:
        for p, e in factor_int(q.denominator).items():
            out[p] = out.get(p, 0) - e
    return out


def vp(n: Rational, p: int) -> int:
    """p-adic valuation of a nonzero rational."""
    q = as_fraction(n)
    if q == 0:
        raise ZeroArgument("valuation of 0")
    v = 0
    num, den = q.numerator, q.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


# ----------------------------------------------------------------------------
# Log-linear numbers
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class LogLinearNumber:
    """``rational_part + sum(q_p * ln p) + float_part``.

    ``log_terms`` is a sorted tuple of ``(prime, coefficient)`` pairs with no
    zero coefficients; use :attr:`logs` for a dict view.
    """

    rational_part: Fraction = _ZERO
    log_terms: tuple[tuple[int, Fraction], ...] = ()
    float_part: float = 0.0

    @classmethod
    def build(
        cls,
        rational_part: Rational = 0,
        log_terms: Optional[Mapping[int, Rational]] = None,
        float_part: float = 0.0,
    ) -> "LogLinearNumber":
        terms = tuple(
            sorted((int(p), as_fraction(q)) for p, q in (log_terms or {}).items() if q != 0)
        )
        return cls(as_fraction(rational_part), terms, float(float_part))

    @property
    def logs(self) -> dict[int, Fraction]:
        return dict(self.log_terms)

    @property
    def is_exact(self) -> bool:
        return self.float_part == 0.0

    @property
    def is_rational(self) -> bool:
        """True when the value is exact and carries no log terms."""
        return self.is_exact and not self.log_terms

    def __float__(self) -> float:
        return lln_to_float(self)

    def __add__(self, other: "LogLinearNumber") -> "LogLinearNumber":
        if not isinstance(other, LogLinearNumber):
            return NotImplemented
        logs = self.logs
        for p, q in other.log_terms:
            logs[p] = logs.get(p, _ZERO) + q
        return LogLinearNumber.build(
            self.rational_part + other.rational_part, logs, self.float_part + other.float_part
        )

    def __neg__(self) -> "LogLinearNumber":
        return LogLinearNumber(
            -self.rational_part, tuple((p, -q) for p, q in self.log_terms), -self.float_part
        )

    def __sub__(self, other: "LogLinearNumber") -> "LogLinearNumber":
        return self + (-other)

    def scale(self, t: Rational) -> "LogLinearNumber":
        t = as_fraction(t)
        return LogLinearNumber.build(
            self.rational_part * t,
            {p: q * t for p, q in self.log_terms},
            self.float_part * float(t),
        )

    def __str__(self) -> str:
        parts = []
        if self.rational_part != 0 or not (self.log_terms or self.float_part):
            parts.append(str(self.rational_part))
        for p, q in self.log_terms:
            parts.append(f"{q}*log({p})")
        if self.float_part:
            parts.append(repr(self.float_part))
        return " + ".join(parts)

    def to_json(self) -> dict:
        return {
            "rational": str(self.rational_part),
            "log_terms": {str(p): str(q) for p, q in self.log_terms},
            "float": self.float_part,
        }


ZERO_LLN = LogLinearNumber()


def lln_to_float(x: LogLinearNumber) -> float:
    total = float(x.rational_part)
    for p, q in x.log_terms:
        total += float(q) * math.log(p)
    return total + x.float_part


class LogAccumulator:
    """Mutable running sum used while building a :class:`LogLinearNumber`."""

    __slots__ = ("rational", "logs", "flt")

    def __init__(self, start: Optional[LogLinearNumber] = None):
        start = start or ZERO_LLN
        self.rational = start.rational_part
        self.logs = start.logs
        self.flt = start.float_part

    def add_log_terms(self, terms: Mapping[int, Fraction], t: Fraction) -> None:
        logs = self.logs
        for p, e in terms.items():
            logs[p] = logs.get(p, _ZERO) + t * e

    def add(self, coeff, logabs) -> None:
        p = logabs.place.p
        r = logabs.nonarch_exponent
        if r is not None:
            if r == 0:
                return
            if coeff.plain:
                self.logs[p] = self.logs.get(p, _ZERO) + coeff.plain * r
            if coeff.over_logp:
                self.rational += coeff.over_logp * r
            if coeff.flt:
                self.flt += coeff.flt * float(r) * math.log(p)
            return
        if coeff.over_logp:
            raise ValueError("a 1/log p coefficient cannot sit at an archimedean place")
        if coeff.plain:
            if logabs.arch_exact is not None:
                self.add_log_terms(logabs.arch_exact, coeff.plain)
            else:
                self.flt += float(coeff.plain) * logabs.arch_value
        if coeff.flt:
            self.flt += coeff.flt * logabs.arch_value

    def result(self) -> LogLinearNumber:
        return LogLinearNumber.build(self.rational, self.logs, self.flt)


def lln_scale_add(acc: LogLinearNumber, coeff, logabs) -> LogLinearNumber:
    """Return ``acc + coeff * logabs``.

    ``coeff`` is a local value (plain rational, rational over ``ln p``, float
    parts) and ``logabs`` a log-absolute value at the same place.  Exact
    pieces stay exact: ``(q/ln p) * (r ln p)`` lands in the rational part,
    ``q * (r ln p)`` in the log terms, anything touching a float in
    ``float_part``.
    """
    a = LogAccumulator(acc)
    a.add(coeff, logabs)
    return a.result()


def rational_detect(
    x: float, max_denominator: int = DEFAULT_MAX_DEN, tolerance: float = DEFAULT_TOL
) -> Optional[Fraction]:
    """Best rational approximation with bounded denominator, if close enough.

    ``Fraction.limit_denominator`` walks the continued fraction of ``x`` and
    returns the closest ``p/q`` with ``q <= max_denominator``.
    """
    if max_denominator < 1 or tolerance <= 0:
        raise ValueError("need max_denominator >= 1 and tolerance > 0")
    if not math.isfinite(x):
        return None
    best = Fraction(x).limit_denominator(max_denominator)
    if abs(x - float(best)) <= tolerance:
        return best
    return None


def detection_is_vacuous(max_denominator: int, tolerance: float) -> bool:
    """Whether every real lies within ``tolerance`` of some admissible fraction.

    Consecutive convergents bracket x with error below ``1/(q*max_den)``, so
    once ``tolerance * max_den**2 >= 1`` a positive detection carries no
    information for most inputs.
    """
    return tolerance * max_denominator * max_denominator >= 1


def sum_llns(values: Iterable[LogLinearNumber]) -> LogLinearNumber:
    total = ZERO_LLN
    for v in values:
        total = total + v
    return total
