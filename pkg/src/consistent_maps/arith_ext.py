"""Completely additive arithmetic functions and their consistent-map extensions.

Each of ln, Omega (prime factors with multiplicity) and Psi (sum of prime
factors with multiplicity) is Phi_c for a Q-based map c with c(Q, inf) = 0:

    ln:    c(Q, p) = -1
    Omega: c(Q, p) = -1 / ln p
    Psi:   c(Q, p) = -p / ln p
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from enum import Enum
from fractions import Fraction
from typing import Iterable, Sequence

from .consistent import (
    LOG_EXT,
    OMEGA_EXT,
    PSI_EXT,
    ZERO_VALUE,
    ConsistentMap,
    NamedRule,
    evaluate_at,
    lambda_value,
)
from .numerics import Rational, factor_rational, primes_up_to
from .places import arch_places, places_over_prime
from .quadfield import QQ, QuadField


class AdditiveFunctionKind(str, Enum):
    LogExt = LOG_EXT
    OmegaExt = OMEGA_EXT
    PsiExt = PSI_EXT


def omega(n: Rational) -> Fraction:
    """Big Omega extended additively to nonzero rationals; Omega(4/9) = 0."""
    return Fraction(sum(factor_rational(n).values()))


def psi(n: Rational) -> Fraction:
    """Sum of prime factors with multiplicity; psi(1/2) = -2."""
    return Fraction(sum(p * e for p, e in factor_rational(n).items()))


def build_extension(kind) -> ConsistentMap:
    kind = AdditiveFunctionKind(kind)
    return ConsistentMap(QQ, (ZERO_VALUE,), NamedRule(kind.value))


@dataclass
class ContinuityReport:
    prime_bound: int
    max_ratio: float = 0.0
    argmax: dict = dc_field(default_factory=dict)
    # (p, |c(Q,p)/lambda(Q,p)|) for every prime in range
    q_sequence: list = dc_field(default_factory=list)
    sampled_fields: list = dc_field(default_factory=list)

    def to_json(self, with_sequence: bool = False) -> dict:
        out = {
            "prime_bound": self.prime_bound,
            "max_ratio": self.max_ratio,
            "argmax": self.argmax,
            "sampled_fields": self.sampled_fields,
            "note": "sampled over the listed fields and primes only",
        }
        if with_sequence:
            out["q_sequence"] = self.q_sequence
        return out


def continuity_diagnostic(
    c: ConsistentMap, prime_bound: int, sample_fields: Sequence[QuadField] = ()
) -> ContinuityReport:
    """max |c(K, v) / lambda(K, v)| over Q and ``sample_fields`` at places over p <= bound.

    Ties keep the first location found (Q before the sample fields, small p first).
    """
    report = ContinuityReport(prime_bound, sampled_fields=["Q"] + [f.d for f in sample_fields])

    def visit(F, v):
        ratio = abs(evaluate_at(c, F, v).to_float(v.p) / float(lambda_value(F, v)))
        if ratio > report.max_ratio or not report.argmax:
            report.max_ratio = ratio
            report.argmax = {"field": "Q" if F is QQ else F.d, "place": v.label(), "p": v.p}
        return ratio

    primes = primes_up_to(prime_bound)
    fields: Iterable = [QQ, *sample_fields]
    for F in fields:
        for v in arch_places(F):
            visit(F, v)
        for p in primes:
            for w in places_over_prime(F, p):
                r = visit(F, w)
                if F is QQ:
                    report.q_sequence.append((p, r))
    return report


def closed_form_ratio(kind, p: int) -> float:
    """|c(Q,p)/lambda(Q,p)| for the named extensions, for cross-checks."""
    kind = AdditiveFunctionKind(kind)
    if kind is AdditiveFunctionKind.LogExt:
        return 1.0
    if kind is AdditiveFunctionKind.OmegaExt:
        return 1 / math.log(p)
    return p / math.log(p)

