"""Evaluating Phi_c(x) = sum_v c(K, v) log ||x||_v and checks built on it."""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Callable, Iterable, Optional

from .consistent import ConsistentMap, LocalValue, evaluate_at, lambda_value
from .errors import GeneratorNotFound, UnsupportedFieldPair, ZeroElement
from .numerics import (
    DEFAULT_TOL,
    LogAccumulator,
    LogLinearNumber,
    Rational,
    as_fraction,
    factor_rational,
    lln_to_float,
    primes_up_to,
)
from .places import (
    Place,
    arch_places,
    finite_support,
    ideal_generator_search,
    lambda_weight,
    log_abs,
    _places_over_prime,
    places_over_prime,
)
from .quadfield import QQ, Field, FieldElement, QuadField, fundamental_unit


@dataclass
class PhiResult:
    value: LogLinearNumber
    terms: list = dc_field(default_factory=list)

    def to_json(self) -> dict:
        v = self.value
        return {
            "value": str(v),
            "value_exact": v.to_json() if v.is_exact else None,
            "value_float": lln_to_float(v),
            "terms": self.terms,
        }


def _is_zero(x) -> bool:
    return x.is_zero() if isinstance(x, FieldElement) else x == 0


def weighted_log_sum(
    F: Field,
    x,
    coeff: Callable[[Place], LocalValue],
    exponent: Rational = 1,
    combine_arch: bool = True,
    record_terms: bool = False,
) -> PhiResult:
    """``sum_v coeff(v) * log ||x**exponent||_v`` over the support of x in F.

    With ``combine_arch`` the plain-rational parts of the archimedean
    coefficients are split as ``s/2 * ln|N x| + t/2 * ln|x/x'|``; the first
    piece is exact, so e.g. equal coefficients never leave the exact path.
    """
    if _is_zero(x):
        raise ZeroElement("Phi is undefined at 0")
    exponent = as_fraction(exponent)
    if not record_terms:
        q = x.a if isinstance(x, FieldElement) and x.b == 0 else x
        if not isinstance(q, FieldElement):
            return PhiResult(_rational_log_sum(F, q, coeff, exponent))
    acc = LogAccumulator()
    terms = []
    arch = arch_places(F)
    irrational = isinstance(x, FieldElement) and x.b != 0
    arch_coeffs = [coeff(v) for v in arch]
    if combine_arch and irrational:
        norm_logs = factor_rational(x.norm())
        plains = [c.plain for c in arch_coeffs]
        if len(arch) == 2:
            sym = (plains[0] + plains[1]) / 2
            anti = (plains[0] - plains[1]) / 2
            if sym:
                acc.add_log_terms(norm_logs, sym * exponent)
            if anti:
                diff = x.log_abs_embedding(1) - x.log_abs_embedding(2)
                acc.flt += float(anti * exponent) * diff
        elif plains[0]:
            acc.add_log_terms(norm_logs, plains[0] * exponent / 2)
        for v, c in zip(arch, arch_coeffs):
            la = None
            if c.flt:
                la = log_abs(x, v, exponent)
                acc.flt += c.flt * la.arch_value
            if record_terms:
                la = la or log_abs(x, v, exponent)
                terms.append({"place": v.label(), "coeff": c.to_json(), "logabs": la.to_json()})
    else:
        for v, c in zip(arch, arch_coeffs):
            if c.is_zero and not record_terms:
                continue
            la = log_abs(x, v, exponent)
            acc.add(c, la)
            if record_terms:
                terms.append({"place": v.label(), "coeff": c.to_json(), "logabs": la.to_json()})
    for w in finite_support(x, F):
        c = coeff(w)
        if c.is_zero and not record_terms:
            continue
        la = log_abs(x, w, exponent)
        acc.add(c, la)
        if record_terms:
            terms.append({"place": w.label(), "coeff": c.to_json(), "logabs": la.to_json()})
    return PhiResult(acc.result(), terms)


def _rational_log_sum(F: Field, q: Rational, coeff, exponent: Fraction) -> LogLinearNumber:
    # ||q||_w = p**(-v_p(q)) at every w | p whatever the splitting, and
    # ln|q| = sum v_p ln p at every archimedean place
    vals = factor_rational(q)
    logs: dict = {}
    rational = 0
    flt = 0.0
    for v in arch_places(F):
        c = coeff(v)
        if c.over_logp:
            raise ValueError("a 1/log p coefficient cannot sit at an archimedean place")
        if c.plain:
            t = c.plain * exponent
            for p, e in vals.items():
                logs[p] = logs.get(p, 0) + t * e
        if c.flt and vals:
            flt += c.flt * float(exponent) * sum(e * math.log(p) for p, e in vals.items())
    # integer coefficients (the usual case) stay in Python ints, which is
    # several times faster than Fraction arithmetic
    integral = exponent.denominator == 1
    for p, e in vals.items():
        r = -exponent.numerator * e if integral else -exponent * e
        for w in _places_over_prime(F, p):
            c = coeff(w)
            plain, olp = c.plain, c.over_logp
            if plain:
                t = plain.numerator * r if integral and plain.denominator == 1 else plain * r
                logs[p] = logs.get(p, 0) + t
            if olp:
                rational += olp.numerator * r if integral and olp.denominator == 1 else olp * r
            if c.flt:
                flt += c.flt * float(r) * math.log(p)
    terms = tuple(sorted((p, Fraction(t)) for p, t in logs.items() if t))
    return LogLinearNumber(Fraction(rational), terms, flt)


def _eval_field(c: ConsistentMap, x, field: Optional[Field]):
    if isinstance(x, FieldElement):
        if field is not None and field != x.field:
            raise UnsupportedFieldPair(f"{x} does not live in {field}")
        return x.field, x
    q = x if type(x) is int else as_fraction(x)
    F = QQ if field is None else field
    if F is QQ:
        return QQ, q
    return F, F(q, 0)


def phi_breakdown(
    c: ConsistentMap, x, exponent: Rational = 1, field: Optional[Field] = None, combine_arch: bool = True
) -> PhiResult:
    F, x = _eval_field(c, x, field)
    return weighted_log_sum(
        F, x, lambda v: evaluate_at(c, F, v), exponent, combine_arch, record_terms=True
    )


def phi_eval(
    c: ConsistentMap, x, exponent: Rational = 1, field: Optional[Field] = None, combine_arch: bool = True
) -> LogLinearNumber:
    """Phi_c(x**exponent).

    Rational x is evaluated over Q unless ``field`` asks for a quadratic field.
    """
    F, x = _eval_field(c, x, field)
    coeff = c.own if F == c.base else (lambda v: evaluate_at(c, F, v))
    return weighted_log_sum(F, x, coeff, exponent, combine_arch).value


# ----------------------------------------------------------------------------
# Checks
# ----------------------------------------------------------------------------


@dataclass
class CheckReport:
    name: str
    passed: bool = True
    entries: list = dc_field(default_factory=list)
    failures: list = dc_field(default_factory=list)
    notes: dict = dc_field(default_factory=dict)

    def record(self, entry: dict, ok: bool) -> None:
        entry = dict(entry, ok=ok)
        self.entries.append(entry)
        if not ok:
            self.passed = False
            self.failures.append(entry)

    def to_json(self) -> dict:
        return {
            "check": self.name,
            "passed": self.passed,
            "n": len(self.entries),
            "failures": self.failures,
            "notes": self.notes,
            "entries": self.entries,
        }


def product_formula_check(K: Field, samples: Iterable, tol: float = DEFAULT_TOL) -> CheckReport:
    """|sum_v lambda(K, v) log ||x||_v| <= tol for each sample.

    Archimedean logs are taken embedding by embedding in floating point, so
    this exercises the absolute values themselves rather than the norm.
    """
    report = CheckReport("product-formula", notes={"tol": tol})
    for i, x in enumerate(samples):
        if not isinstance(x, FieldElement) and K is not QQ:
            x = K(x, 0)
        res = weighted_log_sum(
            K, x, lambda v: LocalValue(plain=lambda_weight(v)), combine_arch=False
        )
        total = lln_to_float(res.value)
        report.record(
            {"index": i, "x": str(x), "sum": total, "exact_zero": res.value == LogLinearNumber()},
            abs(total) <= tol,
        )
    return report


def norm_compatibility_check(c: ConsistentMap, x: FieldElement, tol: float = DEFAULT_TOL) -> CheckReport:
    """Phi_c(x) == Phi_c(Norm x) / 2 for a Q-based map and x in a quadratic field."""
    if c.base is not QQ:
        raise ValueError("norm compatibility is stated for Q-based maps")
    lhs = phi_eval(c, x)
    rhs = phi_eval(c, x.norm()).scale(Fraction(1, 2))
    report = CheckReport("norm-compatibility")
    if lhs.is_exact and rhs.is_exact:
        ok = lhs == rhs
        mode = "exact"
    else:
        ok = abs(lln_to_float(lhs) - lln_to_float(rhs)) <= tol
        mode = "float"
    report.record({"x": str(x), "phi_x": str(lhs), "half_phi_norm": str(rhs), "mode": mode}, ok)
    return report


def zero_phi_classify(
    c: ConsistentMap, K: QuadField, prime_bound: int, tol: float = DEFAULT_TOL
) -> CheckReport:
    """Decide whether Phi_c vanishes on K's test points and, if so, verify
    c(K, v) = c(Q, inf) * lambda(K, v) at every tested place.

    Test points: the fundamental unit (real K) and one prime generator per
    finite place over p <= prime_bound.
    """
    report = CheckReport("kernel")
    points: list[tuple[str, FieldElement]] = []
    if K.is_real:
        points.append(("unit", fundamental_unit(K)))
    tested_places = list(arch_places(K))
    for p in primes_up_to(prime_bound):
        for w in places_over_prime(K, p):
            try:
                beta = ideal_generator_search(K, w)
            except GeneratorNotFound as exc:
                report.notes.setdefault("skipped", []).append({"place": w.label(), "reason": str(exc)})
                continue
            points.append((w.label(), beta))
            tested_places.append(w)
    witness = None
    for label, x in points:
        val = lln_to_float(phi_eval(c, x))
        if abs(val) > tol and witness is None:
            witness = {"point": label, "x": str(x), "phi": val}
    if witness is not None:
        report.notes["branch"] = "not_in_kernel"
        report.notes["witness"] = witness
        report.passed = True
        return report
    r = evaluate_at(c, QQ, Place(QQ, 0, "arch")).to_float()
    report.notes["branch"] = "kernel"
    report.notes["c_Q_inf"] = r
    for v in tested_places:
        got = evaluate_at(c, K, v).to_float(v.p)
        lam = float(lambda_value(K, v))
        report.record(
            {"place": v.label(), "c": got, "lambda": lam, "r_lambda": r * lam}, abs(got - r * lam) <= tol
        )
    return report
