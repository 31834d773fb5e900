"""Consistent maps on (field, place) pairs.

A map is stored by its values on one base field (Q or a single quadratic
field) and extended lazily: to a quadratic field over a Q-based map by
``c(K, w) = [K_w : Q_q] / [K : Q] * c(Q, q)``, and down to Q from a K-based
map by summing over the places above.  Both directions keep
``c(K', v) = sum_{w | v} c(L, w)`` true by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Optional, Union

from .errors import IncompleteArchValues, ParseError, UnsupportedFieldPair
from .numerics import Rational, as_fraction, primes_up_to
from .places import (
    Place,
    arch_places,
    lambda_weight,
    parse_place,
    places_above,
    q_place,
)
from .quadfield import QQ, Field, QuadField, make_field

Scalar = Union[int, Fraction, float]
_ZERO = Fraction(0)


def _exact(t: Scalar) -> Fraction:
    # floats are dyadic rationals; converting keeps the value bit-for-bit
    return as_fraction(t)


@dataclass(frozen=True)
class LocalValue:
    """``plain + over_logp / ln(p) + flt`` at one place.

    ``PlainRational(q)``, ``OverLogP(q)`` and ``Float(x)`` build the three
    pure forms; sums of different forms keep each part separately.
    """

    plain: Fraction = _ZERO
    over_logp: Fraction = _ZERO
    flt: float = 0.0

    def __add__(self, other: "LocalValue") -> "LocalValue":
        return LocalValue(self.plain + other.plain, self.over_logp + other.over_logp, self.flt + other.flt)

    def __neg__(self) -> "LocalValue":
        return LocalValue(-self.plain, -self.over_logp, -self.flt)

    def __sub__(self, other: "LocalValue") -> "LocalValue":
        return self + (-other)

    def scale(self, t: Scalar) -> "LocalValue":
        if isinstance(t, float):
            q = _exact(t) if (self.plain or self.over_logp) else _ZERO
            return LocalValue(self.plain * q, self.over_logp * q, self.flt * t)
        t = as_fraction(t)
        return LocalValue(self.plain * t, self.over_logp * t, self.flt * float(t))

    @property
    def is_exact(self) -> bool:
        return self.flt == 0.0

    @property
    def is_zero(self) -> bool:
        return not self.plain and not self.over_logp and not self.flt

    @property
    def kind(self) -> str:
        parts = [n for n, v in (("plain", self.plain), ("over_logp", self.over_logp), ("float", self.flt)) if v]
        if not parts:
            return "plain"
        return parts[0] if len(parts) == 1 else "mixed"

    def to_float(self, p: int = 0) -> float:
        total = float(self.plain) + self.flt
        if self.over_logp:
            if p < 2:
                raise ValueError("a 1/log p value needs a finite place")
            total += float(self.over_logp) / math.log(p)
        return total

    def to_json(self) -> dict:
        out = {}
        if self.plain or self.is_zero:
            out["q"] = str(self.plain)
        if self.over_logp:
            out["q_over_logp"] = str(self.over_logp)
        if self.flt:
            out["float"] = self.flt
        return out

    @classmethod
    def from_json(cls, obj) -> "LocalValue":
        if isinstance(obj, (int, float)) and not isinstance(obj, bool):
            return Float(float(obj)) if isinstance(obj, float) else PlainRational(obj)
        if isinstance(obj, str):
            return PlainRational(Fraction(obj))
        if not isinstance(obj, dict) or not set(obj) <= {"q", "q_over_logp", "float"}:
            raise ParseError(f"bad local value {obj!r}")
        return cls(
            Fraction(obj.get("q", "0")),
            Fraction(obj.get("q_over_logp", "0")),
            float(obj.get("float", 0.0)),
        )

    def __str__(self) -> str:
        bits = []
        if self.plain or self.is_zero:
            bits.append(str(self.plain))
        if self.over_logp:
            bits.append(f"{self.over_logp}/log(p)")
        if self.flt:
            bits.append(repr(self.flt))
        return " + ".join(bits)


def PlainRational(q: Rational) -> LocalValue:
    return LocalValue(plain=as_fraction(q))


def OverLogP(q: Rational) -> LocalValue:
    return LocalValue(over_logp=as_fraction(q))


def Float(x: float) -> LocalValue:
    return LocalValue(flt=float(x))


ZERO_VALUE = LocalValue()
_MINUS_ONE = LocalValue(plain=Fraction(-1))
_MINUS_ONE_OVER_LOGP = LocalValue(over_logp=Fraction(-1))


@lru_cache(maxsize=1 << 16)
def _minus_p_over_logp(p: int) -> LocalValue:
    return LocalValue(over_logp=Fraction(-p))


def to_local_value(v) -> LocalValue:
    if isinstance(v, LocalValue):
        return v
    if isinstance(v, float):
        return Float(v)
    return PlainRational(v)


def local_values_equal(x: LocalValue, y: LocalValue, p: int = 0, tol: float = 1e-12) -> bool:
    """Exact comparison when both sides are exact, else ``|x - y| <= tol``."""
    if x.is_exact and y.is_exact:
        return x.plain == y.plain and x.over_logp == y.over_logp
    return abs(x.to_float(p) - y.to_float(p)) <= tol


# ----------------------------------------------------------------------------
# Non-archimedean rules
# ----------------------------------------------------------------------------


class Rule:
    """Values of a map at the finite places of its base field."""

    def value(self, place: Place) -> LocalValue:
        raise NotImplementedError

    def supports(self, base: Field) -> bool:
        return True

    def to_json(self):
        raise NotImplementedError


@dataclass(frozen=True)
class ZeroRule(Rule):
    def value(self, place):
        return ZERO_VALUE

    def to_json(self):
        return "zero"


LOG_EXT, OMEGA_EXT, PSI_EXT = "log", "omega", "psi"


@dataclass(frozen=True)
class NamedRule(Rule):
    """The Q-based rules extending ln, Omega and Psi (zero at infinity)."""

    kind: str

    def __post_init__(self):
        if self.kind not in (LOG_EXT, OMEGA_EXT, PSI_EXT):
            raise ValueError(f"unknown rule {self.kind!r}")

    def value(self, place):
        if self.kind == LOG_EXT:
            return _MINUS_ONE
        if self.kind == OMEGA_EXT:
            return _MINUS_ONE_OVER_LOGP
        return _minus_p_over_logp(place.p)

    def supports(self, base):
        return base is QQ

    def to_json(self):
        return self.kind


@dataclass(frozen=True)
class ExplicitRule(Rule):
    """Finitely many listed values; zero elsewhere."""

    values: tuple = ()

    @classmethod
    def from_mapping(cls, mapping: Mapping[Place, object]) -> "ExplicitRule":
        items = []
        for place, v in mapping.items():
            if place.is_archimedean:
                raise ValueError("explicit rules hold finite places only")
            v = to_local_value(v)
            if not v.is_zero:
                items.append((place, v))
        return cls(tuple(sorted(items, key=lambda kv: (kv[0].p, kv[0].index))))

    def value(self, place):
        for pl, v in self.values:
            if pl == place:
                return v
        return ZERO_VALUE

    def supports(self, base):
        return all(pl.field == base for pl, _ in self.values)

    def to_json(self):
        return {"explicit": {pl.label(): v.to_json() for pl, v in self.values}}


@dataclass(frozen=True)
class SumRule(Rule):
    """Linear combination ``sum(coef * rule)`` of rules on one base."""

    terms: tuple = ()

    @classmethod
    def combine(cls, pairs: Iterable[tuple[Scalar, Rule]]) -> Rule:
        flat = []
        for coef, rule in pairs:
            if isinstance(rule, ZeroRule) or coef == 0:
                continue
            if isinstance(rule, SumRule):
                flat.extend((_mul_scalars(coef, c), r) for c, r in rule.terms)
            else:
                flat.append((coef, rule))
        if not flat:
            return ZeroRule()
        if len(flat) == 1 and flat[0][0] == 1 and not isinstance(flat[0][0], float):
            return flat[0][1]
        return cls(tuple(flat))

    def value(self, place):
        total = ZERO_VALUE
        for coef, rule in self.terms:
            total = total + rule.value(place).scale(coef)
        return total

    def supports(self, base):
        return all(r.supports(base) for _, r in self.terms)

    def to_json(self):
        return {"sum": [{"coef": _scalar_json(c), "rule": r.to_json()} for c, r in self.terms]}


def _mul_scalars(a: Scalar, b: Scalar) -> Scalar:
    if isinstance(a, float) or isinstance(b, float):
        return float(a) * float(b)
    return as_fraction(a) * as_fraction(b)


def _add_scalars(a: Scalar, b: Scalar) -> Scalar:
    if isinstance(a, float) or isinstance(b, float):
        return float(a) + float(b)
    return as_fraction(a) + as_fraction(b)


def _scalar_json(t: Scalar):
    return t if isinstance(t, float) else str(as_fraction(t))


def _scalar_from_json(obj) -> Scalar:
    if isinstance(obj, float):
        return obj
    if isinstance(obj, (int, str)) and not isinstance(obj, bool):
        return Fraction(obj)
    raise ParseError(f"bad scalar {obj!r}")


# ----------------------------------------------------------------------------
# Consistent maps
# ----------------------------------------------------------------------------


def lambda_value(F: Field, v: Place) -> Fraction:
    """lambda(F, v) = [F_v : Q_p] / [F : Q]."""
    if v.field != F:
        raise ValueError(f"{v} is not a place of {F}")
    return lambda_weight(v)


@dataclass(frozen=True)
class ConsistentMap:
    base: Field
    arch: tuple
    rule: Rule = dc_field(default_factory=ZeroRule)
    lambda_coeff: Scalar = 0

    def __post_init__(self):
        object.__setattr__(self, "arch", tuple(to_local_value(v) for v in self.arch))
        if len(self.arch) != self.base.n_arch:
            raise IncompleteArchValues(
                f"{self.base} has {self.base.n_arch} archimedean places, got {len(self.arch)} values"
            )
        if any(v.over_logp for v in self.arch):
            raise ValueError("archimedean values cannot be 1/log p multiples")
        if not self.rule.supports(self.base):
            raise ValueError(f"rule {self.rule.to_json()!r} does not apply to base {self.base}")

    # -- evaluation ---------------------------------------------------------
    def own(self, place: Place) -> LocalValue:
        """Value at a place of the base field."""
        if place.is_archimedean:
            v = self.arch[place.index - 1]
        else:
            v = self.rule.value(place)
        if self.lambda_coeff:
            v = v + PlainRational(lambda_weight(place)).scale(self.lambda_coeff)
        return v

    def __call__(self, field: Field, place: Place) -> LocalValue:
        return evaluate_at(self, field, place)

    # -- vector space structure ---------------------------------------------
    def __add__(self, other: "ConsistentMap") -> "ConsistentMap":
        if not isinstance(other, ConsistentMap):
            return NotImplemented
        if other.base != self.base:
            raise UnsupportedFieldPair("maps with different base fields cannot be added")
        return ConsistentMap(
            self.base,
            tuple(a + b for a, b in zip(self.arch, other.arch)),
            SumRule.combine([(1, self.rule), (1, other.rule)]),
            _add_scalars(self.lambda_coeff, other.lambda_coeff),
        )

    def scale(self, t: Scalar) -> "ConsistentMap":
        return ConsistentMap(
            self.base,
            tuple(a.scale(t) for a in self.arch),
            SumRule.combine([(t, self.rule)]),
            _mul_scalars(t, self.lambda_coeff),
        )

    def __rmul__(self, t: Scalar) -> "ConsistentMap":
        return self.scale(t)

    def __neg__(self) -> "ConsistentMap":
        return self.scale(-1)

    def __sub__(self, other: "ConsistentMap") -> "ConsistentMap":
        return self + (-other)

    # -- serialization ------------------------------------------------------
    def to_json(self) -> dict:
        return {
            "base": "Q" if self.base is QQ else {"d": self.base.d},
            "arch": [v.to_json() for v in self.arch],
            "rule": self.rule.to_json(),
            "lambda_coeff": _scalar_json(self.lambda_coeff),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ConsistentMap":
        try:
            base = parse_base(obj["base"])
            arch = tuple(LocalValue.from_json(v) for v in obj["arch"])
            rule = rule_from_json(obj.get("rule", "zero"), base)
            lc = _scalar_from_json(obj.get("lambda_coeff", 0.0))
        except (KeyError, TypeError) as exc:
            raise ParseError(f"malformed map JSON: {exc}") from exc
        return cls(base, arch, rule, lc)


def parse_base(obj) -> Field:
    if obj in ("Q", "QQ"):
        return QQ
    if isinstance(obj, dict) and "d" in obj:
        return make_field(int(obj["d"]))
    raise ParseError(f"bad base field {obj!r}")


def rule_from_json(obj, base: Field) -> Rule:
    if obj == "zero":
        return ZeroRule()
    if obj in (LOG_EXT, OMEGA_EXT, PSI_EXT):
        return NamedRule(obj)
    if obj == "sqrt2_example":
        from .functional import Sqrt2ExampleRule

        return Sqrt2ExampleRule()
    if isinstance(obj, dict) and len(obj) == 1:
        (key, val), = obj.items()
        if key == "explicit":
            return ExplicitRule.from_mapping(
                {parse_place(k, base): LocalValue.from_json(v) for k, v in val.items()}
            )
        if key == "sum":
            return SumRule.combine(
                (_scalar_from_json(t["coef"]), rule_from_json(t["rule"], base)) for t in val
            )
        if key == "functional":
            from .functional import FunctionalRule, FunctionalSpec

            if not isinstance(base, QuadField):
                raise ParseError("functional rules need a quadratic base field")
            return FunctionalRule.from_spec(base, FunctionalSpec.from_json(val, base))
    raise ParseError(f"unknown rule {obj!r}")


def lambda_map(base: Field = QQ, coeff: Scalar = 1) -> ConsistentMap:
    """``coeff * lambda`` stored on ``base``."""
    return ConsistentMap(base, (ZERO_VALUE,) * base.n_arch, ZeroRule(), coeff)


def zero_map(base: Field = QQ) -> ConsistentMap:
    return ConsistentMap(base, (ZERO_VALUE,) * base.n_arch, ZeroRule(), 0)


def evaluate_at(c: ConsistentMap, field: Field, place: Place) -> LocalValue:
    if place.field != field:
        raise ValueError(f"{place} is not a place of {field}")
    if field == c.base:
        return c.own(place)
    if c.base is QQ and isinstance(field, QuadField):
        return c.own(place.below()).scale(Fraction(place.local_degree, field.degree))
    if isinstance(c.base, QuadField) and field is QQ:
        total = ZERO_VALUE
        for w in places_above(c.base, place):
            total = total + c.own(w)
        return total
    raise UnsupportedFieldPair(
        f"map based at {c.base} cannot be evaluated on {field} (composita not implemented)"
    )


def canonical_from_y(
    K: Field,
    y: Mapping[Place, object],
    rule: Optional[Rule] = None,
) -> ConsistentMap:
    """The unique consistent map agreeing with ``y`` on the places of K.

    ``y`` must cover every archimedean place; finite places come from ``y``
    (zero where absent) unless a ``rule`` is given for them.
    """
    arch = []
    for v in arch_places(K):
        if v not in y:
            raise IncompleteArchValues(f"missing value at {v.label()}")
        arch.append(to_local_value(y[v]))
    finite = {pl: val for pl, val in y.items() if not pl.is_archimedean}
    if rule is None:
        rule = ExplicitRule.from_mapping(finite) if finite else ZeroRule()
    elif finite:
        raise ValueError("give finite values either through y or through rule, not both")
    return ConsistentMap(K, tuple(arch), rule, 0)


def normalize_to_Jq(c: ConsistentMap, F: Field, q: Place) -> ConsistentMap:
    """The element of ``c + span(lambda)`` vanishing at (F, q).

    Subtracts ``c(F, q) / lambda(F, q)`` times lambda; over F = Q this is
    ``c - c(F, q) * lambda``.
    """
    value = evaluate_at(c, F, q)
    lam = lambda_value(F, q)
    if value.is_exact and not value.over_logp:
        t: Scalar = value.plain / lam
    else:
        t = value.to_float(q.p) / float(lam)
    if t == 0:
        return c
    return ConsistentMap(c.base, c.arch, c.rule, _add_scalars(c.lambda_coeff, -t))


@dataclass
class ConsistencyReport:
    field: QuadField
    prime_bound: int
    checked: int = 0
    violations: list = dc_field(default_factory=list)
    rows: list = dc_field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "field": self.field.d,
            "prime_bound": self.prime_bound,
            "checked": self.checked,
            "passed": self.passed,
            "violations": self.violations,
        }


def check_consistency_suite(
    c, K: QuadField, prime_bound: int, tol: float = 1e-12
) -> ConsistencyReport:
    """Check ``c(Q, q) = sum_{w | q} c(K, w)`` at infinity and every prime <= bound.

    ``c`` may be a :class:`ConsistentMap` or any callable ``(field, place) ->
    LocalValue``, so assignments that were not built consistent can be audited.
    """
    report = ConsistencyReport(K, prime_bound)
    for p in [0] + primes_up_to(prime_bound):
        q = q_place(p)
        lhs = c(QQ, q)
        ws = places_above(K, q)
        rhs = ZERO_VALUE
        for w in ws:
            rhs = rhs + c(K, w)
        report.checked += 1
        ok = local_values_equal(lhs, rhs, p, tol)
        report.rows.append({"q": q.label(), "c_Q": lhs.to_float(p), "sum_c_K": rhs.to_float(p), "ok": ok})
        if not ok:
            report.violations.append(
                {"place": f"(Q,{q.label()})", "c_Q": str(lhs), "sum_over_K": str(rhs)}
            )
    return report


def values_table(c: ConsistentMap, F: Field, prime_bound: int) -> list[tuple[Place, LocalValue]]:
    """(place, c(F, place)) for the archimedean places and all places over p <= bound."""
    out = [(v, evaluate_at(c, F, v)) for v in arch_places(F)]
    for p in primes_up_to(prime_bound):
        for w in places_above(F, q_place(p)):
            out.append((w, evaluate_at(c, F, w)))
    return out
