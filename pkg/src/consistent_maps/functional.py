"""Building consistent maps from prescribed functional values.

Over a quadratic field K a functional on the multiplicative group is fixed
by its value r on lambda's direction, its value on the fundamental unit and
its values on one generator per prime ideal.  The archimedean values y_v
solve a small linear system; each finite value then follows from one
generator.  Also here: S-unit decomposition, the rationality checker and the
worked example over Q(sqrt 2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Mapping, Optional, Sequence, Union

from .consistent import (
    ZERO_VALUE,
    ConsistentMap,
    LocalValue,
    Rule,
    evaluate_at,
    to_local_value,
)
from .errors import (
    IncompleteArchValues,
    NonIntegralExponent,
    NotRealField,
    NotSUnit,
    ParseError,
    SingularSystem,
    UnsupportedFieldPair,
    ZeroDenominator,
)
from .numerics import (
    DEFAULT_MAX_DEN,
    DEFAULT_TOL,
    LogLinearNumber,
    detection_is_vacuous,
    lln_to_float,
    primes_up_to,
    rational_detect,
)
from .phi import weighted_log_sum
from .places import (
    SPLIT,
    Place,
    arch_places,
    finite_support,
    ideal_generator_search,
    log_abs,
    parse_place,
    places_over_prime,
    q_place,
    valuation,
)
from .quadfield import QQ, FieldElement, QuadField, fundamental_unit, make_field, roots_of_unity

Number = Union[int, Fraction, float]


def _is_exact(x) -> bool:
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


# ----------------------------------------------------------------------------
# Regulator systems and specs
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class RegulatorSystem:
    field: QuadField
    units: tuple
    matrix_A: tuple  # rows of log ||unit||_{v_j}
    lambda_vector: tuple

    @property
    def regulator(self) -> float:
        return abs(self.matrix_A[0][0]) if self.matrix_A else 1.0


def regulator_system(K: QuadField) -> RegulatorSystem:
    if not K.is_real:
        raise NotRealField(f"{K} has no fundamental unit")
    eps = fundamental_unit(K)
    row = (eps.log_abs_embedding(1), eps.log_abs_embedding(2))
    return RegulatorSystem(K, (eps,), (row,), (Fraction(1, 2), Fraction(1, 2)))


@dataclass
class FunctionalSpec:
    """Targets for Phi: ``r`` = c(Q, inf), one value per fundamental unit and
    per generator.  Generators without a target get 0."""

    r: Number = 0
    unit_targets: tuple = ()
    generator_targets: dict = dc_field(default_factory=dict)

    def target(self, w: Place) -> Number:
        return self.generator_targets.get(w, 0)

    def to_json(self) -> dict:
        return {
            "r": _num_json(self.r),
            "unit_targets": [_num_json(t) for t in self.unit_targets],
            "generator_targets": {w.label(): _num_json(t) for w, t in sorted(self.generator_targets.items())},
        }

    @classmethod
    def from_json(cls, obj: dict, K: QuadField) -> "FunctionalSpec":
        if not isinstance(obj, dict):
            raise ParseError("functional spec must be a JSON object")
        gens = {parse_place(k, K): _num_from_json(v) for k, v in obj.get("generator_targets", {}).items()}
        if any(w.is_archimedean for w in gens):
            raise ParseError("generator targets belong to finite places")
        return cls(
            _num_from_json(obj.get("r", 0)),
            tuple(_num_from_json(t) for t in obj.get("unit_targets", [])),
            gens,
        )

    def key(self):
        return (self.r, tuple(self.unit_targets), tuple(sorted(self.generator_targets.items())))


def _num_json(x: Number):
    if isinstance(x, float):
        return x
    x = Fraction(x)
    return int(x) if x.denominator == 1 else str(x)


def _num_from_json(x) -> Number:
    if isinstance(x, bool):
        raise ParseError("booleans are not numbers")
    if isinstance(x, float):
        return x
    if isinstance(x, (int, str)):
        try:
            return Fraction(x)
        except ValueError as exc:
            raise ParseError(f"bad number {x!r}") from exc
    raise ParseError(f"bad number {x!r}")


def solve_arch_y(sys: RegulatorSystem, spec: FunctionalSpec) -> tuple:
    """The unique (y1, y2) with L1*y1 + L2*y2 = Phi(eps) and y1 + y2 = r.

    With a zero unit target the answer is r/2 on both places, kept exact
    when r is.
    """
    if len(spec.unit_targets) != len(sys.units):
        raise IncompleteArchValues(
            f"need {len(sys.units)} unit target(s), got {len(spec.unit_targets)}"
        )
    r = spec.r
    (b,) = spec.unit_targets
    if b == 0:
        half = Fraction(r) / 2 if _is_exact(r) else float(r) / 2
        return (half, half)
    L1, L2 = sys.matrix_A[0]
    det = L1 - L2
    if abs(det) < 1e-14:
        raise SingularSystem(f"regulator system is singular (det={det})")
    y1 = (float(b) - L2 * float(r)) / det
    y2 = (L1 * float(r) - float(b)) / det
    return (y1, y2)


def arch_y_for(K: QuadField, spec: FunctionalSpec) -> tuple:
    if K.is_real:
        return solve_arch_y(regulator_system(K), spec)
    if spec.unit_targets:
        raise IncompleteArchValues(f"{K} has no fundamental unit to target")
    return (spec.r,)


def _target_lln(t: Number) -> LogLinearNumber:
    return LogLinearNumber(float_part=float(t)) if isinstance(t, float) else LogLinearNumber.build(t)


def nonarch_y(arch_y: Sequence, beta: FieldElement, w: Place, target: Number) -> LocalValue:
    """y_w = (target - sum_{v | inf} y_v log ||beta||_v) / log ||beta||_w.

    The result stays exact (a rational plus a rational over ln p) whenever
    the arch values and target are exact and beta's norm is a power of p.
    """
    K = w.field
    r = log_abs(beta, w).nonarch_exponent
    if not r:
        raise ZeroDenominator(f"log ||{beta}||_{w.label()} is zero")
    coeffs = [to_local_value(y) for y in arch_y]
    arch_sum = weighted_log_sum(
        K, beta, lambda v: coeffs[v.index - 1] if v.is_archimedean else ZERO_VALUE
    ).value
    num = _target_lln(target) - arch_sum
    p = w.p
    logs = num.logs
    plain = logs.pop(p, Fraction(0)) / r
    flt = num.float_part
    for q, coef in logs.items():
        flt += float(coef) * math.log(q)
    return LocalValue(plain, num.rational_part / r, flt / (float(r) * math.log(p)))


class FunctionalRule(Rule):
    """Finite values of the map realizing a :class:`FunctionalSpec`."""

    def __init__(self, K: QuadField, arch_y: tuple, spec: FunctionalSpec):
        self.field = K
        self.arch_y = tuple(arch_y)
        self.spec = spec
        self._cache: dict = {}

    @classmethod
    def from_spec(cls, K: QuadField, spec: FunctionalSpec) -> "FunctionalRule":
        return cls(K, arch_y_for(K, spec), spec)

    def value(self, place: Place) -> LocalValue:
        if place not in self._cache:
            beta = ideal_generator_search(self.field, place)
            self._cache[place] = nonarch_y(self.arch_y, beta, place, self.spec.target(place))
        return self._cache[place]

    def supports(self, base) -> bool:
        return base == self.field

    def to_json(self):
        return {"functional": self.spec.to_json()}

    def __eq__(self, other):
        return (
            isinstance(other, FunctionalRule)
            and self.field == other.field
            and self.spec.key() == other.spec.key()
        )

    def __hash__(self):
        return hash((self.field, self.spec.key()))

    def __repr__(self):
        return f"FunctionalRule({self.field}, {self.spec.to_json()})"


def build_map_from_functional(K: QuadField, spec: FunctionalSpec, prime_bound: int) -> ConsistentMap:
    """The canonical map whose Phi takes the targets in ``spec``.

    Values at places over primes <= prime_bound are computed up front, so a
    missing generator surfaces here rather than at first use.
    """
    for w in spec.generator_targets:
        if w.field != K:
            raise UnsupportedFieldPair(f"target place {w} is not a place of {K}")
    rule = FunctionalRule.from_spec(K, spec)
    c = ConsistentMap(K, tuple(to_local_value(y) for y in rule.arch_y), rule)
    for p in primes_up_to(prime_bound):
        for w in places_over_prime(K, p):
            rule.value(w)
    return c


# ----------------------------------------------------------------------------
# S-units
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class SUnitBasis:
    field: QuadField
    S: tuple
    units: tuple
    generators: dict

    def __hash__(self):
        return hash((self.field, self.S))


def sunit_basis(K: QuadField, primes: Sequence[int]) -> SUnitBasis:
    finite = [w for p in sorted(set(primes)) for w in places_over_prime(K, p)]
    gens = {w: ideal_generator_search(K, w) for w in finite}
    units = (fundamental_unit(K),) if K.is_real else ()
    return SUnitBasis(K, tuple(arch_places(K)) + tuple(finite), units, gens)


@dataclass
class SUnitDecomposition:
    unit_exponents: list
    generator_exponents: dict
    torsion: FieldElement

    def rebuild(self, basis: SUnitBasis) -> FieldElement:
        x = self.torsion
        for u, e in zip(basis.units, self.unit_exponents):
            x = x * u ** int(e)
        for w, s in self.generator_exponents.items():
            x = x * basis.generators[w] ** int(s)
        return x

    def to_json(self) -> dict:
        return {
            "unit_exponents": [int(e) for e in self.unit_exponents],
            "generator_exponents": {w.label(): int(s) for w, s in sorted(self.generator_exponents.items())},
            "torsion": str(self.torsion),
        }


def sunit_decompose(x, basis: SUnitBasis) -> SUnitDecomposition:
    """x = zeta * prod(eps**r) * prod(beta_w**s_w), with every exponent verified exactly."""
    K = basis.field
    if not isinstance(x, FieldElement):
        x = K(x, 0)
    if x.field != K:
        raise UnsupportedFieldPair(f"{x} is not in {K}")
    in_S = set(basis.S)
    for w in finite_support(x, K):
        if w not in in_S:
            raise NotSUnit(f"{x} has nonzero valuation at {w.label()}, outside S")
    exps = {}
    gamma = x
    for w, beta in basis.generators.items():
        s = Fraction(valuation(x, w), valuation(beta, w))
        if s.denominator != 1:
            raise NonIntegralExponent(f"exponent {s} at {w.label()} is not an integer")
        exps[w] = s
        if s:
            gamma = gamma * beta ** (-int(s))
    if not gamma.is_unit():
        raise NonIntegralExponent(f"residual {gamma} is not a unit; the generators are inconsistent")
    unit_exps = []
    if K.is_real:
        eps = basis.units[0]
        k = round(gamma.log_abs_embedding(1) / eps.log_abs_embedding(1))
        gamma = gamma * eps ** (-k)
        unit_exps.append(Fraction(k))
    if gamma not in roots_of_unity(K):
        raise NonIntegralExponent(f"residual {gamma} is not a root of unity")
    return SUnitDecomposition(unit_exps, exps, gamma)


# ----------------------------------------------------------------------------
# Rationality checker
# ----------------------------------------------------------------------------


def _exact_value(v) -> LocalValue:
    """Floats are read as the dyadic rationals they denote."""
    v = to_local_value(v)
    if v.flt:
        return LocalValue(v.plain + Fraction(v.flt), v.over_logp, 0.0)
    return v


def _coerce_y(K: QuadField, y: Mapping) -> dict:
    out = {}
    for k, v in y.items():
        place = parse_place(k, K) if isinstance(k, str) else k
        if place.field != K:
            raise UnsupportedFieldPair(f"{place} is not a place of {K}")
        out[place] = _exact_value(v)
    for v in arch_places(K):
        if v not in out:
            raise IncompleteArchValues(f"y is missing the archimedean place {v.label()}")
    return out


@dataclass
class RationalityReport:
    field: QuadField
    prime_bound: int
    max_den: int
    tol: float
    entries: list = dc_field(default_factory=list)
    passed: bool = True
    first_failure: Optional[dict] = None

    @property
    def verdict(self) -> str:
        params = f"prime_bound={self.prime_bound} with parameters (max_den={self.max_den}, tol={self.tol})"
        if self.passed:
            return f"passes up to {params}"
        f = self.first_failure
        return f"fails condition ({f['condition']}) at {f['place']}; checked up to {params}"

    @property
    def vacuous_float_detection(self) -> bool:
        return detection_is_vacuous(self.max_den, self.tol)

    def to_json(self) -> dict:
        out = {
            "field": self.field.d,
            "passed": self.passed,
            "verdict": self.verdict,
            "entries": self.entries,
        }
        if self.vacuous_float_detection and any(e["mode"] == "float" for e in self.entries):
            out["note"] = (
                "tol * max_den**2 >= 1, so float quantities are always within tol of some "
                "admissible fraction; float detections carry little information"
            )
        return out


def _decide(q: LogLinearNumber, max_den: int, tol: float) -> tuple[str, Optional[Fraction]]:
    if q.is_exact:
        # distinct primes have Q-linearly independent logs
        return "exact", (q.rational_part if not q.log_terms else None)
    return "float", rational_detect(lln_to_float(q), max_den, tol)


def krational_check(
    K: QuadField,
    y: Mapping,
    prime_bound: int,
    max_den: int = DEFAULT_MAX_DEN,
    tol: float = DEFAULT_TOL,
) -> RationalityReport:
    """Test whether sum_v y_v log ||alpha||_v is rational on K^x, up to ``prime_bound``.

    (i) A * y_arch for the fundamental unit, (ii) for each finite place v
    over p <= prime_bound, y_v log||beta_v||_v + sum y_{v_i} log||beta_v||_{v_i}.
    Quantities with no float part are decided exactly; the rest go through
    bounded-denominator detection.
    """
    ys = _coerce_y(K, y)
    report = RationalityReport(K, prime_bound, max_den, tol)

    def coeff(v):
        return ys.get(v, ZERO_VALUE)

    def record(cond, place, x):
        q = weighted_log_sum(K, x, coeff).value
        mode, rat = _decide(q, max_den, tol)
        entry = {
            "condition": cond,
            "place": place,
            "quantity": str(q),
            "value": lln_to_float(q),
            "mode": mode,
            "rational": None if rat is None else str(rat),
        }
        report.entries.append(entry)
        if rat is None and report.passed:
            report.passed = False
            report.first_failure = entry

    if K.is_real:
        record("i", "unit", fundamental_unit(K))
    for p in primes_up_to(prime_bound):
        for w in places_over_prime(K, p):
            record("ii", w.label(), ideal_generator_search(K, w))
    return report


# ----------------------------------------------------------------------------
# The Q(sqrt 2) example
# ----------------------------------------------------------------------------

SQRT2 = make_field(2)

# six-significant-digit reference values; the reference entry for p = 23
# reads "0.0.513516", which is malformed, so none is stored
REFERENCE_TABLE = {
    "inf": 1.13459,
    7: 0.596913,
    17: 0.513516,
    23: None,
    31: 0.464359,
    41: 0.261831,
    47: 0.120733,
    71: 0.406159,
}


def _log_unit_sqrt2() -> float:
    return fundamental_unit(SQRT2).log_abs_embedding(1)


class Sqrt2ExampleRule(Rule):
    """y_v = (ln|beta_v| - ln|beta_v'|) / (ln p * ln(1 + sqrt 2)) at split places, 0 elsewhere."""

    def value(self, place: Place) -> LocalValue:
        if place.kind != SPLIT:
            return ZERO_VALUE
        beta = ideal_generator_search(SQRT2, place)
        diff = beta.log_abs_embedding(1) - beta.log_abs_embedding(2)
        return LocalValue(flt=diff / (math.log(place.p) * _log_unit_sqrt2()))

    def supports(self, base) -> bool:
        return base == SQRT2

    def to_json(self):
        return "sqrt2_example"

    def __eq__(self, other):
        return isinstance(other, Sqrt2ExampleRule)

    def __hash__(self):
        return hash("sqrt2_example")


def sqrt2_example_map() -> ConsistentMap:
    y = 1 / _log_unit_sqrt2()
    return ConsistentMap(SQRT2, (LocalValue(flt=y), LocalValue(flt=-y)), Sqrt2ExampleRule())


def sqrt2_example_spec() -> FunctionalSpec:
    """The same map as a functional: Phi(1 + sqrt 2) = 2, Phi(beta) = 0, r = 0."""
    return FunctionalSpec(0, (2,), {})


@dataclass
class Sqrt2Table:
    rows: list
    antisymmetric: bool
    vanishes_on_Q: bool
    notes: list

    def to_json(self) -> dict:
        return {
            "rows": self.rows,
            "antisymmetric": self.antisymmetric,
            "vanishes_on_Q": self.vanishes_on_Q,
            "notes": self.notes,
        }


def sqrt2_example(prime_bound: int) -> tuple[ConsistentMap, Sqrt2Table]:
    """The example map and its values at infinity and at split primes <= bound.

    Each row lists the generator with positive coordinates and the value at
    its place; the conjugate place carries the negated value.
    """
    if prime_bound < 7:
        raise ValueError("prime_bound must be at least 7 (the first split prime)")
    c = sqrt2_example_map()
    K = SQRT2
    rows = []
    notes = []
    antisym = True
    vanish = True
    v1, v2 = arch_places(K)
    a1, a2 = evaluate_at(c, K, v1).flt, evaluate_at(c, K, v2).flt
    antisym &= a1 == -a2
    rows.append(_row("inf", None, None, a1, a2))
    for p in primes_up_to(prime_bound):
        ws = places_over_prime(K, p)
        if len(ws) != 2:
            continue
        betas = [ideal_generator_search(K, w) for w in ws]
        vals = [evaluate_at(c, K, w).flt for w in ws]
        i = 0 if betas[0].b > 0 else 1
        antisym &= abs(vals[0] + vals[1]) <= 1e-12
        rows.append(_row(p, betas[i], betas[1 - i], vals[i], vals[1 - i]))
    for p in [0] + primes_up_to(prime_bound):
        if abs(evaluate_at(c, QQ, q_place(p)).to_float(p)) > 1e-12:
            vanish = False
    for row in rows:
        if row["p"] in REFERENCE_TABLE and REFERENCE_TABLE[row["p"]] is None:
            notes.append(
                f"p={row['p']}: the printed reference value is malformed; "
                f"recomputed value is {row['c']:.6f}"
            )
    notes.append("c(K, v) = 0 at inert and ramified places")
    return c, Sqrt2Table(rows, antisym, vanish, notes)


def _row(p, beta, beta_conj, val, val_conj) -> dict:
    ref = REFERENCE_TABLE.get(p, "absent")
    row = {
        "p": p,
        "beta": None if beta is None else str(beta),
        "beta_conj": None if beta_conj is None else str(beta_conj),
        "c": val,
        "c_conj": val_conj,
    }
    if ref != "absent":
        row["reference"] = ref
        row["reference_flag"] = "malformed" if ref is None else (
            "ok" if abs(abs(val) - ref) <= 5e-5 else "mismatch"
        )
    return row
