import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from consistent_maps.arith_ext import build_extension
from consistent_maps.consistent import lambda_map, zero_map
from consistent_maps.errors import UnsupportedFieldPair, ZeroElement
from consistent_maps.functional import sqrt2_example_map
from consistent_maps.numerics import LogLinearNumber, lln_to_float
from consistent_maps.phi import (
    norm_compatibility_check,
    phi_breakdown,
    phi_eval,
    product_formula_check,
    zero_phi_classify,
)
from consistent_maps.quadfield import QQ, fundamental_unit, make_field
from oracles import naive_omega

K2 = make_field(2)
OM = build_extension("omega")
PS = build_extension("psi")
LG = build_extension("log")

small = st.integers(-30, 30)


def test_spec_examples():
    assert phi_eval(OM, 12) == LogLinearNumber.build(3)
    assert phi_eval(PS, 12) == LogLinearNumber.build(7)
    # (-1/(2 ln 2)) * (-(1/2) * 2 * ln 2) at the ramified place, nothing elsewhere
    assert phi_eval(OM, K2(0, 1)) == LogLinearNumber.build(Fraction(1, 2))
    assert abs(lln_to_float(phi_eval(lambda_map(), 12))) <= 1e-9
    assert phi_eval(lambda_map(), 12) == LogLinearNumber()


def test_log_extension_is_ln():
    v = phi_eval(LG, Fraction(-45, 14))
    assert v.logs == {3: 2, 5: 1, 2: -1, 7: -1}
    assert lln_to_float(v) == pytest.approx(math.log(45 / 14), abs=1e-12)
    w = phi_eval(LG, K2(3, 1))
    assert lln_to_float(w) == pytest.approx(0.5 * math.log(7), abs=1e-12)


def test_zero_element():
    with pytest.raises(ZeroElement):
        phi_eval(OM, 0)
    with pytest.raises(ZeroElement):
        phi_eval(OM, K2(0, 0))


def test_field_mismatch():
    with pytest.raises(UnsupportedFieldPair):
        phi_eval(OM, make_field(3)(1, 1), field=K2)
    with pytest.raises(UnsupportedFieldPair):
        phi_eval(sqrt2_example_map(), make_field(3)(1, 1))


def test_breakdown_terms():
    res = phi_breakdown(PS, 12)
    places = [t["place"] for t in res.terms]
    assert places == ["inf", "2", "3"]
    j = res.to_json()
    assert j["value_exact"]["rational"] == "7"
    assert j["value_float"] == 7.0


@settings(max_examples=80)
@given(small, small, st.fractions(min_value=-5, max_value=5, max_denominator=6))
def test_q_linearity_in_exponent(a, b, r):
    x = K2(a, b)
    if x.is_zero():
        return
    for c in (OM, PS):
        assert phi_eval(c, x, r) == phi_eval(c, x).scale(r)


@settings(max_examples=60)
@given(small, small, small, small)
def test_multiplicativity(a, b, c_, d):
    x, y = K2(a, b), K2(c_, d)
    if x.is_zero() or y.is_zero():
        return
    for c in (OM, PS, LG, sqrt2_example_map()):
        lhs, rhs = phi_eval(c, x * y), phi_eval(c, x) + phi_eval(c, y)
        if lhs.is_exact and rhs.is_exact:
            assert lhs == rhs
        else:
            assert lln_to_float(lhs) == pytest.approx(lln_to_float(rhs), abs=1e-9)


@settings(max_examples=40)
@given(small, small)
def test_linearity_in_map(a, b):
    x = K2(a, b)
    if x.is_zero():
        return
    s = OM + LG.scale(2.5)
    expect = lln_to_float(phi_eval(OM, x)) + 2.5 * lln_to_float(phi_eval(LG, x))
    assert lln_to_float(phi_eval(s, x)) == pytest.approx(expect, abs=1e-12)


@settings(max_examples=40)
@given(st.integers(1, 10**6), st.integers(1, 10**6))
def test_field_independence(n, m):
    q = Fraction(n, m)
    for c in (OM, PS, LG):
        over_q = phi_eval(c, q)
        for d in (2, 5, -1, -3):
            assert phi_eval(c, q, field=make_field(d)) == over_q


@settings(max_examples=40)
@given(small, small)
def test_torsion_invariance(a, b):
    x = K2(a, b)
    if x.is_zero():
        return
    for c in (OM, PS, sqrt2_example_map()):
        assert phi_eval(c, x) == phi_eval(c, -x)
    Ki = make_field(-1)
    y = Ki(a, b)
    assert phi_eval(OM, y) == phi_eval(OM, y * Ki(0, 1))


def test_product_formula_examples():
    rep = product_formula_check(QQ, [7])
    assert rep.passed and rep.entries[0]["exact_zero"]
    rep = product_formula_check(K2, [K2(3, 1), K2(1, 1)])
    assert rep.passed
    expected = 0.5 * math.log(3 + math.sqrt(2)) + 0.5 * math.log(3 - math.sqrt(2)) - 0.5 * math.log(7)
    assert abs(rep.entries[0]["sum"]) <= 1e-12 and abs(expected) <= 1e-12
    assert abs(rep.entries[1]["sum"]) <= 1e-12


def test_norm_compatibility():
    for x in (K2(3, 1), K2(0, 1), K2(-17, 4)):
        rep = norm_compatibility_check(OM, x)
        assert rep.passed and rep.entries[0]["mode"] == "exact"
    assert norm_compatibility_check(OM, K2(3, 1)).entries[0]["phi_x"] == "1/2"
    assert norm_compatibility_check(zero_map(), K2(5, 1)).passed
    assert norm_compatibility_check(LG, K2(5, 1)).passed


def test_norm_compatibility_matches_omega_of_norm():
    rng = random.Random(1)
    for _ in range(50):
        x = K2(rng.randint(-99, 99), rng.randint(1, 99))
        assert phi_eval(OM, x).rational_part == Fraction(naive_omega(x.norm()), 2)


def test_zero_phi_classify_kernel():
    rep = zero_phi_classify(lambda_map(QQ, 2.5), K2, 100)
    assert rep.notes["branch"] == "kernel" and rep.passed
    assert all(e["c"] == pytest.approx(e["r_lambda"], abs=1e-9) for e in rep.entries)
    ratios = {round(e["c"] / e["lambda"], 12) for e in rep.entries}
    assert ratios == {2.5}
    rep = zero_phi_classify(zero_map(), K2, 50)
    assert rep.notes["branch"] == "kernel" and rep.notes["c_Q_inf"] == 0


def test_zero_phi_classify_not_kernel():
    rep = zero_phi_classify(OM, K2, 50)
    assert rep.notes["branch"] == "not_in_kernel"
    assert abs(lln_to_float(phi_eval(OM, fundamental_unit(K2)))) <= 1e-12
    assert rep.notes["witness"]["phi"] == pytest.approx(0.5)
