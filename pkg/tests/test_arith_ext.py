import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from consistent_maps.arith_ext import (
    AdditiveFunctionKind,
    build_extension,
    closed_form_ratio,
    continuity_diagnostic,
    omega,
    psi,
)
from consistent_maps.consistent import OverLogP, PlainRational, ZERO_VALUE, evaluate_at, lambda_map
from consistent_maps.errors import ZeroArgument
from consistent_maps.phi import phi_eval
from consistent_maps.places import Q_INF, q_place
from consistent_maps.quadfield import QQ, make_field
from oracles import naive_omega, naive_psi

rationals = st.fractions(max_denominator=10**6).filter(lambda q: q != 0 and abs(q.numerator) <= 10**6)


def test_examples():
    assert omega(12) == 3 and omega(1) == 0 and omega(Fraction(4, 9)) == 0
    assert psi(12) == 7 and psi(1) == 0 and psi(Fraction(1, 2)) == -2
    with pytest.raises(ZeroArgument):
        omega(0)
    with pytest.raises(ZeroArgument):
        psi(0)


@given(rationals)
def test_against_naive_factorization(q):
    assert omega(q) == naive_omega(q)
    assert psi(q) == naive_psi(q)


@given(rationals, rationals)
def test_complete_additivity(m, n):
    assert omega(m * n) == omega(m) + omega(n)
    assert psi(m * n) == psi(m) + psi(n)


@given(rationals)
def test_extension_identity(q):
    assert phi_eval(build_extension("omega"), q) == phi_eval(build_extension("omega"), q).build(omega(q))
    assert phi_eval(build_extension("psi"), q).rational_part == psi(q)
    assert phi_eval(build_extension("psi"), q).is_rational
    lg = phi_eval(build_extension("log"), q)
    assert lg.rational_part == 0 and lg.float_part == 0
    assert float(lg) == pytest.approx(math.log(abs(q)), abs=1e-9)


def test_rules_at_five():
    assert evaluate_at(build_extension("omega"), QQ, q_place(5)) == OverLogP(-1)
    assert evaluate_at(build_extension("psi"), QQ, q_place(5)) == OverLogP(-5)
    assert evaluate_at(build_extension("log"), QQ, q_place(5)) == PlainRational(-1)
    for k in AdditiveFunctionKind:
        assert evaluate_at(build_extension(k), QQ, Q_INF) == ZERO_VALUE


def test_omega_of_sqrt2():
    assert phi_eval(build_extension("omega"), make_field(2)(0, 1)).rational_part == Fraction(1, 2)


def test_continuity_omega():
    rep = continuity_diagnostic(build_extension("omega"), 10**4, [make_field(2), make_field(-1)])
    assert rep.max_ratio == pytest.approx(1 / math.log(2), abs=1e-12)
    assert rep.argmax["p"] == 2
    seq = [r for _, r in rep.q_sequence]
    assert all(a > b for a, b in zip(seq, seq[1:]))


def test_continuity_psi_grows():
    rep = continuity_diagnostic(build_extension("psi"), 10**4)
    seq = rep.q_sequence
    assert all(b[1] > a[1] for a, b in zip(seq[1:], seq[2:]))
    p_last = seq[-1][0]
    assert rep.argmax["p"] == p_last
    assert rep.max_ratio == pytest.approx(p_last / math.log(p_last))
    assert rep.max_ratio > 1000


def test_continuity_log_and_lambda_constant():
    rep = continuity_diagnostic(build_extension("log"), 1000, [make_field(5)])
    assert {r for _, r in rep.q_sequence} == {1.0}
    assert rep.max_ratio == 1.0
    rep = continuity_diagnostic(lambda_map(QQ, -3), 500, [make_field(2), make_field(-3)])
    assert rep.max_ratio == 3.0 and {r for _, r in rep.q_sequence} == {3.0}


def test_closed_form_ratio():
    assert closed_form_ratio("omega", 7) == pytest.approx(1 / math.log(7))
    assert closed_form_ratio("psi", 7) == pytest.approx(7 / math.log(7))
    assert closed_form_ratio("log", 7) == 1.0
