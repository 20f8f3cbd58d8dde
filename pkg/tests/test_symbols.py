"""Graded symbols and the composition formula."""

import random
from fractions import Fraction

import pytest

from loopcurv.algebra import abelian
from loopcurv.errors import BelowCutoff, InsufficientDepth, InvalidInput, SobolevRange
from loopcurv.fields import LoopField, random_field
from loopcurv.symbols import (
    NEG_INF,
    Grade,
    Symbol,
    SymbolTerm,
    ad_symbol,
    compose,
    grade_extract,
    identity_symbol,
    mat_identity,
    mat_scale,
    power_symbol,
    symbol_add,
    zero_symbol,
)
from loopcurv.trig import ExpPoly, TrigPoly


def random_symbol(rng, d=2, grades=(0, -1, -2, -3), cutoff=-4):
    terms = []
    for g in grades:
        for parity in (0, 1):
            if rng.random() < 0.6:
                M = tuple(
                    tuple(TrigPoly(rng.randint(-2, 2), {1: rng.randint(-2, 2)}, {2: rng.randint(-1, 1)}).exp
                          for _ in range(d))
                    for _ in range(d)
                )
                terms.append(SymbolTerm(Grade(g, 0, g), parity, M))
    return Symbol(d, terms, cutoff)


class TestBasics:
    def test_grade_label_and_order(self):
        g = Grade.of(-1, -2, Fraction(3, 4))
        assert g.value == Fraction(-5, 2)
        assert g.label() == "-2s-1"
        assert Grade(-2, 0, -2) < Grade(0, -2, Fraction(-3, 2))

    def test_add_identities(self):
        rng = random.Random(2)
        P = random_symbol(rng)
        assert symbol_add(P, zero_symbol(2)) == P
        assert (P - P).is_empty()

    def test_add_cutoff_is_max(self):
        P = identity_symbol(1).truncate(-3)
        Q = identity_symbol(1).truncate(-1)
        assert (P + Q).cutoff == -1

    def test_critical_merge(self):
        # at s=1 grade -2s and grade -2 are the same grade and must merge
        d = 1
        eye = mat_identity(d)
        t1 = SymbolTerm(Grade(0, -2, -2), 0, mat_scale(eye, Fraction(-3, 2)))
        t2 = SymbolTerm(Grade(-2, 0, -2), 0, mat_scale(eye, Fraction(1, 2)))
        S = Symbol(d, [t1, t2])
        assert len(S.terms) == 1
        assert S.terms[0].coeff == mat_scale(eye, -1)
        assert S.terms[0].grade.label() == "-2"


class TestPower:
    def test_free_coefficients(self):
        s = Fraction(3, 2)
        P = power_symbol("free", -1, s, 3)
        coeffs = [t.coeff[0][0] for t in P.terms]
        assert coeffs == [ExpPoly.constant(1), ExpPoly.constant(-s), ExpPoly.constant(s * (s + 1) / 2)]
        assert [t.grade.value for t in P.terms] == [-3, -5, -7]
        assert P.cutoff == -7

    def test_based_single_term(self):
        P = power_symbol("based", 1, Fraction(3, 4), 5)
        assert len(P.terms) == 1 and P.terms[0].grade.value == Fraction(3, 2)
        assert P.cutoff == NEG_INF

    def test_zero_power_is_identity(self):
        assert power_symbol("free", 1, 0, 3) == identity_symbol(1)

    def test_range(self):
        with pytest.raises(SobolevRange):
            power_symbol("free", 1, Fraction(1, 2), 3)

    def test_extract_second_coefficient(self):
        s = Fraction(5, 3)
        P = power_symbol("free", -1, s, 2)
        (t,) = grade_extract(P, -2 * s - 2)
        assert t.coeff[0][0] == ExpPoly.constant(-s)

    @pytest.mark.parametrize("s", [Fraction(3, 4), Fraction(1), Fraction(7, 5), Fraction(4)])
    def test_inverse_pair(self, s):
        cutoff = -6
        depth = 6
        A = power_symbol("free", 1, s, depth)
        B = power_symbol("free", -1, s, depth)
        assert compose(A, B, cutoff).same_terms(identity_symbol(1).truncate(cutoff))


class TestCompose:
    def test_identity(self):
        P = random_symbol(random.Random(5))
        assert compose(P, identity_symbol(2), P.cutoff) == P
        assert compose(identity_symbol(2), P, P.cutoff) == P

    def test_associative(self):
        rng = random.Random(9)
        P, Q, R = (random_symbol(rng) for _ in range(3))
        lhs = compose(compose(P, Q, -4), R, -4)
        rhs = compose(P, compose(Q, R, -4), -4)
        assert lhs.same_terms(rhs)

    def test_theta_independent_product(self):
        a = SymbolTerm(Grade(-1, 0, -1), 1, ((ExpPoly.constant(3),),))
        b = SymbolTerm(Grade(-2, 0, -2), 1, ((ExpPoly.constant(5),),))
        C = compose(Symbol(1, [a]), Symbol(1, [b]), -10)
        assert len(C.terms) == 1
        (t,) = C.terms
        assert t.grade.value == -3 and t.parity == 0 and t.coeff[0][0] == ExpPoly.constant(15)

    def test_first_order_correction(self):
        # |xi| o e^{i theta} = e^{i theta}|xi| + sgn(xi) * (-i d_theta)(e^{i theta}) = ... + sgn e^{i theta}
        P = Symbol(1, [SymbolTerm(Grade(1, 0, 1), 0, ((ExpPoly.constant(1),),))])
        Q = Symbol(1, [SymbolTerm(Grade(0, 0, 0), 0, ((ExpPoly.monomial(1, 1),),))])
        C = compose(P, Q, -5)
        by_grade = {(t.grade.value, t.parity): t.coeff[0][0] for t in C.terms}
        assert by_grade == {(1, 0): ExpPoly.monomial(1, 1), (0, 1): ExpPoly.monomial(1, 1)}

    def test_insufficient_depth(self):
        B = power_symbol("free", -1, Fraction(3, 2), 1)
        with pytest.raises(InsufficientDepth) as info:
            compose(B, identity_symbol(1), -6)
        assert info.value.required == -3

    def test_dimension_mismatch(self):
        with pytest.raises(InvalidInput):
            compose(identity_symbol(1), identity_symbol(2), -1)

    def test_below_cutoff(self):
        with pytest.raises(BelowCutoff):
            grade_extract(power_symbol("free", -1, 2, 2), -10)

    def test_odd_parities_square_to_even(self):
        t = SymbolTerm(Grade(-1, 0, -1), 1, ((ExpPoly.constant(1),),))
        C = compose(Symbol(1, [t]), Symbol(1, [t]), -2)
        assert {u.parity for u in C.terms} == {0}


class TestAdSymbol:
    def test_su2_entries(self, L, example):
        X, _ = example
        (t,) = grade_extract(ad_symbol(L, X), 0)
        assert t.coeff[2][1] == TrigPoly(sin={1: -2}).exp
        assert t.coeff[1][2] == TrigPoly(sin={1: 2}).exp
        assert grade_extract(ad_symbol(L, X), -1) == []

    def test_degenerate(self, L):
        assert ad_symbol(L, LoopField.zero(L)).is_empty()
        A = abelian(3)
        assert ad_symbol(A, random_field(A, random.Random(1))).is_empty()
