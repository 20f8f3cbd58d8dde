"""Exact scalar ring and trigonometric polynomials."""

import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from loopcurv.surd import Surd, format_surd, parse_surd
from loopcurv.trig import ExpPoly, TrigPoly, format_trig, l2_norm, trig_diff, trig_mul

rationals = st.fractions(min_value=-5, max_value=5, max_denominator=6)


@st.composite
def trig_polys(draw, max_degree=3):
    deg = draw(st.integers(0, max_degree))
    cos = {n: draw(rationals) for n in range(1, deg + 1)}
    sin = {n: draw(rationals) for n in range(1, deg + 1)}
    return TrigPoly(draw(rationals), cos, sin)


class TestSurd:
    def test_power_normal_form(self):
        assert format_surd(Surd.power(2, Fraction(3, 2))) == "2*2^(1/2)"
        assert Surd.power(2, Fraction(1, 2)) ** 2 == Surd.rational(2)
        assert Surd.power(Fraction(5, 4), Fraction(3, 4)) == Surd.power(5, Fraction(3, 4)) * Surd.power(
            2, Fraction(1, 2)
        ) * Fraction(1, 4)

    def test_integer_power_is_rational(self):
        assert Surd.power(5, 2).is_rational()
        assert Surd.power(4, Fraction(1, 2)) == Surd.rational(2)

    def test_zero_is_exact(self):
        a = Surd.power(2, Fraction(1, 3))
        assert (a * a * a - 2).is_zero()
        assert not (a - Surd.power(3, Fraction(1, 3))).is_zero()

    def test_i_squared(self):
        assert Surd.i() * Surd.i() == Surd.rational(-1)

    def test_float_value(self):
        x = Surd.power(10, Fraction(3, 4)) * 3 + Fraction(1, 7)
        assert float(x) == pytest.approx(3 * 10**0.75 + 1 / 7, rel=1e-14)

    def test_inverse(self):
        x = Surd.power(6, Fraction(2, 5)) * Fraction(3, 2)
        assert x * x.inverse() == Surd.rational(1)

    @pytest.mark.parametrize("text", ["0", "-3/2", "1/4*2^(1/2)*5^(3/4)", "-3/2*i*2^(1/2)", "1 - i"])
    def test_parse_round_trip(self, text):
        x = parse_surd(text)
        assert parse_surd(format_surd(x)) == x

    def test_to_fraction_type(self):
        assert isinstance(Surd.rational(Fraction(2, 3)).to_fraction(), Fraction)
        with pytest.raises(ValueError):
            Surd.power(2, Fraction(1, 2)).to_fraction()


class TestTrig:
    def test_products(self):
        s1 = TrigPoly(sin={1: 1})
        c1 = TrigPoly(cos={1: 1})
        assert trig_mul(s1, s1) == TrigPoly(Fraction(1, 2), {2: Fraction(-1, 2)})
        assert trig_mul(s1, c1) == TrigPoly(sin={2: Fraction(1, 2)})

    def test_unit(self):
        f = TrigPoly(3, {1: 2}, {3: -1})
        assert trig_mul(TrigPoly(1), f) == f

    def test_derivatives(self):
        s1 = TrigPoly(sin={1: 1})
        assert trig_diff(s1) == TrigPoly(cos={1: 1})
        assert trig_diff(TrigPoly(7)).is_zero()
        assert trig_diff(s1, 2) == -s1

    def test_canonical_drops_zeros(self):
        p = TrigPoly(0, {1: 0, 2: 1}, {1: 0})
        assert p == TrigPoly(cos={2: 1})
        assert p.harmonics() == {2: (Surd.rational(1), Surd())}

    def test_evaluation(self):
        p = TrigPoly(Fraction(1, 2), {2: 3}, {1: -1})
        t = 0.37
        assert p(t) == pytest.approx(0.5 + 3 * math.cos(2 * t) - math.sin(t))

    def test_format(self):
        assert format_trig(TrigPoly(Fraction(1, 2), {2: Fraction(-1, 2)})) == "1/2 + (-1/2)cos2θ"

    def test_exp_poly_complex_parts(self):
        e = ExpPoly.monomial(1, Surd.i())  # i e^{i theta}
        assert e.real_part() == TrigPoly(sin={1: -1})
        assert e.imag_part() == TrigPoly(cos={1: 1})

    def test_l2_norm(self):
        assert l2_norm(TrigPoly(cos={1: 2}).exp) == pytest.approx(math.sqrt(2))

    def test_dpow_matches_derivative(self):
        rng = random.Random(1)
        p = TrigPoly(1, {n: Fraction(rng.randint(-3, 3)) for n in (1, 2)}, {3: 2}).exp
        # (-i d)^2 = -d^2
        assert p.dpow(2) == -p.diff(2)

    @settings(max_examples=60, deadline=None)
    @given(trig_polys(), trig_polys(), trig_polys())
    def test_mul_associative_commutative(self, a, b, c):
        assert trig_mul(a, b) == trig_mul(b, a)
        assert trig_mul(trig_mul(a, b), c) == trig_mul(a, trig_mul(b, c))

    @settings(max_examples=60, deadline=None)
    @given(trig_polys(), trig_polys())
    def test_leibniz(self, a, b):
        lhs = trig_diff(trig_mul(a, b), 1)
        rhs = trig_mul(trig_diff(a, 1), b) + trig_mul(a, trig_diff(b, 1))
        assert lhs == rhs

    @settings(max_examples=40, deadline=None)
    @given(trig_polys(), st.floats(0, 6.28))
    def test_product_pointwise(self, a, t):
        b = TrigPoly(1, {1: 2}, {2: Fraction(1, 3)})
        assert trig_mul(a, b)(t) == pytest.approx(a(t) * b(t), abs=1e-9)
