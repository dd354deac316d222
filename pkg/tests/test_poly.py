from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from bott_futaki.poly import (
    PiecewisePolynomial,
    interpolate,
    pantideriv,
    pcompose_shift,
    pderiv,
    peval,
    pmul,
    poly,
)

rationals = st.fractions(min_value=-20, max_value=20, max_denominator=12)
coeff_lists = st.lists(rationals, min_size=1, max_size=6)


def _sympy(p):
    x = sympy.Symbol("x")
    return sum(sympy.Rational(c.numerator, c.denominator) * x**k for k, c in enumerate(p)), x


@given(coeff_lists)
def test_interpolation_recovers_polynomial(coeffs):
    p = poly(coeffs)
    xs = [Fraction(k, 3) for k in range(len(coeffs))]
    assert interpolate(xs, [peval(p, x) for x in xs]) == p


@given(coeff_lists, coeff_lists, rationals)
def test_product_evaluates_pointwise(p, q, x):
    assert peval(pmul(poly(p), poly(q)), x) == peval(poly(p), x) * peval(poly(q), x)


@given(coeff_lists, rationals)
def test_shift_composition(p, h):
    p = poly(p)
    for x in (Fraction(0), Fraction(1, 2), Fraction(-3)):
        assert peval(pcompose_shift(p, h), x) == peval(p, x + h)


@given(coeff_lists)
def test_antiderivative_against_sympy(p):
    p = poly(p)
    expr, x = _sympy(p)
    assert peval(pantideriv(p), 2) - peval(pantideriv(p), -1) == Fraction(str(sympy.integrate(expr, (x, -1, 2))))
    assert pderiv(pantideriv(p)) == p


def test_higher_derivative():
    assert pderiv(poly([1, 1, 1, 1]), 2) == poly([2, 6])
    assert pderiv(poly([5]), 1) == ()


def test_piecewise_evaluation_sides():
    pp = PiecewisePolynomial((0, 1, 2), ((1,), (0, 1)))
    assert pp(Fraction(1, 2)) == 1
    assert pp(1) == 1 and pp(1, side="left") == 1
    assert pp(2) == 2
    with pytest.raises(ValueError):
        pp(3)


def test_piecewise_integrate_and_cumulative():
    # |x| on [-1, 2]
    pp = PiecewisePolynomial((-1, 0, 2), ((0, -1), (0, 1)))
    assert pp.integrate() == Fraction(5, 2)
    assert pp.integrate(Fraction(-1, 2), 1) == Fraction(5, 8)
    cum = pp.cumulative()
    assert cum(-1) == 0 and cum(2) == Fraction(5, 2)
    assert cum.is_continuous()
    assert cum.derivative().simplify() == pp.simplify()


def test_piecewise_arithmetic_refines_breakpoints():
    p = PiecewisePolynomial((0, 1, 3), ((1,), (2,)))
    q = PiecewisePolynomial((0, 2, 3), ((0, 1), (5,)))
    r = p * q + 1
    for x in (Fraction(1, 2), Fraction(3, 2), Fraction(5, 2)):
        assert r(x) == p(x) * q(x) + 1
    assert r.breakpoints == (0, 1, 2, 3)


def test_simplify_merges_equal_pieces():
    pp = PiecewisePolynomial((0, 1, 2), ((1, 1), (1, 1))).simplify()
    assert pp.breakpoints == (0, 2)
    assert PiecewisePolynomial((0, 1), ((0, 0),)).is_zero()


def test_from_function_is_exact():
    pp = PiecewisePolynomial.from_function(lambda x: min(x * x, 1), [0, 1, 2], 2)
    assert pp.pieces == ((0, 0, 1), (1,))


def test_restrict():
    pp = PiecewisePolynomial((0, 1, 2), ((0, 1), (1,)))
    r = pp.restrict(Fraction(1, 2), Fraction(3, 2))
    assert r.breakpoints == (Fraction(1, 2), 1, Fraction(3, 2))
    assert r.integrate() == Fraction(3, 8) + Fraction(1, 2)


@settings(max_examples=50)
@given(coeff_lists, rationals)
def test_times_x(coeffs, x):
    pp = PiecewisePolynomial((-20, 20), (poly(coeffs),))
    assert pp.times_x()(x) == x * pp(x)
