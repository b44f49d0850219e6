from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from linfgeom.poly import Poly, PolySyntaxError, format_poly, parse_poly


def test_parse_and_print_canonical():
    p = parse_poly("x2*x1 + 1/2*x1^2 - 3", nvars=2)
    assert format_poly(p) == "1/2*x1^2 + x1*x2 - 3"


def test_round_trip_simple():
    for text in ["0", "1", "-x1", "x1^3 - 2/3*x1*x2 + 7", "(x1 + x2)^2"]:
        p = parse_poly(text, nvars=2)
        assert parse_poly(format_poly(p), nvars=2) == p


def test_derivative():
    p = parse_poly("x1^2*x2 + 3*x2", nvars=2)
    assert p.diff(0) == parse_poly("2*x1*x2", nvars=2)
    assert p.diff(1) == parse_poly("x1^2 + 3", nvars=2)


@pytest.mark.parametrize("text", ["x1 +", "x1 ** 2", "2x1^", "(x1", "x1^x2", "x1 @ 2"])
def test_syntax_errors_have_position(text):
    with pytest.raises(PolySyntaxError) as info:
        parse_poly(text, nvars=2)
    assert info.value.pos >= 0


def test_undefined_variable():
    with pytest.raises(PolySyntaxError, match="x3"):
        parse_poly("x3 + 1", nvars=2)


coeffs = st.fractions(min_value=-5, max_value=5, max_denominator=6)
monos = st.tuples(st.integers(0, 2), st.integers(0, 2))
polys = st.dictionaries(monos, coeffs, max_size=5).map(
    lambda d: Poly(2, {e: c for e, c in d.items() if c}))


@settings(max_examples=60, deadline=None)
@given(polys, polys, polys)
def test_ring_axioms(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a


@settings(max_examples=60, deadline=None)
@given(polys, polys)
def test_leibniz(a, b):
    for i in range(2):
        assert (a * b).diff(i) == a.diff(i) * b + a * b.diff(i)


@settings(max_examples=60, deadline=None)
@given(polys)
def test_format_round_trip(a):
    assert parse_poly(format_poly(a), nvars=2) == a


def test_exact_rationals():
    p = parse_poly("1/3*x1", nvars=1)
    assert p.terms[(1,)] == Fraction(1, 3)
