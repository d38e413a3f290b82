from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from milnorvf.errors import GermError
from milnorvf.polynomial import Polynomial, dot, parse_rational

X = ["x", "y", "z"]


def poly(text, names=X):
    return Polynomial.from_expr(text, names)


def test_zero_coefficients_are_dropped():
    p = Polynomial.from_dict(2, {(1, 0): 1, (0, 1): 0, (2, 0): Fraction(0)})
    assert p.as_dict() == {(1, 0): Fraction(1)}


def test_arithmetic_matches_sympy_expansion():
    a, b = poly("x*y + z"), poly("x - 2*z")
    assert a * b == poly("x**2*y - 2*x*y*z + x*z - 2*z**2")
    assert a + b - a == b
    assert (a - a).is_zero()
    assert b ** 2 == b * b
    assert (b ** 0) == Polynomial.constant(3, 1)


def test_incompatible_variable_counts_raise():
    with pytest.raises(ValueError):
        Polynomial.variable(2, 0) + Polynomial.variable(3, 0)


@pytest.mark.parametrize(
    "text, index, expected",
    [
        ("x*y", 0, "y"),
        ("x*y", 2, "0"),
        ("x**3*z - 5*y**2", 0, "3*x**2*z"),
        ("x**3*z - 5*y**2", 1, "-10*y"),
        ("x**2*y**2*z**2", 2, "2*x**2*y**2*z"),
    ],
)
def test_partial(text, index, expected):
    assert poly(text).partial(index) == poly(expected)


def test_homogeneous_parts_and_degrees():
    p = poly("x*y + x**3 - y**2*z + 7*z**5")
    parts = p.homogeneous_parts()
    assert [d for d, _ in parts] == [2, 3, 5]
    assert parts[0][1] == poly("x*y")
    assert parts[1][1] == poly("x**3 - y**2*z")
    assert sum((q for _, q in parts), Polynomial.zero(3)) == p
    assert p.lowest_degree() == 2 and p.degree() == 5
    assert all(q.is_homogeneous() for _, q in parts)


def test_evaluate_exact_and_float():
    p = poly("x**2/3 - y*z")
    assert p.evaluate([Fraction(3), Fraction(1, 2), 4]) == Fraction(1)
    assert p([3.0, 0.5, 4.0]) == pytest.approx(1.0, abs=1e-15)


def test_terms_round_trip():
    p = poly("x**2/3 - 7*y*z + z")
    assert Polynomial.from_terms(3, p.to_terms()) == p


def test_format_uses_names():
    assert poly("x*y - z**2").format(X) in ("x*y - z^2", "-z^2 + x*y")


def test_dot():
    a = [poly("x"), poly("y")]
    b = [poly("y"), poly("-x")]
    assert dot(a, b).is_zero()


def test_embed_moves_variables():
    q = Polynomial.from_expr("u*v**2", ["u", "v"]).embed(4, [1, 3])
    assert q.as_dict() == {(0, 1, 0, 2): Fraction(1)}


@pytest.mark.parametrize("text, value", [("3", 3), ("-2/6", Fraction(-1, 3)), ("0.25", Fraction(1, 4)), (5, 5)])
def test_parse_rational(text, value):
    assert parse_rational(text) == value


@pytest.mark.parametrize("bad", ["abc", "1/0", "", None])
def test_parse_rational_rejects(bad):
    with pytest.raises(ValueError):
        parse_rational(bad)


def test_from_expr_rejects_non_polynomial():
    with pytest.raises(GermError):
        poly("sin(x)")
    with pytest.raises(GermError):
        poly("x**-1")


small = st.integers(-4, 4)
exps = st.tuples(st.integers(0, 3), st.integers(0, 3), st.integers(0, 3))


@settings(max_examples=60, deadline=None)
@given(st.dictionaries(exps, small, max_size=6), st.dictionaries(exps, small, max_size=6))
def test_product_rule(a, b):
    p, q = Polynomial.from_dict(3, a), Polynomial.from_dict(3, b)
    for i in range(3):
        assert (p * q).partial(i) == p.partial(i) * q + p * q.partial(i)


@settings(max_examples=60, deadline=None)
@given(st.dictionaries(exps, small, max_size=6), st.lists(st.fractions(max_denominator=7), min_size=3, max_size=3))
def test_evaluation_is_a_ring_map(a, pt):
    p = Polynomial.from_dict(3, a)
    q = p + Polynomial.variable(3, 1)
    assert (p * q).evaluate(pt) == p.evaluate(pt) * q.evaluate(pt)
