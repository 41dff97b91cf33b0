import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from sympy import Rational

from nsdt.errors import EvaluationError, SpecParseError
from nsdt.fields import (
    Callback, ChartPoint, Polynomial, coordinate, coordinate_vector, lie_bracket,
    parse_coefficient, polynomial_from_json, polynomial_to_json, probe_points, summarize, zero,
)

exponents = st.tuples(*[st.integers(0, 2)] * 4)
polynomials = st.lists(st.tuples(st.integers(-5, 5), exponents), max_size=5).map(Polynomial.from_terms)
axes = st.integers(0, 3)


class TestPolynomial:
    def test_evaluate(self):
        f = Polynomial.from_expr("x0*x1 + 3*x2**2")
        assert f.evaluate((1.0, 2.0, 3.0, 4.0)) == pytest.approx(29.0)
        assert f.evaluate_exact((1, 2, 3, 4)) == 29

    def test_differentiate(self):
        f = Polynomial.from_expr("x0*x1 + 3*x2**2")
        assert f.differentiate(2).equals(Polynomial.from_expr("6*x2"))
        assert f.differentiate(3).is_zero

    def test_difference_with_itself_is_exact_zero(self):
        f = Polynomial.from_expr("x3**2 - x0/7")
        assert (f - f).is_identically_zero()
        assert summarize([f - f]) == "exact-zero"

    def test_division_by_constant_stays_exact(self):
        f = Polynomial.from_expr("x0") / 2
        assert isinstance(f, Polynomial)
        assert f.evaluate_exact((1, 0, 0, 0)) == Rational(1, 2)

    def test_degree_in_fiber(self):
        f = Polynomial.from_expr("x0**3*x2 + x2**2*x3")
        assert f.degree_in((2, 3)) == 3
        assert zero().degree_in((2, 3)) == -1

    @given(f=polynomials, i=axes, j=axes)
    @settings(max_examples=30, deadline=None)
    def test_partials_commute(self, f, i, j):
        assert f.differentiate(i).differentiate(j).equals(f.differentiate(j).differentiate(i))

    @given(f=polynomials, g=polynomials, axis=axes)
    @settings(max_examples=30, deadline=None)
    def test_product_rule(self, f, g, axis):
        left = (f * g).differentiate(axis)
        right = f.differentiate(axis) * g + f * g.differentiate(axis)
        assert left.equals(right)


class TestCallback:
    def test_finite_difference_derivative(self):
        f = Callback(lambda x: math.sin(x[0]) * x[1])
        point = (0.3, 2.0, 0.0, 0.0)
        assert f.differentiate(0).evaluate(point) == pytest.approx(2.0 * math.cos(0.3), abs=1e-8)
        assert f.differentiate(1).evaluate(point) == pytest.approx(math.sin(0.3), abs=1e-8)

    def test_zero_test_uses_tolerance(self):
        assert Callback(lambda x: 1e-12).is_identically_zero(tolerance=1e-8)
        assert not Callback(lambda x: x[0]).is_identically_zero(tolerance=1e-8)

    def test_non_finite_value_raises(self):
        with pytest.raises(EvaluationError):
            Callback(lambda x: float("nan")).evaluate((0.0, 0.0, 0.0, 0.0))

    def test_mixing_backends_degrades_to_callback(self):
        mixed = coordinate(0) + Callback(lambda x: 2.0 * x[1])
        assert isinstance(mixed, Callback)
        assert mixed.evaluate((1.0, 3.0, 0.0, 0.0)) == pytest.approx(7.0)

    def test_step_must_be_positive(self):
        with pytest.raises(ValueError):
            Callback(lambda x: 0.0, step=0.0)


def test_probe_points_are_seeded():
    first = probe_points(8, seed=3)
    assert first.shape == (8, 4)
    np.testing.assert_array_equal(first, probe_points(8, seed=3))
    assert np.all(np.abs(first) <= 1.0)
    with pytest.raises(ValueError):
        probe_points(0)


def test_chart_point_validation():
    assert ChartPoint.of(1, 2, 3, 4).coords == (1.0, 2.0, 3.0, 4.0)
    with pytest.raises(ValueError):
        ChartPoint.of(1, 2, 3)
    with pytest.raises(ValueError):
        ChartPoint.of(0, 0, 0, float("inf"))


def test_lie_bracket_of_coordinate_fields():
    assert all(c.is_zero for c in lie_bracket(coordinate_vector(0), coordinate_vector(2)))
    v = (zero(), coordinate(0), zero(), zero())
    bracket = lie_bracket(v, coordinate_vector(0))
    assert bracket[1].equals(-1)
    assert all(bracket[k].is_zero for k in (0, 2, 3))


class TestSerialization:
    def test_parse_terms(self):
        f = polynomial_from_json([{"coeff": "1/2", "exps": [1, 0, 0, 0]}, {"coeff": "-3", "exps": [0, 0, 0, 2]}])
        assert f.equals(Polynomial.from_expr("x0/2 - 3*x3**2"))

    def test_written_terms_are_canonical(self):
        f = Polynomial.from_expr("x2**2 - x0/3")
        assert polynomial_to_json(f) == [
            {"coeff": "-1/3", "exps": [1, 0, 0, 0]},
            {"coeff": "1/1", "exps": [0, 0, 2, 0]},
        ]
        assert polynomial_from_json(polynomial_to_json(f)).equals(f)

    @pytest.mark.parametrize("text", ["1/0", "abc", "1/2/3", 0.5, True])
    def test_bad_coefficient(self, text):
        with pytest.raises(SpecParseError):
            parse_coefficient(text)

    @pytest.mark.parametrize("terms", [
        {"coeff": "1", "exps": [0, 0, 0, 0]},
        [{"coeff": "1", "exps": [0, 0, 0]}],
        [{"coeff": "1", "exps": [0, -1, 0, 0]}],
        [{"exps": [0, 0, 0, 0]}],
    ])
    def test_malformed_terms(self, terms):
        with pytest.raises(SpecParseError):
            polynomial_from_json(terms)
