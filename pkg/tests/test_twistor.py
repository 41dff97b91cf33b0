import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from sympy import Rational

from nsdt.connection import components_for
from nsdt.errors import NotBasic, NotSelfDual
from nsdt.fields import coordinate
from nsdt.metric import build_special_form
from nsdt.tetrad import construct_foliation_tetrad
from nsdt.twistor import (
    AFFINE, INVERTED, bracket_span_test, build_twistor_lift, check_basic, check_lax_integrability,
    induced_projective_connection, lax_coefficient_residuals, projective_spray, reduction_identity,
    round_sphere_connection, spray_at, zeta_samples,
)

x2, x3 = coordinate(2), coordinate(3)


def lift_for(m):
    t = construct_foliation_tetrad(m)
    c = components_for(m, t)
    return build_twistor_lift(c, t, domain=m.probe_bounds()), c, t


@pytest.fixture(scope="module")
def worked_lift(worked_metric):
    return lift_for(worked_metric)[0]


class TestLaxCubic:
    def test_worked_example_coefficients(self, worked_lift):
        q0, q1, q2, q3 = worked_lift.q
        assert q0.equals(x3) and q1.equals(-x2) and q2.equals(-x3) and q3.equals(x2)
        assert all(f.is_zero for f in worked_lift.s)

    def test_inverted_chart_reverses_coefficients(self, worked_lift):
        x = (0.1, 0.2, 0.3, -0.4)
        z = 0.7
        affine = worked_lift.q1(x, z, AFFINE)
        inverted = worked_lift.q1(x, 1 / z, INVERTED)
        # Q1 transforms as a cubic: -w^3 Q1(1/w)
        assert inverted == pytest.approx(-affine / z ** 3)

    def test_unknown_chart(self, worked_lift):
        with pytest.raises(ValueError):
            worked_lift.chart_data("polar")

    def test_zeta_samples(self):
        assert zeta_samples(5) == [Rational(-1), Rational(-1, 2), 0, Rational(1, 2), 1]
        assert zeta_samples(1) == [0]


class TestIntegrability:
    def test_worked_example(self, worked_lift):
        report = check_lax_integrability(worked_lift)
        assert report.coefficient_passed
        assert report.bracket.exact
        assert report.bracket.max_residual == 0.0
        assert report.passed and report.agree

    def test_perturbed_example_fails(self, perturbed_triple):
        lift, _, _ = lift_for(build_special_form(*perturbed_triple))
        report = check_lax_integrability(lift)
        assert not report.coefficient_passed
        assert not report.passed
        assert lax_coefficient_residuals(lift)["(p0+zp1)Q1[0]"].equals(x2 * -3)

    @pytest.mark.parametrize("index", range(0, 20, 3))
    def test_family(self, sd_family, index):
        lift, _, _ = lift_for(build_special_form(*sd_family[index]))
        assert check_lax_integrability(lift, probe_count=2).passed

    def test_bracket_test_samples_both_charts(self, worked_lift):
        result = bracket_span_test(worked_lift, zeta_count=3, probe_count=2)
        assert result.samples == 2 * 2 * 3


class TestBasic:
    def test_worked_example_is_not_basic(self, worked_lift):
        report = check_basic(worked_lift)
        assert not report.passed
        assert report.q_residuals["p0q1"].equals(-1)
        assert "p0q1" in report.failing()

    def test_requires_self_duality(self, perturbed_triple):
        lift, _, _ = lift_for(build_special_form(*perturbed_triple))
        with pytest.raises(NotSelfDual):
            check_basic(lift)

    def test_dw_metric_is_basic(self, dw_metric):
        lift, _, _ = lift_for(dw_metric)
        assert check_basic(lift).passed

    def test_basic_family(self, basic_family):
        for triple in basic_family:
            lift, _, _ = lift_for(build_special_form(*triple))
            report = check_basic(lift)
            assert report.q_passed and report.component_passed


class TestLeafConnection:
    def test_needs_basic_foliation(self, worked_metric):
        _, c, t = lift_for(worked_metric)
        with pytest.raises(NotBasic):
            induced_projective_connection(c, t)

    def test_reduction_on_basic_family(self, basic_family):
        for triple in basic_family:
            lift, c, t = lift_for(build_special_form(*triple))
            conn = induced_projective_connection(c, t)
            assert all(f.is_zero for f in conn.torsion_residuals())
            assert reduction_identity(lift, conn).passed

    def test_reduction_on_dw_metric(self, dw_metric):
        lift, c, t = lift_for(dw_metric)
        report = reduction_identity(lift, induced_projective_connection(c, t))
        assert report.passed
        assert set(report.summary().values()) == {"exact-zero"}


class TestSpray:
    def test_round_sphere_coefficients(self):
        f0, f1, f2, f3 = round_sphere_connection().spray_coefficients()
        x = (1.0, 0.3, 0.0, 0.0)
        assert f0.evaluate(x) == 0.0 and f2.evaluate(x) == 0.0
        assert f1.evaluate(x) == pytest.approx(-2 * math.cos(1.0) / math.sin(1.0))
        assert f3.evaluate(x) == pytest.approx(-math.sin(1.0) * math.cos(1.0))

    def test_equator_is_a_geodesic(self):
        conn = round_sphere_connection()
        np.testing.assert_allclose(projective_spray(conn, (math.pi / 2, 0.0, 0.0)), [1.0, 0.0, 0.0], atol=1e-12)
        np.testing.assert_allclose(projective_spray(conn, (math.pi / 2, 0.0, 0.0), INVERTED), [0.0, 1.0, 0.0],
                                   atol=1e-12)

    @given(
        coefficients=st.lists(st.floats(-3, 3), min_size=4, max_size=4),
        z=st.floats(0.2, 5.0) | st.floats(-5.0, -0.2),
    )
    @settings(max_examples=40, deadline=None)
    def test_charts_give_parallel_sprays(self, coefficients, z):
        affine = spray_at(coefficients, (0.0, 0.0, z), AFFINE)
        inverted = spray_at(coefficients, (0.0, 0.0, 1 / z), INVERTED)
        # base directions agree up to the factor z
        np.testing.assert_allclose(inverted[:2] * z, affine[:2], rtol=1e-9, atol=1e-12)
        # dw/dt = -w^2 dz/dt along the rescaled flow
        np.testing.assert_allclose(inverted[2] * z, -affine[2] / z ** 2, rtol=1e-7, atol=1e-9)

    def test_unknown_chart(self):
        with pytest.raises(ValueError):
            spray_at([0, 0, 0, 0], (0, 0, 0), "polar")
