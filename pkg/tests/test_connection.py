import math

import pytest

from nsdt.connection import (
    COMPONENT_NAMES, christoffel, components_for, connection_form_in_tetrad, connection_identity_ok,
    dual_path_residuals, metric_compatibility_residuals, rho_minus, special_form_components,
    split_spin_parts, torsion_residuals, verify_structural_identities, wedge_minus_connection,
)
from nsdt.fields import Polynomial, coordinate, is_zero_field, zero
from nsdt.metric import build_special_form
from nsdt.tetrad import construct_foliation_tetrad

x2, x3 = coordinate(2), coordinate(3)


def test_flat_christoffels_vanish(flat_metric):
    gamma = christoffel(flat_metric)
    assert all(is_zero_field(g) for block in gamma for row in block for g in row)


def test_worked_example_is_torsion_free_and_compatible(worked_metric):
    assert all(f.is_zero for f in torsion_residuals(christoffel(worked_metric)))
    assert all(f.is_zero for f in metric_compatibility_residuals(worked_metric))


def test_sphere_christoffel_at_equator(sphere_metric):
    gamma = christoffel(sphere_metric)
    point = (math.pi / 2, 0.2, 1.0, 0.4)
    # Gamma^theta1_phi1phi1 = -sin cos, zero on the equator
    assert gamma[0][1][1].evaluate(point) == pytest.approx(0.0, abs=1e-6)
    # Gamma^phi2_theta2phi2 = cot(theta2)
    assert gamma[3][2][3].evaluate(point) == pytest.approx(math.cos(1.0) / math.sin(1.0), abs=1e-6)


def test_pattern_holds(worked_metric):
    form = connection_form_in_tetrad(worked_metric, construct_foliation_tetrad(worked_metric))
    assert form.pattern_holds()


class TestWorkedExampleComponents:
    def test_values(self, worked_metric):
        c = components_for(worked_metric)
        assert c.a[0].equals(x2) and c.a[1].equals(-x3)
        assert c.b[0].equals(-x3) and c.b[1].equals(x2)
        assert c.c[0].equals(-x3) and c.c[1].equals(x2)
        assert c.d[0].equals(x2) and c.d[1].equals(-x3)
        assert all(v.is_zero for v in c.e)

    def test_forms_vanish_on_fibers(self, worked_metric):
        c = components_for(worked_metric)
        for name in ("a", "b", "c", "d"):
            assert c.form(name)[2].is_zero and c.form(name)[3].is_zero

    def test_closed_formulas_agree(self, worked_metric, worked_triple):
        assert components_for(worked_metric).equals(special_form_components(*worked_triple))
        assert connection_identity_ok(dual_path_residuals(worked_metric))


def test_flat_components_vanish(flat_metric):
    c = components_for(flat_metric)
    assert all(v.is_zero for name in COMPONENT_NAMES for v in c.form(name))


@pytest.mark.parametrize("index", range(5))
def test_dual_path_on_family(sd_family, index):
    m = build_special_form(*sd_family[index])
    assert connection_identity_ok(dual_path_residuals(m))


def test_dual_path_needs_special_form(sphere_metric):
    with pytest.raises(ValueError):
        dual_path_residuals(sphere_metric)


def test_spin_parts_are_trace_free(worked_metric):
    pair = split_spin_parts(components_for(worked_metric))
    assert all(f.is_zero for f in pair.trace_residuals())


def test_minus_connection_two_ways(worked_metric):
    t = construct_foliation_tetrad(worked_metric)
    from_components = rho_minus(components_for(worked_metric, t))
    from_bivectors = wedge_minus_connection(worked_metric, t)
    for i in range(3):
        for j in range(3):
            for k in range(4):
                assert (from_components[i][j][k] - from_bivectors[i][j][k]).is_zero, (i, j, k)


class TestStructuralIdentities:
    def test_worked_example(self, worked_metric):
        report = verify_structural_identities(worked_metric, self_dual=True)
        assert report.passed, report.failing()
        assert report.summary()["ideal"]["e(p0)"] == "exact-zero"

    @pytest.mark.parametrize("index", range(0, 20, 4))
    def test_family(self, sd_family, index):
        m = build_special_form(*sd_family[index])
        assert verify_structural_identities(m, self_dual=True).passed

    def test_non_self_dual_metric(self, perturbed_triple):
        m = build_special_form(*perturbed_triple)
        report = verify_structural_identities(m, self_dual=True)
        assert report.group_passed("ideal")
        assert report.group_passed("commutators")
        assert not report.passed
        assert report.failing()

    def test_foliation_identities_without_self_duality(self):
        m = build_special_form(Polynomial.from_expr("x2**3"), zero(), zero())
        report = verify_structural_identities(m)
        assert set(report.groups) == {"ideal", "commutators"}
        assert report.passed
