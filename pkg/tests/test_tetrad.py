import math

import numpy as np
import pytest
import sympy

from nsdt.errors import DegenerateVertical, IndecomposableInput
from nsdt.fields import Polynomial, zero
from nsdt.metric import build_generic
from nsdt.tetrad import (
    H_MATRIX, PlaneType, beta_plane_at, bivector_inner, classify_null_plane, construct_foliation_tetrad,
    frame_metric, lambda_frames, product_sphere_tetrad, tetrad_for, validate_tetrad,
)

EQUATOR = (math.pi / 2, 0.0, math.pi / 2, 0.0)


class TestFoliationTetrad:
    def test_exact_null_gram(self, worked_metric):
        tetrad = construct_foliation_tetrad(worked_metric)
        validation = validate_tetrad(tetrad, worked_metric)
        assert validation.exact_zero
        assert validation.oriented
        assert validation.valid

    def test_vertical_frames_are_coordinate_fields(self, worked_metric):
        tetrad = construct_foliation_tetrad(worked_metric)
        assert [c.equals(int(k == 2)) for k, c in enumerate(tetrad.p0)] == [True] * 4
        assert [c.equals(int(k == 3)) for k, c in enumerate(tetrad.p1)] == [True] * 4

    def test_unit_determinant(self, dw_metric):
        assert construct_foliation_tetrad(dw_metric).determinant().equals(1)

    def test_swapped_frame_is_not_oriented(self, worked_metric):
        swapped = construct_foliation_tetrad(worked_metric).swapped(0, 1)
        validation = validate_tetrad(swapped, worked_metric)
        assert not validation.oriented
        assert not validation.valid

    def test_wrong_frame_reports_offending_pair(self, worked_metric):
        tetrad = construct_foliation_tetrad(worked_metric)
        broken = type(tetrad)(tetrad.e0, tetrad.e0, tetrad.p0, tetrad.p1)
        validation = validate_tetrad(broken, worked_metric)
        assert not validation.exact_zero
        assert not validation.valid
        assert validation.offending is not None

    def test_generic_backend(self, worked_metric):
        generic = build_generic(worked_metric.g)
        validation = validate_tetrad(construct_foliation_tetrad(generic), generic)
        assert validation.exact_zero and validation.valid

    def test_non_null_vertical(self):
        rows = [[Polynomial.constant(1 if i == j else 0) for j in range(4)] for i in range(4)]
        with pytest.raises(DegenerateVertical):
            construct_foliation_tetrad(build_generic(rows))

    def test_product_sphere_has_no_vertical_foliation(self, sphere_metric):
        with pytest.raises(DegenerateVertical):
            construct_foliation_tetrad(sphere_metric)


class TestLambdaFrames:
    def test_frame_metrics(self, worked_metric):
        frames = lambda_frames(construct_foliation_tetrad(worked_metric))
        assert frame_metric(frames.phi, worked_metric) == H_MATRIX
        assert frame_metric(frames.psi, worked_metric) == H_MATRIX

    def test_phi_and_psi_are_orthogonal(self, worked_metric):
        frames = lambda_frames(construct_foliation_tetrad(worked_metric))
        for a in frames.phi:
            for b in frames.psi:
                assert sympy.simplify(bivector_inner(a, b, worked_metric).as_expr()) == 0

    def test_simple_bivectors_are_decomposable(self, worked_metric):
        frames = lambda_frames(construct_foliation_tetrad(worked_metric))
        for bivector in frames.phi[:2] + frames.psi[:2]:
            assert bivector.plucker().is_identically_zero()


class TestClassification:
    def test_vertical_plane_is_alpha(self, flat_metric):
        x = (0.2, 0.1, -0.3, 0.5)
        assert classify_null_plane((0, 0, 1, 0), (0, 0, 0, 1), flat_metric, x) == PlaneType.ALPHA

    @pytest.mark.parametrize("zeta", [(1.0, 0.0), (0.0, 1.0), (1.0, -2.5)])
    def test_beta_planes(self, worked_metric, zeta):
        x = (0.3, -0.2, 0.4, 0.1)
        tetrad = construct_foliation_tetrad(worked_metric)
        v, w = beta_plane_at(tetrad, x, *zeta)
        assert classify_null_plane(v, w, worked_metric, x, tetrad=tetrad) == PlaneType.BETA

    def test_product_sphere_planes(self, sphere_metric):
        beta = classify_null_plane((1, 0, -1, 0), (0, 1, 0, 1), sphere_metric, EQUATOR)
        alpha = classify_null_plane((1, 0, 1, 0), (0, 1, 0, 1), sphere_metric, EQUATOR)
        assert beta == PlaneType.BETA
        assert alpha == PlaneType.ALPHA

    def test_non_null_plane(self, sphere_metric):
        plane = classify_null_plane((1, 0, 0, 0), (0, 1, 0, 0), sphere_metric, EQUATOR)
        assert plane == PlaneType.NOT_TOTALLY_NULL

    def test_dependent_vectors(self, flat_metric):
        with pytest.raises(IndecomposableInput):
            classify_null_plane((0, 0, 1, 0), (0, 0, 2, 0), flat_metric, (0, 0, 0, 0))

    def test_sphere_tetrad_is_oriented_and_null(self, sphere_metric):
        tetrad = product_sphere_tetrad(sphere_metric)
        frame = tetrad.matrix_at(EQUATOR)
        gram = frame.T @ sphere_metric.gram_at(EQUATOR) @ frame
        expected = np.array([[0, 0, 0, 1], [0, 0, -1, 0], [0, -1, 0, 0], [1, 0, 0, 0]], dtype=float)
        np.testing.assert_allclose(gram, expected, atol=1e-12)
        assert np.linalg.det(frame) > 0
        assert validate_tetrad(tetrad, sphere_metric).valid


def test_tetrad_for_special_form(worked_metric):
    tetrad = tetrad_for(worked_metric)
    assert tetrad.e0[2].equals(worked_metric.special[2] / 2)
    assert tetrad.e0[3].equals(-worked_metric.special[0] / 2)
    assert tetrad.e1[2].equals(worked_metric.special[1] / 2)
    assert not any(c.equals(zero()) for c in (tetrad.e0[0], tetrad.e1[1]))
