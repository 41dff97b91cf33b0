import csv
import math

import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from nsdt.errors import ChartSingularity, StepLimitExceeded
from nsdt.geodesics import (
    QUARTER_TURN, Closed, GeodesicState, Open, TracerConfig, detect_closure, graph_intersections,
    null_defect, sample_beta_intersections, sphere_embedding, sphere_tangent, spherical_coordinates,
    trace_geodesic, trace_projective_geodesic, write_trace_csv,
)
from nsdt.twistor import round_sphere_connection

EQUATOR_INIT = (math.pi / 2, 0.0, math.pi / 2, 0.0, 0.0, 1.0, 0.0, 1.0)
TWO_PI = 2 * math.pi


def random_null_init(rng: np.random.Generator) -> GeodesicState:
    """Unit speed on both factors, so the period is 2 pi"""
    values = []
    velocities = []
    for _ in range(2):
        theta, phi, angle = rng.uniform(0.5, math.pi - 0.5), rng.uniform(0, TWO_PI), rng.uniform(0, TWO_PI)
        values += [theta, phi]
        velocities += [math.cos(angle), math.sin(angle) / math.sin(theta)]
    return GeodesicState.from_values(values + velocities)


class TestStateAndConfig:
    def test_from_values(self):
        state = GeodesicState.from_values(EQUATOR_INIT)
        assert state.position[0] == pytest.approx(math.pi / 2)
        assert list(state.velocity) == [0.0, 1.0, 0.0, 1.0]

    @pytest.mark.parametrize("values", [EQUATOR_INIT[:7], (0.0,) * 8])
    def test_invalid_state(self, values):
        with pytest.raises(ValueError):
            GeodesicState.from_values(values)

    @pytest.mark.parametrize("kwargs", [
        {"step_size": 0.0}, {"max_steps": 0}, {"closure_tolerance": -1.0}, {"rotation_threshold": 1.5},
    ])
    def test_invalid_config(self, kwargs):
        with pytest.raises(ValueError):
            TracerConfig(**kwargs)

    def test_config_from_mapping(self):
        cfg = TracerConfig.from_config({"tracer": {"step_size": 0.01, "rotate_charts": False}})
        assert cfg.step_size == 0.01
        assert not cfg.rotate_charts


def test_sphere_coordinates_invert_embedding():
    point = sphere_embedding(1.2, -0.7)
    tangent = sphere_tangent(1.2, -0.7, 0.3, 0.9)
    assert spherical_coordinates(point, tangent) == pytest.approx((1.2, -0.7, 0.3, 0.9))


def test_quarter_turn():
    np.testing.assert_allclose(QUARTER_TURN @ np.array([1.0, 0.0, 0.0]), [0.0, 0.0, -1.0], atol=1e-12)
    np.testing.assert_allclose(QUARTER_TURN @ np.array([0.0, 0.0, 1.0]), [1.0, 0.0, 0.0], atol=1e-12)


class TestStandardModel:
    def test_equator_closes_with_period_two_pi(self, sphere_metric):
        path = trace_geodesic(sphere_metric, GeodesicState.from_values(EQUATOR_INIT))
        assert isinstance(path.verdict, Closed)
        assert path.verdict.period == pytest.approx(TWO_PI, abs=1e-6)
        assert path.verdict.describe() == "closed, period ~ 6.2832"

    def test_fixed_steps_then_detect(self, sphere_metric):
        path = trace_geodesic(sphere_metric, GeodesicState.from_values(EQUATOR_INIT), steps=7000)
        assert len(path) == 7001
        verdict = detect_closure(path)
        assert isinstance(verdict, Closed)
        assert verdict.period == pytest.approx(TWO_PI, abs=1e-5)
        defect = null_defect(path, sphere_metric)
        assert defect.max_defect < 1e-8
        assert max(defect.energy_drift) < 1e-8

    def test_short_path_is_open(self, sphere_metric):
        path = trace_geodesic(sphere_metric, GeodesicState.from_values(EQUATOR_INIT), steps=1000)
        assert isinstance(detect_closure(path), Open)

    @pytest.mark.parametrize("values", [
        (math.pi / 2, 0.0, math.pi / 2, 0.0, 0.0, 1.0, 0.0, 0.0),
        (1.0, 0.3, 0.8, -0.5, 0.3, 0.5, 0.0, 0.2),
    ])
    def test_non_null_defect_is_conserved(self, sphere_metric, values):
        init = GeodesicState.from_values(values)
        expected = abs(float(init.velocity @ sphere_metric.gram_at(init.position) @ init.velocity))
        assert expected > 0.1
        path = trace_geodesic(sphere_metric, init, steps=2000)
        defect = null_defect(path, sphere_metric)
        assert defect.max_defect == pytest.approx(expected, abs=1e-8)
        assert max(defect.energy_drift) < 1e-8

    def test_pole_without_rotation(self, sphere_metric):
        init = GeodesicState.from_values((1e-7, 0.0, math.pi / 2, 0.0, 1.0, 0.0, 0.0, 1.0))
        with pytest.raises(ChartSingularity):
            trace_geodesic(sphere_metric, init, TracerConfig(rotate_charts=False), steps=10)

    def test_chart_rotation_keeps_features_continuous(self, sphere_metric):
        init = GeodesicState.from_values((0.5, 0.0, math.pi / 2, 0.0, -1.0, 0.0, 0.0, 1.0))
        path = trace_geodesic(sphere_metric, init, steps=1000)
        assert path.rotations == 1
        jumps = [np.linalg.norm(b - a) for a, b in zip(path.features, path.features[1:])]
        assert max(jumps) < 0.01
        assert null_defect(path, sphere_metric).max_defect < 1e-8

    def test_require_null(self, sphere_metric):
        init = GeodesicState.from_values((1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0))
        with pytest.raises(ValueError):
            trace_geodesic(sphere_metric, init, steps=1, require_null=True)

    def test_step_budget(self, sphere_metric):
        cfg = TracerConfig(max_steps=100)
        with pytest.raises(StepLimitExceeded):
            trace_geodesic(sphere_metric, GeodesicState.from_values(EQUATOR_INIT), cfg)
        with pytest.raises(StepLimitExceeded):
            trace_geodesic(sphere_metric, GeodesicState.from_values(EQUATOR_INIT), cfg, steps=101)

    @pytest.mark.slow
    def test_random_null_geodesics_close(self, sphere_metric):
        rng = np.random.default_rng(7)
        for _ in range(10):
            path = trace_geodesic(sphere_metric, random_null_init(rng), require_null=True)
            assert path.verdict.period == pytest.approx(TWO_PI, abs=1e-6)
            assert null_defect(path, sphere_metric).max_defect < 1e-8


def test_flat_geodesic_is_open(flat_metric):
    init = GeodesicState.from_values((0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0))
    path = trace_geodesic(flat_metric, init, steps=200, require_null=True)
    assert isinstance(detect_closure(path), Open)
    np.testing.assert_allclose(path.states[-1].position, [0.2, 0.0, 0.0, 0.0], atol=1e-12)
    assert path.rotations == 0


def test_write_trace_csv(sphere_metric, tmp_path):
    path = trace_geodesic(sphere_metric, GeodesicState.from_values(EQUATOR_INIT), steps=10)
    out = write_trace_csv(path, sphere_metric, tmp_path / "traces" / "equator.csv")
    with open(out) as handle:
        rows = list(csv.reader(handle))
    assert rows[0] == ["t", "x0", "x1", "x2", "x3", "v0", "v1", "v2", "v3", "null_defect"]
    assert len(rows) == 12
    assert float(rows[-1][0]) == pytest.approx(0.01)


class TestBetaSurfaces:
    def test_identical_graphs(self):
        r = Rotation.from_rotvec([0.3, -0.2, 0.9]).as_matrix()
        assert graph_intersections(r, r) is None

    def test_two_points(self):
        r1 = Rotation.from_rotvec([0.3, -0.2, 0.9]).as_matrix()
        r2 = Rotation.from_rotvec([-1.1, 0.4, 0.2]).as_matrix()
        assert graph_intersections(r1, r2) == 2

    def test_sampling(self):
        report = sample_beta_intersections(100, seed=42)
        assert report.passed
        assert report.skipped == 0
        assert report.histogram == {2: 100}
        assert report.plane_types == {"Beta": 100}
        assert report.to_dict()["histogram"] == {"2": 100}

    def test_sampling_needs_pairs(self):
        with pytest.raises(ValueError):
            sample_beta_intersections(0, seed=0)


class TestProjectiveGeodesics:
    def test_great_circle_stays_in_its_plane(self):
        conn = round_sphere_connection()
        path = trace_projective_geodesic(conn, (math.pi / 2, 0.0), -1.0, steps=2000, spherical=True)
        for state in path.states:
            theta, phi = state.position
            assert math.sin(theta) * math.sin(phi) == pytest.approx(math.cos(theta), abs=1e-6)
        assert {state.chart for state in path.states} == {"affine", "inverted"}

    def test_great_circle_closes(self):
        path = trace_projective_geodesic(round_sphere_connection(), (math.pi / 2, 0.0), -1.0, spherical=True)
        assert path.verdict is not None and path.verdict.closed
