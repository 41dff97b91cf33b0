#!/usr/bin/env python

"""
Geodesic tracing and closure detection.

Null geodesics are integrated with fixed-step RK4. On the standard
``S2 x S2`` model each factor is followed in spherical coordinates; when a
factor comes within ``rotation_threshold`` of a pole its chart is rotated
by a quarter turn about the y-axis and the cumulative rotation is kept, so
positions in the embedding ``R3 x R3`` stay continuous.

Closure compares embedding positions and unit velocities against the
initial state. A candidate minimum of that distance is refined by
re-integrating the surrounding two steps on a finer grid.
"""

import csv
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.linalg import null_space
from scipy.spatial.transform import Rotation

from .connection import christoffel
from .constants import (
    CLOSURE_DEPARTURE_FACTOR, CLOSURE_REFINE_DIVISIONS, DEFAULT_CHART_MARGIN,
    DEFAULT_CLOSURE_TOLERANCE, DEFAULT_MAX_STEPS, DEFAULT_NULL_TOLERANCE,
    DEFAULT_ROTATION_THRESHOLD, DEFAULT_STEP_SIZE, DIMENSION,
)
from .errors import ChartSingularity, IndeterminateClassification, StepLimitExceeded
from .fields import is_zero_field
from .logger import logger
from .metric import PRODUCT_SPHERE, NeutralMetric, product_sphere_metric
from .tetrad import PlaneType, classify_null_plane, product_sphere_tetrad
from .twistor import AFFINE, INVERTED, ProjectiveConnection2D, spray_at

# Quarter turn about the y-axis: (x, y, z) -> (z, y, -x)
QUARTER_TURN = Rotation.from_rotvec([0.0, math.pi / 2, 0.0]).as_matrix()
FACTOR_AXES = ((0, 1), (2, 3))


@dataclass
class GeodesicState:
    """Chart position and velocity at affine parameter ``t``.

    ``rotations`` holds the cumulative chart rotation of each sphere factor
    on the product-sphere backend and is ``None`` elsewhere.
    """

    position: np.ndarray
    velocity: np.ndarray
    t: float = 0.0
    rotations: Optional[Tuple[np.ndarray, np.ndarray]] = None

    def __post_init__(self):
        self.position = np.asarray(self.position, dtype=float)
        self.velocity = np.asarray(self.velocity, dtype=float)
        if self.position.shape != (DIMENSION,) or self.velocity.shape != (DIMENSION,):
            raise ValueError("position and velocity must be 4-vectors")
        if not np.any(self.velocity):
            raise ValueError("initial velocity must be nonzero")

    @classmethod
    def from_values(cls, values: Sequence[float], t: float = 0.0) -> "GeodesicState":
        """Build from eight floats ``x0..x3, v0..v3``"""
        if len(values) != 2 * DIMENSION:
            raise ValueError(f"expected {2 * DIMENSION} values, got {len(values)}")
        return cls(np.array(values[:DIMENSION]), np.array(values[DIMENSION:]), t)

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.position, self.velocity])


@dataclass
class TracerConfig:
    step_size: float = DEFAULT_STEP_SIZE
    max_steps: int = DEFAULT_MAX_STEPS
    closure_tolerance: float = DEFAULT_CLOSURE_TOLERANCE
    rotate_charts: bool = True
    rotation_threshold: float = DEFAULT_ROTATION_THRESHOLD
    chart_margin: float = DEFAULT_CHART_MARGIN

    def __post_init__(self):
        if self.step_size <= 0:
            raise ValueError("step_size must be positive")
        if self.max_steps < 1:
            raise ValueError("max_steps must be at least 1")
        if self.closure_tolerance <= 0:
            raise ValueError("closure_tolerance must be positive")
        if not 0 < self.rotation_threshold < 1:
            raise ValueError("rotation_threshold must lie in (0, 1)")
        if self.chart_margin <= 0:
            raise ValueError("chart_margin must be positive")

    @classmethod
    def from_config(cls, config: Dict[str, Any]) -> "TracerConfig":
        tracer = config.get("tracer", {})
        numerics = config.get("numerics", {})
        return cls(
            step_size=float(tracer.get("step_size", DEFAULT_STEP_SIZE)),
            max_steps=int(tracer.get("max_steps", DEFAULT_MAX_STEPS)),
            closure_tolerance=float(tracer.get("closure_tolerance", DEFAULT_CLOSURE_TOLERANCE)),
            rotate_charts=bool(tracer.get("rotate_charts", True)),
            rotation_threshold=float(tracer.get("rotation_threshold", DEFAULT_ROTATION_THRESHOLD)),
            chart_margin=float(numerics.get("chart_margin", DEFAULT_CHART_MARGIN)),
        )


def rk4_step(rhs: Callable[[np.ndarray], np.ndarray], y: np.ndarray, h: float) -> np.ndarray:
    k1 = rhs(y)
    k2 = rhs(y + 0.5 * h * k1)
    k3 = rhs(y + 0.5 * h * k2)
    k4 = rhs(y + h * k3)
    return y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


# Sphere helpers

def sphere_embedding(theta: float, phi: float) -> np.ndarray:
    s = math.sin(theta)
    return np.array([s * math.cos(phi), s * math.sin(phi), math.cos(theta)])


def sphere_tangent(theta: float, phi: float, dtheta: float, dphi: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    cp, sp = math.cos(phi), math.sin(phi)
    return dtheta * np.array([c * cp, c * sp, -s]) + dphi * s * np.array([-sp, cp, 0.0])


def spherical_coordinates(point: np.ndarray, tangent: np.ndarray) -> Tuple[float, float, float, float]:
    """``(theta, phi, dtheta, dphi)`` of a point of the unit sphere and a tangent vector"""
    x, y, z = point / np.linalg.norm(point)
    theta = math.acos(max(-1.0, min(1.0, z)))
    phi = math.atan2(y, x)
    c, s = math.cos(theta), math.sin(theta)
    cp, sp = math.cos(phi), math.sin(phi)
    dtheta = float(tangent @ np.array([c * cp, c * sp, -s]))
    dphi = float(tangent @ np.array([-sp, cp, 0.0])) / s
    return theta, phi, dtheta, dphi


# Flows

class _Flow:
    """One integrator: how to advance a state and what to compare for closure"""

    def step(self, state, h: float):
        raise NotImplementedError

    def features(self, state) -> np.ndarray:
        raise NotImplementedError


class _ChristoffelFlow(_Flow):
    def __init__(self, m: NeutralMetric):
        gamma = christoffel(m)
        self.terms = [
            (k, i, j, gamma[k][i][j])
            for k in range(DIMENSION) for i in range(DIMENSION) for j in range(DIMENSION)
            if not is_zero_field(gamma[k][i][j])
        ]

    def rhs(self, y: np.ndarray) -> np.ndarray:
        x, v = y[:DIMENSION], y[DIMENSION:]
        acceleration = np.zeros(DIMENSION)
        for k, i, j, field_ in self.terms:
            acceleration[k] -= field_.evaluate(x) * v[i] * v[j]
        return np.concatenate([v, acceleration])

    def step(self, state: GeodesicState, h: float) -> GeodesicState:
        y = rk4_step(self.rhs, state.as_vector(), h)
        return GeodesicState(y[:DIMENSION], y[DIMENSION:], state.t + h)

    def features(self, state: GeodesicState) -> np.ndarray:
        return np.concatenate([state.position, state.velocity / np.linalg.norm(state.velocity)])


class _ProductSphereFlow(_Flow):
    def __init__(self, cfg: TracerConfig):
        self.cfg = cfg

    @staticmethod
    def rhs(y: np.ndarray) -> np.ndarray:
        out = np.empty(2 * DIMENSION)
        out[:DIMENSION] = y[DIMENSION:]
        for theta_axis, phi_axis in FACTOR_AXES:
            theta = y[theta_axis]
            dtheta, dphi = y[DIMENSION + theta_axis], y[DIMENSION + phi_axis]
            s, c = math.sin(theta), math.cos(theta)
            out[DIMENSION + theta_axis] = s * c * dphi * dphi
            out[DIMENSION + phi_axis] = -2.0 * c / s * dtheta * dphi
        return out

    def _rechart(self, y: np.ndarray, rotations: List[np.ndarray]) -> np.ndarray:
        for factor, (theta_axis, phi_axis) in enumerate(FACTOR_AXES):
            s = abs(math.sin(y[theta_axis]))
            if s >= self.cfg.rotation_threshold:
                continue
            if not self.cfg.rotate_charts:
                if s < self.cfg.chart_margin:
                    raise ChartSingularity(
                        f"factor {factor + 1} reached a pole (sin theta = {s:.3e}) with chart rotation disabled"
                    )
                continue
            point = sphere_embedding(y[theta_axis], y[phi_axis])
            tangent = sphere_tangent(y[theta_axis], y[phi_axis], y[DIMENSION + theta_axis], y[DIMENSION + phi_axis])
            theta, phi, dtheta, dphi = spherical_coordinates(QUARTER_TURN @ point, QUARTER_TURN @ tangent)
            y[theta_axis], y[phi_axis] = theta, phi
            y[DIMENSION + theta_axis], y[DIMENSION + phi_axis] = dtheta, dphi
            rotations[factor] = QUARTER_TURN @ rotations[factor]
        return y

    def prepare(self, state: GeodesicState) -> GeodesicState:
        rotations = list(state.rotations) if state.rotations is not None else [np.eye(3), np.eye(3)]
        y = self._rechart(state.as_vector().copy(), rotations)
        return GeodesicState(y[:DIMENSION], y[DIMENSION:], state.t, tuple(rotations))

    def step(self, state: GeodesicState, h: float) -> GeodesicState:
        y = rk4_step(self.rhs, state.as_vector(), h)
        rotations = list(state.rotations)
        y = self._rechart(y, rotations)
        return GeodesicState(y[:DIMENSION], y[DIMENSION:], state.t + h, tuple(rotations))

    def features(self, state: GeodesicState) -> np.ndarray:
        x, v = state.position, state.velocity
        positions, velocities = [], []
        for factor, (theta_axis, phi_axis) in enumerate(FACTOR_AXES):
            back = state.rotations[factor].T
            positions.append(back @ sphere_embedding(x[theta_axis], x[phi_axis]))
            velocities.append(back @ sphere_tangent(x[theta_axis], x[phi_axis], v[theta_axis], v[phi_axis]))
        velocity = np.concatenate(velocities)
        return np.concatenate(positions + [velocity / np.linalg.norm(velocity)])


# Paths and closure

@dataclass
class Closed:
    period: float
    distance: float
    closed: bool = field(default=True, init=False)

    def describe(self) -> str:
        return f"closed, period ~ {self.period:.4f}"


@dataclass
class Open:
    min_distance: float
    closed: bool = field(default=False, init=False)

    def describe(self) -> str:
        return "open"


ClosureVerdict = Union[Closed, Open]


@dataclass
class GeodesicPath:
    states: List[Any]
    step_size: float
    flow: _Flow = field(repr=False)
    features: List[np.ndarray] = field(default_factory=list, repr=False)
    verdict: Optional[ClosureVerdict] = None

    def __len__(self) -> int:
        return len(self.states)

    @property
    def rotations(self) -> int:
        """Number of steps after which a sphere chart was rotated"""
        count = 0
        for before, after in zip(self.states, self.states[1:]):
            if getattr(before, "rotations", None) is None:
                return 0
            if any(not np.array_equal(a, b) for a, b in zip(before.rotations, after.rotations)):
                count += 1
        return count

    def distances(self) -> np.ndarray:
        start = self.features[0]
        return np.array([float(np.linalg.norm(f - start)) for f in self.features])

    def refine(self, index: int) -> Tuple[float, float]:
        """Minimum distance to the start near ``states[index]`` on a finer grid, as ``(t, distance)``"""
        start = self.features[0]
        state = self.states[max(index - 1, 0)]
        fine = self.step_size / CLOSURE_REFINE_DIVISIONS
        samples = [(state.t, float(np.sum((self.flow.features(state) - start) ** 2)))]
        for _ in range(2 * CLOSURE_REFINE_DIVISIONS):
            state = self.flow.step(state, fine)
            samples.append((state.t, float(np.sum((self.flow.features(state) - start) ** 2))))
        best = min(range(len(samples)), key=lambda k: samples[k][1])
        t_best, d2 = samples[best]
        if 0 < best < len(samples) - 1:
            below, above = samples[best - 1][1], samples[best + 1][1]
            curvature = below - 2 * d2 + above
            if curvature > 0:
                t_best += fine * (below - above) / (2 * curvature)
                d2 -= (below - above) ** 2 / (8 * curvature)
        return t_best, math.sqrt(max(d2, 0.0))


def _local_minima(distances: np.ndarray, tolerance: float) -> List[int]:
    departure = CLOSURE_DEPARTURE_FACTOR * tolerance
    departed = False
    minima = []
    for k in range(1, len(distances) - 1):
        if not departed:
            departed = distances[k] > departure
            continue
        if distances[k] <= distances[k - 1] and distances[k] <= distances[k + 1]:
            minima.append(k)
    return minima


def detect_closure(path: GeodesicPath, tolerance: float = DEFAULT_CLOSURE_TOLERANCE) -> ClosureVerdict:
    """Smallest parameter at which position and unit velocity return within ``tolerance``"""
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    if len(path) < 3:
        return Open(min_distance=math.inf)
    t0 = path.states[0].t
    best = math.inf
    for index in _local_minima(path.distances(), tolerance):
        t_min, distance = path.refine(index)
        if distance < tolerance:
            return Closed(period=t_min - t0, distance=distance)
        best = min(best, distance)
    return Open(min_distance=best)


def _integrate(flow: _Flow, initial, cfg: TracerConfig, steps: Optional[int]) -> GeodesicPath:
    if steps is not None and steps > cfg.max_steps:
        raise StepLimitExceeded(f"{steps} steps requested, limit is {cfg.max_steps}")
    path = GeodesicPath(states=[initial], step_size=cfg.step_size, flow=flow, features=[flow.features(initial)])
    limit = cfg.max_steps if steps is None else steps
    departure = CLOSURE_DEPARTURE_FACTOR * cfg.closure_tolerance
    departed = False
    start = path.features[0]
    distances = [0.0]
    for _ in range(limit):
        state = flow.step(path.states[-1], cfg.step_size)
        path.states.append(state)
        path.features.append(flow.features(state))
        if steps is not None:
            continue
        distances.append(float(np.linalg.norm(path.features[-1] - start)))
        if not departed:
            departed = distances[-1] > departure
            continue
        if len(distances) >= 3 and distances[-2] <= distances[-3] and distances[-2] <= distances[-1]:
            t_min, distance = path.refine(len(distances) - 2)
            if distance < cfg.closure_tolerance:
                path.verdict = Closed(period=t_min - initial.t, distance=distance)
                return path
    if steps is None:
        raise StepLimitExceeded(f"no closure within {cfg.max_steps} steps")
    return path


def trace_geodesic(m: NeutralMetric, init: GeodesicState, cfg: Optional[TracerConfig] = None,
                   steps: Optional[int] = None, require_null: bool = False,
                   null_tolerance: float = DEFAULT_NULL_TOLERANCE) -> GeodesicPath:
    """Integrate the geodesic equation from ``init``.

    With ``steps`` the path has exactly ``steps + 1`` states; without it the
    trace runs until it closes and raises ``StepLimitExceeded`` otherwise.
    """
    cfg = cfg or TracerConfig()
    if require_null:
        defect = abs(float(init.velocity @ m.gram_at(init.position) @ init.velocity))
        scale = float(init.velocity @ init.velocity)
        if defect > null_tolerance * scale:
            raise ValueError(f"initial velocity is not null (defect {defect:.3e})")

    if m.backend == PRODUCT_SPHERE:
        flow: _Flow = _ProductSphereFlow(cfg)
        initial = flow.prepare(init)
    else:
        flow = _ChristoffelFlow(m)
        initial = replace(init, rotations=None)

    path = _integrate(flow, initial, cfg, steps)
    verdict = path.verdict.describe() if path.verdict is not None else "not checked"
    logger.log_trace(len(path) - 1, path.rotations, verdict)
    return path


@dataclass
class NullDefectReport:
    max_defect: float
    energy_drift: Optional[Tuple[float, float]] = None


def _factor_energy(state: GeodesicState, factor: int) -> float:
    theta_axis, phi_axis = FACTOR_AXES[factor]
    v = state.velocity
    s = math.sin(state.position[theta_axis])
    return v[theta_axis] ** 2 + s * s * v[phi_axis] ** 2


def null_defect(path: GeodesicPath, m: NeutralMetric) -> NullDefectReport:
    """Largest ``|g(v, v)|`` along the path, with per-factor energy drift on product metrics"""
    defects = [abs(float(s.velocity @ m.gram_at(s.position) @ s.velocity)) for s in path.states]
    drift = None
    if m.backend == PRODUCT_SPHERE:
        first = path.states[0]
        drift = tuple(
            max(abs(_factor_energy(s, factor) - _factor_energy(first, factor)) for s in path.states)
            for factor in range(2)
        )
    return NullDefectReport(max_defect=max(defects), energy_drift=drift)


def write_trace_csv(path: GeodesicPath, m: NeutralMetric, out: Union[str, Path]) -> Path:
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["t"] + [f"x{k}" for k in range(DIMENSION)] + [f"v{k}" for k in range(DIMENSION)]
                        + ["null_defect"])
        for state in path.states:
            defect = abs(float(state.velocity @ m.gram_at(state.position) @ state.velocity))
            writer.writerow([f"{state.t:.12g}"] + [f"{value:.12g}" for value in state.as_vector()]
                            + [f"{defect:.6e}"])
    logger.debug(f"Wrote trace with {len(path)} rows to {out}")
    return out


# Beta-surfaces of the standard model

@dataclass
class BetaIntersectionReport:
    histogram: Dict[int, int]
    skipped: int
    pairs: int
    plane_types: Dict[str, int]

    @property
    def passed(self) -> bool:
        return set(self.histogram) <= {2} and set(self.plane_types) <= {PlaneType.BETA.value}

    def to_dict(self) -> Dict[str, Any]:
        return {
            "pairs": self.pairs,
            "skipped": self.skipped,
            "histogram": {str(k): v for k, v in sorted(self.histogram.items())},
            "plane_types": dict(sorted(self.plane_types.items())),
        }


def _random_rotation(rng: np.random.Generator) -> np.ndarray:
    quaternion = rng.normal(size=4)
    return Rotation.from_quat(quaternion / np.linalg.norm(quaternion)).as_matrix()


def graph_intersections(r1: np.ndarray, r2: np.ndarray, tolerance: float = 1e-9) -> Optional[int]:
    """Common points of the graphs of ``-r1`` and ``-r2``; ``None`` when the graphs coincide"""
    fixed = null_space(r2.T @ r1 - np.eye(3), rcond=1e-9)
    if fixed.shape[1] == 3:
        return None
    count = 0
    for column in fixed.T:
        for point in (column, -column):
            point = point / np.linalg.norm(point)
            if np.linalg.norm(r1 @ point - r2 @ point) < tolerance:
                count += 1
    return count


def _graph_plane(sigma: np.ndarray, point: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Chart point and two tangent vectors of the graph of ``sigma`` over ``point``"""
    image = sigma @ point
    x1, y1, z1 = point
    theta1, phi1 = math.acos(z1), math.atan2(y1, x1)
    theta2, phi2 = math.acos(max(-1.0, min(1.0, image[2]))), math.atan2(image[1], image[0])
    vectors = []
    for tangent in (sphere_tangent(theta1, phi1, 1.0, 0.0), sphere_tangent(theta1, phi1, 0.0, 1.0)):
        _, _, d_theta1, d_phi1 = spherical_coordinates(point, tangent)
        _, _, d_theta2, d_phi2 = spherical_coordinates(image, sigma @ tangent)
        vectors.append(np.array([d_theta1, d_phi1, d_theta2, d_phi2]))
    return np.array([theta1, phi1, theta2, phi2]), vectors[0], vectors[1]


def _sample_sphere_point(rng: np.random.Generator, sigma: np.ndarray, margin: float = 0.3) -> np.ndarray:
    for _ in range(1000):
        point = rng.normal(size=3)
        point /= np.linalg.norm(point)
        image = sigma @ point
        if math.hypot(point[0], point[1]) >= margin and math.hypot(image[0], image[1]) >= margin:
            return point
    raise ChartSingularity("could not sample a point away from the poles")


def sample_beta_intersections(n: int, seed: int, classify_samples: int = 1) -> BetaIntersectionReport:
    """Pairs of graphs of orientation-reversing isometries ``x -> -R x``, counted by intersection points"""
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = np.random.default_rng(seed)
    m = product_sphere_metric()
    tetrad = product_sphere_tetrad(m)
    histogram: Dict[int, int] = {}
    plane_types: Dict[str, int] = {}
    skipped = 0
    for _ in range(n):
        r1 = _random_rotation(rng)
        r2 = _random_rotation(rng)
        count = graph_intersections(r1, r2)
        if count is None:
            skipped += 1
            logger.debug("Skipping identical beta-surface pair")
            continue
        histogram[count] = histogram.get(count, 0) + 1
        for _ in range(classify_samples):
            sigma = -r1
            point, v, w = _graph_plane(sigma, _sample_sphere_point(rng, sigma))
            try:
                kind = classify_null_plane(v, w, m, point, tetrad=tetrad).value
            except IndeterminateClassification:
                kind = "indeterminate"
            plane_types[kind] = plane_types.get(kind, 0) + 1
    return BetaIntersectionReport(histogram=histogram, skipped=skipped, pairs=n, plane_types=plane_types)


# Projective geodesics on a leaf space

@dataclass
class ProjectiveState:
    """Leaf point, fiber coordinate in ``chart`` and the orientation sign of the spray"""

    position: np.ndarray
    fiber: float
    chart: str = AFFINE
    sign: float = 1.0
    t: float = 0.0

    def direction(self) -> np.ndarray:
        if self.chart == AFFINE:
            return self.sign * np.array([1.0, self.fiber])
        return self.sign * np.array([self.fiber, 1.0])


class _SprayFlow(_Flow):
    def __init__(self, conn: ProjectiveConnection2D, spherical: bool):
        self.coefficients = conn.spray_coefficients()
        self.spherical = spherical

    def _rhs(self, chart: str, sign: float) -> Callable[[np.ndarray], np.ndarray]:
        def rhs(y: np.ndarray) -> np.ndarray:
            point = np.array([y[0], y[1], 0.0, 0.0])
            values = [f.evaluate(point) for f in self.coefficients]
            return sign * spray_at(values, y, chart)
        return rhs

    def step(self, state: ProjectiveState, h: float) -> ProjectiveState:
        y = np.array([state.position[0], state.position[1], state.fiber])
        y = rk4_step(self._rhs(state.chart, state.sign), y, h)
        chart, sign, fiber = state.chart, state.sign, float(y[2])
        if abs(fiber) > 1.0:
            chart = INVERTED if chart == AFFINE else AFFINE
            sign = sign * math.copysign(1.0, fiber)
            fiber = 1.0 / fiber
        return ProjectiveState(y[:2].copy(), fiber, chart, sign, state.t + h)

    def features(self, state: ProjectiveState) -> np.ndarray:
        direction = state.direction()
        if not self.spherical:
            return np.concatenate([state.position, direction / np.linalg.norm(direction)])
        theta, phi = state.position
        tangent = sphere_tangent(theta, phi, direction[0], direction[1])
        return np.concatenate([sphere_embedding(theta, phi), tangent / np.linalg.norm(tangent)])


def trace_projective_geodesic(conn: ProjectiveConnection2D, start: Sequence[float], zeta0: float,
                              cfg: Optional[TracerConfig] = None, steps: Optional[int] = None,
                              spherical: bool = False) -> GeodesicPath:
    """Integrate the spray from ``(y0, y1)`` in direction ``d0 + zeta0 d1``.

    ``spherical`` compares positions through the unit-sphere embedding of
    ``(theta, phi) = (y0, y1)``.
    """
    cfg = cfg or TracerConfig()
    fiber, chart, sign = float(zeta0), AFFINE, 1.0
    if abs(fiber) > 1.0:
        chart, sign, fiber = INVERTED, math.copysign(1.0, fiber), 1.0 / fiber
    initial = ProjectiveState(np.array(start, dtype=float), fiber, chart, sign)
    path = _integrate(_SprayFlow(conn, spherical), initial, cfg, steps)
    logger.debug(f"Projective trace: {len(path) - 1} steps")
    return path
