#!/usr/bin/env python

"""
Twistor lift of beta-planes and the leaf-space projective structure.

The beta-plane ``span(e0 + z e1, p0 + z p1)`` is lifted to the fiber
coordinate ``z`` of the bundle of null directions:

    m1 = e0 + z e1 + Q1(z) d_z,    m2 = p0 + z p1 + Q2(z) d_z,

with ``Q1(z) = -(c + z (d - a) - z^2 b)(e0 + z e1)`` and ``Q2`` the same
expression on ``p0 + z p1``. Near ``z = oo`` the chart ``w = 1/z`` is used:
``m1 ~ w e0 + e1 - (q3 + q2 w + q1 w^2 + q0 w^3) d_w``.
"""

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import sympy
from sympy import Rational

from .connection import ConnectionComponents, form_sub
from .constants import (
    DEFAULT_SEED, DEFAULT_ZETA_SAMPLES, DIMENSION, SPAN_RESIDUAL_TOLERANCE,
)
from .errors import NotBasic, NotSelfDual
from .fields import (
    Bounds, Callback, Polynomial, ScalarField, apply_vector, lie_bracket,
    probe_points, summarize, zero,
)
from .tetrad import NullTetrad

AFFINE = "affine"
INVERTED = "inverted"
CHARTS = (AFFINE, INVERTED)

Cubic = Tuple[ScalarField, ScalarField, ScalarField, ScalarField]


def _lax_cubic(c: ConnectionComponents, first: int, second: int) -> Cubic:
    """Coefficients of ``-(c + z(d-a) - z^2 b)(F_first + z F_second)``"""
    d_minus_a = form_sub(c.d, c.a)
    return (
        -c.c[first],
        -d_minus_a[first] - c.c[second],
        c.b[first] - d_minus_a[second],
        c.b[second],
    )


@dataclass(frozen=True)
class TwistorLift:
    """Cubic coefficients of Q1 (``q``) and Q2 (``s``) with their tetrad"""

    q: Cubic
    s: Cubic
    tetrad: NullTetrad
    components: ConnectionComponents
    domain: Optional[Bounds] = None

    @property
    def is_exact(self) -> bool:
        return all(isinstance(f, Polynomial) for f in self.q + self.s) and \
            all(isinstance(f, Polynomial) for frame in self.tetrad.frames for f in frame)

    def chart_data(self, chart: str):
        """Frames ``(E0, E1, P0, P1)`` and cubics for the given fiber chart"""
        e0, e1, p0, p1 = self.tetrad.frames
        if chart == AFFINE:
            return (e0, e1, p0, p1), self.q, self.s
        if chart == INVERTED:
            return (e1, e0, p1, p0), tuple(-f for f in reversed(self.q)), tuple(-f for f in reversed(self.s))
        raise ValueError(f"unknown fiber chart '{chart}'")

    def q1(self, x, zeta: float, chart: str = AFFINE) -> float:
        _, cubic, _ = self.chart_data(chart)
        return float(sum(f.evaluate(x) * zeta ** k for k, f in enumerate(cubic)))

    def q_json(self) -> List[str]:
        return [str(f.as_expr()) if isinstance(f, Polynomial) else repr(f) for f in self.q]


def build_twistor_lift(c: ConnectionComponents, t: NullTetrad, domain: Optional[Bounds] = None) -> TwistorLift:
    return TwistorLift(q=_lax_cubic(c, 0, 1), s=_lax_cubic(c, 2, 3), tetrad=t, components=c, domain=domain)


# Integrability

def lax_coefficient_residuals(lift: TwistorLift) -> Dict[str, ScalarField]:
    """Q2 coefficients and the z-coefficients of ``(p0 + z p1) Q1``"""
    p0, p1 = lift.tetrad.p0, lift.tetrad.p1
    d0 = [apply_vector(p0, f) for f in lift.q]
    d1 = [apply_vector(p1, f) for f in lift.q]
    residuals = {f"Q2[{k}]": f for k, f in enumerate(lift.s)}
    residuals["(p0+zp1)Q1[0]"] = d0[0]
    for k in range(1, 4):
        residuals[f"(p0+zp1)Q1[{k}]"] = d0[k] + d1[k - 1]
    residuals["(p0+zp1)Q1[4]"] = d1[3]
    return residuals


def zeta_samples(count: int = DEFAULT_ZETA_SAMPLES) -> List[Rational]:
    """Evenly spaced rationals in [-1, 1]"""
    if count == 1:
        return [Rational(0)]
    return [Rational(2 * k - (count - 1), count - 1) for k in range(count)]


def _rational_points(count: int, seed: int, bounds: Optional[Bounds]) -> List[List[Rational]]:
    return [[Rational(round(v * 16), 16) for v in point] for point in probe_points(count, seed, bounds)]


class _BracketFields:
    """Fields needed to assemble ``[m1, m2]`` in one fiber chart"""

    def __init__(self, lift: TwistorLift, chart: str):
        (e0, e1, p0, p1), q, s = lift.chart_data(chart)
        self.frames = (e0, e1, p0, p1)
        self.q, self.s = q, s
        self.brackets = {
            (i, j): lie_bracket((e0, e1)[i], (p0, p1)[j]) for i in range(2) for j in range(2)
        }
        self.e_of_s = [[apply_vector(frame, f) for f in s] for frame in (e0, e1)]
        self.p_of_q = [[apply_vector(frame, f) for f in q] for frame in (p0, p1)]

    def values(self, x, exact: bool):
        def ev(f: ScalarField):
            return f.evaluate_exact(x) if exact else f.evaluate(x)

        def vec(v):
            return [ev(f) for f in v]

        return {
            "frames": [vec(frame) for frame in self.frames],
            "q": [ev(f) for f in self.q],
            "s": [ev(f) for f in self.s],
            "brackets": {key: vec(v) for key, v in self.brackets.items()},
            "e_of_s": [[ev(f) for f in row] for row in self.e_of_s],
            "p_of_q": [[ev(f) for f in row] for row in self.p_of_q],
        }


def _poly(coeffs, z):
    return sum(coeff * z ** k for k, coeff in enumerate(coeffs))


def _dpoly(coeffs, z):
    return sum(k * coeff * z ** (k - 1) for k, coeff in enumerate(coeffs) if k)


def _bracket_columns(values, z):
    """Columns ``m1``, ``m2`` and ``[m1, m2]`` as 5-vectors"""
    E0, E1, P0, P1 = values["frames"]
    q, s = values["q"], values["s"]
    Q1, Q2 = _poly(q, z), _poly(s, z)
    m1 = [E0[k] + z * E1[k] for k in range(DIMENSION)] + [Q1]
    m2 = [P0[k] + z * P1[k] for k in range(DIMENSION)] + [Q2]
    br = values["brackets"]
    x_part = [
        br[0, 0][k] + z * (br[0, 1][k] + br[1, 0][k]) + z * z * br[1, 1][k] + Q1 * P1[k] - Q2 * E1[k]
        for k in range(DIMENSION)
    ]
    u_of_q2 = _poly([values["e_of_s"][0][k] + z * values["e_of_s"][1][k] for k in range(4)], z)
    v_of_q1 = _poly([values["p_of_q"][0][k] + z * values["p_of_q"][1][k] for k in range(4)], z)
    z_part = u_of_q2 - v_of_q1 + Q1 * _dpoly(s, z) - Q2 * _dpoly(q, z)
    return m1, m2, x_part + [z_part]


@dataclass
class BracketResult:
    exact: bool
    max_residual: float
    samples: int

    @property
    def passed(self) -> bool:
        return self.max_residual == 0.0 if self.exact else self.max_residual <= SPAN_RESIDUAL_TOLERANCE


def bracket_span_test(lift: TwistorLift, zeta_count: int = DEFAULT_ZETA_SAMPLES,
                      probe_count: int = 3, seed: int = DEFAULT_SEED) -> BracketResult:
    """Check ``[m1, m2]`` lies in ``span(m1, m2)`` at sampled points and fiber values, both charts"""
    exact = lift.is_exact
    zetas = zeta_samples(zeta_count)
    if exact:
        points = _rational_points(probe_count, seed, lift.domain)
    else:
        points = list(probe_points(probe_count, seed, lift.domain))
    worst = 0.0
    samples = 0
    for chart in CHARTS:
        fields_ = _BracketFields(lift, chart)
        for x in points:
            values = fields_.values(x, exact)
            for z in zetas:
                m1, m2, bracket = _bracket_columns(values, z if exact else float(z))
                samples += 1
                if exact:
                    matrix = sympy.Matrix([m1, m2, bracket]).T
                    if matrix.rank() > 2:
                        minors = [abs(matrix.extract(list(rows), [0, 1, 2]).det())
                                  for rows in combinations(range(5), 3)]
                        worst = max(worst, float(max(minors)))
                else:
                    basis = np.array([m1, m2], dtype=float).T
                    target = np.array(bracket, dtype=float)
                    solution, *_ = np.linalg.lstsq(basis, target, rcond=None)
                    scale = max(1.0, float(np.linalg.norm(target)))
                    worst = max(worst, float(np.linalg.norm(basis @ solution - target)) / scale)
    return BracketResult(exact=exact, max_residual=worst, samples=samples)


@dataclass
class LaxReport:
    coefficient_residuals: Dict[str, ScalarField]
    bracket: Optional[BracketResult]

    @property
    def coefficient_passed(self) -> bool:
        return all(f.is_identically_zero() for f in self.coefficient_residuals.values())

    @property
    def passed(self) -> bool:
        return self.coefficient_passed and (self.bracket is None or self.bracket.passed)

    @property
    def agree(self) -> bool:
        """Coefficient identities and the bracket test reach the same verdict"""
        return self.bracket is None or self.coefficient_passed == self.bracket.passed

    def summary(self) -> Dict[str, object]:
        return {name: summarize([f]) for name, f in self.coefficient_residuals.items()}


def check_lax_integrability(lift: TwistorLift, bracket: bool = True,
                            zeta_count: int = DEFAULT_ZETA_SAMPLES, probe_count: int = 3,
                            seed: int = DEFAULT_SEED) -> LaxReport:
    result = bracket_span_test(lift, zeta_count, probe_count, seed) if bracket else None
    return LaxReport(coefficient_residuals=lax_coefficient_residuals(lift), bracket=result)


# Basic condition

@dataclass
class BasicReport:
    q_residuals: Dict[str, ScalarField]
    component_residuals: Dict[str, ScalarField]

    @property
    def q_passed(self) -> bool:
        return all(f.is_identically_zero() for f in self.q_residuals.values())

    @property
    def component_passed(self) -> bool:
        return all(f.is_identically_zero() for f in self.component_residuals.values())

    @property
    def passed(self) -> bool:
        return self.q_passed and self.component_passed

    def failing(self) -> List[str]:
        return [name for name, f in {**self.q_residuals, **self.component_residuals}.items()
                if not f.is_identically_zero()]

    def summary(self) -> Dict[str, object]:
        return {name: summarize([f]) for name, f in {**self.q_residuals, **self.component_residuals}.items()}


def basic_component_residuals(c: ConnectionComponents, t: NullTetrad) -> Dict[str, ScalarField]:
    """Vertical derivatives of b, c and a - d on e0, e1"""
    a_minus_d = form_sub(c.a, c.d)
    residuals = {}
    for i, vertical in ((0, t.p0), (1, t.p1)):
        for k in range(2):
            residuals[f"p{i} b(e{k})"] = apply_vector(vertical, c.b[k])
            residuals[f"p{i} c(e{k})"] = apply_vector(vertical, c.c[k])
            residuals[f"p{i} (a-d)(e{k})"] = apply_vector(vertical, a_minus_d[k])
    return residuals


def check_basic(lift: TwistorLift) -> BasicReport:
    coefficients = lax_coefficient_residuals(lift)
    if not all(f.is_identically_zero() for f in coefficients.values()):
        raise NotSelfDual("the basic criterion assumes a self-dual metric; the Lax identities fail")
    q_residuals = {}
    for i, vertical in ((0, lift.tetrad.p0), (1, lift.tetrad.p1)):
        for j, f in enumerate(lift.q):
            q_residuals[f"p{i}q{j}"] = apply_vector(vertical, f)
    return BasicReport(q_residuals, basic_component_residuals(lift.components, lift.tetrad))


# Leaf projective structure

LeafForm = Tuple[ScalarField, ScalarField]


@dataclass(frozen=True)
class ProjectiveConnection2D:
    """``omega[i, j] = (omega^i_j(d_y0), omega^i_j(d_y1))`` with ``nabla d_j = omega^i_j d_i``.

    Fields live on the four-dimensional chart but only depend on ``(x0, x1)``,
    which are the leaf coordinates ``(y0, y1)``.
    """

    omega: Dict[Tuple[int, int], LeafForm]
    domain: Optional[Bounds] = None

    def christoffel(self, i: int, k: int, j: int) -> ScalarField:
        """``Gamma^i_kj = omega^i_j(d_k)``"""
        return self.omega[i, j][k]

    def torsion_residuals(self) -> List[ScalarField]:
        return [self.christoffel(i, 0, 1) - self.christoffel(i, 1, 0) for i in range(2)]

    def spray_coefficients(self) -> Cubic:
        """``F(z) = f0 + f1 z + f2 z^2 + f3 z^3`` in the spray's fiber component"""
        w = self.omega
        return (
            -w[1, 0][0],
            -w[1, 0][1] - (w[1, 1][0] - w[0, 0][0]),
            -(w[1, 1][1] - w[0, 0][1]) + w[0, 1][0],
            w[0, 1][1],
        )


def induced_projective_connection(c: ConnectionComponents, t: NullTetrad,
                                  domain: Optional[Bounds] = None) -> ProjectiveConnection2D:
    residuals = basic_component_residuals(c, t)
    failing = [name for name, f in residuals.items() if not f.is_identically_zero()]
    if failing:
        raise NotBasic(f"the foliation is not basic: {', '.join(failing)}")
    a_minus_d = form_sub(c.a, c.d)
    omega = {
        (1, 0): (c.c[0], c.c[1]),
        (0, 1): (c.b[0], c.b[1]),
        (0, 0): (c.c[1] + a_minus_d[0], c.b[0]),
        (1, 1): (c.c[1], c.b[0] - a_minus_d[1]),
    }
    return ProjectiveConnection2D(omega=omega, domain=domain)


def round_sphere_connection() -> ProjectiveConnection2D:
    """Levi-Civita connection of the unit sphere in ``(theta, phi) = (y0, y1)``"""
    domain = ((0.3, 0.0, 0.0, 0.0), (math.pi - 0.3, 2 * math.pi, 0.0, 0.0))

    def cot(x):
        return math.cos(x[0]) / math.sin(x[0])

    def minus_sin_cos(x):
        return -math.sin(x[0]) * math.cos(x[0])

    cot_field = Callback(cot, domain=domain, label="cot(theta)")
    sc_field = Callback(minus_sin_cos, domain=domain, label="-sin(theta)cos(theta)")
    z = zero()
    omega = {
        (0, 0): (z, z),
        (0, 1): (z, sc_field),
        (1, 0): (z, cot_field),
        (1, 1): (cot_field, z),
    }
    return ProjectiveConnection2D(omega=omega, domain=domain)


def spray_at(coefficients: Sequence[float], state: Sequence[float], chart: str = AFFINE) -> np.ndarray:
    """Spray vector from evaluated coefficients ``(f0, f1, f2, f3)``"""
    _, _, fiber = (float(v) for v in state)
    f0, f1, f2, f3 = coefficients
    if chart == AFFINE:
        return np.array([1.0, fiber, f0 + f1 * fiber + f2 * fiber ** 2 + f3 * fiber ** 3])
    if chart == INVERTED:
        return np.array([fiber, 1.0, -(f3 + f2 * fiber + f1 * fiber ** 2 + f0 * fiber ** 3)])
    raise ValueError(f"unknown fiber chart '{chart}'")


def projective_spray(conn: ProjectiveConnection2D, state: Sequence[float], chart: str = AFFINE) -> np.ndarray:
    """Spray vector at ``(y0, y1, z)``; in the inverted chart the third entry is ``w = 1/z``"""
    point = np.array([float(state[0]), float(state[1]), 0.0, 0.0])
    return spray_at([f.evaluate(point) for f in conn.spray_coefficients()], state, chart)


@dataclass
class ReductionReport:
    """Spray of the leaf connection against the pushed-forward lift"""

    fiber_residuals: Dict[str, ScalarField]
    base_residuals: Dict[str, ScalarField]

    @property
    def passed(self) -> bool:
        return all(f.is_identically_zero() for f in {**self.fiber_residuals, **self.base_residuals}.values())

    def summary(self) -> Dict[str, object]:
        return {name: summarize([f]) for name, f in {**self.fiber_residuals, **self.base_residuals}.items()}


def reduction_identity(lift: TwistorLift, conn: ProjectiveConnection2D) -> ReductionReport:
    """Compare ``d0 + z d1 + F(z) d_z`` with the projection of ``m1``"""
    spray = conn.spray_coefficients()
    fiber = {f"f{k}-q{k}": spray[k] - lift.q[k] for k in range(4)}
    e0, e1 = lift.tetrad.e0, lift.tetrad.e1
    base = {
        "e0.x0-1": e0[0] - 1,
        "e0.x1": e0[1],
        "e1.x0": e1[0],
        "e1.x1-1": e1[1] - 1,
    }
    return ReductionReport(fiber, base)
