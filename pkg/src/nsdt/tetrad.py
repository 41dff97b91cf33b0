#!/usr/bin/env python

"""
Null tetrads and bivector frames.

A null tetrad ``(e0, e1, p0, p1)`` has Gram matrix ``NULL_GRAM``:
``g(e0, p1) = 1``, ``g(e1, p0) = -1`` and every other pairing zero. It is
declared positively oriented; with that orientation the phi frame spans the
self-dual bivectors and the psi frame the anti-self-dual ones.
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np
import sympy

from .constants import (
    DEFAULT_INDETERMINATE_TOLERANCE, DEFAULT_NULL_TOLERANCE, DEFAULT_PROBE_POINTS,
    DEFAULT_SEED, DEFAULT_ZERO_TOLERANCE, DIMENSION,
)
from .errors import DegenerateVertical, IndecomposableInput, IndeterminateClassification
from .fields import (
    Callback, ScalarField, VectorField, as_array, coordinate_vector, evaluate_vector,
    is_zero_field, one, summarize, zero,
)
from .metric import GENERIC, PRODUCT_SPHERE, SPECIAL_FORM, NeutralMetric, field_determinant

NULL_GRAM = (
    (0, 0, 0, 1),
    (0, 0, -1, 0),
    (0, -1, 0, 0),
    (1, 0, 0, 0),
)
FRAME_NAMES = ("e0", "e1", "p0", "p1")

# Chart index pairs of bivector components
PAIRS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))

H_MATRIX = sympy.Matrix([[0, 1, 0], [1, 0, 0], [0, 0, -1]])


@dataclass(frozen=True)
class NullTetrad:
    """Ordered frame ``(e0, e1, p0, p1)`` in chart components"""

    e0: VectorField
    e1: VectorField
    p0: VectorField
    p1: VectorField

    @property
    def frames(self) -> Tuple[VectorField, VectorField, VectorField, VectorField]:
        return (self.e0, self.e1, self.p0, self.p1)

    def component_matrix(self) -> Tuple[Tuple[ScalarField, ...], ...]:
        """Rows are chart coordinates, columns are frame vectors"""
        return tuple(tuple(frame[k] for frame in self.frames) for k in range(DIMENSION))

    def matrix_at(self, x) -> np.ndarray:
        return np.column_stack([evaluate_vector(frame, x) for frame in self.frames])

    def determinant(self) -> ScalarField:
        return field_determinant(self.component_matrix())

    def swapped(self, i: int, j: int) -> "NullTetrad":
        frames = list(self.frames)
        frames[i], frames[j] = frames[j], frames[i]
        return NullTetrad(*frames)


def _axpy(vector: VectorField, coefficient: ScalarField, direction: VectorField) -> VectorField:
    return tuple(vector[k] + coefficient * direction[k] for k in range(DIMENSION))


def construct_foliation_tetrad(m: NeutralMetric) -> NullTetrad:
    """Null tetrad whose p-vectors span the vertical plane field ``span(d2, d3)``"""
    if m.backend == SPECIAL_FORM:
        p, q, r = m.special
        d0, d1, d2, d3 = (coordinate_vector(k) for k in range(DIMENSION))
        e0 = _axpy(_axpy(d0, r / 2, d2), -p / 2, d3)
        e1 = _axpy(_axpy(d1, q / 2, d2), -r / 2, d3)
        return NullTetrad(e0, e1, d2, d3)

    if m.backend == PRODUCT_SPHERE:
        raise DegenerateVertical("the product-sphere chart has no totally null vertical plane field")

    if not all(m[i, j].is_identically_zero() for i, j in ((2, 2), (2, 3), (3, 3))):
        raise DegenerateVertical("span(d2, d3) is not totally null for this metric")

    g12, g13, g02, g03 = m[1, 2], m[1, 3], m[0, 2], m[0, 3]
    det = g12 * g03 - g13 * g02
    if is_zero_field(det) or any(abs(det.evaluate(x)) < DEFAULT_NULL_TOLERANCE for x in m.probes()):
        raise DegenerateVertical("the vertical pairing matrix [[g12,g13],[g02,g03]] is singular")

    d2, d3 = coordinate_vector(2), coordinate_vector(3)
    # p0 solves the pairing system with right-hand side (-1, 0), p1 with (0, 1)
    p0 = _axpy(_axpy(tuple(zero() for _ in range(DIMENSION)), -g03 / det, d2), g02 / det, d3)
    p1 = _axpy(_axpy(tuple(zero() for _ in range(DIMENSION)), -g13 / det, d2), g12 / det, d3)

    g00, g01, g11 = m[0, 0], m[0, 1], m[1, 1]
    e0 = _axpy(_axpy(coordinate_vector(0), g01 / 2, p0), -g00 / 2, p1)
    e1 = _axpy(_axpy(coordinate_vector(1), g11 / 2, p0), -g01 / 2, p1)
    return NullTetrad(e0, e1, p0, p1)


@dataclass
class TetradValidation:
    """Deviation of a frame's Gram matrix from the null pattern"""

    residuals: Tuple[Tuple[ScalarField, ...], ...]
    exact_zero: bool
    max_residual: float
    offending: Optional[Tuple[str, str]]
    oriented: bool

    @property
    def valid(self) -> bool:
        if self.exact_zero:
            return self.oriented
        return self.max_residual <= DEFAULT_ZERO_TOLERANCE and self.oriented


def validate_tetrad(t: NullTetrad, m: NeutralMetric, probe_count: int = DEFAULT_PROBE_POINTS,
                    seed: int = DEFAULT_SEED) -> TetradValidation:
    frames = t.frames
    residuals = tuple(
        tuple(m.pairing(frames[a], frames[b]) - NULL_GRAM[a][b] for b in range(DIMENSION))
        for a in range(DIMENSION)
    )
    points = m.probes(probe_count, seed)
    exact_zero = all(is_zero_field(f) for row in residuals for f in row)
    worst, offending = 0.0, None
    if not exact_zero:
        for a in range(DIMENSION):
            for b in range(DIMENSION):
                value = summarize([residuals[a][b]], probe_count, seed)
                if value != "exact-zero" and value > worst:
                    worst, offending = float(value), (FRAME_NAMES[a], FRAME_NAMES[b])
    det = t.determinant()
    oriented = all(det.evaluate(x) > 0 for x in points)
    return TetradValidation(residuals, exact_zero, worst, offending, oriented)


@dataclass(frozen=True)
class Bivector:
    """Chart bivector ``weight * sum_{i<j} B^{ij} d_i ^ d_j``"""

    components: Tuple[ScalarField, ...]
    weight: sympy.Expr = sympy.Integer(1)

    @classmethod
    def wedge(cls, v: VectorField, w: VectorField) -> "Bivector":
        return cls(tuple(v[i] * w[j] - v[j] * w[i] for i, j in PAIRS))

    def __add__(self, other: "Bivector") -> "Bivector":
        return Bivector(tuple(a + b for a, b in zip(self.components, other.components)), self.weight)

    def __sub__(self, other: "Bivector") -> "Bivector":
        return Bivector(tuple(a - b for a, b in zip(self.components, other.components)), self.weight)

    def with_weight(self, weight: sympy.Expr) -> "Bivector":
        return Bivector(self.components, weight)

    def component(self, i: int, j: int) -> ScalarField:
        if i == j:
            return zero()
        if i < j:
            return self.components[PAIRS.index((i, j))]
        return -self.components[PAIRS.index((j, i))]

    def evaluate(self, x) -> np.ndarray:
        return float(self.weight) * np.array([c.evaluate(x) for c in self.components])

    def plucker(self) -> ScalarField:
        b01, b02, b03, b12, b13, b23 = self.components
        return b01 * b23 - b02 * b13 + b03 * b12

    def is_zero(self) -> bool:
        return all(c.is_identically_zero() for c in self.components)


@dataclass(frozen=True)
class LambdaFrames:
    """``phi`` frame of the self-dual and ``psi`` frame of the anti-self-dual bivectors"""

    phi: Tuple[Bivector, Bivector, Bivector]
    psi: Tuple[Bivector, Bivector, Bivector]


SQRT2_INV = 1 / sympy.sqrt(2)


def lambda_frames(t: NullTetrad) -> LambdaFrames:
    e0, e1, p0, p1 = t.frames
    wedge = Bivector.wedge
    phi = (
        wedge(e0, e1),
        wedge(p0, p1),
        (wedge(e0, p1) - wedge(e1, p0)).with_weight(SQRT2_INV),
    )
    psi = (
        wedge(e0, p0),
        wedge(e1, p1),
        (wedge(e0, p1) + wedge(e1, p0)).with_weight(SQRT2_INV),
    )
    return LambdaFrames(phi, psi)


def bivector_inner(a: Bivector, b: Bivector, m: NeutralMetric) -> ScalarField:
    """Unweighted ``<A, B>`` with ``<X^Y, Z^W> = g(X,Z)g(Y,W) - g(X,W)g(Y,Z)``"""
    total: ScalarField = zero()
    for (i, j), a_ij in zip(PAIRS, a.components):
        if is_zero_field(a_ij):
            continue
        for (k, l), b_kl in zip(PAIRS, b.components):
            if is_zero_field(b_kl):
                continue
            metric_part = m[i, k] * m[j, l] - m[i, l] * m[j, k]
            if is_zero_field(metric_part):
                continue
            total = total + a_ij * b_kl * metric_part
    return total


def frame_metric(frames: Sequence[Bivector], m: NeutralMetric) -> sympy.Matrix:
    """Induced metric on three bivector frames, exact backends"""
    entries = []
    for a in frames:
        row = []
        for b in frames:
            inner = bivector_inner(a, b, m)
            row.append(sympy.nsimplify(a.weight * b.weight * inner.as_expr()))
        entries.append(row)
    return sympy.Matrix(entries)


# Null planes

class PlaneType(str, Enum):
    ALPHA = "Alpha"
    BETA = "Beta"
    NOT_TOTALLY_NULL = "NotTotallyNull"


def product_sphere_tetrad(m: NeutralMetric) -> NullTetrad:
    """Null tetrad built from orthonormal frames of the two sphere factors"""
    s = 1 / math.sqrt(2)
    domain = m.domain

    def const(value: float) -> ScalarField:
        return zero() if value == 0 else Callback(lambda x: value, domain=domain, label=f"{value:.6g}")

    def inv_sin(axis: int, sign: float) -> ScalarField:
        return Callback(lambda x: sign * s / math.sin(x[axis]), domain=domain, label=f"{sign}/sin(x{axis})")

    e0 = (const(s), zero(), const(s), zero())
    e1 = (zero(), inv_sin(0, 1.0), zero(), inv_sin(2, 1.0))
    p0 = (zero(), inv_sin(0, -1.0), zero(), inv_sin(2, 1.0))
    p1 = (const(s), zero(), const(-s), zero())
    return NullTetrad(e0, e1, p0, p1)


def tetrad_for(m: NeutralMetric) -> NullTetrad:
    if m.backend == PRODUCT_SPHERE:
        return product_sphere_tetrad(m)
    return construct_foliation_tetrad(m)


def frame_bivector_components(v: np.ndarray, w: np.ndarray, frame_matrix: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """phi and psi coefficients of ``v ^ w`` at a point"""
    cv = np.linalg.solve(frame_matrix, v)
    cw = np.linalg.solve(frame_matrix, w)
    b = {pair: cv[pair[0]] * cw[pair[1]] - cv[pair[1]] * cw[pair[0]] for pair in PAIRS}
    root = math.sqrt(2)
    phi = np.array([b[(0, 1)], b[(2, 3)], (b[(0, 3)] - b[(1, 2)]) / root])
    psi = np.array([b[(0, 2)], b[(1, 3)], (b[(0, 3)] + b[(1, 2)]) / root])
    return phi, psi


def classify_null_plane(v, w, m: NeutralMetric, point, tetrad: Optional[NullTetrad] = None,
                        null_tolerance: float = DEFAULT_NULL_TOLERANCE,
                        indeterminate_tolerance: float = DEFAULT_INDETERMINATE_TOLERANCE) -> PlaneType:
    v, w, x = as_array(v), as_array(w), as_array(point)
    scale = float(np.linalg.norm(v) * np.linalg.norm(w))
    wedge = np.array([v[i] * w[j] - v[j] * w[i] for i, j in PAIRS])
    if scale == 0.0 or np.max(np.abs(wedge)) <= 1e-12 * scale:
        raise IndecomposableInput("tangent vectors are linearly dependent")

    gram = m.gram_at(x)
    reference = float(np.max(np.abs(gram)))
    pairings = (v @ gram @ v, v @ gram @ w, w @ gram @ w)
    norms = (float(v @ v), scale, float(w @ w))
    defect = max(abs(value) / (reference * norm) for value, norm in zip(pairings, norms))
    if defect > indeterminate_tolerance:
        return PlaneType.NOT_TOTALLY_NULL
    if defect > null_tolerance:
        raise IndeterminateClassification(
            f"nullity defect {defect:.3e} lies between {null_tolerance:g} and {indeterminate_tolerance:g}"
        )

    frame = (tetrad or tetrad_for(m)).matrix_at(x)
    phi, psi = frame_bivector_components(v, w, frame)
    size = max(float(np.max(np.abs(phi))), float(np.max(np.abs(psi))))
    if float(np.max(np.abs(psi))) <= indeterminate_tolerance * size:
        return PlaneType.ALPHA
    if float(np.max(np.abs(phi))) <= indeterminate_tolerance * size:
        return PlaneType.BETA
    raise IndeterminateClassification("totally null plane has both phi and psi components")


def beta_plane_at(t: NullTetrad, x, zeta0: float, zeta1: float) -> Tuple[np.ndarray, np.ndarray]:
    """Spanning vectors of ``span(zeta0 e0 + zeta1 e1, zeta0 p0 + zeta1 p1)``"""
    e0, e1, p0, p1 = (evaluate_vector(frame, x) for frame in t.frames)
    return zeta0 * e0 + zeta1 * e1, zeta0 * p0 + zeta1 * p1
