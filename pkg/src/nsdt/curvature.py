#!/usr/bin/env python

"""
Curvature of neutral metrics.

Sign convention: ``R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z``
and ``R_abcd = g(R(d_c, d_d) d_b, d_a)``, so the unit round sphere has
``R_{theta phi theta phi} = sin^2 theta`` and sectional curvature +1.
Ricci contracts the first and third slots.

The Weyl tensor is split with the phi/psi bivector frames of a null tetrad:
the phi block is W+ and the psi block is W-. A metric is self-dual when
W- vanishes.
"""

import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple, Union

import numpy as np
import sympy

from .connection import (
    ConnectionComponents, components_for, frame_coefficients, split_spin_parts,
    christoffel,
)
from .constants import (
    CURVATURE_FD_TOLERANCE, DEFAULT_PROBE_POINTS, DEFAULT_SEED, DIMENSION, STATUS_EXACT_ZERO,
)
from .fields import ScalarField, apply_vector, is_zero_field, lie_bracket, zero
from .metric import NeutralMetric
from .tetrad import PAIRS, Bivector, NullTetrad, lambda_frames, tetrad_for

FRAME_LABELS = ("e0", "e1", "p0", "p1")
Block = Tuple[Tuple[ScalarField, ScalarField, ScalarField], ...]


@dataclass(frozen=True)
class CurvatureTensor:
    """Lowered Riemann tensor with its Ricci and scalar contractions"""

    lowered: Tuple  # [a][b][c][d]
    ricci: Tuple  # [b][d]
    scalar: ScalarField

    def component(self, a: int, b: int, c: int, d: int) -> ScalarField:
        return self.lowered[a][b][c][d]

    def symmetry_residuals(self) -> Dict[str, List[ScalarField]]:
        R = self.lowered
        idx = range(DIMENSION)
        return {
            "antisymmetry_ab": [R[a][b][c][d] + R[b][a][c][d] for a in idx for b in idx for c in idx for d in idx
                                if a <= b and c < d],
            "pair_symmetry": [R[a][b][c][d] - R[c][d][a][b] for a in idx for b in idx for c in idx for d in idx
                              if a < b and c < d and (a, b) < (c, d)],
            "bianchi": [R[a][b][c][d] + R[a][c][d][b] + R[a][d][b][c]
                        for a in idx for b in idx for c in idx for d in idx if b < c < d],
        }

    def sectional_curvature(self, x, u, w, m: NeutralMetric) -> float:
        """``R(u, w, u, w) / (g(u,u) g(w,w) - g(u,w)^2)`` at a point"""
        u, w = np.asarray(u, dtype=float), np.asarray(w, dtype=float)
        values = np.array([[[[self.lowered[a][b][c][d].evaluate(x) for d in range(DIMENSION)]
                             for c in range(DIMENSION)] for b in range(DIMENSION)] for a in range(DIMENSION)])
        numerator = np.einsum("abcd,a,b,c,d->", values, u, w, u, w)
        gram = m.gram_at(x)
        denominator = (u @ gram @ u) * (w @ gram @ w) - (u @ gram @ w) ** 2
        return float(numerator / denominator)


def riemann(m: NeutralMetric) -> CurvatureTensor:
    if "riemann" in m._cache:
        return m._cache["riemann"]

    gamma = christoffel(m)
    n = DIMENSION
    # raised[a][b][c][d] = R^a_bcd, filled for c < d then by antisymmetry
    raised = [[[[zero()] * n for _ in range(n)] for _ in range(n)] for _ in range(n)]
    for a in range(n):
        for b in range(n):
            for c in range(n):
                for d in range(c + 1, n):
                    value = gamma[a][d][b].differentiate(c) - gamma[a][c][b].differentiate(d)
                    for e in range(n):
                        if not (is_zero_field(gamma[a][c][e]) or is_zero_field(gamma[e][d][b])):
                            value = value + gamma[a][c][e] * gamma[e][d][b]
                        if not (is_zero_field(gamma[a][d][e]) or is_zero_field(gamma[e][c][b])):
                            value = value - gamma[a][d][e] * gamma[e][c][b]
                    raised[a][b][c][d] = value
                    raised[a][b][d][c] = -value

    lowered = [[[[zero()] * n for _ in range(n)] for _ in range(n)] for _ in range(n)]
    for a in range(n):
        for b in range(n):
            for c in range(n):
                for d in range(c + 1, n):
                    value: ScalarField = zero()
                    for e in range(n):
                        if is_zero_field(m[a, e]) or is_zero_field(raised[e][b][c][d]):
                            continue
                        value = value + m[a, e] * raised[e][b][c][d]
                    lowered[a][b][c][d] = value
                    lowered[a][b][d][c] = -value

    ricci = [[sum((raised[a][b][a][d] for a in range(n)), zero()) for d in range(n)] for b in range(n)]
    inverse = m.inverse()
    scalar: ScalarField = zero()
    for b in range(n):
        for d in range(n):
            if is_zero_field(inverse[b][d]) or is_zero_field(ricci[b][d]):
                continue
            scalar = scalar + inverse[b][d] * ricci[b][d]

    tensor = CurvatureTensor(
        lowered=tuple(tuple(tuple(tuple(row) for row in block) for block in part) for part in lowered),
        ricci=tuple(tuple(row) for row in ricci),
        scalar=scalar,
    )
    m._cache["riemann"] = tensor
    return tensor


def weyl_component(m: NeutralMetric, curvature: CurvatureTensor, a: int, b: int, c: int, d: int) -> ScalarField:
    """``C_abcd`` from the four-dimensional Ricci decomposition"""
    g, ric, s = m.g, curvature.ricci, curvature.scalar
    value = curvature.lowered[a][b][c][d]
    value = value - (g[a][c] * ric[b][d] - g[a][d] * ric[b][c] - g[b][c] * ric[a][d] + g[b][d] * ric[a][c]) / 2
    metric_part = g[a][c] * g[b][d] - g[a][d] * g[b][c]
    if not is_zero_field(metric_part) and not is_zero_field(s):
        value = value + s * metric_part / 6
    return value


# Hodge star

def hodge_star(m: NeutralMetric, t: NullTetrad, bivector: Bivector) -> Bivector:
    """``(*B)^{mn} = vol^{mnij} B_ij / 2`` with ``vol = e0 ^ e1 ^ p0 ^ p1``"""
    volume = t.determinant()
    lowered = {}
    for i, j in PAIRS:
        value: ScalarField = zero()
        for (a, b), component in zip(PAIRS, bivector.components):
            if is_zero_field(component):
                continue
            factor = m[i, a] * m[j, b] - m[i, b] * m[j, a]
            if is_zero_field(factor):
                continue
            value = value + component * factor
        lowered[i, j] = value
    components = []
    for mm, nn in PAIRS:
        value = zero()
        for i, j in PAIRS:
            sign = int(sympy.LeviCivita(mm, nn, i, j))
            if sign and not is_zero_field(lowered[i, j]):
                value = value + lowered[i, j] * sign
        components.append(volume * value)
    return Bivector(tuple(components), bivector.weight)


def hodge_eigen_residuals(m: NeutralMetric, t: NullTetrad) -> Dict[str, List[ScalarField]]:
    """``*phi - phi`` and ``*psi + psi`` for every frame bivector"""
    frames = lambda_frames(t)
    residuals = {}
    for index, phi in enumerate(frames.phi, start=1):
        star = hodge_star(m, t, phi)
        residuals[f"phi{index}"] = [s - c for s, c in zip(star.components, phi.components)]
    for index, psi in enumerate(frames.psi, start=1):
        star = hodge_star(m, t, psi)
        residuals[f"psi{index}"] = [s + c for s, c in zip(star.components, psi.components)]
    return residuals


# Weyl split

@dataclass(frozen=True)
class WeylDecomposition:
    """W+ and W- on the frames (phi1, phi2, phi1^) and (psi1, psi2, psi3^).

    Entries are taken on the unnormalised third frame vector, so every entry
    stays a polynomial on exact backends. ``weights`` rescale to the
    normalised frames.
    """

    plus: Block
    minus: Block
    mixed: Block
    weights: Tuple[float, float, float]
    asd_norm: Union[str, float]

    @property
    def self_dual(self) -> bool:
        if self.asd_norm == STATUS_EXACT_ZERO:
            return True
        if all(entry.is_exact for row in self.minus for entry in row):
            return False
        return self.asd_norm <= CURVATURE_FD_TOLERANCE

    def normalized(self, block: Block, x) -> np.ndarray:
        w = np.array(self.weights)
        values = np.array([[entry.evaluate(x) for entry in row] for row in block])
        return values * np.outer(w, w)

    @staticmethod
    def trace(block: Block) -> ScalarField:
        """h-trace on the unnormalised frame, inverse Gram ``[[0,1,0],[1,0,0],[0,0,-1/2]]``"""
        return block[0][1] + block[1][0] - block[2][2] / 2

    def symmetry_residuals(self) -> List[ScalarField]:
        return [block[i][j] - block[j][i] for block in (self.plus, self.minus)
                for i in range(3) for j in range(i + 1, 3)]


def _weyl_pairing(C: Dict[Tuple[int, int, int, int], ScalarField], left: Bivector, right: Bivector) -> ScalarField:
    total: ScalarField = zero()
    for (a, b), x in zip(PAIRS, left.components):
        if is_zero_field(x):
            continue
        for (c, d), y in zip(PAIRS, right.components):
            if is_zero_field(y) or is_zero_field(C[a, b, c, d]):
                continue
            total = total + C[a, b, c, d] * x * y
    return total


def _block_norm(block: Block, weights, m: NeutralMetric, probe_count: int, seed: int) -> Union[str, float]:
    if all(is_zero_field(entry) for row in block for entry in row):
        return STATUS_EXACT_ZERO
    worst = 0.0
    for x in m.probes(probe_count, seed):
        for i in range(3):
            for j in range(3):
                worst = max(worst, abs(weights[i] * weights[j] * block[i][j].evaluate(x)))
    return worst


def weyl_decomposition(m: NeutralMetric, t: Optional[NullTetrad] = None,
                       probe_count: int = DEFAULT_PROBE_POINTS, seed: int = DEFAULT_SEED) -> WeylDecomposition:
    t = t or tetrad_for(m)
    curvature = riemann(m)
    C = {}
    for a, b in PAIRS:
        for c, d in PAIRS:
            if (c, d) < (a, b):
                C[a, b, c, d] = C[c, d, a, b]
            else:
                C[a, b, c, d] = weyl_component(m, curvature, a, b, c, d)

    frames = lambda_frames(t)
    phi = [Bivector(f.components) for f in frames.phi]
    psi = [Bivector(f.components) for f in frames.psi]
    plus = tuple(tuple(_weyl_pairing(C, x, y) for y in phi) for x in phi)
    minus = tuple(tuple(_weyl_pairing(C, x, y) for y in psi) for x in psi)
    mixed = tuple(tuple(_weyl_pairing(C, x, y) for y in psi) for x in phi)
    weights = (1.0, 1.0, 1 / math.sqrt(2))
    return WeylDecomposition(
        plus=plus, minus=minus, mixed=mixed, weights=weights,
        asd_norm=_block_norm(minus, weights, m, probe_count, seed),
    )


# Spin curvature

@dataclass(frozen=True)
class SpinCurvature:
    """``Omega+`` on frame pairs and its interior products with p0, p1"""

    omega: Dict[Tuple[int, int], Tuple[Tuple[ScalarField, ScalarField], Tuple[ScalarField, ScalarField]]]

    def on(self, a: int, b: int):
        if a < b:
            return self.omega[a, b]
        matrix = self.omega[b, a]
        return tuple(tuple(-entry for entry in row) for row in matrix)

    def interior_residuals(self) -> Dict[str, ScalarField]:
        residuals = {}
        for vertical in (2, 3):
            for other in range(DIMENSION):
                if other == vertical:
                    continue
                matrix = self.on(vertical, other)
                for r in range(2):
                    for s in range(2):
                        residuals[f"i({FRAME_LABELS[vertical]})Omega+({FRAME_LABELS[other]})[{r}{s}]"] = matrix[r][s]
        return residuals

    @property
    def basic(self) -> bool:
        return all(f.is_identically_zero() for f in self.interior_residuals().values())


def spin_curvature_plus(m: NeutralMetric, t: NullTetrad,
                        c: Optional[ConnectionComponents] = None) -> SpinCurvature:
    """``Omega+ = d omega+ + omega+ ^ omega+`` evaluated on tetrad pairs"""
    c = c or components_for(m, t)
    plus = split_spin_parts(c).plus
    frames = t.frames

    def matrix_at(direction: int):
        return [[plus[r][s][direction] for s in range(2)] for r in range(2)]

    omega = {}
    for a in range(DIMENSION):
        for b in range(a + 1, DIMENSION):
            bracket = frame_coefficients(m, t, lie_bracket(frames[a], frames[b]))
            ma, mb = matrix_at(a), matrix_at(b)
            entries = []
            for r in range(2):
                row = []
                for s in range(2):
                    value = apply_vector(frames[a], plus[r][s][b]) - apply_vector(frames[b], plus[r][s][a])
                    for k in range(DIMENSION):
                        if not (is_zero_field(bracket[k]) or is_zero_field(plus[r][s][k])):
                            value = value - bracket[k] * plus[r][s][k]
                    for k in range(2):
                        value = value + ma[r][k] * mb[k][s] - mb[r][k] * ma[k][s]
                    row.append(value)
                entries.append(tuple(row))
            omega[a, b] = tuple(entries)
    return SpinCurvature(omega)
