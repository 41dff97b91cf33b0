#!/usr/bin/env python

"""
Levi-Civita connection in chart and null-tetrad frames.

The connection form is read by columns, ``nabla_X F_j = omega^i_j(X) F_i``
for the tetrad ``F = (e0, e1, p0, p1)``. Metric compatibility forces the
so(2,2) pattern

    [[a, b, e, 0],
     [c, d, 0, e],
     [f, 0, -d, b],
     [0, f, c, -a]]

so six 1-forms carry the whole connection. A 1-form is stored as its four
values on the tetrad directions.
"""

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from sympy import Rational

from .constants import DIMENSION, FIBER_AXES
from .errors import PatternViolation
from .fields import (
    ScalarField, VectorField, apply_vector, combine_vectors, is_zero_field,
    lie_bracket, summarize, vector_difference, zero,
)
from .metric import SPECIAL_FORM, NeutralMetric, _d
from .tetrad import Bivector, NullTetrad, bivector_inner, construct_foliation_tetrad

OneForm = Tuple[ScalarField, ScalarField, ScalarField, ScalarField]
Christoffel = Tuple[Tuple[Tuple[ScalarField, ...], ...], ...]

COMPONENT_NAMES = ("a", "b", "c", "d", "e", "f")
# Entries of the connection matrix holding each component
COMPONENT_ENTRIES = {"a": (0, 0), "b": (0, 1), "e": (0, 2), "c": (1, 0), "d": (1, 1), "f": (2, 0)}
# Remaining entries as (row, col, sign, letter); letter None means the entry vanishes
PATTERN_CONSTRAINTS = (
    (0, 3, 1, None), (1, 2, 1, None), (2, 1, 1, None), (3, 0, 1, None),
    (1, 3, 1, "e"), (2, 2, -1, "d"), (2, 3, 1, "b"),
    (3, 1, 1, "f"), (3, 2, 1, "c"), (3, 3, -1, "a"),
)
# G is a signed permutation: G[i][PARTNER[i]] = PARTNER_SIGN[i]
PARTNER = (3, 2, 1, 0)
PARTNER_SIGN = (1, -1, -1, 1)
HALF = Rational(1, 2)


def form_zero() -> OneForm:
    return (zero(), zero(), zero(), zero())


def form_add(*forms: OneForm) -> OneForm:
    return tuple(sum((form[k] for form in forms), zero()) for k in range(DIMENSION))


def form_sub(u: OneForm, w: OneForm) -> OneForm:
    return tuple(u[k] - w[k] for k in range(DIMENSION))


def form_scale(u: OneForm, factor) -> OneForm:
    return tuple(value * factor for value in u)


def form_on(u: OneForm, coefficients: Sequence[ScalarField]) -> ScalarField:
    """Value of a 1-form on ``sum_A coefficients[A] F_A``"""
    total: ScalarField = zero()
    for value, coeff in zip(u, coefficients):
        if is_zero_field(value) or is_zero_field(coeff):
            continue
        total = total + value * coeff
    return total


# Chart connection

def christoffel(m: NeutralMetric) -> Christoffel:
    """``Gamma^k_ij`` indexed ``[k][i][j]``, cached on the metric"""
    if "christoffel" in m._cache:
        return m._cache["christoffel"]

    inverse = m.inverse()
    dg = [[[m[i, j].differentiate(l) for j in range(DIMENSION)] for i in range(DIMENSION)]
          for l in range(DIMENSION)]
    lowered = {}
    for l in range(DIMENSION):
        for i in range(DIMENSION):
            for j in range(i, DIMENSION):
                lowered[l, i, j] = (dg[i][l][j] + dg[j][i][l] - dg[l][i][j]) / 2

    gamma = [[[zero() for _ in range(DIMENSION)] for _ in range(DIMENSION)] for _ in range(DIMENSION)]
    for k in range(DIMENSION):
        for i in range(DIMENSION):
            for j in range(i, DIMENSION):
                total: ScalarField = zero()
                for l in range(DIMENSION):
                    if is_zero_field(inverse[k][l]) or is_zero_field(lowered[l, i, j]):
                        continue
                    total = total + inverse[k][l] * lowered[l, i, j]
                gamma[k][i][j] = total
                gamma[k][j][i] = total

    result = tuple(tuple(tuple(row) for row in block) for block in gamma)
    m._cache["christoffel"] = result
    return result


def torsion_residuals(gamma: Christoffel) -> List[ScalarField]:
    return [gamma[k][i][j] - gamma[k][j][i]
            for k in range(DIMENSION) for i in range(DIMENSION) for j in range(i + 1, DIMENSION)]


def metric_compatibility_residuals(m: NeutralMetric) -> List[ScalarField]:
    """``nabla_k g_ij`` for ``i <= j``"""
    gamma = christoffel(m)
    residuals = []
    for k in range(DIMENSION):
        for i in range(DIMENSION):
            for j in range(i, DIMENSION):
                value = m[i, j].differentiate(k)
                for l in range(DIMENSION):
                    value = value - gamma[l][k][i] * m[l, j] - gamma[l][k][j] * m[i, l]
                residuals.append(value)
    return residuals


def covariant_derivative(m: NeutralMetric, x: VectorField, y: VectorField) -> VectorField:
    """``nabla_X Y`` in chart components"""
    gamma = christoffel(m)
    result = []
    for k in range(DIMENSION):
        value = apply_vector(x, y[k])
        for i in range(DIMENSION):
            if is_zero_field(x[i]):
                continue
            for j in range(DIMENSION):
                if is_zero_field(y[j]) or is_zero_field(gamma[k][i][j]):
                    continue
                value = value + gamma[k][i][j] * x[i] * y[j]
        result.append(value)
    return tuple(result)


def frame_coefficients(m: NeutralMetric, t: NullTetrad, v: VectorField) -> Tuple[ScalarField, ...]:
    """Coefficients of ``v`` on the tetrad, ``v = sum_A c^A F_A``"""
    frames = t.frames
    return tuple(m.pairing(v, frames[PARTNER[a]]) * PARTNER_SIGN[a] for a in range(DIMENSION))


# Tetrad connection form

@dataclass(frozen=True)
class ConnectionForm:
    """``values[i][j][A] = omega^i_j(F_A)``"""

    values: Tuple[Tuple[OneForm, ...], ...]

    def entry(self, i: int, j: int) -> OneForm:
        return self.values[i][j]

    def pattern_residuals(self) -> Dict[str, OneForm]:
        residuals = {}
        for row, col, sign, letter in PATTERN_CONSTRAINTS:
            entry = self.values[row][col]
            if letter is not None:
                source = self.values[COMPONENT_ENTRIES[letter][0]][COMPONENT_ENTRIES[letter][1]]
                entry = form_sub(entry, form_scale(source, sign))
            residuals[f"omega{row}{col}"] = entry
        return residuals

    def pattern_holds(self) -> bool:
        return all(value.is_identically_zero()
                   for form in self.pattern_residuals().values() for value in form)


def connection_form_in_tetrad(m: NeutralMetric, t: NullTetrad, check: bool = True) -> ConnectionForm:
    frames = t.frames
    values = [[[zero()] * DIMENSION for _ in range(DIMENSION)] for _ in range(DIMENSION)]
    for direction in range(DIMENSION):
        for j in range(DIMENSION):
            derivative = covariant_derivative(m, frames[direction], frames[j])
            coefficients = frame_coefficients(m, t, derivative)
            for i in range(DIMENSION):
                values[i][j][direction] = coefficients[i]
    form = ConnectionForm(tuple(tuple(tuple(entry) for entry in row) for row in values))
    if check and not form.pattern_holds():
        failing = [name for name, residual in form.pattern_residuals().items()
                   if not all(v.is_identically_zero() for v in residual)]
        raise PatternViolation(f"connection matrix breaks the so(2,2) pattern at {', '.join(failing)}")
    return form


@dataclass(frozen=True)
class ConnectionComponents:
    """The six so(2,2) component 1-forms, each as values on (e0, e1, p0, p1)"""

    a: OneForm
    b: OneForm
    c: OneForm
    d: OneForm
    e: OneForm
    f: OneForm

    def form(self, name: str) -> OneForm:
        return getattr(self, name)

    def value(self, name: str, direction: int) -> ScalarField:
        return getattr(self, name)[direction]

    def as_matrix(self) -> Tuple[Tuple[OneForm, ...], ...]:
        a, b, c, d, e, f = (self.form(n) for n in COMPONENT_NAMES)
        z = form_zero()
        return (
            (a, b, e, z),
            (c, d, z, e),
            (f, z, form_scale(d, -1), b),
            (z, f, c, form_scale(a, -1)),
        )

    def difference(self, other: "ConnectionComponents") -> Dict[str, OneForm]:
        return {name: form_sub(self.form(name), other.form(name)) for name in COMPONENT_NAMES}

    def equals(self, other: "ConnectionComponents") -> bool:
        return all(v.is_identically_zero() for form in self.difference(other).values() for v in form)

    def summary(self) -> Dict[str, object]:
        return {name: summarize(self.form(name)) for name in COMPONENT_NAMES}


def extract_components(omega: ConnectionForm) -> ConnectionComponents:
    if not omega.pattern_holds():
        raise PatternViolation("cannot extract components from a matrix outside the so(2,2) pattern")
    return ConnectionComponents(**{name: omega.entry(*COMPONENT_ENTRIES[name]) for name in COMPONENT_NAMES})


def components_for(m: NeutralMetric, t: Optional[NullTetrad] = None) -> ConnectionComponents:
    """Components along the Christoffel path, tetrad built when not given"""
    t = t or construct_foliation_tetrad(m)
    return extract_components(connection_form_in_tetrad(m, t))


def special_form_components(p: ScalarField, q: ScalarField, r: ScalarField) -> ConnectionComponents:
    """Closed formulas for the special-form tetrad; every form vanishes on p0, p1"""
    u, v = FIBER_AXES
    p_u, p_v = _d(p, u), _d(p, v)
    q_u, q_v = _d(q, u), _d(q, v)
    r_u, r_v = _d(r, u), _d(r, v)

    # derivatives along e0 = d0 + (r d2 - p d3)/2 and e1 = d1 + (q d2 - r d3)/2
    def along_e0(g: ScalarField) -> ScalarField:
        return _d(g, 0) + (r * _d(g, u) - p * _d(g, v)) / 2

    def along_e1(g: ScalarField) -> ScalarField:
        return _d(g, 1) + (q * _d(g, u) - r * _d(g, v)) / 2

    def on_base(x: ScalarField, y: ScalarField) -> OneForm:
        return (x, y, zero(), zero())

    return ConnectionComponents(
        a=on_base(-p_v / 2, -r_v / 2),
        b=on_base(-r_v / 2, -q_v / 2),
        c=on_base(p_u / 2, r_u / 2),
        d=on_base(r_u / 2, q_u / 2),
        e=form_zero(),
        f=on_base((along_e1(p) - along_e0(r)) / 2, (along_e1(r) - along_e0(q)) / 2),
    )


# sl(2) + sl(2) splitting

SpinMatrix = Tuple[Tuple[OneForm, OneForm], Tuple[OneForm, OneForm]]


@dataclass(frozen=True)
class SpinConnectionPair:
    """``plus`` carries ((a-d)/2, b, c); ``minus`` carries ((a+d)/2, e, f)"""

    plus: SpinMatrix
    minus: SpinMatrix

    def trace_residuals(self) -> List[ScalarField]:
        return [self.plus[0][0][k] + self.plus[1][1][k] for k in range(DIMENSION)] + \
               [self.minus[0][0][k] + self.minus[1][1][k] for k in range(DIMENSION)]


def split_spin_parts(c: ConnectionComponents) -> SpinConnectionPair:
    half_diff = form_scale(form_sub(c.a, c.d), HALF)
    half_sum = form_scale(form_add(c.a, c.d), HALF)
    plus = ((half_diff, c.b), (c.c, form_scale(half_diff, -1)))
    minus = ((half_sum, c.e), (c.f, form_scale(half_sum, -1)))
    return SpinConnectionPair(plus=plus, minus=minus)


def rho_minus(c: ConnectionComponents) -> Tuple[Tuple[OneForm, ...], ...]:
    """Connection on the anti-self-dual bivectors in the frame (psi1, psi2, sqrt2 psi3)"""
    a_minus_d = form_sub(c.a, c.d)
    z = form_zero()
    return (
        (a_minus_d, z, form_scale(c.b, 2)),
        (z, form_scale(a_minus_d, -1), form_scale(c.c, 2)),
        (c.c, c.b, z),
    )


def wedge_minus_connection(m: NeutralMetric, t: NullTetrad) -> Tuple[Tuple[OneForm, ...], ...]:
    """The same connection from covariant derivatives of the psi frame.

    ``nabla (X ^ Y) = nabla X ^ Y + X ^ nabla Y``, then coefficients are read
    off with the bivector inner product: on ``(psi1, psi2, sqrt2 psi3)`` the
    Gram matrix is ``[[0,1,0],[1,0,0],[0,0,-2]]``.
    """
    e0, e1, p0, p1 = t.frames
    # each frame bivector as a sum of wedges
    frame_terms = (((e0, p0),), ((e1, p1),), ((e0, p1), (e1, p0)))
    basis = tuple(_wedge_sum(terms) for terms in frame_terms)

    def derivative(direction: VectorField, terms) -> Bivector:
        image = None
        for x, y in terms:
            part = Bivector.wedge(covariant_derivative(m, direction, x), y) + \
                Bivector.wedge(x, covariant_derivative(m, direction, y))
            image = part if image is None else image + part
        return image

    theta = [[[zero()] * DIMENSION for _ in range(3)] for _ in range(3)]
    for index, direction in enumerate(t.frames):
        for j, terms in enumerate(frame_terms):
            image = derivative(direction, terms)
            theta[0][j][index] = bivector_inner(image, basis[1], m)
            theta[1][j][index] = bivector_inner(image, basis[0], m)
            theta[2][j][index] = bivector_inner(image, basis[2], m) / -2
    return tuple(tuple(tuple(entry) for entry in row) for row in theta)


def _wedge_sum(terms) -> Bivector:
    result = None
    for x, y in terms:
        part = Bivector.wedge(x, y)
        result = part if result is None else result + part
    return result


# Structural identities

@dataclass
class StructuralReport:
    """Named identity groups; each residual is a scalar field"""

    groups: Dict[str, Dict[str, ScalarField]]

    def group_passed(self, group: str) -> bool:
        return all(f.is_identically_zero() for f in self.groups[group].values())

    @property
    def passed(self) -> bool:
        return all(self.group_passed(group) for group in self.groups)

    def summary(self) -> Dict[str, Dict[str, object]]:
        return {group: {name: summarize([f]) for name, f in residuals.items()}
                for group, residuals in self.groups.items()}

    def failing(self) -> List[str]:
        return [f"{group}:{name}" for group, residuals in self.groups.items()
                for name, f in residuals.items() if not f.is_identically_zero()]


def ideal_residuals(c: ConnectionComponents) -> Dict[str, ScalarField]:
    """Consequences of the vertical plane field being integrable and of the brackets [e_i, p_j] being vertical"""
    return {
        "e(p0)": c.e[2],
        "e(p1)": c.e[3],
        "e(e0)-a(p0)": c.e[0] - c.a[2],
        "e(e0)-c(p1)": c.e[0] - c.c[3],
        "e(e1)-b(p0)": c.e[1] - c.b[2],
        "e(e1)-d(p1)": c.e[1] - c.d[3],
        "a(p1)": c.a[3],
        "c(p0)": c.c[2],
        "b(p1)": c.b[3],
        "d(p0)": c.d[2],
    }


def _frame_vector(t: NullTetrad, coefficients: Sequence[ScalarField]) -> VectorField:
    return combine_vectors(coefficients, t.frames)


def commutator_residuals(c: ConnectionComponents, t: NullTetrad) -> Dict[str, ScalarField]:
    """Direct Lie brackets of tetrad fields against their component expressions"""
    e0, e1, p0, p1 = t.frames
    z = zero()
    expected = {
        "[p0,p1]": ((p0, p1), (z, z, c.b[2] + c.d[3], -(c.a[2] + c.c[3]))),
        "[e0,p0]": ((e0, p0), (z, z, -(c.d[0] + c.f[2]), c.c[0])),
        "[e0,p1]": ((e0, p1), (z, z, c.b[0] - c.f[3], -c.a[0])),
        "[e1,p0]": ((e1, p0), (z, z, -c.d[1], c.c[1] - c.f[2])),
        "[e1,p1]": ((e1, p1), (z, z, c.b[1], -(c.a[1] + c.f[3]))),
    }
    residuals = {}
    for name, ((x, y), coefficients) in expected.items():
        difference = vector_difference(lie_bracket(x, y), _frame_vector(t, coefficients))
        for axis, value in enumerate(difference):
            residuals[f"{name}.x{axis}"] = value
    return residuals


def fiber_vanishing_residuals(c: ConnectionComponents, t: NullTetrad) -> Dict[str, ScalarField]:
    residuals: Dict[str, ScalarField] = {}
    for k, frame in enumerate(("e0", "e1", "p0", "p1")):
        residuals[f"e({frame})"] = c.e[k]
        residuals[f"b-c({frame})"] = c.b[k] - c.c[k]
    for k, frame in ((2, "p0"), (3, "p1")):
        for name in ("a", "b", "c", "d"):
            residuals[f"{name}({frame})"] = c.form(name)[k]
    bracket = lie_bracket(t.p0, t.p1)
    for axis, value in enumerate(bracket):
        residuals[f"[p0,p1].x{axis}"] = value
    return residuals


def _along(t: NullTetrad, index: int, f: ScalarField) -> ScalarField:
    return apply_vector(t.frames[index], f)


def self_duality_residuals(c: ConnectionComponents, t: NullTetrad) -> Dict[str, ScalarField]:
    """Fiber-derivative identities satisfied by the component forms of a self-dual metric"""
    a_minus_d = form_sub(c.a, c.d)
    p0 = lambda f: _along(t, 2, f)  # noqa: E731
    p1 = lambda f: _along(t, 3, f)  # noqa: E731
    mixed = p0(c.b[1]) + p1(c.b[0])
    return {
        "p0 b(e0)": p0(c.b[0]),
        "p1 b(e1)": p1(c.b[1]),
        "p0 (a-d)(e0) + p1 (a-d)(e1)": p0(a_minus_d[0]) + p1(a_minus_d[1]),
        "p1 (d-a)(e1) - p0 b(e1) - p1 b(e0)": -p1(a_minus_d[1]) - mixed,
        "p0 (a-d)(e1) + p1 (a-d)(e0)": p0(a_minus_d[1]) + p1(a_minus_d[0]),
    }


def verify_structural_identities(m: NeutralMetric, t: Optional[NullTetrad] = None,
                                 c: Optional[ConnectionComponents] = None,
                                 self_dual: bool = False) -> StructuralReport:
    """Ideal and commutator identities always; self-dual groups on request"""
    t = t or construct_foliation_tetrad(m)
    c = c or components_for(m, t)
    groups = {
        "ideal": ideal_residuals(c),
        "commutators": commutator_residuals(c, t),
    }
    if self_dual:
        groups["fiber_vanishing"] = fiber_vanishing_residuals(c, t)
        groups["self_duality"] = self_duality_residuals(c, t)
    return StructuralReport(groups)


def dual_path_residuals(m: NeutralMetric, t: Optional[NullTetrad] = None) -> Dict[str, OneForm]:
    """Closed special-form formulas against the Christoffel path"""
    if m.backend != SPECIAL_FORM:
        raise ValueError("closed component formulas need a special-form metric")
    general = components_for(m, t)
    closed = special_form_components(*m.special)
    return closed.difference(general)


def connection_identity_ok(forms: Dict[str, OneForm]) -> bool:
    return all(value.is_identically_zero() for form in forms.values() for value in form)
