#!/usr/bin/env python

"""
Neutral metrics.

Backends:

- special form: the metric of a chart adapted to an alpha-surface foliation
  whose leaves are the ``(x2, x3)`` planes, fixed by three functions p, q, r;
- product sphere: the standard model ``S2 x S2`` with the round metric on the
  first factor minus the round metric on the second, in spherical coordinates
  ``(theta1, phi1, theta2, phi2)``;
- generic: any symmetric matrix of fields.

The self-duality system of a special form is linear in ``(p, q, r)`` and only
involves fiber derivatives, which is what ``generate_sd_family`` exploits.
"""

import json
import math
from dataclasses import dataclass, field
from itertools import permutations
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import sympy
from sympy import Matrix, Rational

from .constants import (
    DEFAULT_CHART_MARGIN, DEFAULT_COEFFICIENT_RANGE, DEFAULT_FD_STEP,
    DEFAULT_PROBE_POINTS, DEFAULT_SEED, DIMENSION, FIBER_AXES,
    MAX_SPEC_FILE_SIZE, SPHERE_PROBE_THETA_MARGIN, STANDARD_MODEL_NAME,
)
from .errors import ChartSingularity, InfeasibleDegree, SingularMetric, SpecParseError
from .fields import (
    Bounds, Callback, Polynomial, ScalarField, as_array, is_zero_field, one,
    polynomial_from_json, polynomial_to_json, probe_points, zero,
)
from .logger import logger

SPECIAL_FORM = "special-form"
PRODUCT_SPHERE = "product-sphere"
GENERIC = "generic"
BACKENDS = (SPECIAL_FORM, PRODUCT_SPHERE, GENERIC)

FieldMatrix = Tuple[Tuple[ScalarField, ...], ...]
Triple = Tuple[Polynomial, Polynomial, Polynomial]

U, V = FIBER_AXES


@dataclass(frozen=True)
class NeutralMetric:
    """A 4x4 symmetric matrix of scalar fields of signature (+,+,-,-)"""

    g: FieldMatrix
    backend: str = GENERIC
    special: Optional[Tuple[ScalarField, ScalarField, ScalarField]] = None
    metric_id: str = ""
    domain: Optional[Bounds] = None
    _cache: Dict[str, Any] = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if self.backend not in BACKENDS:
            raise ValueError(f"unknown metric backend '{self.backend}'")
        if len(self.g) != DIMENSION or any(len(row) != DIMENSION for row in self.g):
            raise ValueError("metric must be a 4x4 matrix")

    def __getitem__(self, index: Tuple[int, int]) -> ScalarField:
        i, j = index
        return self.g[i][j]

    @property
    def is_exact(self) -> bool:
        return all(isinstance(entry, Polynomial) for row in self.g for entry in row)

    def gram_at(self, x) -> np.ndarray:
        return np.array([[entry.evaluate(x) for entry in row] for row in self.g])

    def pairing(self, v: Sequence[ScalarField], w: Sequence[ScalarField]) -> ScalarField:
        """``g(v, w)`` for chart vector fields"""
        total: ScalarField = zero()
        for i in range(DIMENSION):
            if is_zero_field(v[i]):
                continue
            for j in range(DIMENSION):
                if is_zero_field(w[j]) or is_zero_field(self.g[i][j]):
                    continue
                total = total + self.g[i][j] * v[i] * w[j]
        return total

    def lower(self, v: Sequence[ScalarField]) -> Tuple[ScalarField, ...]:
        """Index-lowered components ``g_ij v^j``"""
        return tuple(sum((self.g[i][j] * v[j] for j in range(DIMENSION)), zero())
                     for i in range(DIMENSION))

    def symmetry_residuals(self) -> List[ScalarField]:
        return [self.g[i][j] - self.g[j][i] for i in range(DIMENSION) for j in range(i + 1, DIMENSION)]

    def determinant(self) -> ScalarField:
        if "det" not in self._cache:
            self._cache["det"] = field_determinant(self.g)
        return self._cache["det"]

    def inverse(self) -> FieldMatrix:
        """Exact when the determinant is a nonzero constant, numeric otherwise"""
        if "inverse" not in self._cache:
            det = self.determinant()
            if is_zero_field(det):
                raise SingularMetric(f"metric {self.metric_id or self.backend} has vanishing determinant")
            cofactors = [[cofactor(self.g, i, j) for j in range(DIMENSION)] for i in range(DIMENSION)]
            # inverse is the transposed cofactor matrix over the determinant
            self._cache["inverse"] = tuple(
                tuple(cofactors[j][i] / det for j in range(DIMENSION)) for i in range(DIMENSION)
            )
        return self._cache["inverse"]

    def probe_bounds(self) -> Optional[Bounds]:
        return self.domain

    def probes(self, count: int = DEFAULT_PROBE_POINTS, seed: int = DEFAULT_SEED) -> np.ndarray:
        return probe_points(count, seed, self.domain)


def _permutation_sign(perm: Sequence[int]) -> int:
    sign = 1
    perm = list(perm)
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                sign = -sign
    return sign


def field_determinant(matrix: Sequence[Sequence[ScalarField]]) -> ScalarField:
    """Leibniz expansion over field arithmetic"""
    n = len(matrix)
    total: ScalarField = zero()
    for perm in permutations(range(n)):
        term: ScalarField = one()
        for row, col in enumerate(perm):
            entry = matrix[row][col]
            if is_zero_field(entry):
                term = zero()
                break
            term = term * entry
        if not is_zero_field(term):
            total = total + term * _permutation_sign(perm)
    return total


def cofactor(matrix: Sequence[Sequence[ScalarField]], i: int, j: int) -> ScalarField:
    minor = [[matrix[r][c] for c in range(len(matrix)) if c != j] for r in range(len(matrix)) if r != i]
    value = field_determinant(minor)
    return value if (i + j) % 2 == 0 else -value


def check_signature(m: NeutralMetric, points: Optional[np.ndarray] = None) -> bool:
    """Two positive and two negative eigenvalues at every probe point"""
    points = m.probes() if points is None else points
    for x in points:
        eigenvalues = np.linalg.eigvalsh(m.gram_at(x))
        if int(np.sum(eigenvalues > 0)) != 2 or int(np.sum(eigenvalues < 0)) != 2:
            return False
    return True


# Special form

def build_special_form(p: ScalarField, q: ScalarField, r: ScalarField, metric_id: str = "") -> NeutralMetric:
    """Rows ``[[p,r,0,1],[r,q,-1,0],[0,-1,0,0],[1,0,0,0]]``"""
    o, z, m1 = one(), zero(), Polynomial.constant(-1)
    g = (
        (p, r, z, o),
        (r, q, m1, z),
        (z, m1, z, z),
        (o, z, z, z),
    )
    domain = next((f.domain for f in (p, q, r) if f.domain is not None), None)
    return NeutralMetric(g=g, backend=SPECIAL_FORM, special=(p, q, r), metric_id=metric_id, domain=domain)


def _d(f: ScalarField, *axes: int) -> ScalarField:
    for axis in axes:
        f = f.differentiate(axis)
    return f


@dataclass
class SdSystemReport:
    """Residuals of the self-duality system of a special-form metric"""

    residuals: Dict[str, ScalarField]
    passes: Dict[str, bool]
    passed: bool
    gauge_residuals: Dict[str, ScalarField]
    in_gauge: bool
    integrability_residual: ScalarField
    integrability_passed: bool

    def failing(self) -> List[str]:
        return [name for name, ok in self.passes.items() if not ok]


def sd_system_residuals(p: ScalarField, q: ScalarField, r: ScalarField) -> Dict[str, ScalarField]:
    return {
        "d22p": _d(p, U, U),
        "d33q": _d(q, V, V),
        "d33p+d22q": _d(p, V, V) + _d(q, U, U),
        "d22r+d23p": _d(r, U, U) + _d(p, U, V),
        "d33r+d23q": _d(r, V, V) + _d(q, U, V),
    }


def gauge_residuals(p: ScalarField, q: ScalarField, r: ScalarField) -> Dict[str, ScalarField]:
    return {
        "d2p+d3r": _d(p, U) + _d(r, V),
        "d3q+d2r": _d(q, V) + _d(r, U),
    }


def basic_pde_residuals(p: ScalarField, q: ScalarField, r: ScalarField) -> Dict[str, ScalarField]:
    """Fiber-PDE form of the basic condition for a self-dual special form"""
    return {
        "d23p": _d(p, U, V),
        "d23q": _d(q, U, V),
        "d33p": _d(p, V, V),
        "d22q": _d(q, U, U),
        "d22r": _d(r, U, U),
        "d23r": _d(r, U, V),
        "d33r": _d(r, V, V),
    }


def check_sd_system(p: ScalarField, q: ScalarField, r: ScalarField) -> SdSystemReport:
    residuals = sd_system_residuals(p, q, r)
    passes = {name: f.is_identically_zero() for name, f in residuals.items()}
    gauge = gauge_residuals(p, q, r)
    mixed = _d(p, V, V) + _d(q, U, U) + _d(r, U, V) * 4
    return SdSystemReport(
        residuals=residuals,
        passes=passes,
        passed=all(passes.values()),
        gauge_residuals=gauge,
        in_gauge=all(f.is_identically_zero() for f in gauge.values()),
        integrability_residual=mixed,
        integrability_passed=all(ok for name, ok in passes.items() if name != "d33p+d22q")
        and mixed.is_identically_zero(),
    )


# Solution families

def _monomials(degree: int) -> List[Tuple[int, int]]:
    return [(i, total - i) for total in range(degree + 1) for i in range(total, -1, -1)]


def _fiber_constraints(p: ScalarField, q: ScalarField, r: ScalarField,
                       gauge: bool, basic: bool) -> List[ScalarField]:
    constraints = list(sd_system_residuals(p, q, r).values())
    if gauge:
        constraints.extend(gauge_residuals(p, q, r).values())
    if basic:
        constraints.extend(basic_pde_residuals(p, q, r).values())
    return constraints


def _constraint_matrix(fiber_degree: int, gauge: bool, basic: bool) -> Matrix:
    """Linear map from fiber coefficients of (p, q, r) to constraint coefficients"""
    fiber_monomials = _monomials(fiber_degree)
    columns: List[Dict[Tuple[int, Tuple[int, ...]], Rational]] = []
    for slot in range(3):
        for k, l in fiber_monomials:
            mono = Polynomial.from_terms([(1, (0, 0, k, l))])
            triple = [zero(), zero(), zero()]
            triple[slot] = mono
            column = {}
            for index, residual in enumerate(_fiber_constraints(*triple, gauge=gauge, basic=basic)):
                for coeff, exps in residual.terms():
                    column[(index, exps)] = coeff
            columns.append(column)
    row_keys = sorted({key for column in columns for key in column})
    if not row_keys:
        return sympy.zeros(0, len(columns))
    return Matrix([[column.get(key, Rational(0)) for column in columns] for key in row_keys])


def sd_family_basis(fiber_degree: int, gauge: bool = True, basic: bool = False) -> Matrix:
    """Columns spanning the fiber-coefficient null space of the constraint map"""
    if fiber_degree < 0:
        raise ValueError("fiber_degree must be non-negative")
    unknowns = 3 * len(_monomials(fiber_degree))
    matrix = _constraint_matrix(fiber_degree, gauge, basic)
    if matrix.rows == 0:
        return sympy.eye(unknowns)
    basis = matrix.nullspace()
    if not basis:
        raise InfeasibleDegree(f"no solutions of fiber degree {fiber_degree}")
    return Matrix.hstack(*basis)


def generate_sd_family(fiber_degree: int, base_degree: int, seed: int, count: int,
                       gauge: bool = True, basic: bool = False,
                       coefficient_range: int = DEFAULT_COEFFICIENT_RANGE) -> List[Triple]:
    """Random exact solutions of the self-duality system.

    Random integer coefficient vectors are projected orthogonally onto the
    null space of the constraint map, once per base monomial.
    """
    if base_degree < 0:
        raise ValueError("base_degree must be non-negative")
    basis = sd_family_basis(fiber_degree, gauge=gauge, basic=basic)
    projector = basis * (basis.T * basis).inv() * basis.T
    fiber_monomials = _monomials(fiber_degree)
    base_monomials = _monomials(base_degree)
    width = len(fiber_monomials)
    rng = np.random.default_rng(seed)

    family: List[Triple] = []
    for _ in range(count):
        terms: List[List[Tuple[Rational, Tuple[int, int, int, int]]]] = [[], [], []]
        for i, j in base_monomials:
            sample = Matrix([int(v) for v in rng.integers(-coefficient_range, coefficient_range + 1,
                                                           size=3 * width)])
            projected = projector * sample
            for index, coeff in enumerate(projected):
                if coeff == 0:
                    continue
                slot, offset = divmod(index, width)
                k, l = fiber_monomials[offset]
                terms[slot].append((coeff, (i, j, k, l)))
        family.append(tuple(Polynomial.from_terms(t) for t in terms))

    logger.log_generation(fiber_degree, base_degree, seed, count, basis.cols)
    return family


def perturb_sd_triple(triple: Triple, seed: int, max_attempts: int = 100) -> Tuple[Triple, Dict[str, Any]]:
    """Add one random monomial that breaks the self-duality system"""
    rng = np.random.default_rng(seed)
    for _ in range(max_attempts):
        slot = int(rng.integers(0, 3))
        k, l = _monomials(3)[int(rng.integers(3, 10))]
        i, j = _monomials(1)[int(rng.integers(0, 3))]
        coeff = int(rng.choice([-3, -2, -1, 1, 2, 3]))
        mono = Polynomial.from_terms([(coeff, (i, j, k, l))])
        candidate = list(triple)
        candidate[slot] = candidate[slot] + mono
        if not check_sd_system(*candidate).passed:
            return tuple(candidate), {"slot": "pqr"[slot], "coeff": coeff, "exps": [i, j, k, l]}
    raise InfeasibleDegree("could not find a violating perturbation")


# Standard S2 x S2

def _sphere_factor(axis: int, sign: int, margin: float) -> Callable[[np.ndarray], float]:
    def component(x: np.ndarray) -> float:
        s = math.sin(x[axis])
        if abs(s) < margin:
            raise ChartSingularity(f"theta{axis // 2 + 1}={x[axis]:.6g} is within the pole margin")
        return sign * s * s
    return component


def standard_s2xs2(x, chart_margin: float = DEFAULT_CHART_MARGIN) -> np.ndarray:
    """Gram matrix ``diag(1, sin^2 theta1, -1, -sin^2 theta2)``"""
    theta1, _, theta2, _ = as_array(x)
    s1, s2 = math.sin(theta1), math.sin(theta2)
    if abs(s1) < chart_margin or abs(s2) < chart_margin:
        raise ChartSingularity(f"point {tuple(as_array(x))} is within the pole margin")
    return np.diag([1.0, s1 * s1, -1.0, -s2 * s2])


def sphere_bounds(margin: float = SPHERE_PROBE_THETA_MARGIN) -> Bounds:
    return ((margin, 0.0, margin, 0.0), (math.pi - margin, 2 * math.pi, math.pi - margin, 2 * math.pi))


def product_sphere_metric(chart_margin: float = DEFAULT_CHART_MARGIN,
                          fd_step: float = DEFAULT_FD_STEP, metric_id: str = STANDARD_MODEL_NAME) -> NeutralMetric:
    domain = sphere_bounds()
    z = zero()
    g11 = Callback(_sphere_factor(0, 1, chart_margin), step=fd_step, domain=domain, label="sin^2(theta1)")
    g33 = Callback(_sphere_factor(2, -1, chart_margin), step=fd_step, domain=domain, label="-sin^2(theta2)")
    g = (
        (one(), z, z, z),
        (z, g11, z, z),
        (z, z, Polynomial.constant(-1), z),
        (z, z, z, g33),
    )
    return NeutralMetric(g=g, backend=PRODUCT_SPHERE, metric_id=metric_id, domain=domain)


def build_generic(g: Sequence[Sequence[ScalarField]], metric_id: str = "") -> NeutralMetric:
    matrix = tuple(tuple(row) for row in g)
    metric = NeutralMetric(g=matrix, backend=GENERIC, metric_id=metric_id)
    if not all(f.is_identically_zero() for f in metric.symmetry_residuals()):
        raise ValueError("generic metric is not symmetric")
    return metric


# Spec files

@dataclass
class MetricSpec:
    """A parsed metric spec file"""

    metric: NeutralMetric
    metric_id: str
    killing: Optional[Tuple[Polynomial, Polynomial]] = None


def parse_metric_spec(data: Any, default_id: str = "metric") -> MetricSpec:
    if not isinstance(data, dict):
        raise SpecParseError("metric spec must be a JSON object")
    backend = data.get("backend")
    metric_id = str(data.get("id", default_id))
    fd_step = data.get("fd_step", DEFAULT_FD_STEP)
    if not isinstance(fd_step, (int, float)) or isinstance(fd_step, bool) or fd_step <= 0:
        raise SpecParseError("fd_step must be a positive number")

    if backend == SPECIAL_FORM:
        try:
            p, q, r = (polynomial_from_json(data[key]) for key in ("p", "q", "r"))
        except KeyError as e:
            raise SpecParseError(f"special-form spec is missing field {e}") from e
        metric = build_special_form(p, q, r, metric_id=metric_id)
    elif backend == PRODUCT_SPHERE:
        metric = product_sphere_metric(fd_step=float(fd_step), metric_id=metric_id)
    elif backend == GENERIC:
        entries = data.get("g")
        if not isinstance(entries, list) or len(entries) != DIMENSION * DIMENSION:
            raise SpecParseError("generic spec needs 'g' as a list of 16 term lists")
        fields_ = [polynomial_from_json(terms) for terms in entries]
        rows = [fields_[DIMENSION * i:DIMENSION * (i + 1)] for i in range(DIMENSION)]
        try:
            metric = build_generic(rows, metric_id=metric_id)
        except ValueError as e:
            raise SpecParseError(str(e)) from e
    else:
        raise SpecParseError(f"unknown backend {backend!r}; expected one of {', '.join(BACKENDS)}")

    killing = None
    if "killing" in data:
        block = data["killing"]
        if not isinstance(block, dict) or "K0" not in block or "K1" not in block:
            raise SpecParseError("killing block needs 'K0' and 'K1' term lists")
        killing = (polynomial_from_json(block["K0"]), polynomial_from_json(block["K1"]))

    return MetricSpec(metric=metric, metric_id=metric_id, killing=killing)


def load_metric_spec(path: Union[str, Path]) -> MetricSpec:
    path = Path(path)
    try:
        if path.stat().st_size > MAX_SPEC_FILE_SIZE:
            raise SpecParseError(f"spec file '{path}' is too large")
        with open(path, "r", encoding="utf-8") as handle:
            data = json.load(handle)
    except OSError as e:
        raise SpecParseError(f"cannot read spec file '{path}': {e}") from e
    except UnicodeDecodeError as e:
        raise SpecParseError(f"spec file '{path}' is not valid UTF-8: {e}") from e
    except json.JSONDecodeError as e:
        raise SpecParseError(f"invalid JSON in '{path}': {e}") from e
    return parse_metric_spec(data, default_id=path.stem)


def special_form_spec(p: Polynomial, q: Polynomial, r: Polynomial, metric_id: str,
                      killing: Optional[Tuple[Polynomial, Polynomial]] = None) -> Dict[str, Any]:
    spec: Dict[str, Any] = {
        "backend": SPECIAL_FORM,
        "id": metric_id,
        "p": polynomial_to_json(p),
        "q": polynomial_to_json(q),
        "r": polynomial_to_json(r),
    }
    if killing is not None:
        spec["killing"] = {"K0": polynomial_to_json(killing[0]), "K1": polynomial_to_json(killing[1])}
    return spec


def dump_metric_spec(spec: Dict[str, Any], path: Union[str, Path]) -> None:
    with open(path, "w") as handle:
        json.dump(spec, handle, indent=2, sort_keys=True)
        handle.write("\n")
