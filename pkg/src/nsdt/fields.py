#!/usr/bin/env python

"""
Scalar fields on a four dimensional chart.

Two backends share one interface:

- ``Polynomial`` wraps a sympy ``Poly`` over QQ in the chart coordinates
  ``x0..x3``. Arithmetic and differentiation are exact, so every identity
  check on polynomial metrics is an exact zero test.
- ``Callback`` wraps a numeric function of a point. Derivatives are central
  finite differences and zero tests sample seeded probe points.

Mixing the two backends degrades to ``Callback``.
"""

import math
from dataclasses import dataclass
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
import sympy
from sympy import Poly, QQ, Rational

from .constants import (
    CALLBACK_MEMO_SIZE, COORDINATE_NAMES, DEFAULT_FD_STEP, DEFAULT_PROBE_POINTS, DEFAULT_SEED,
    DEFAULT_ZERO_TOLERANCE, DIMENSION, POLYNOMIAL_PROBE_BOUNDS,
)
from .errors import EvaluationError, SpecParseError

GENS = tuple(sympy.symbols(" ".join(COORDINATE_NAMES)))

Exponents = Tuple[int, int, int, int]
Number = Union[int, float, Rational]
Bounds = Tuple[Sequence[float], Sequence[float]]


@dataclass(frozen=True)
class ChartPoint:
    """A point of the chart, ``(x0, x1, x2, x3)``"""

    coords: Tuple[float, float, float, float]

    def __post_init__(self):
        if len(self.coords) != DIMENSION:
            raise ValueError(f"chart points have {DIMENSION} coordinates, got {len(self.coords)}")
        if not all(math.isfinite(float(c)) for c in self.coords):
            raise ValueError(f"chart point {self.coords} is not finite")

    @classmethod
    def of(cls, *values: float) -> "ChartPoint":
        if len(values) == 1 and isinstance(values[0], (list, tuple, np.ndarray)):
            values = tuple(values[0])
        return cls(tuple(float(v) for v in values))

    def as_array(self) -> np.ndarray:
        return np.array(self.coords, dtype=float)


def as_array(x: Union[ChartPoint, Sequence[float], np.ndarray]) -> np.ndarray:
    if isinstance(x, ChartPoint):
        return x.as_array()
    arr = np.asarray(x, dtype=float)
    if arr.shape != (DIMENSION,):
        raise ValueError(f"expected a {DIMENSION}-vector, got shape {arr.shape}")
    return arr


def probe_points(count: int = DEFAULT_PROBE_POINTS, seed: int = DEFAULT_SEED,
                 bounds: Optional[Bounds] = None) -> np.ndarray:
    """Seeded pseudo-random sample points, shape ``(count, 4)``"""
    if count < 1:
        raise ValueError("probe_points must be at least 1")
    rng = np.random.default_rng(seed)
    if bounds is None:
        low = np.full(DIMENSION, POLYNOMIAL_PROBE_BOUNDS[0])
        high = np.full(DIMENSION, POLYNOMIAL_PROBE_BOUNDS[1])
    else:
        low, high = np.asarray(bounds[0], dtype=float), np.asarray(bounds[1], dtype=float)
    return rng.uniform(low, high, size=(count, DIMENSION))


def _to_rational(value: Any) -> Rational:
    if isinstance(value, Rational):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not field coefficients")
    if isinstance(value, (int, np.integer)):
        return Rational(int(value))
    if isinstance(value, (float, np.floating)):
        return Rational(float(value))
    return Rational(value)


class ScalarField:
    """Common interface of the polynomial and callback backends"""

    step: float = DEFAULT_FD_STEP
    domain: Optional[Bounds] = None

    def evaluate(self, x) -> float:
        raise NotImplementedError

    def differentiate(self, axis: int) -> "ScalarField":
        raise NotImplementedError

    def is_identically_zero(self, tolerance: float = DEFAULT_ZERO_TOLERANCE,
                            probe_count: int = DEFAULT_PROBE_POINTS,
                            seed: int = DEFAULT_SEED) -> bool:
        raise NotImplementedError

    @property
    def is_exact(self) -> bool:
        return False

    def max_abs(self, points: np.ndarray) -> float:
        return max(abs(self.evaluate(p)) for p in points)

    def __call__(self, x) -> float:
        return self.evaluate(x)

    # Arithmetic

    def _combine(self, other: Any, op: Callable[[Any, Any], Any], symbol: str) -> "ScalarField":
        other = coerce(other)
        if isinstance(self, Polynomial) and isinstance(other, Polynomial):
            return Polynomial(op(self.poly, other.poly))
        left, right = self, other
        return Callback(
            lambda x: op(left.evaluate(x), right.evaluate(x)),
            step=min(left.step, right.step),
            domain=left.domain or right.domain,
            label=f"({_label(left)} {symbol} {_label(right)})",
        )

    def __add__(self, other):
        other = coerce(other)
        if is_zero_field(other):
            return self
        if is_zero_field(self):
            return other
        return self._combine(other, lambda a, b: a + b, "+")

    def __radd__(self, other):
        return coerce(other) + self

    def __sub__(self, other):
        other = coerce(other)
        if is_zero_field(other):
            return self
        if is_zero_field(self):
            return -other
        return self._combine(other, lambda a, b: a - b, "-")

    def __rsub__(self, other):
        return coerce(other) - self

    def __mul__(self, other):
        if _is_number(other):
            return self.scale(other)
        other = coerce(other)
        if is_zero_field(self) or is_zero_field(other):
            return zero()
        return self._combine(other, lambda a, b: a * b, "*")

    def __rmul__(self, other):
        if _is_number(other):
            return self.scale(other)
        return coerce(other) * self

    def __neg__(self):
        return self.scale(-1)

    def __truediv__(self, other):
        if _is_number(other):
            value = _to_rational(other)
            if value == 0:
                raise ZeroDivisionError("division of a field by zero")
            return self.scale(1 / value)
        other = coerce(other)
        if isinstance(other, Polynomial):
            if other.is_zero:
                raise ZeroDivisionError("division of a field by the zero polynomial")
            if other.is_constant:
                return self.scale(1 / other.constant_value)
        numerator, denominator = self, other
        return Callback(
            lambda x: numerator.evaluate(x) / denominator.evaluate(x),
            step=min(numerator.step, denominator.step),
            domain=numerator.domain or denominator.domain,
            label=f"({_label(numerator)} / {_label(denominator)})",
        )

    def scale(self, factor: Number) -> "ScalarField":
        raise NotImplementedError


class Polynomial(ScalarField):
    """Exact multivariate polynomial with rational coefficients"""

    def __init__(self, poly: Poly):
        if poly.gens != GENS:
            poly = Poly(poly.as_expr(), *GENS, domain=QQ)
        elif poly.get_domain() != QQ:
            poly = poly.set_domain(QQ)
        self.poly = poly
        self._float_terms: Optional[List[Tuple[float, Exponents]]] = None

    @classmethod
    def from_terms(cls, terms: Iterable[Tuple[Number, Sequence[int]]]) -> "Polynomial":
        rep: Dict[Exponents, Rational] = {}
        for coeff, exps in terms:
            key = tuple(int(e) for e in exps)
            if len(key) != DIMENSION or any(e < 0 for e in key):
                raise ValueError(f"invalid exponent tuple {exps}")
            rep[key] = rep.get(key, Rational(0)) + _to_rational(coeff)
        rep = {k: v for k, v in rep.items() if v != 0}
        if not rep:
            return zero()
        return cls(Poly.from_dict(rep, *GENS, domain=QQ))

    @classmethod
    def from_expr(cls, expr: Any) -> "Polynomial":
        return cls(Poly(sympy.sympify(expr), *GENS, domain=QQ))

    @classmethod
    def constant(cls, value: Number) -> "Polynomial":
        return cls(Poly(_to_rational(value), *GENS, domain=QQ))

    @classmethod
    def coordinate(cls, axis: int) -> "Polynomial":
        return cls(Poly(GENS[axis], *GENS, domain=QQ))

    @property
    def is_exact(self) -> bool:
        return True

    @property
    def is_zero(self) -> bool:
        return self.poly.is_zero

    @property
    def is_constant(self) -> bool:
        return self.poly.is_ground

    @property
    def constant_value(self) -> Rational:
        return Rational(self.poly.as_expr()) if self.is_constant else None

    def terms(self) -> List[Tuple[Rational, Exponents]]:
        """Nonzero terms sorted by exponent tuple, descending"""
        if self.is_zero:
            return []
        return sorted(((Rational(c), tuple(m)) for m, c in self.poly.terms()),
                      key=lambda t: t[1], reverse=True)

    def degree_in(self, axes: Sequence[int]) -> int:
        if self.is_zero:
            return -1
        return max(sum(m[a] for a in axes) for m, _ in self.poly.terms())

    def as_expr(self) -> sympy.Expr:
        return self.poly.as_expr()

    def evaluate(self, x) -> float:
        values = as_array(x)
        if self._float_terms is None:
            self._float_terms = [(float(c), tuple(m)) for m, c in self.poly.terms()] if not self.is_zero else []
        total = 0.0
        for coeff, exps in self._float_terms:
            term = coeff
            for value, e in zip(values, exps):
                if e:
                    term *= value ** e
            total += term
        return total

    def evaluate_exact(self, x: Sequence[Number]) -> Rational:
        values = [_to_rational(v) for v in x]
        return Rational(self.poly.as_expr().subs(dict(zip(GENS, values))))

    def differentiate(self, axis: int) -> "Polynomial":
        if axis not in range(DIMENSION):
            raise ValueError(f"axis must be in 0..{DIMENSION - 1}")
        if self.is_zero:
            return self
        return Polynomial(self.poly.diff(GENS[axis]))

    def is_identically_zero(self, tolerance: float = DEFAULT_ZERO_TOLERANCE,
                            probe_count: int = DEFAULT_PROBE_POINTS,
                            seed: int = DEFAULT_SEED) -> bool:
        return self.is_zero

    def equals(self, other: Any) -> bool:
        other = coerce(other)
        return isinstance(other, Polynomial) and (self.poly - other.poly).is_zero

    def scale(self, factor: Number) -> "Polynomial":
        return Polynomial(self.poly.mul_ground(_to_rational(factor)))

    def to_json(self) -> List[Dict[str, Any]]:
        return polynomial_to_json(self)

    def __repr__(self) -> str:
        return f"Polynomial({self.as_expr()})"


class Callback(ScalarField):
    """Numeric field backed by a function of a point"""

    def __init__(self, func: Callable[[np.ndarray], float], step: float = DEFAULT_FD_STEP,
                 domain: Optional[Bounds] = None, label: str = "callback"):
        if step <= 0:
            raise ValueError("finite-difference step must be positive")
        self.func = func
        self.step = step
        self.domain = domain
        self.label = label
        # shared subexpressions of derived fields are evaluated once per point
        self._memo: Dict[bytes, float] = {}

    def evaluate(self, x) -> float:
        point = as_array(x)
        key = point.tobytes()
        if key in self._memo:
            return self._memo[key]
        value = float(self.func(point))
        if not math.isfinite(value):
            raise EvaluationError(f"{self.label} is not finite at {tuple(point)}")
        if len(self._memo) >= CALLBACK_MEMO_SIZE:
            self._memo.clear()
        self._memo[key] = value
        return value

    def differentiate(self, axis: int) -> "Callback":
        if axis not in range(DIMENSION):
            raise ValueError(f"axis must be in 0..{DIMENSION - 1}")
        h = self.step
        offset = np.zeros(DIMENSION)
        offset[axis] = h
        parent = self
        return Callback(
            lambda x: (parent.evaluate(x + offset) - parent.evaluate(x - offset)) / (2 * h),
            step=h, domain=self.domain, label=f"d{axis}({self.label})",
        )

    def is_identically_zero(self, tolerance: float = DEFAULT_ZERO_TOLERANCE,
                            probe_count: int = DEFAULT_PROBE_POINTS,
                            seed: int = DEFAULT_SEED) -> bool:
        if tolerance < 0:
            raise ValueError("tolerance must be non-negative")
        points = probe_points(probe_count, seed, self.domain)
        return all(abs(self.evaluate(p)) <= tolerance for p in points)

    def scale(self, factor: Number) -> "Callback":
        value = float(factor)
        parent = self
        return Callback(lambda x: value * parent.evaluate(x), step=self.step,
                        domain=self.domain, label=f"{value}*{self.label}")

    def __repr__(self) -> str:
        return f"Callback({self.label}, h={self.step})"


def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float, Rational, np.integer, np.floating)) and not isinstance(value, bool)


def _label(field: ScalarField) -> str:
    return field.label if isinstance(field, Callback) else str(field.as_expr())


def coerce(value: Any) -> ScalarField:
    """Numbers become constant polynomials; fields pass through"""
    if isinstance(value, ScalarField):
        return value
    if _is_number(value):
        return Polynomial.constant(value)
    raise TypeError(f"cannot use {type(value).__name__} as a scalar field")


def zero() -> Polynomial:
    return Polynomial(Poly(0, *GENS, domain=QQ))


def one() -> Polynomial:
    return Polynomial.constant(1)


def coordinate(axis: int) -> Polynomial:
    return Polynomial.coordinate(axis)


def is_zero_field(field: ScalarField) -> bool:
    """Cheap structural zero test, exact fields only"""
    return isinstance(field, Polynomial) and field.is_zero


def evaluate(f: ScalarField, x) -> float:
    return f.evaluate(x)


def differentiate(f: ScalarField, axis: int) -> ScalarField:
    return f.differentiate(axis)


def is_identically_zero(f: ScalarField, tolerance: float = DEFAULT_ZERO_TOLERANCE,
                        probe_count: int = DEFAULT_PROBE_POINTS, seed: int = DEFAULT_SEED) -> bool:
    return f.is_identically_zero(tolerance, probe_count, seed)


def all_zero(fields: Iterable[ScalarField], tolerance: float = DEFAULT_ZERO_TOLERANCE,
             probe_count: int = DEFAULT_PROBE_POINTS, seed: int = DEFAULT_SEED) -> bool:
    return all(f.is_identically_zero(tolerance, probe_count, seed) for f in fields)


def summarize(fields: Iterable[ScalarField], probe_count: int = DEFAULT_PROBE_POINTS,
              seed: int = DEFAULT_SEED) -> Union[str, float]:
    """``"exact-zero"`` for vanishing polynomials, else max |value| over probes"""
    fields = list(fields)
    if all(is_zero_field(f) for f in fields):
        return "exact-zero"
    worst = 0.0
    for f in fields:
        if is_zero_field(f):
            continue
        points = probe_points(probe_count, seed, f.domain)
        worst = max(worst, f.max_abs(points))
    return worst


# Vector fields are 4-tuples of chart components

VectorField = Tuple[ScalarField, ScalarField, ScalarField, ScalarField]


def coordinate_vector(axis: int) -> VectorField:
    return tuple(one() if k == axis else zero() for k in range(DIMENSION))


def apply_vector(v: VectorField, f: ScalarField) -> ScalarField:
    """Directional derivative ``v(f)``"""
    result: ScalarField = zero()
    for k, component in enumerate(v):
        if is_zero_field(component):
            continue
        derivative = f.differentiate(k)
        if is_zero_field(derivative):
            continue
        result = result + component * derivative
    return result


def lie_bracket(v: VectorField, w: VectorField) -> VectorField:
    return tuple(apply_vector(v, w[k]) - apply_vector(w, v[k]) for k in range(DIMENSION))


def combine_vectors(coefficients: Sequence[ScalarField], vectors: Sequence[VectorField]) -> VectorField:
    """``sum_i c_i v_i``"""
    result: List[ScalarField] = [zero() for _ in range(DIMENSION)]
    for c, v in zip(coefficients, vectors):
        if is_zero_field(coerce(c)):
            continue
        for k in range(DIMENSION):
            if not is_zero_field(v[k]):
                result[k] = result[k] + coerce(c) * v[k]
    return tuple(result)


def vector_difference(v: VectorField, w: VectorField) -> VectorField:
    return tuple(a - b for a, b in zip(v, w))


def evaluate_vector(v: VectorField, x) -> np.ndarray:
    return np.array([c.evaluate(x) for c in v])


# Serialization

def parse_coefficient(text: Any) -> Rational:
    if isinstance(text, bool):
        raise SpecParseError(f"invalid coefficient {text!r}")
    if isinstance(text, int):
        return Rational(text)
    if not isinstance(text, str):
        raise SpecParseError(f"coefficient must be a 'num/den' string, got {text!r}")
    parts = text.strip().split("/")
    try:
        if len(parts) == 1:
            return Rational(int(parts[0]))
        if len(parts) == 2:
            den = int(parts[1])
            if den == 0:
                raise SpecParseError(f"zero denominator in coefficient {text!r}")
            return Rational(int(parts[0]), den)
    except ValueError as e:
        raise SpecParseError(f"invalid coefficient {text!r}") from e
    raise SpecParseError(f"invalid coefficient {text!r}")


def polynomial_from_json(terms: Any) -> Polynomial:
    if not isinstance(terms, list):
        raise SpecParseError("a polynomial is a list of terms")
    parsed = []
    for term in terms:
        if not isinstance(term, dict) or "coeff" not in term or "exps" not in term:
            raise SpecParseError(f"malformed term {term!r}")
        exps = term["exps"]
        if (not isinstance(exps, list) or len(exps) != DIMENSION
                or not all(isinstance(e, int) and not isinstance(e, bool) and e >= 0 for e in exps)):
            raise SpecParseError(f"exponents must be {DIMENSION} naturals, got {exps!r}")
        parsed.append((parse_coefficient(term["coeff"]), exps))
    return Polynomial.from_terms(parsed)


def polynomial_to_json(f: Polynomial) -> List[Dict[str, Any]]:
    return [{"coeff": f"{c.p}/{c.q}", "exps": list(exps)} for c, exps in f.terms()]
