#!/usr/bin/env python

"""
Canonical connection, self-dual foliations and vertical conformal Killing fields.

The alpha-distribution ``span(p0, p1)`` carries a line bundle whose canonical
connection is the 1-form ``tau`` with

    tau(e_A) = -(a + d)(e_A) / 2,    tau(p_A) = -e(e_A) - (a + d)(p_A) / 2,

available exactly when ``e(p0) = e(p1) = 0``. The foliation is self-dual when
``d tau`` vanishes on the beta-type pairings. A vertical field
``K = K0 p0 + K1 p1`` is conformal Killing when ``L_K g = eta g``, and then
``eta = p0 K0 = p1 K1``.
"""

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from sympy import Rational

from .connection import (
    PARTNER, PARTNER_SIGN, ConnectionComponents, OneForm, components_for,
    form_add, form_on, frame_coefficients,
)
from .constants import DEFAULT_PROBE_POINTS, DEFAULT_SEED, DIMENSION, ETA_MARGIN
from .errors import InconsistentEta, NotConformalKilling, NotSelfDual, ZeroEta
from .fields import (
    ScalarField, VectorField, apply_vector, combine_vectors, lie_bracket,
    probe_points, summarize, zero,
)
from .logger import logger
from .metric import NeutralMetric
from .tetrad import FRAME_NAMES, NullTetrad, construct_foliation_tetrad
from .twistor import BasicReport, build_twistor_lift, check_basic, lax_coefficient_residuals

HALF = Rational(1, 2)


def _all_zero(residuals: Dict[str, ScalarField]) -> bool:
    return all(f.is_identically_zero() for f in residuals.values())


# Canonical connection

@dataclass(frozen=True)
class CanonicalConnection:
    tau: OneForm

    def on(self, coefficients) -> ScalarField:
        return form_on(self.tau, coefficients)


@dataclass(frozen=True)
class NonExistent:
    """No canonical connection; ``residuals`` holds the offending ``e(p_A)``"""

    residuals: Dict[str, ScalarField]


def canonical_connection(c: ConnectionComponents):
    obstruction = {"e(p0)": c.e[2], "e(p1)": c.e[3]}
    if not _all_zero(obstruction):
        return NonExistent(obstruction)
    trace = form_add(c.a, c.d)
    tau = (
        -trace[0] * HALF,
        -trace[1] * HALF,
        -c.e[0] - trace[2] * HALF,
        -c.e[1] - trace[3] * HALF,
    )
    return CanonicalConnection(tau)


def canonical_connection_residuals(c: ConnectionComponents, tau: CanonicalConnection) -> Dict[str, ScalarField]:
    """Defining equations of the canonical connection evaluated on a candidate ``tau``"""
    shifted = tuple(t + s * HALF for t, s in zip(tau.tau, form_add(c.a, c.d)))
    return {
        "(a+d)/2+tau (e0)": shifted[0],
        "(a+d)/2+tau (e1)": shifted[1],
        "e(e0)+((a+d)/2+tau)(p0)": c.e[0] + shifted[2],
        "e(e1)+((a+d)/2+tau)(p1)": c.e[1] + shifted[3],
        "e(p0)": c.e[2],
        "e(p1)": c.e[3],
    }


@dataclass
class SdFoliationReport:
    component_residuals: Dict[str, ScalarField]
    curvature_residuals: Dict[str, ScalarField]

    @property
    def component_passed(self) -> bool:
        return _all_zero(self.component_residuals)

    @property
    def curvature_passed(self) -> bool:
        return _all_zero(self.curvature_residuals)

    @property
    def passed(self) -> bool:
        return self.component_passed and self.curvature_passed

    @property
    def agree(self) -> bool:
        return self.component_passed == self.curvature_passed

    def summary(self) -> Dict[str, object]:
        merged = {**self.component_residuals, **self.curvature_residuals}
        return {name: summarize([f]) for name, f in merged.items()}


def _exterior_derivative(m: NeutralMetric, t: NullTetrad, tau: CanonicalConnection,
                         i: int, j: int) -> ScalarField:
    """``d tau(F_i, F_j) = F_i tau(F_j) - F_j tau(F_i) - tau([F_i, F_j])``"""
    frames = t.frames
    bracket = frame_coefficients(m, t, lie_bracket(frames[i], frames[j]))
    return apply_vector(frames[i], tau.tau[j]) - apply_vector(frames[j], tau.tau[i]) - tau.on(bracket)


def check_sd_foliation(m: NeutralMetric, c: ConnectionComponents, tau: CanonicalConnection,
                       t: Optional[NullTetrad] = None) -> SdFoliationReport:
    t = t or construct_foliation_tetrad(m)
    trace = form_add(c.a, c.d)
    components = {
        "p0 (a+d)(e0)": apply_vector(t.p0, trace[0]),
        "p1 (a+d)(e1)": apply_vector(t.p1, trace[1]),
        "p0 (a+d)(e1) + p1 (a+d)(e0)": apply_vector(t.p0, trace[1]) + apply_vector(t.p1, trace[0]),
    }
    curvature = {
        "dtau(e0,p0)": _exterior_derivative(m, t, tau, 0, 2),
        "dtau(e1,p1)": _exterior_derivative(m, t, tau, 1, 3),
        "dtau(e0,p1)+dtau(e1,p0)": _exterior_derivative(m, t, tau, 0, 3) + _exterior_derivative(m, t, tau, 1, 2),
    }
    return SdFoliationReport(components, curvature)


# Conformal Killing fields

@dataclass(frozen=True)
class KillingCandidate:
    """Vertical field ``K = k0 p0 + k1 p1``; ``eta`` is optional and only cross-checked"""

    k0: ScalarField
    k1: ScalarField
    eta: Optional[ScalarField] = None

    def vector(self, t: NullTetrad) -> VectorField:
        return combine_vectors((self.k0, self.k1), (t.p0, t.p1))


def _gram_entry(a: int, b: int) -> int:
    return PARTNER_SIGN[a] if PARTNER[a] == b else 0


def _pair_label(a: int, b: int) -> str:
    return f"L({FRAME_NAMES[a]},{FRAME_NAMES[b]})"


FRAME_PAIRS: Tuple[Tuple[int, int], ...] = tuple((a, b) for a in range(DIMENSION) for b in range(a, DIMENSION))


def _covariant_pairings(c: ConnectionComponents, t: NullTetrad, k: KillingCandidate) -> List[List[ScalarField]]:
    """``g(nabla_{F_a} K, F_b)`` for all frame pairs"""
    rows = []
    for a in range(DIMENSION):
        frame = t.frames[a]
        big_a = apply_vector(frame, k.k0) - k.k0 * c.d[a] + k.k1 * c.b[a]
        big_b = apply_vector(frame, k.k1) + k.k0 * c.c[a] - k.k1 * c.a[a]
        rows.append([big_b, -big_a, -(k.k1 * c.e[a]), k.k0 * c.e[a]])
    return rows


def component_lie_derivative(c: ConnectionComponents, t: NullTetrad,
                             k: KillingCandidate) -> Dict[Tuple[int, int], ScalarField]:
    """``(L_K g)(F_a, F_b)`` from the connection components"""
    pairing = _covariant_pairings(c, t, k)
    return {(a, b): pairing[a][b] + pairing[b][a] for a, b in FRAME_PAIRS}


def tensor_lie_derivative(m: NeutralMetric, t: NullTetrad,
                          k: KillingCandidate) -> Dict[Tuple[int, int], ScalarField]:
    """``(L_K g)(F_a, F_b)`` from the coordinate formula"""
    field_k = k.vector(t)
    lie = [[zero() for _ in range(DIMENSION)] for _ in range(DIMENSION)]
    for i in range(DIMENSION):
        for j in range(i, DIMENSION):
            value = apply_vector(field_k, m[i, j])
            for l in range(DIMENSION):
                value = value + m[l, j] * field_k[l].differentiate(i) + m[i, l] * field_k[l].differentiate(j)
            lie[i][j] = lie[j][i] = value
    result = {}
    for a, b in FRAME_PAIRS:
        fa, fb = t.frames[a], t.frames[b]
        total: ScalarField = zero()
        for i in range(DIMENSION):
            for j in range(DIMENSION):
                total = total + fa[i] * fb[j] * lie[i][j]
        result[a, b] = total
    return result


@dataclass
class ConformalKillingReport:
    eta: ScalarField
    eta_fit: ScalarField
    component_residuals: Dict[str, ScalarField]
    tensor_residuals: Dict[str, ScalarField]
    eta_residuals: Dict[str, ScalarField]

    @property
    def passed(self) -> bool:
        return all(_all_zero(group) for group in (self.component_residuals, self.tensor_residuals, self.eta_residuals))

    @property
    def killing(self) -> bool:
        return self.passed and self.eta.is_identically_zero()

    def failing(self) -> List[str]:
        merged = {**self.component_residuals, **self.tensor_residuals, **self.eta_residuals}
        return [name for name, f in merged.items() if not f.is_identically_zero()]

    def summary(self) -> Dict[str, object]:
        return {
            "component": summarize(self.component_residuals.values()),
            "tensor": summarize(self.tensor_residuals.values()),
            "eta": summarize(self.eta_residuals.values()),
        }


def check_conformal_killing(m: NeutralMetric, k: KillingCandidate, t: Optional[NullTetrad] = None,
                            c: Optional[ConnectionComponents] = None) -> ConformalKillingReport:
    t = t or construct_foliation_tetrad(m)
    c = c or components_for(m, t)
    eta = apply_vector(t.p0, k.k0)
    if not (eta - apply_vector(t.p1, k.k1)).is_identically_zero():
        raise InconsistentEta("p0 K0 and p1 K1 differ", {"p0K0": summarize([eta])})

    component = component_lie_derivative(c, t, k)
    tensor = tensor_lie_derivative(m, t, k)
    eta_fit = tensor[0, 3]
    component_residuals = {_pair_label(a, b): value - eta * _gram_entry(a, b) for (a, b), value in component.items()}
    tensor_residuals = {_pair_label(a, b): value - eta_fit * _gram_entry(a, b) for (a, b), value in tensor.items()}
    eta_residuals = {"eta_fit-p0K0": eta_fit - eta}
    if k.eta is not None:
        eta_residuals["eta-p0K0"] = k.eta - eta
    logger.debug(f"Conformal Killing check: eta={summarize([eta])}")
    return ConformalKillingReport(eta, eta_fit, component_residuals, tensor_residuals, eta_residuals)


@dataclass
class KillingImplicationsReport:
    eta: ScalarField
    derivative_residuals: Dict[str, ScalarField]
    consistency_residuals: Dict[str, ScalarField]
    eta_nonvanishing: bool
    basic: BasicReport

    @property
    def implications_hold(self) -> bool:
        return _all_zero(self.derivative_residuals) and _all_zero(self.consistency_residuals)

    @property
    def dw_basic(self) -> bool:
        return self.basic.passed

    @property
    def passed(self) -> bool:
        return self.implications_hold and self.dw_basic

    def summary(self) -> Dict[str, object]:
        merged = {**self.derivative_residuals, **self.consistency_residuals}
        return {name: summarize([f]) for name, f in merged.items()}


def check_killing_implications(m: NeutralMetric, k: KillingCandidate, t: Optional[NullTetrad] = None,
                               probe_count: int = DEFAULT_PROBE_POINTS,
                               seed: int = DEFAULT_SEED) -> KillingImplicationsReport:
    """Consequences of a vertical conformal Killing field on a self-dual metric, ending in the basic test"""
    t = t or construct_foliation_tetrad(m)
    c = components_for(m, t)
    lift = build_twistor_lift(c, t, domain=m.probe_bounds())
    if not _all_zero(lax_coefficient_residuals(lift)):
        raise NotSelfDual("the metric is not self-dual")
    report = check_conformal_killing(m, k, t, c)
    if not report.passed:
        raise NotConformalKilling(f"K is not conformal Killing: {', '.join(report.failing())}")
    eta = report.eta
    if eta.is_identically_zero():
        raise ZeroEta("eta vanishes identically")
    points = probe_points(probe_count, seed, m.probe_bounds())
    eta_nonvanishing = all(abs(eta.evaluate(x)) > ETA_MARGIN for x in points)

    def p0(f: ScalarField) -> ScalarField:
        return apply_vector(t.p0, f)

    def p1(f: ScalarField) -> ScalarField:
        return apply_vector(t.p1, f)

    derivatives = {
        "p0 a1 + p1 a0": p0(c.a[1]) + p1(c.a[0]),
        "p0 d1 + p1 d0": p0(c.d[1]) + p1(c.d[0]),
        "p0 a0": p0(c.a[0]),
        "p1 d1": p1(c.d[1]),
        "p0 b1": p0(c.b[1]),
        "p1 b0": p1(c.b[0]),
    }
    e0_eta = apply_vector(t.e0, eta)
    e1_eta = apply_vector(t.e1, eta)
    consistency = {
        "e0 eta (p1 row)": e0_eta - (-p1(c.c[0]) * k.k0 + p1(c.a[0]) * k.k1),
        "e1 eta (p0 row)": e1_eta - (p0(c.d[1]) * k.k0 - p0(c.b[1]) * k.k1),
        "e0 eta (p0 row)": e0_eta - ((p0(c.d[0]) + p0(c.c[1])) * k.k0 - (p0(c.b[0]) + p0(c.a[1])) * k.k1),
        "e1 eta (p1 row)": e1_eta - (-(p1(c.d[0]) + p1(c.c[1])) * k.k0 + (p1(c.b[0]) + p1(c.a[1])) * k.k1),
    }
    if not eta_nonvanishing:
        logger.warning("eta vanishes near a probe point; the reduction hypothesis is only partly met")
    return KillingImplicationsReport(eta, derivatives, consistency, eta_nonvanishing, check_basic(lift))
