#!/usr/bin/env python

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence

from .config import default_config
from .connection import components_for, dual_path_residuals, verify_structural_identities
from .constants import (
    STATUS_EXACT_ZERO, STATUS_FAIL, STATUS_PASS, STATUS_SKIPPED,
)
from .curvature import spin_curvature_plus, weyl_decomposition
from .errors import DegenerateVertical, NotSelfDual, NsdtError, ZeroEta
from .fields import Polynomial, ScalarField, is_zero_field, polynomial_to_json, probe_points
from .killing import (
    KillingCandidate, NonExistent, canonical_connection, check_conformal_killing,
    check_killing_implications, check_sd_foliation,
)
from .logger import logger
from .metric import (
    GENERIC, PRODUCT_SPHERE, SPECIAL_FORM, MetricSpec, NeutralMetric, check_sd_system, check_signature,
    load_metric_spec,
)
from .tetrad import construct_foliation_tetrad, tetrad_for, validate_tetrad
from .twistor import (
    build_twistor_lift, check_basic, check_lax_integrability, induced_projective_connection,
    reduction_identity,
)

CHECK_ORDER = (
    "signature", "tetrad", "structural", "components", "sd_system", "sd",
    "integrable", "basic", "basic_curvature", "sd_foliation", "reduction", "killing",
)


@dataclass
class CheckResult:
    name: str
    status: str
    reason: str = ""
    residuals: Dict[str, Any] = field(default_factory=dict)
    failing: List[str] = field(default_factory=list)
    seconds: Optional[float] = None

    @property
    def ok(self) -> bool:
        return self.status in (STATUS_PASS, STATUS_EXACT_ZERO, STATUS_SKIPPED)

    def to_dict(self, timings: bool = True) -> Dict[str, Any]:
        data: Dict[str, Any] = {"status": self.status}
        if self.reason:
            data["reason"] = self.reason
        if self.residuals:
            data["residuals"] = self.residuals
        if self.failing:
            data["failing"] = self.failing
        if timings and self.seconds is not None:
            data["seconds"] = round(self.seconds, 6)
        return data


@dataclass
class CheckSuiteReport:
    metric_id: str
    backend: str
    seed: int
    probes: int
    results: Dict[str, CheckResult] = field(default_factory=dict)
    killing: Optional[Dict[str, Any]] = None

    @property
    def passed(self) -> bool:
        return all(result.ok for result in self.results.values())

    def status(self, name: str) -> str:
        return self.results[name].status

    def to_dict(self, timings: bool = True) -> Dict[str, Any]:
        data = {
            "metric_id": self.metric_id,
            "backend": self.backend,
            "seed": self.seed,
            "probes": self.probes,
            "passed": self.passed,
            "checks": {name: self.results[name].to_dict(timings) for name in CHECK_ORDER if name in self.results},
        }
        if self.killing is not None:
            data["killing"] = self.killing
        return data

    def to_json(self, timings: bool = True) -> str:
        return json.dumps(self.to_dict(timings), indent=2, sort_keys=True)


def serialize_field(f: ScalarField) -> Any:
    return polynomial_to_json(f) if isinstance(f, Polynomial) else repr(f)


class CheckSuite:
    """Runs the check pipeline on a metric spec"""

    def __init__(self, config: Optional[Dict[str, Any]] = None, seed: Optional[int] = None,
                 probes: Optional[int] = None, tolerance: Optional[float] = None):
        self.config = config or default_config()
        numerics = self.config["numerics"]
        self.seed = int(self.config.get("seed", 0) if seed is None else seed)
        self.probes = int(probes or numerics["probe_points"])
        self.tolerance = float(numerics["zero_tolerance"] if tolerance is None else tolerance)
        if self.probes < 1:
            raise ValueError("probe count must be at least 1")
        if self.tolerance < 0:
            raise ValueError("tolerance must be non-negative")

    # Residual evaluation

    def _is_zero(self, f: ScalarField) -> bool:
        if isinstance(f, Polynomial):
            return f.is_zero
        points = probe_points(self.probes, self.seed, f.domain)
        return all(abs(f.evaluate(x)) <= self.tolerance for x in points)

    def _summary(self, f: ScalarField) -> Any:
        if is_zero_field(f):
            return STATUS_EXACT_ZERO
        points = probe_points(self.probes, self.seed, f.domain)
        return float(f"{f.max_abs(points):.6e}")

    def _judge(self, name: str, residuals: Dict[str, ScalarField]) -> CheckResult:
        failing = [key for key, f in residuals.items() if not self._is_zero(f)]
        if failing:
            status = STATUS_FAIL
        elif all(is_zero_field(f) for f in residuals.values()):
            status = STATUS_EXACT_ZERO
        else:
            status = STATUS_PASS
        summary = {key: self._summary(f) for key, f in residuals.items()}
        return CheckResult(name, status, residuals=summary, failing=failing)

    # Pipeline

    def _run(self, report: CheckSuiteReport, name: str, check: Callable[[], CheckResult]) -> CheckResult:
        started = time.perf_counter()
        try:
            result = check()
        except NsdtError as e:
            result = CheckResult(name, STATUS_FAIL, reason=f"{type(e).__name__}: {e}")
        result.seconds = time.perf_counter() - started
        report.results[name] = result
        logger.log_check(report.metric_id, name, result.status, result.reason)
        return result

    @staticmethod
    def _skip(report: CheckSuiteReport, name: str, reason: str) -> None:
        report.results[name] = CheckResult(name, STATUS_SKIPPED, reason=reason)
        logger.log_check(report.metric_id, name, STATUS_SKIPPED, reason)

    def run(self, spec: MetricSpec) -> CheckSuiteReport:
        m = spec.metric
        report = CheckSuiteReport(spec.metric_id, m.backend, self.seed, self.probes)
        points = m.probes(self.probes, self.seed)

        def signature() -> CheckResult:
            if check_signature(m, points):
                return CheckResult("signature", STATUS_PASS)
            return CheckResult("signature", STATUS_FAIL, reason="eigenvalue signs differ from (+,+,-,-)")

        self._run(report, "signature", signature)

        why = ""
        try:
            tetrad = construct_foliation_tetrad(m)
        except DegenerateVertical as e:
            tetrad, why = None, str(e)
        foliated = tetrad is not None

        def tetrad_check() -> CheckResult:
            t = tetrad or tetrad_for(m)
            validation = validate_tetrad(t, m, self.probes, self.seed)
            result = CheckResult("tetrad", STATUS_EXACT_ZERO if validation.exact_zero and validation.oriented
                                 else STATUS_PASS if validation.valid else STATUS_FAIL,
                                 residuals={"max": validation.max_residual, "oriented": validation.oriented})
            if validation.offending:
                result.failing = ["g({}, {})".format(*validation.offending)]
            return result

        if foliated or m.backend != GENERIC:
            self._run(report, "tetrad", tetrad_check)
        else:
            report.results["tetrad"] = CheckResult("tetrad", STATUS_FAIL, reason=why)

        # Without a foliation chart only the curvature oracle applies
        if not foliated:
            reason = f"no alpha-surface foliation chart ({why})"
            self._skip(report, "structural", reason)
            self._skip(report, "components", reason)
            self._skip(report, "sd_system", reason)
            if m.backend == PRODUCT_SPHERE:
                self._run(report, "sd", lambda: self._sd_check(m, None))
            else:
                self._skip(report, "sd", reason)
            for name in ("integrable", "basic", "basic_curvature", "sd_foliation", "reduction", "killing"):
                self._skip(report, name, reason)
            return report

        c = components_for(m, tetrad)
        lift = build_twistor_lift(c, tetrad, domain=m.probe_bounds())

        if m.backend == SPECIAL_FORM:
            self._run(report, "components", lambda: self._judge("components", {
                f"{name}({frame})": value
                for name, form in dual_path_residuals(m, tetrad).items()
                for frame, value in zip(("e0", "e1", "p0", "p1"), form)
            }))
            self._run(report, "sd_system", lambda: self._judge("sd_system", check_sd_system(*m.special).residuals))
        else:
            self._skip(report, "components", "closed component formulas need a special-form metric")
            self._skip(report, "sd_system", "the self-duality PDE system needs a special-form metric")

        sd = self._run(report, "sd", lambda: self._sd_check(m, tetrad))
        sd_ok = sd.ok

        def structural() -> CheckResult:
            groups = verify_structural_identities(m, tetrad, c, self_dual=sd_ok).groups
            return self._judge("structural", {
                f"{group}:{key}": value for group, residuals in groups.items() for key, value in residuals.items()
            })

        self._run(report, "structural", structural)

        def integrable() -> CheckResult:
            lax = check_lax_integrability(lift, probe_count=3, seed=self.seed)
            result = self._judge("integrable", lax.coefficient_residuals)
            if lax.bracket is not None:
                result.residuals["bracket"] = float(f"{lax.bracket.max_residual:.6e}")
                if not lax.bracket.passed:
                    result.status = STATUS_FAIL
                    result.failing.append("bracket")
            return result

        self._run(report, "integrable", integrable)

        if not sd_ok:
            for name in ("basic", "basic_curvature", "reduction"):
                self._skip(report, name, "requires a self-dual metric (sd failed)")
            basic_ok = False
        else:
            def basic() -> CheckResult:
                try:
                    b = check_basic(lift)
                except NotSelfDual as e:
                    return CheckResult("basic", STATUS_FAIL, reason=str(e))
                return self._judge("basic", {**b.q_residuals, **b.component_residuals})

            basic_ok = self._run(report, "basic", basic).ok
            self._run(report, "basic_curvature", lambda: self._judge(
                "basic_curvature", spin_curvature_plus(m, tetrad, c).interior_residuals()))
            if basic_ok:
                def reduction() -> CheckResult:
                    conn = induced_projective_connection(c, tetrad, domain=m.probe_bounds())
                    r = reduction_identity(lift, conn)
                    return self._judge("reduction", {**r.fiber_residuals, **r.base_residuals})

                self._run(report, "reduction", reduction)
            else:
                self._skip(report, "reduction", "requires a basic foliation (basic failed)")

        def sd_foliation() -> CheckResult:
            tau = canonical_connection(c)
            if isinstance(tau, NonExistent):
                result = self._judge("sd_foliation", tau.residuals)
                result.status, result.reason = STATUS_FAIL, "no canonical connection"
                return result
            r = check_sd_foliation(m, c, tau, tetrad)
            return self._judge("sd_foliation", {**r.component_residuals, **r.curvature_residuals})

        self._run(report, "sd_foliation", sd_foliation)

        if spec.killing is None:
            self._skip(report, "killing", "spec carries no Killing candidate")
        else:
            candidate = KillingCandidate(*spec.killing)
            self._run(report, "killing", lambda: self._killing_check(report, m, candidate, tetrad, c, sd_ok))
        return report

    def _sd_check(self, m: NeutralMetric, tetrad) -> CheckResult:
        weyl = weyl_decomposition(m, tetrad, self.probes, self.seed)
        status = STATUS_EXACT_ZERO if weyl.asd_norm == STATUS_EXACT_ZERO else STATUS_PASS if weyl.self_dual else STATUS_FAIL
        result = CheckResult("sd", status, residuals={"asd_norm": weyl.asd_norm})
        if status == STATUS_FAIL:
            result.failing = ["W-"]
        return result

    def _killing_check(self, report: CheckSuiteReport, m: NeutralMetric, candidate: KillingCandidate,
                       tetrad, c, sd_ok: bool) -> CheckResult:
        conformal = check_conformal_killing(m, candidate, tetrad, c)
        result = self._judge("killing", {
            **conformal.component_residuals,
            **{f"tensor:{key}": value for key, value in conformal.tensor_residuals.items()},
            **conformal.eta_residuals,
        })
        report.killing = {"killing": result.ok, "eta": serialize_field(conformal.eta), "dw_basic": False}
        if not result.ok:
            return result
        if not sd_ok:
            result.reason = "reduction chain skipped: metric is not self-dual"
            return result
        try:
            chain = check_killing_implications(m, candidate, tetrad, self.probes, self.seed)
        except ZeroEta:
            result.reason = "eta vanishes identically; reduction chain unavailable"
            return result
        except NsdtError as e:
            result.reason = str(e)
            return result
        implications = self._judge("killing", {**chain.derivative_residuals, **chain.consistency_residuals})
        result.residuals.update(implications.residuals)
        result.failing.extend(implications.failing)
        if implications.status == STATUS_FAIL:
            result.status = STATUS_FAIL
        report.killing["dw_basic"] = chain.dw_basic
        if not chain.dw_basic:
            result.status = STATUS_FAIL
            result.failing.append("dw_basic")
        return result


def failing_checks(report: CheckSuiteReport) -> Iterable[str]:
    return [name for name in CHECK_ORDER if name in report.results and not report.results[name].ok]


def _check_file(path: str, config: Dict[str, Any], seed: Optional[int], probes: Optional[int],
                tolerance: Optional[float]) -> CheckSuiteReport:
    return CheckSuite(config, seed=seed, probes=probes, tolerance=tolerance).run(load_metric_spec(path))


def run_batch(paths: Sequence[str], config: Optional[Dict[str, Any]] = None, seed: Optional[int] = None,
              probes: Optional[int] = None, tolerance: Optional[float] = None,
              jobs: int = 1) -> List[CheckSuiteReport]:
    """Check several spec files, one worker process per spec when jobs > 1.

    Reports come back in the order of ``paths``. The first spec that fails to
    parse raises its SpecParseError here.
    """
    if jobs < 1:
        raise ValueError("jobs must be at least 1")
    config = config or default_config()
    if jobs == 1 or len(paths) < 2:
        return [_check_file(str(path), config, seed, probes, tolerance) for path in paths]

    with ProcessPoolExecutor(max_workers=min(jobs, len(paths))) as pool:
        futures = [pool.submit(_check_file, str(path), config, seed, probes, tolerance) for path in paths]
        reports = [future.result() for future in futures]
    logger.debug(f"Batch check of {len(paths)} specs on {jobs} workers")
    return reports
