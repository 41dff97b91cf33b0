#!/usr/bin/env python

"""Exception hierarchy for nsdt"""

from typing import Any, Dict, Optional


class NsdtError(Exception):
    """Base class for every error raised by the library"""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.details = details or {}


class EvaluationError(NsdtError):
    """A numeric field produced a non-finite value"""


class InfeasibleDegree(NsdtError):
    """The constraint null space for the requested degrees is trivial"""


class ChartSingularity(NsdtError):
    """A point is too close to a coordinate singularity of the chart"""


class DegenerateVertical(NsdtError):
    """The vertical distribution is not a non-degenerate totally null plane field"""


class IndecomposableInput(NsdtError):
    """Two tangent vectors do not span a plane"""


class IndeterminateClassification(NsdtError):
    """Nullity of a plane cannot be decided within tolerance"""


class SingularMetric(NsdtError):
    """The metric cannot be inverted"""


class PatternViolation(NsdtError):
    """A connection matrix does not have the so(2,2) pattern"""


class NotSelfDual(NsdtError):
    """An operation requiring self-duality was called on a non self-dual metric"""


class NotBasic(NsdtError):
    """An operation requiring a basic foliation was called on a non basic one"""


class InconsistentEta(NsdtError):
    """The two vertical derivatives defining the conformal factor disagree"""


class ZeroEta(NsdtError):
    """The conformal factor vanishes identically"""


class StepLimitExceeded(NsdtError):
    """The integrator hit its step budget"""


class SpecParseError(NsdtError):
    """A metric spec file could not be parsed"""


class NotConformalKilling(NsdtError):
    """The vector field is not conformal Killing for the metric"""