#!/usr/bin/env python

"""Constants and default values for nsdt"""

import os
from pathlib import Path

# Application Information
APP_NAME = "nsdt"
APP_VERSION = "0.4.0"

# File and Directory Constants
DEFAULT_CONFIG_FILE = "config.yaml"
DEFAULT_LOG_FILE = "nsdt.log"
APP_DATA_DIR = Path(os.environ.get("NSDT_HOME", Path.home() / ".nsdt"))
LOGS_DIR = APP_DATA_DIR / "logs"
CONFIG_FILE_PATH = APP_DATA_DIR / DEFAULT_CONFIG_FILE
LOG_FILE_PATH = LOGS_DIR / DEFAULT_LOG_FILE

# Environment Variables
SEED_ENV_VAR = "NSDT_SEED"

# Chart
DIMENSION = 4
COORDINATE_NAMES = ("x0", "x1", "x2", "x3")
FIBER_AXES = (2, 3)

# Numerics
DEFAULT_FD_STEP = 1e-5
DEFAULT_CHART_MARGIN = 1e-6
DEFAULT_NULL_TOLERANCE = 1e-9
DEFAULT_INDETERMINATE_TOLERANCE = 1e-6
DEFAULT_ZERO_TOLERANCE = 1e-8
DEFAULT_PROBE_POINTS = 8
DEFAULT_SEED = 0
DEFAULT_ZETA_SAMPLES = 5
SPAN_RESIDUAL_TOLERANCE = 1e-9
ETA_MARGIN = 1e-9
CURVATURE_FD_TOLERANCE = 1e-4
CALLBACK_MEMO_SIZE = 512

# Sampling domains for numeric probes
POLYNOMIAL_PROBE_BOUNDS = (-1.0, 1.0)
SPHERE_PROBE_THETA_MARGIN = 0.3

# Geodesic tracer
DEFAULT_STEP_SIZE = 1e-3
DEFAULT_MAX_STEPS = 100_000
DEFAULT_CLOSURE_TOLERANCE = 1e-5
DEFAULT_ROTATION_THRESHOLD = 0.2
CLOSURE_DEPARTURE_FACTOR = 100
CLOSURE_REFINE_DIVISIONS = 64
DEFAULT_TRACE_STEPS = 10_000
STANDARD_MODEL_NAME = "std-s2xs2"

# Generator
DEFAULT_COEFFICIENT_RANGE = 3
DEFAULT_FAMILY_SEED = 42

# Command Exit Codes
SUCCESS_EXIT_CODE = 0
ERROR_EXIT_CODE = 1
USAGE_EXIT_CODE = 2

# File Size Limits
MAX_CONFIG_FILE_SIZE = 1024 * 1024  # 1MB
MAX_SPEC_FILE_SIZE = 1024 * 1024 * 16  # 16MB

# Check statuses
STATUS_PASS = "pass"
STATUS_FAIL = "fail"
STATUS_SKIPPED = "skipped"
STATUS_EXACT_ZERO = "exact-zero"

# Logging Configuration
LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
LOG_DATE_FORMAT = '%Y-%m-%d %H:%M:%S'

# Default Configuration
DEFAULT_CONFIG = {
    "numerics": {
        "fd_step": DEFAULT_FD_STEP,
        "chart_margin": DEFAULT_CHART_MARGIN,
        "null_tolerance": DEFAULT_NULL_TOLERANCE,
        "indeterminate_tolerance": DEFAULT_INDETERMINATE_TOLERANCE,
        "zero_tolerance": DEFAULT_ZERO_TOLERANCE,
        "probe_points": DEFAULT_PROBE_POINTS,
    },
    "tracer": {
        "step_size": DEFAULT_STEP_SIZE,
        "max_steps": DEFAULT_MAX_STEPS,
        "closure_tolerance": DEFAULT_CLOSURE_TOLERANCE,
        "rotate_charts": True,
        "rotation_threshold": DEFAULT_ROTATION_THRESHOLD,
    },
    "report": {
        "format": "text",
        "timings": True,
    },
    "seed": DEFAULT_SEED,
}
