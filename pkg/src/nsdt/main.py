#!/usr/bin/env python
"""
nsdt - neutral self-dual metric toolkit, command-line entry point.

Commands:
- check:    run the check pipeline on one or more metric spec files
- generate: write random exact solutions of the self-duality system as spec files
- trace:    integrate a geodesic and report closure
- classify: classify a null 2-plane at a point as alpha, beta or neither

Usage:
    nsdt check specs/flat.json --report json --no-timings
    nsdt check specs/*.json --jobs 4
    nsdt generate --fiber-degree 2 --base-degree 1 --count 20 --seed 42 --out specs/
    nsdt trace --metric std-s2xs2 --init 1.5708 0 1.5708 0 0 1 0 1 --out trace.csv

Configuration:
    - $NSDT_HOME/config.yaml (default ~/.nsdt/config.yaml)
    - NSDT_SEED overrides the configured seed; --seed overrides both
"""

import argparse
import json
import os
import sys
from dataclasses import replace
from pathlib import Path
from typing import List, Optional

# Add parent directory to path for direct execution
if __name__ == "__main__":
    current_dir = os.path.dirname(os.path.abspath(__file__))
    parent_dir = os.path.dirname(current_dir)
    if parent_dir not in sys.path:
        sys.path.insert(0, parent_dir)

from nsdt.app import run_batch
from nsdt.config import load_config, resolve_seed
from nsdt.constants import (
    APP_NAME, APP_VERSION, CONFIG_FILE_PATH, DEFAULT_TRACE_STEPS, ERROR_EXIT_CODE,
    STANDARD_MODEL_NAME, SUCCESS_EXIT_CODE, USAGE_EXIT_CODE,
)
from nsdt.errors import NsdtError, SpecParseError
from nsdt.geodesics import GeodesicState, TracerConfig, detect_closure, null_defect, trace_geodesic, write_trace_csv
from nsdt.logger import logger
from nsdt.metric import (
    NeutralMetric, check_sd_system, dump_metric_spec, generate_sd_family, load_metric_spec,
    product_sphere_metric, special_form_spec,
)
from nsdt.tetrad import classify_null_plane
from nsdt.ui import ReportRenderer


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=APP_NAME, description="Neutral self-dual metric toolkit")
    parser.add_argument("--version", action="version", version=f"{APP_NAME} {APP_VERSION}")
    commands = parser.add_subparsers(dest="command", required=True)

    check = commands.add_parser("check", help="run the check pipeline on a metric spec")
    check.add_argument("spec", nargs="+", help="metric spec JSON file(s)")
    check.add_argument("--report", choices=("json", "text"), default=None, help="report format")
    check.add_argument("--out", help="also write the JSON report to this file")
    check.add_argument("--tolerance", type=float, default=None, help="zero tolerance for numeric residuals")
    check.add_argument("--probes", type=int, default=None, help="number of probe points")
    check.add_argument("--seed", type=int, default=None, help="probe seed")
    check.add_argument("--no-timings", action="store_true", help="omit timings from the report")
    check.add_argument("--jobs", type=int, default=1, help="worker processes for several specs")

    generate = commands.add_parser("generate", help="write random self-dual special-form specs")
    generate.add_argument("--fiber-degree", type=int, default=1)
    generate.add_argument("--base-degree", type=int, default=1)
    generate.add_argument("--seed", type=int, default=None)
    generate.add_argument("--count", type=int, default=1)
    generate.add_argument("--out", required=True, help="output directory")
    generate.add_argument("--basic", action="store_true", help="also impose the basic condition")
    generate.add_argument("--no-gauge", action="store_true", help="drop the gauge conditions")

    trace = commands.add_parser("trace", help="integrate a geodesic and report closure")
    trace.add_argument("--metric", required=True, help=f"'{STANDARD_MODEL_NAME}' or a metric spec file")
    trace.add_argument("--init", type=float, nargs=8, required=True, metavar="X",
                       help="x0 x1 x2 x3 v0 v1 v2 v3")
    trace.add_argument("--steps", type=int, default=DEFAULT_TRACE_STEPS)
    trace.add_argument("--step-size", type=float, default=None)
    trace.add_argument("--out", help="CSV output file")
    trace.add_argument("--no-rotate", action="store_true", help="disable pole chart rotation")

    classify = commands.add_parser("classify", help="classify a null 2-plane at a point")
    classify.add_argument("--metric", required=True, help=f"'{STANDARD_MODEL_NAME}' or a metric spec file")
    classify.add_argument("--point", type=float, nargs=4, required=True, metavar="X")
    classify.add_argument("--v", type=float, nargs=4, required=True, metavar="V")
    classify.add_argument("--w", type=float, nargs=4, required=True, metavar="W")
    return parser


def load_metric(value: str, config) -> NeutralMetric:
    if value == STANDARD_MODEL_NAME:
        numerics = config["numerics"]
        return product_sphere_metric(chart_margin=numerics["chart_margin"], fd_step=numerics["fd_step"])
    return load_metric_spec(value).metric


def cmd_check(args, config, ui: ReportRenderer) -> int:
    if args.jobs < 1:
        ui.show_error("--jobs must be at least 1")
        return USAGE_EXIT_CODE
    reports = run_batch(args.spec, config, seed=resolve_seed(config, args.seed), probes=args.probes,
                        tolerance=args.tolerance, jobs=args.jobs)
    timings = config["report"].get("timings", True) and not args.no_timings
    if len(reports) == 1:
        text = reports[0].to_json(timings)
    else:
        text = json.dumps([report.to_dict(timings) for report in reports], indent=2, sort_keys=True)
    if args.out:
        Path(args.out).write_text(text + "\n")
    if (args.report or config["report"].get("format", "text")) == "json":
        sys.stdout.write(text + "\n")
    else:
        for report in reports:
            ui.show_check_report(report, timings)
        if args.out:
            ui.show_info(f"Wrote JSON report to {args.out}")
    return SUCCESS_EXIT_CODE if all(report.passed for report in reports) else ERROR_EXIT_CODE


def cmd_generate(args, config, ui: ReportRenderer) -> int:
    seed = resolve_seed(config, args.seed)
    if args.count < 1:
        ui.show_error("--count must be at least 1")
        return USAGE_EXIT_CODE
    family = generate_sd_family(args.fiber_degree, args.base_degree, seed, args.count,
                                gauge=not args.no_gauge, basic=args.basic)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for index, triple in enumerate(family):
        if not check_sd_system(*triple).passed:
            raise NsdtError(f"generated triple {index} does not solve the self-duality system")
        metric_id = f"sd-f{args.fiber_degree}-b{args.base_degree}-s{seed}-{index:03d}"
        path = out_dir / f"{metric_id}.json"
        dump_metric_spec(special_form_spec(*triple, metric_id=metric_id), path)
        written.append(str(path))
    ui.show_generated(written)
    return SUCCESS_EXIT_CODE


def cmd_trace(args, config, ui: ReportRenderer) -> int:
    m = load_metric(args.metric, config)
    cfg = TracerConfig.from_config(config)
    cfg = replace(
        cfg,
        step_size=cfg.step_size if args.step_size is None else args.step_size,
        rotate_charts=cfg.rotate_charts and not args.no_rotate,
        max_steps=max(cfg.max_steps, args.steps),
    )
    path = trace_geodesic(m, GeodesicState.from_values(args.init), cfg, steps=args.steps)
    verdict = detect_closure(path, cfg.closure_tolerance)
    defect = null_defect(path, m)
    if defect.max_defect > config["numerics"]["indeterminate_tolerance"]:
        ui.show_warning(f"Path is not null (max defect {defect.max_defect:.3e}); closure refers to a non-null geodesic")
    out = str(write_trace_csv(path, m, args.out)) if args.out else None
    ui.show_trace_summary(len(path) - 1, verdict.describe(), defect.max_defect, path.rotations, out)
    return SUCCESS_EXIT_CODE


def cmd_classify(args, config, ui: ReportRenderer) -> int:
    m = load_metric(args.metric, config)
    numerics = config["numerics"]
    kind = classify_null_plane(args.v, args.w, m, args.point,
                               null_tolerance=numerics["null_tolerance"],
                               indeterminate_tolerance=numerics["indeterminate_tolerance"])
    ui.show_classification(kind.value)
    return SUCCESS_EXIT_CODE


COMMANDS = {
    "check": cmd_check,
    "generate": cmd_generate,
    "trace": cmd_trace,
    "classify": cmd_classify,
}


def run(argv: Optional[List[str]] = None) -> int:
    """Parse arguments and run one command, returning the exit code"""
    args = build_parser().parse_args(argv)
    config = load_config(CONFIG_FILE_PATH)
    ui = ReportRenderer(config)
    try:
        return COMMANDS[args.command](args, config, ui)
    except SpecParseError as e:
        ui.show_error(str(e))
        return USAGE_EXIT_CODE
    except NsdtError as e:
        logger.info(f"Command {args.command} failed: {type(e).__name__}: {e}")
        ui.show_error(f"{type(e).__name__}: {e}")
        return ERROR_EXIT_CODE
    except (OSError, ValueError) as e:
        ui.show_error(str(e))
        return ERROR_EXIT_CODE


def main() -> None:
    """Main entry point for nsdt"""
    try:
        code = run()
    except Exception as e:
        ReportRenderer().show_error(f"Fatal error: {e}")
        sys.exit(ERROR_EXIT_CODE)
    sys.exit(code)


if __name__ == "__main__":
    main()
