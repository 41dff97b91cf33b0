#!/usr/bin/env python

import copy
import os
import sys
import yaml
from typing import Dict, Any, List, Optional
from pathlib import Path
from rich.console import Console

from .constants import (
    CONFIG_FILE_PATH, DEFAULT_CONFIG, MAX_CONFIG_FILE_SIZE,
    SEED_ENV_VAR, USAGE_EXIT_CODE,
)
from .logger import logger
from .theme import DEFAULT_THEME


def default_config() -> Dict[str, Any]:
    """Return a fresh copy of the built-in configuration"""
    config = copy.deepcopy(DEFAULT_CONFIG)
    _ensure_theme_config(config)
    return config


def load_config(config_path: Path = CONFIG_FILE_PATH) -> Dict[str, Any]:
    """Load and validate configuration from YAML file"""
    console = Console(stderr=True)

    if not config_path.exists():
        return default_config()

    # Check if file is readable
    if not config_path.is_file() or not os.access(config_path, os.R_OK):
        console.print(f"[red]Error: Config file '{config_path}' is not readable![/red]")
        sys.exit(USAGE_EXIT_CODE)

    try:
        file_size = config_path.stat().st_size
        if file_size > MAX_CONFIG_FILE_SIZE:
            console.print(f"[red]Error: Config file '{config_path}' is too large (>1MB)![/red]")
            sys.exit(USAGE_EXIT_CODE)
    except OSError as e:
        console.print(f"[red]Error accessing config file '{config_path}': {e}[/red]")
        sys.exit(USAGE_EXIT_CODE)

    try:
        with open(config_path, 'r') as file:
            config = yaml.safe_load(file) or {}
    except yaml.YAMLError as e:
        console.print(f"[red]Error: Invalid YAML in config file: {e}[/red]")
        sys.exit(USAGE_EXIT_CODE)

    if not isinstance(config, dict):
        console.print("[red]Error: Config file must contain a mapping at the top level[/red]")
        sys.exit(USAGE_EXIT_CODE)

    return _validate_and_normalize_config(config, console)


def _validate_and_normalize_config(config: Dict[str, Any], console: Console) -> Dict[str, Any]:
    """Fill missing sections with defaults and validate numeric settings"""
    for section, defaults in DEFAULT_CONFIG.items():
        if not isinstance(defaults, dict):
            config.setdefault(section, defaults)
            continue
        current = config.get(section) or {}
        if not isinstance(current, dict):
            console.print(f"[red]Error: Config section '{section}' must be a mapping[/red]")
            sys.exit(USAGE_EXIT_CODE)
        merged = dict(defaults)
        merged.update(current)
        config[section] = merged

    _validate_required_fields(config, console, [
        "numerics.fd_step", "numerics.chart_margin", "numerics.null_tolerance",
        "numerics.indeterminate_tolerance", "numerics.zero_tolerance",
        "numerics.probe_points", "tracer.step_size", "tracer.max_steps",
        "tracer.closure_tolerance", "tracer.rotation_threshold",
    ])

    if config["numerics"]["null_tolerance"] >= config["numerics"]["indeterminate_tolerance"]:
        console.print("[red]Error: numerics.null_tolerance must be below numerics.indeterminate_tolerance[/red]")
        sys.exit(USAGE_EXIT_CODE)

    if config["report"]["format"] not in ("json", "text"):
        console.print(f"[red]Error: Unknown report format '{config['report']['format']}'[/red]")
        sys.exit(USAGE_EXIT_CODE)

    _ensure_theme_config(config)
    return config


def _validate_required_fields(config: Dict[str, Any], console: Console, required_fields: List[str]) -> None:
    """Validate that numeric configuration fields are present and positive"""
    for field_path in required_fields:
        field_value: Any = config
        for key in field_path.split('.'):
            if not isinstance(field_value, dict) or key not in field_value:
                console.print(f"[red]Error: Missing required config field: {field_path}[/red]")
                sys.exit(USAGE_EXIT_CODE)
            field_value = field_value[key]

        if isinstance(field_value, bool) or not isinstance(field_value, (int, float)) or field_value <= 0:
            console.print(f"[red]Error: Config field '{field_path}' must be a positive number[/red]")
            sys.exit(USAGE_EXIT_CODE)


def _ensure_theme_config(config: Dict[str, Any]) -> None:
    """Ensure the theme section exists, keeping only known color keys"""
    theme = config.get("theme") or {}
    if not isinstance(theme, dict):
        theme = {}
    config["theme"] = {key: str(theme.get(key, value)) for key, value in DEFAULT_THEME.items()}


def resolve_seed(config: Dict[str, Any], cli_seed: Optional[int] = None) -> int:
    """CLI flag beats the environment, which beats the config file"""
    if cli_seed is not None:
        return cli_seed
    env_seed = os.environ.get(SEED_ENV_VAR)
    if env_seed:
        try:
            return int(env_seed)
        except ValueError:
            logger.warning(f"Ignoring {SEED_ENV_VAR}={env_seed!r}: not an integer")
    return int(config.get("seed", 0))
