#!/usr/bin/env python

"""
Centralized theme for nsdt reports.

Colors are loaded from config.yaml under the 'theme' key, with defaults.
Check statuses map onto the success/error/warning/muted styles.
"""

from typing import Optional

from rich.console import Console
from rich.theme import Theme as RichTheme

DEFAULT_THEME = {
    "accent": "#0066cc",
    "accent_alt": "#00cc66",
    "fg": "white",
    "fg_alt": "#aaaaaa",
    "muted": "#555555",
    "error": "#ff5555",
    "warning": "#e5c07b",
    "success": "#00cc66",
}

STATUS_STYLES = {
    "pass": "success",
    "exact-zero": "success",
    "fail": "error",
    "skipped": "muted",
}


def get_theme(config: dict) -> dict:
    """Resolve theme colors from config, falling back to defaults."""
    theme = dict(DEFAULT_THEME)
    theme.update(config.get("theme", {}) or {})
    return theme


def build_rich_theme(theme: dict) -> RichTheme:
    """Create a Rich Theme from the resolved theme dict."""
    return RichTheme({key: theme[key] for key in DEFAULT_THEME})


def create_console(config: Optional[dict] = None, **kwargs) -> Console:
    """Create a Rich Console with the application theme applied."""
    theme = get_theme(config or {})
    return Console(theme=build_rich_theme(theme), **kwargs)
