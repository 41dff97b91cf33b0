#!/usr/bin/env python

import logging
from typing import Optional
from rich.console import Console
from rich.logging import RichHandler

from .constants import LOGS_DIR, LOG_FILE_PATH, LOG_FORMAT, LOG_DATE_FORMAT


class NsdtLogger:
    """Centralized logging system for nsdt"""

    _instance: Optional['NsdtLogger'] = None

    def __new__(cls) -> 'NsdtLogger':
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __init__(self):
        if hasattr(self, '_initialized'):
            return

        self._initialized = True
        self.console = Console(stderr=True)
        self.logger = logging.getLogger("nsdt")
        self._setup_logging()

    def _setup_logging(self):
        """Setup logging configuration"""
        self.logger.setLevel(logging.DEBUG)

        try:
            LOGS_DIR.mkdir(parents=True, exist_ok=True)
            file_handler = logging.FileHandler(LOG_FILE_PATH)
        except OSError:
            file_handler = None

        if file_handler is not None:
            file_handler.setLevel(logging.DEBUG)
            file_handler.setFormatter(logging.Formatter(LOG_FORMAT, LOG_DATE_FORMAT))
            self.logger.addHandler(file_handler)

        # Only warnings and errors reach the terminal
        console_handler = RichHandler(
            console=self.console,
            show_time=False,
            show_path=False,
            markup=True
        )
        console_handler.setLevel(logging.WARNING)
        self.logger.addHandler(console_handler)

        self.logger.propagate = False

    def debug(self, message: str, **kwargs):
        """Log debug message"""
        self.logger.debug(message, **kwargs)

    def info(self, message: str, **kwargs):
        """Log info message"""
        self.logger.info(message, **kwargs)

    def warning(self, message: str, **kwargs):
        """Log warning message"""
        self.logger.warning(message, **kwargs)

    def error(self, message: str, **kwargs):
        """Log error message"""
        self.logger.error(message, **kwargs)

    def critical(self, message: str, **kwargs):
        """Log critical message"""
        self.logger.critical(message, **kwargs)

    def log_check(self, metric_id: str, check: str, status: str, summary: str = ""):
        """Log the outcome of one pipeline check"""
        self.info(f"Check [{metric_id}] {check}: {status} {summary}".rstrip())

    def log_generation(self, fiber_degree: int, base_degree: int, seed: int, count: int, dimension: int):
        """Log a solution-family generation run"""
        self.debug(
            f"Generated {count} triples - fiber degree: {fiber_degree}, "
            f"base degree: {base_degree}, seed: {seed}, null space dim: {dimension}"
        )

    def log_trace(self, steps: int, rotations: int, verdict: str):
        """Log a geodesic trace summary"""
        self.debug(f"Trace - steps: {steps}, chart rotations: {rotations}, closure: {verdict}")


# Global logger instance
logger = NsdtLogger()
