#!/usr/bin/env python

from typing import Iterable, Optional

from rich.panel import Panel
from rich.table import Table

from .theme import STATUS_STYLES, create_console, get_theme

# Failing residual names shown per row before truncating
MAX_LISTED_RESIDUALS = 4


class ReportRenderer:
    def __init__(self, config=None, **console_kwargs):
        self.theme = get_theme(config or {})
        self.console = create_console(config, **console_kwargs)
        self._t = self.theme

    def _status_text(self, status: str) -> str:
        style = STATUS_STYLES.get(status, "fg")
        return f"[{style}]{status}[/{style}]"

    @staticmethod
    def _detail(result) -> str:
        if result.failing:
            names = result.failing[:MAX_LISTED_RESIDUALS]
            more = len(result.failing) - len(names)
            listed = ", ".join(names) + (f" (+{more} more)" if more > 0 else "")
            return f"{result.reason + '; ' if result.reason else ''}nonzero: {listed}"
        if result.reason:
            return result.reason
        numeric = [value for value in result.residuals.values() if isinstance(value, float)]
        if numeric:
            return f"max residual {max(numeric):.3e}"
        return ""

    def show_check_report(self, report, timings: bool = True):
        """Render a check-suite report as a table"""
        table = Table(title=f"nsdt check: {report.metric_id} ({report.backend})",
                      title_style=f"bold {self._t['accent']}", border_style=self._t["muted"])
        table.add_column("Check", style="accent_alt")
        table.add_column("Status")
        table.add_column("Details", style="fg_alt")
        if timings:
            table.add_column("Time", justify="right", style="muted")

        for name, result in report.to_dict(timings).get("checks", {}).items():
            row = [name, self._status_text(result["status"]), self._detail(report.results[name])]
            if timings:
                seconds = result.get("seconds")
                row.append(f"{seconds:.2f}s" if seconds is not None else "")
            table.add_row(*row)
        self.console.print(table)

        if report.killing is not None:
            self.console.print(
                f"[accent]Killing:[/accent] {report.killing['killing']}  "
                f"[accent]reduces to basic:[/accent] {report.killing['dw_basic']}"
            )
        verdict = "[success]all checks passed[/success]" if report.passed else "[error]some checks failed[/error]"
        self.console.print(verdict)

    def show_trace_summary(self, steps: int, verdict: str, max_defect: float,
                           rotations: int = 0, out: Optional[str] = None):
        lines = [
            f"[accent]Steps:[/accent] {steps}",
            f"[accent]Chart rotations:[/accent] {rotations}",
            f"[accent]Max null defect:[/accent] {max_defect:.3e}",
            f"[accent]Closure:[/accent] {verdict}",
        ]
        if out:
            lines.append(f"[accent]CSV:[/accent] {out}")
        self.console.print(Panel("\n".join(lines), title="Trace", title_align="left",
                                 border_style=self._t["accent"]))

    def show_classification(self, kind: str):
        self.console.print(Panel(f"[bold]{kind}[/bold]", title="Null plane", title_align="left",
                                 border_style=self._t["accent_alt"]))

    def show_generated(self, paths: Iterable[str]):
        paths = list(paths)
        self.console.print(f"[success]Wrote {len(paths)} metric spec(s)[/success]")
        for path in paths:
            self.console.print(f"  [muted]{path}[/muted]")

    def show_error(self, error_message):
        """Display error message"""
        panel = Panel(
            f"[error]{error_message}[/error]",
            title="Error",
            title_align="left",
            border_style=self._t["error"]
        )
        self.console.print(panel)

    def show_warning(self, warning_message):
        """Display warning message"""
        panel = Panel(
            f"[warning]{warning_message}[/warning]",
            title="Warning",
            title_align="left",
            border_style=self._t["warning"]
        )
        self.console.print(panel)

    def show_info(self, info_message):
        self.console.print(f"[accent]{info_message}[/accent]")
