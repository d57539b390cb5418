"""Rich tables summarizing placement and metric reports on the console."""

import math

from rich.console import Console
from rich.table import Table

from endofuse.reports import MetricsReport, PlacementReport


def placement_table(report: PlacementReport) -> Table:
    """One row per tool: scale, offset, IoU before and after refinement."""
    table = Table(title="Tool Placements", show_header=True, header_style="bold cyan")
    table.add_column("Tool", style="yellow", justify="right")
    table.add_column("Status")
    table.add_column("Sigma", justify="right", style="blue")
    table.add_column("Offset", justify="right")
    table.add_column("IoU (init)", justify="right", style="white")
    table.add_column("IoU", justify="right", style="green")
    table.add_column("Sweeps", justify="right", style="magenta")

    for tool_id in sorted(set(report.placements) | set(report.errors)):
        result = report.placements.get(tool_id)
        if result is None:
            table.add_row(str(tool_id), f"[red]{report.errors[tool_id]}[/red]", "", "", "", "", "")
            continue
        table.add_row(
            str(tool_id),
            "[green]ok[/green]",
            f"{result.sigma:.4g}",
            "(" + ", ".join(f"{v:.4f}" for v in result.offset) + ")",
            f"{result.initial_iou:.4f}",
            f"{result.iou:.4f}",
            str(result.iterations),
        )
    return table


def metrics_table(report: MetricsReport) -> Table:
    """One row per region: PSNR, SSIM and silhouette IoU."""
    table = Table(title="Region Metrics", show_header=True, header_style="bold cyan")
    table.add_column("Region", style="cyan")
    table.add_column("PSNR (dB)", justify="right", style="green")
    table.add_column("SSIM", justify="right", style="blue")
    table.add_column("IoU", justify="right", style="magenta")

    for region in report.regions:
        psnr = "inf" if math.isinf(region.psnr) else f"{region.psnr:.4f}"
        iou = "-" if region.iou is None else f"{region.iou:.4f}"
        table.add_row(str(region.label), psnr, f"{region.ssim:.4f}", iou)
    return table


def print_table(table: Table, console: Console | None = None) -> None:
    """Print a table to stderr (or the given console)."""
    target = console or Console(stderr=True)
    target.print()
    target.print(table)
