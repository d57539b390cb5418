"""
Report structures and JSON export.

This module defines the placement report written by the opjpo command and
the per-region metric report written by the metrics command. Both serialize
to JSON documents stamped with a schema version.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from endofuse.constants import REPORT_SCHEMA_VERSION
from endofuse.formats.atomic import write_text_atomic
from endofuse.types.errors import InvalidInput
from endofuse.types.placement import PlacementResult


def encode_float(value: float) -> float | str:
    """JSON has no infinity; infinite values are written as "inf" / "-inf"."""
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return value


@dataclass(frozen=True)
class RegionReport:
    """
    Appearance and placement metrics for one image region.

    Attributes:
        label: "tissue" or the integer tool id
        psnr: Peak signal-to-noise ratio in dB (math.inf for identical regions)
        ssim: Structural similarity in [-1, 1]
        iou: Silhouette IoU in [0, 1], present for tools with a rendered silhouette
        lpips: Always None; the perceptual metric is not computed
    """

    label: str | int
    psnr: float
    ssim: float
    iou: float | None = None
    lpips: None = None

    def __post_init__(self) -> None:
        if self.iou is not None and not 0.0 <= self.iou <= 1.0:
            raise InvalidInput(f"iou must lie in [0, 1], got {self.iou}")
        if not -1.0 - 1e-12 <= self.ssim <= 1.0 + 1e-12:
            raise InvalidInput(f"ssim must lie in [-1, 1], got {self.ssim}")

    def to_dict(self) -> dict[str, Any]:
        return {
            "label": self.label,
            "iou": self.iou,
            "psnr": encode_float(self.psnr),
            "ssim": self.ssim,
            "lpips": None,
        }


@dataclass
class MetricsReport:
    """
    Region reports for one rendered frame.

    Attributes:
        regions: One report per tool, then one for tissue
    """

    regions: list[RegionReport] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return {
            "schema_version": REPORT_SCHEMA_VERSION,
            "regions": [region.to_dict() for region in self.regions],
        }

    def export_to_json(self, output_path: Path) -> None:
        """Write the report atomically as indented JSON."""
        write_text_atomic(output_path, json.dumps(self.to_dict(), indent=2))


@dataclass
class PlacementReport:
    """
    Per-tool placement outcomes for one frame.

    A tool either has a PlacementResult or an error message; a failure on one
    tool never removes the others from the report.

    Attributes:
        placements: Successful results keyed by tool id
        errors: Error messages keyed by tool id
        scale_mode: Name of the A_mask measurement used
        timings: Seconds spent per named stage
    """

    placements: dict[int, PlacementResult] = field(default_factory=dict)
    errors: dict[int, str] = field(default_factory=dict)
    scale_mode: str = "ortho_bbox"
    timings: dict[str, float] = field(default_factory=dict)

    def add_result(self, tool_id: int, result: PlacementResult) -> None:
        self.placements[tool_id] = result
        self.errors.pop(tool_id, None)

    def add_error(self, tool_id: int, message: str) -> None:
        self.errors[tool_id] = message
        self.placements.pop(tool_id, None)

    def to_dict(self) -> dict[str, Any]:
        """
        Convert the report to a dictionary for JSON serialization.

        Returns:
            Dictionary with one entry per tool id, sorted ascending
        """
        tool_ids = sorted(set(self.placements) | set(self.errors))
        tools: list[dict[str, Any]] = []
        for tool_id in tool_ids:
            if tool_id in self.placements:
                tools.append({"id": tool_id, "status": "ok", **self.placements[tool_id].to_dict()})
            else:
                tools.append({"id": tool_id, "status": "error", "error": self.errors[tool_id]})
        return {
            "schema_version": REPORT_SCHEMA_VERSION,
            "scale_mode": self.scale_mode,
            "tools": tools,
            "timings": {name: round(seconds, 6) for name, seconds in self.timings.items()},
        }

    def export_to_json(self, output_path: Path) -> None:
        """Write the report atomically as indented JSON."""
        write_text_atomic(output_path, json.dumps(self.to_dict(), indent=2))

    @classmethod
    def from_dict(cls, document: dict[str, Any]) -> PlacementReport:
        """Rebuild a report from its JSON form (timings are not restored)."""
        report = cls(scale_mode=str(document.get("scale_mode", "ortho_bbox")))
        for entry in document.get("tools", []):
            tool_id = int(entry["id"])
            if entry.get("status") == "ok":
                report.add_result(
                    tool_id,
                    PlacementResult(
                        sigma=float(entry["sigma"]),
                        offset=tuple(float(v) for v in entry["offset"]),  # type: ignore[arg-type]
                        iou=float(entry["iou"]),
                        iterations=int(entry["iterations"]),
                        candidate_evaluations=int(entry["candidate_evaluations"]),
                        initial_iou=float(entry.get("initial_iou", 0.0)),
                    ),
                )
            else:
                report.add_error(tool_id, str(entry.get("error", "unknown error")))
        return report
