"""Configuration validation for JSON configuration documents.

This module validates the opjpo search configuration and the camera
configuration before any computation starts. Every problem in a document is
collected and reported together, each with a suggestion, so a bad file can be
fixed in one pass.
"""

import difflib
import json
import math
from collections.abc import Mapping
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from endofuse.constants import REPORT_SCHEMA_VERSION
from endofuse.types import (
    InvalidConfiguration,
    InvalidInput,
    RasterConfig,
    ScaleMode,
    SearchConfig,
)


class ConfigurationError(InvalidConfiguration):
    """Raised when configuration validation fails.

    Attributes:
        problems: One message per problem found
    """

    def __init__(self, problems: list[str], source: str = "configuration") -> None:
        self.problems = problems
        message = "\n\n".join(
            [
                f"{source} validation failed:",
                *[f"  ERROR: {problem}" for problem in problems],
                f"Please fix these issues in the {source} and try again.",
            ]
        )
        super().__init__(message)


@dataclass(frozen=True)
class OpjpoSettings:
    """
    Validated settings for the opjpo command.

    Attributes:
        search: Coordinate-descent settings
        raster: Silhouette raster settings
        scale_mode: How the masked area is measured
        scale_mask_dilation: Odd kernel applied to tool masks before selecting tissue
        use_depth_prior: Start each tool at the median masked tissue depth
    """

    search: SearchConfig = field(default_factory=SearchConfig)
    raster: RasterConfig = field(default_factory=RasterConfig)
    scale_mode: ScaleMode = ScaleMode.ORTHO_BBOX
    scale_mask_dilation: int = 1
    use_depth_prior: bool = True


OPJPO_DEFAULTS: dict[str, Any] = {
    "schema_version": REPORT_SCHEMA_VERSION,
    "initial_step": 0.1,
    "min_step": 1e-3,
    "shrink_factor": 0.5,
    "max_iterations": 200,
    "use_depth_prior": True,
    "initial_offset": None,
    "scale_mode": ScaleMode.ORTHO_BBOX.value,
    "scale_mask_dilation": 1,
    "splat_px": 1.0,
    "gaussian_cutoff": 3.0,
    "alpha_epsilon": 1e-4,
}


def is_number(value: Any) -> bool:
    """True for finite ints and floats (booleans excluded)."""
    return (
        isinstance(value, (int, float))
        and not isinstance(value, bool)
        and math.isfinite(value)
    )


def is_integer(value: Any) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def unknown_key_problems(document: Mapping[str, Any], known: Mapping[str, Any]) -> list[str]:
    """One problem per key not in ``known``, suggesting the closest known key."""
    problems = []
    for key in sorted(set(document) - set(known)):
        close = difflib.get_close_matches(key, list(known), n=1)
        hint = f"\n  Suggestion: did you mean '{close[0]}'?" if close else ""
        problems.append(f"unknown key '{key}'{hint}")
    return problems


def validate_opjpo_config(document: Mapping[str, Any]) -> OpjpoSettings:
    """Validate an opjpo configuration document.

    Missing keys take the values in OPJPO_DEFAULTS; unknown keys are rejected.

    Args:
        document: Parsed JSON object

    Returns:
        The validated settings

    Raises:
        ConfigurationError: Listing every problem found
    """
    if not isinstance(document, Mapping):
        raise ConfigurationError(
            [f"configuration must be a JSON object, got {type(document).__name__}"]
        )

    problems = unknown_key_problems(document, OPJPO_DEFAULTS)
    values = {**OPJPO_DEFAULTS, **{k: v for k, v in document.items() if k in OPJPO_DEFAULTS}}

    if values["schema_version"] != REPORT_SCHEMA_VERSION:
        problems.append(
            f"schema_version must be {REPORT_SCHEMA_VERSION}, got {values['schema_version']!r}"
        )

    for key in ("initial_step", "min_step"):
        if not is_number(values[key]) or values[key] <= 0:
            problems.append(
                f"{key} must be a positive number, got {values[key]!r}\n"
                "  Suggestion: steps are in scene units; 0.1 and 0.001 suit millimetre scenes"
            )
    if (
        is_number(values["initial_step"])
        and is_number(values["min_step"])
        and values["min_step"] > values["initial_step"]
    ):
        problems.append(
            f"min_step ({values['min_step']}) must not exceed initial_step "
            f"({values['initial_step']})"
        )

    if not is_number(values["shrink_factor"]) or not 0 < values["shrink_factor"] < 1:
        problems.append(
            f"shrink_factor must lie strictly between 0 and 1, got {values['shrink_factor']!r}\n"
            "  Suggestion: 0.5 halves the step after each sweep without improvement"
        )

    if not is_integer(values["max_iterations"]) or values["max_iterations"] < 0:
        problems.append(
            f"max_iterations must be a non-negative integer, got {values['max_iterations']!r}"
        )

    if not isinstance(values["use_depth_prior"], bool):
        problems.append(f"use_depth_prior must be true or false, got {values['use_depth_prior']!r}")

    offset = values["initial_offset"]
    if offset is not None and (
        not isinstance(offset, list) or len(offset) != 3 or not all(is_number(v) for v in offset)
    ):
        problems.append(f"initial_offset must be null or a list of 3 numbers, got {offset!r}")

    modes = [mode.value for mode in ScaleMode]
    if values["scale_mode"] not in modes:
        problems.append(
            f"scale_mode must be one of {', '.join(modes)}, got {values['scale_mode']!r}"
        )

    dilation = values["scale_mask_dilation"]
    if not is_integer(dilation) or dilation < 1 or dilation % 2 == 0:
        problems.append(
            f"scale_mask_dilation must be an odd integer >= 1, got {dilation!r}\n"
            "  Suggestion: use 1 for no dilation, 47 to match tissue initialization"
        )

    if not is_number(values["splat_px"]) or values["splat_px"] < 1:
        problems.append(f"splat_px must be a number >= 1, got {values['splat_px']!r}")
    if not is_number(values["gaussian_cutoff"]) or values["gaussian_cutoff"] <= 0:
        problems.append(f"gaussian_cutoff must be positive, got {values['gaussian_cutoff']!r}")
    if not is_number(values["alpha_epsilon"]) or not 0 < values["alpha_epsilon"] < 1:
        problems.append(
            f"alpha_epsilon must lie strictly between 0 and 1, got {values['alpha_epsilon']!r}"
        )

    if problems:
        raise ConfigurationError(problems, "opjpo configuration")

    try:
        return OpjpoSettings(
            search=SearchConfig(
                initial_step=float(values["initial_step"]),
                min_step=float(values["min_step"]),
                shrink_factor=float(values["shrink_factor"]),
                max_iterations=int(values["max_iterations"]),
                initial_offset=tuple(offset) if offset is not None else None,
            ),
            raster=RasterConfig(
                splat_px=float(values["splat_px"]),
                gaussian_cutoff=float(values["gaussian_cutoff"]),
                alpha_epsilon=float(values["alpha_epsilon"]),
            ),
            scale_mode=ScaleMode(values["scale_mode"]),
            scale_mask_dilation=int(dilation),
            use_depth_prior=bool(values["use_depth_prior"]),
        )
    except (InvalidConfiguration, InvalidInput) as err:
        raise ConfigurationError([str(err)], "opjpo configuration") from err


def load_json_document(path: Path | str, source: str) -> Any:
    """Parse a JSON file, reporting syntax errors as ConfigurationError."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        return json.loads(text)
    except json.JSONDecodeError as err:
        raise ConfigurationError(
            [f"{path} is not valid JSON: {err.msg} at line {err.lineno} column {err.colno}"],
            source,
        ) from err


def load_opjpo_config(path: Path | str | None) -> OpjpoSettings:
    """Read and validate an opjpo configuration file; None gives the defaults."""
    if path is None:
        return OpjpoSettings()
    return validate_opjpo_config(load_json_document(path, "opjpo configuration"))
