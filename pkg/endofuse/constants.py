"""
Fixed numerical parameters for endofuse.

This module collects every constant that controls projection tolerances,
rendering, metrics and the report formats. All constants are typed as Final
to prevent modification at runtime.
"""

from typing import Final

# Square structuring element used to grow tool masks before tissue
# initialization (tool masks are refined with a 47x47 dilation).
DEFAULT_DILATION_KERNEL: Final[int] = 47

# Depths at or below this value are treated as invalid by the inverse-depth loss
EPSILON_DEPTH: Final[float] = 1e-6

# Tolerance for RigidTransform orthonormality checks at construction
ROTATION_TOLERANCE: Final[float] = 1e-9

# Looser tolerance for rotation blocks read from camera config files
CONFIG_ROTATION_TOLERANCE: Final[float] = 1e-6

# SSIM parameters: 11x11 Gaussian window with sigma 1.5 on a unit dynamic range
SSIM_WINDOW: Final[int] = 11
SSIM_SIGMA: Final[float] = 1.5
SSIM_K1: Final[float] = 0.01
SSIM_K2: Final[float] = 0.03
SSIM_DYNAMIC_RANGE: Final[float] = 1.0

# ITU-R BT.601 luma weights (R, G, B)
LUMA_WEIGHTS: Final[tuple[float, float, float]] = (0.299, 0.587, 0.114)

# Peak signal value for PSNR on [0, 1] images
PSNR_PEAK: Final[float] = 1.0

# Largest candidate count the exhaustive placement oracle accepts (21^3)
MAX_ORACLE_CANDIDATES: Final[int] = 21**3

# Provenance label assigned to tissue points in a composed scene
TISSUE_LABEL: Final[int] = 0

# Colour given to tool points that carry no colour of their own
DEFAULT_TOOL_COLOR: Final[tuple[float, float, float]] = (0.62, 0.64, 0.68)

# Version stamped into every JSON report and accepted config
REPORT_SCHEMA_VERSION: Final[int] = 1

# Environment variable consulted for log verbosity when --verbose is absent
LOG_LEVEL_ENV_VAR: Final[str] = "ENDOFUSE_LOG_LEVEL"

# CLI exit codes
EXIT_COMPUTATION_ERROR: Final[int] = 1
EXIT_USAGE_ERROR: Final[int] = 2
