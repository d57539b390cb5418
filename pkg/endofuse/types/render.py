"""
Renderer type definitions: isotropic splats, raster settings and render output.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from endofuse.types.errors import InvalidConfiguration, InvalidInput
from endofuse.types.images import DepthMap, ImageRGB


@dataclass(frozen=True, eq=False)
class SplatSet:
    """
    Isotropic point-Gaussian primitives with view-independent colour.

    Attributes:
        centers: N x 3 positions in the camera frame, scene units
        colors: N x 3 RGB in [0, 1]
        opacities: N peak opacities in (0, 1]
        radii: N world-space radii, scene units
    """

    centers: npt.NDArray[np.float64]
    colors: npt.NDArray[np.float64]
    opacities: npt.NDArray[np.float64]
    radii: npt.NDArray[np.float64]

    def __post_init__(self) -> None:
        """Validate lengths and ranges, then freeze payloads."""
        centers = np.array(self.centers, dtype=np.float64, copy=True).reshape(-1, 3)
        colors = np.array(self.colors, dtype=np.float64, copy=True).reshape(-1, 3)
        opacities = np.array(self.opacities, dtype=np.float64, copy=True).reshape(-1)
        radii = np.array(self.radii, dtype=np.float64, copy=True).reshape(-1)

        n = centers.shape[0]
        if not (colors.shape[0] == opacities.shape[0] == radii.shape[0] == n):
            raise InvalidInput(
                f"splat arrays must have equal length: centers={n}, colors={colors.shape[0]}, "
                f"opacities={opacities.shape[0]}, radii={radii.shape[0]}"
            )
        if not np.all(np.isfinite(centers)):
            raise InvalidInput("splat centers must be finite")
        if np.any(colors < 0.0) or np.any(colors > 1.0):
            raise InvalidInput("splat colours must lie within [0, 1]")
        if np.any(opacities <= 0.0) or np.any(opacities > 1.0):
            raise InvalidInput("splat opacities must lie within (0, 1]")
        if np.any(radii <= 0.0):
            raise InvalidInput("splat radii must be positive")

        for name, array in (
            ("centers", centers),
            ("colors", colors),
            ("opacities", opacities),
            ("radii", radii),
        ):
            array.setflags(write=False)
            object.__setattr__(self, name, array)

    def __len__(self) -> int:
        return int(self.centers.shape[0])

    @classmethod
    def empty(cls) -> SplatSet:
        return cls(np.zeros((0, 3)), np.zeros((0, 3)), np.zeros(0), np.zeros(0))


@dataclass(frozen=True)
class RasterConfig:
    """
    Rasterization settings.

    Attributes:
        splat_px: Disc radius in pixels for point silhouettes
        gaussian_cutoff: Multiples of the projected radius beyond which a splat is ignored
        alpha_epsilon: Compositing stops once transmittance falls below this value
    """

    splat_px: float = 1.0
    gaussian_cutoff: float = 3.0
    alpha_epsilon: float = 1e-4

    def __post_init__(self) -> None:
        if not self.splat_px >= 1:
            raise InvalidConfiguration(f"splat_px must be at least 1, got {self.splat_px}")
        if not self.gaussian_cutoff > 0:
            raise InvalidConfiguration(
                f"gaussian_cutoff must be positive, got {self.gaussian_cutoff}"
            )
        if not 0 < self.alpha_epsilon < 1:
            raise InvalidConfiguration(
                f"alpha_epsilon must lie in (0, 1), got {self.alpha_epsilon}"
            )


@dataclass(frozen=True, eq=False)
class RenderOutput:
    """
    Composited colour, depth and accumulated opacity.

    Attributes:
        color: Rendered image
        depth: Opacity-weighted depth (0 where nothing was drawn)
        alpha: H x W accumulated opacity in [0, 1]
    """

    color: ImageRGB
    depth: DepthMap
    alpha: npt.NDArray[np.float64]

    def __post_init__(self) -> None:
        alpha = np.array(self.alpha, dtype=np.float64, copy=True)
        if alpha.shape != self.color.shape:
            raise InvalidInput(f"alpha shape {alpha.shape} does not match image {self.color.shape}")
        if np.any(alpha < 0.0) or np.any(alpha > 1.0):
            raise InvalidInput("accumulated alpha must lie within [0, 1]")
        alpha.setflags(write=False)
        object.__setattr__(self, "alpha", alpha)
