"""
Synthetic scenes with exact ground truth.

A scene is a smooth tissue height field seen by a fixed pinhole camera, with a
grasper-like tool model hovering just above it. The tool model is a capped
cylinder shaft ending in two tapered jaws opened into a V, rotated in the
image plane. The generator records the true scale and offset used to place
the model and renders the observations a real pipeline would receive: the
tool's silhouette mask, the observed depth (tool in front of tissue) and a
colour image.

Difficulties:
- easy: the tool centroid sits on the optical axis
- displaced: the tool is moved sideways from the optical axis by up to 10% of
  the tissue bounding-box diagonal
- occluded: the tool centroid sits next to an image border so part of the
  tool leaves the frustum

Every random number comes from SplitMix64, so a seed always yields the same scene.
"""

import json
import logging
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Any

import numpy as np
import numpy.typing as npt

from endofuse.constants import DEFAULT_TOOL_COLOR, REPORT_SCHEMA_VERSION
from endofuse.core.projection import perspective_project
from endofuse.formats.atomic import write_text_atomic
from endofuse.formats.camera import CameraConfigFile, write_camera_config
from endofuse.formats.images import write_depth, write_image, write_label_mask
from endofuse.formats.obj import write_obj
from endofuse.formats.ply import write_pointcloud
from endofuse.render.silhouette import rasterize_depth, rasterize_silhouette
from endofuse.synth.rng import SplitMix64
from endofuse.types import (
    BinaryMask,
    Camera,
    DepthMap,
    ImageRGB,
    MaskSemantics,
    PointCloud,
    RasterConfig,
    ToolInstance,
    TriangleMesh,
)

logger = logging.getLogger(__name__)

SYNTH_CAMERA = Camera(fx=160.0, fy=160.0, cx=80.0, cy=64.0, width=160, height=128)
SYNTH_DEPTH_SCALE = 1e-4
SYNTH_TOOL_ID = 1

# Tool model, in model units
SHAFT_RADIUS = 0.15
SHAFT_LENGTH = 1.6
SHAFT_SEGMENTS = 12
JAW_LENGTH = 0.5
JAW_SPREAD = 0.3

TISSUE_STRIDE = 2
_FIXED_POINT_ITERATIONS = 40


class Difficulty(Enum):
    EASY = "easy"
    DISPLACED = "displaced"
    OCCLUDED = "occluded"


@dataclass(frozen=True, eq=False)
class SynthScene:
    """
    A generated scene and its ground truth.

    Attributes:
        seed: Generator seed
        difficulty: Placement difficulty
        camera: Camera intrinsics (identity pose)
        depth_scale: Quantization step of the stored depth
        tissue: Tissue surface points with colour, camera frame
        tool: Tool model (rotation applied, unscaled, untranslated)
        true_sigma: Scale that sizes the model
        true_offset: Translation applied after scaling
        mask: Silhouette of the placed tool (TOOL semantics)
        depth: Observed depth, tool in front of tissue, quantized to depth_scale
        image: Observed colour, quantized to 8 bits
    """

    seed: int
    difficulty: Difficulty
    camera: Camera
    depth_scale: float
    tissue: PointCloud
    tool: TriangleMesh
    true_sigma: float
    true_offset: tuple[float, float, float]
    mask: BinaryMask
    depth: DepthMap
    image: ImageRGB

    def tool_instance(self) -> ToolInstance:
        return ToolInstance(id=SYNTH_TOOL_ID, geometry=self.tool, mask=self.mask)

    def placed_tool(self) -> TriangleMesh:
        """The tool model at its ground-truth scale and position."""
        return self.tool.transformed(self.true_sigma, self.true_offset)

    def truth(self) -> dict[str, Any]:
        return {
            "schema_version": REPORT_SCHEMA_VERSION,
            "seed": self.seed,
            "difficulty": self.difficulty.value,
            "tool_id": SYNTH_TOOL_ID,
            "sigma": self.true_sigma,
            "offset": list(self.true_offset),
        }


@dataclass(frozen=True)
class _HeightField:
    """z = base + sum of three sinusoids over camera-frame (x, y)."""

    base: float
    amplitudes: tuple[float, float, float]
    frequencies: tuple[float, float, float]
    phases: tuple[float, float, float]

    def __call__(self, x: npt.NDArray[np.float64], y: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        a, k, p = self.amplitudes, self.frequencies, self.phases
        result: npt.NDArray[np.float64] = (
            self.base
            + a[0] * np.sin(k[0] * x + p[0])
            + a[1] * np.cos(k[1] * y + p[1])
            + a[2] * np.sin(k[2] * (x + y) + p[2])
        )
        return result

    def depth_along_rays(
        self, ray_x: npt.NDArray[np.float64], ray_y: npt.NDArray[np.float64]
    ) -> npt.NDArray[np.float64]:
        """Solve z = h(ray_x * z, ray_y * z) for each ray by fixed-point iteration."""
        z = np.full(np.shape(ray_x), self.base)
        for _ in range(_FIXED_POINT_ITERATIONS):
            z = self(ray_x * z, ray_y * z)
        return z


def _pixel_rays(cam: Camera) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
    rows, cols = np.mgrid[0 : cam.height, 0 : cam.width].astype(np.float64)
    return (cols - cam.cx) / cam.fx, (rows - cam.cy) / cam.fy


def _tissue_color(x: npt.NDArray[np.float64], y: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
    """Smooth reddish texture, quantized to 8 bits."""
    r = 0.72 + 0.12 * np.sin(5.0 * x) * np.cos(4.0 * y)
    g = 0.36 + 0.08 * np.cos(7.0 * x + 1.0)
    b = 0.34 + 0.06 * np.sin(6.0 * y + 2.0)
    color = np.stack([r, g, b], axis=-1)
    result: npt.NDArray[np.float64] = np.rint(np.clip(color, 0.0, 1.0) * 255.0) / 255.0
    return result


def _prism(
    start: npt.NDArray[np.float64],
    end: npt.NDArray[np.float64],
    half_width: tuple[float, float],
    half_thickness: float,
) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.int64]]:
    """A box along start->end in the xy-plane, tapering from half_width[0] to half_width[1]."""
    direction = (end - start) / np.linalg.norm(end - start)
    side = np.array([-direction[1], direction[0], 0.0])
    up = np.array([0.0, 0.0, 1.0])
    vertices = []
    for center, width in ((start, half_width[0]), (end, half_width[1])):
        for s, t in ((-1, -1), (1, -1), (1, 1), (-1, 1)):
            vertices.append(center + s * width * side + t * half_thickness * up)
    quads = [(0, 1, 2, 3), (4, 7, 6, 5), (0, 4, 5, 1), (1, 5, 6, 2), (2, 6, 7, 3), (3, 7, 4, 0)]
    faces = [(q[0], q[1], q[2]) for q in quads] + [(q[0], q[2], q[3]) for q in quads]
    return np.asarray(vertices), np.asarray(faces, dtype=np.int64)


def build_tool_model(angle: float) -> TriangleMesh:
    """
    The grasper proxy rotated by ``angle`` radians about the optical axis.

    The shaft runs along +x from -SHAFT_LENGTH/2 to +SHAFT_LENGTH/2; the jaws
    open from its far end.
    """
    half = SHAFT_LENGTH / 2.0
    theta = np.arange(SHAFT_SEGMENTS) * (2.0 * math.pi / SHAFT_SEGMENTS)
    ring_y = SHAFT_RADIUS * np.cos(theta)
    ring_z = SHAFT_RADIUS * np.sin(theta)
    near = np.column_stack([np.full(SHAFT_SEGMENTS, -half), ring_y, ring_z])
    far = np.column_stack([np.full(SHAFT_SEGMENTS, half), ring_y, ring_z])
    caps = np.array([[-half, 0.0, 0.0], [half, 0.0, 0.0]])
    vertices = [np.vstack([near, far, caps])]

    n = SHAFT_SEGMENTS
    near_cap, far_cap = 2 * n, 2 * n + 1
    faces: list[tuple[int, int, int]] = []
    for i in range(n):
        j = (i + 1) % n
        faces += [(i, j, n + j), (i, n + j, n + i), (near_cap, j, i), (far_cap, n + i, n + j)]
    face_blocks = [np.asarray(faces, dtype=np.int64)]

    base = np.array([half, 0.0, 0.0])
    count = 2 * n + 2
    for sign in (1.0, -1.0):
        tip = np.array([half + JAW_LENGTH, sign * JAW_SPREAD, 0.0])
        jaw_vertices, jaw_faces = _prism(base, tip, (0.6 * SHAFT_RADIUS, 0.2 * SHAFT_RADIUS), 0.5 * SHAFT_RADIUS)
        vertices.append(jaw_vertices)
        face_blocks.append(jaw_faces + count)
        count += jaw_vertices.shape[0]

    c, s = math.cos(angle), math.sin(angle)
    rotation = np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
    model = np.vstack(vertices) @ rotation.T
    return TriangleMesh(model, np.vstack(face_blocks))


def _target_pixel(rng: SplitMix64, difficulty: Difficulty, cam: Camera) -> tuple[float, float]:
    if difficulty is Difficulty.OCCLUDED:
        margin = rng.uniform(2.0, 6.0)
        side = rng.choice_index(4)
        along = rng.random()
        if side == 0:
            return margin, along * (cam.height - 1)
        if side == 1:
            return cam.width - 1 - margin, along * (cam.height - 1)
        if side == 2:
            return along * (cam.width - 1), margin
        return along * (cam.width - 1), cam.height - 1 - margin
    return cam.cx, cam.cy


def generate(seed: int, difficulty: Difficulty | str = Difficulty.EASY) -> SynthScene:
    """
    Generate a synthetic scene.

    Args:
        seed: Generator seed; the same seed and difficulty give a bit-identical scene
        difficulty: "easy", "displaced" or "occluded"

    Returns:
        The scene with its ground truth
    """
    level = Difficulty(difficulty)
    rng = SplitMix64(seed)
    cam = SYNTH_CAMERA

    field = _HeightField(
        base=rng.uniform(1.8, 2.2),
        amplitudes=(rng.uniform(0.03, 0.08), rng.uniform(0.03, 0.08), rng.uniform(0.01, 0.04)),
        frequencies=(rng.uniform(2.0, 4.0), rng.uniform(2.0, 4.0), rng.uniform(3.0, 6.0)),
        phases=(rng.uniform(0, 2 * math.pi), rng.uniform(0, 2 * math.pi), rng.uniform(0, 2 * math.pi)),
    )
    ray_x, ray_y = _pixel_rays(cam)
    tissue_z = field.depth_along_rays(ray_x, ray_y)
    tissue_x, tissue_y = ray_x * tissue_z, ray_y * tissue_z
    tissue_rgb = _tissue_color(tissue_x, tissue_y)

    stride = (slice(None, None, TISSUE_STRIDE), slice(None, None, TISSUE_STRIDE))
    tissue = PointCloud(
        np.column_stack([tissue_x[stride].ravel(), tissue_y[stride].ravel(), tissue_z[stride].ravel()]),
        tissue_rgb[stride].reshape(-1, 3),
    )

    tool = build_tool_model(rng.uniform(0.0, 2.0 * math.pi))
    sigma = rng.uniform(0.25, 0.4)
    gap = rng.uniform(0.15, 0.25)

    u, v = _target_pixel(rng, level, cam)
    lateral = np.zeros(2)
    if level is Difficulty.DISPLACED:
        low, high = tissue.aabb()
        reach = 0.1 * float(np.linalg.norm(high - low)) * math.sqrt(rng.random())
        heading = rng.uniform(0.0, 2.0 * math.pi)
        lateral = reach * np.array([math.cos(heading), math.sin(heading)])

    ray = np.array([(u - cam.cx) / cam.fx, (v - cam.cy) / cam.fy])
    surface = float(field.depth_along_rays(ray[0:1], ray[1:2])[0])
    depth = surface - gap
    target = np.array([ray[0] * depth + lateral[0], ray[1] * depth + lateral[1], depth])
    offset = target - sigma * tool.vertices.mean(axis=0)

    projected = perspective_project(sigma * tool.vertices + offset, cam)
    mask = rasterize_silhouette(projected, cam, RasterConfig(), tool.faces)
    tool_depth, covered = rasterize_depth(projected, tool.faces, cam)

    in_front = covered.values & (tool_depth.values < tissue_z)
    observed_depth = np.where(in_front, tool_depth.values, tissue_z)
    observed_depth = np.rint(observed_depth / SYNTH_DEPTH_SCALE) * SYNTH_DEPTH_SCALE

    tool_rgb = np.rint(np.asarray(DEFAULT_TOOL_COLOR) * 255.0) / 255.0
    image = np.where(in_front[:, :, None], tool_rgb, tissue_rgb)

    logger.debug(
        f"synth seed={seed} {level.value}: sigma={sigma:.4f} offset={offset.tolist()} "
        f"mask pixels={mask.count}"
    )
    return SynthScene(
        seed=seed,
        difficulty=level,
        camera=cam,
        depth_scale=SYNTH_DEPTH_SCALE,
        tissue=tissue,
        tool=tool,
        true_sigma=sigma,
        true_offset=(float(offset[0]), float(offset[1]), float(offset[2])),
        mask=BinaryMask(mask.values, MaskSemantics.TOOL),
        depth=DepthMap(observed_depth),
        image=ImageRGB(image),
    )


SCENE_FILES = (
    "image.png",
    "depth.png",
    "mask.png",
    "tissue.ply",
    "tool.obj",
    "camera.json",
    "truth.json",
)


def export_scene(scene: SynthScene, out_dir: Path | str) -> Path:
    """
    Write a scene directory readable by every CLI command.

    Files: image.png, depth.png (16-bit), mask.png (label PNG, tool id 1),
    tissue.ply (complete tissue surface), tool.obj (unscaled model),
    camera.json and truth.json.

    Returns:
        The output directory
    """
    root = Path(out_dir)
    root.mkdir(parents=True, exist_ok=True)
    write_image(scene.image, root / "image.png")
    write_depth(scene.depth, root / "depth.png", scene.depth_scale)
    write_label_mask({SYNTH_TOOL_ID: scene.mask}, scene.camera.shape, root / "mask.png")
    write_pointcloud(scene.tissue, root / "tissue.ply")
    write_obj(scene.tool, root / "tool.obj")
    write_camera_config(CameraConfigFile(scene.camera, scene.depth_scale), root / "camera.json")
    write_text_atomic(root / "truth.json", json.dumps(scene.truth(), indent=2))
    logger.info(f"Exported synthetic scene seed={scene.seed} to {root}")
    return root
