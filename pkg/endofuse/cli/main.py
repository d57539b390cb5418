"""Command-line interface for endofuse.

The five subcommands form one pipeline:

    synth       generate a synthetic scene directory with ground truth
    backproject lift the observed frame into a tissue point cloud
    opjpo       solve each tool's scale and position, write the placement report
    render      splat a (composed) cloud into colour and depth images
    metrics     score a rendered image per tool region and for tissue

Exit codes: 0 on success, 1 when a computation fails on valid inputs
(degenerate geometry, undefined correlation), 2 for usage, input and I/O errors.
"""

import logging
import os
from collections.abc import Iterator
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from pathlib import Path

import click
import numpy as np
from rich.console import Console

from endofuse.constants import (
    DEFAULT_DILATION_KERNEL,
    EXIT_COMPUTATION_ERROR,
    EXIT_USAGE_ERROR,
)
from endofuse.core.placement import SilhouetteScorer, compose_scene, place_tool
from endofuse.core.projection import back_project
from endofuse.formats.camera import CameraConfigFile, read_camera_config
from endofuse.formats.images import (
    read_depth,
    read_image,
    read_label_masks,
    read_mask,
    write_depth,
    write_image,
    write_label_mask,
)
from endofuse.formats.obj import read_tool_geometry
from endofuse.formats.ply import read_labeled_pointcloud, read_pointcloud, write_pointcloud
from endofuse.metrics.quality import evaluate_regions
from endofuse.render.morphology import dilate_mask
from endofuse.render.splats import estimate_splat_radius, render, splats_from_cloud
from endofuse.reports import MetricsReport, PlacementReport
from endofuse.synth.scene import Difficulty, export_scene, generate
from endofuse.types import (
    BinaryMask,
    EndofuseError,
    InvalidConfiguration,
    InvalidInput,
    MaskSemantics,
    PlacementResult,
    PointCloud,
    SplatSet,
    ToolInstance,
    TriangleMesh,
)
from endofuse.utils.config_validator import OpjpoSettings, load_opjpo_config
from endofuse.utils.logging_config import resolve_log_level, setup_logging
from endofuse.utils.report_tables import metrics_table, placement_table, print_table
from endofuse.utils.stage_timer import StageTimings

console = Console(stderr=True)
logger = logging.getLogger(__name__)

_EXISTING_FILE = click.Path(exists=True, dir_okay=False, path_type=Path)
_OUTPUT_FILE = click.Path(dir_okay=False, path_type=Path)


class InputError(click.ClickException):
    """Bad input, configuration or I/O; exits with 2."""

    exit_code = EXIT_USAGE_ERROR


class ComputationError(click.ClickException):
    """A computation failed on valid inputs; exits with 1."""

    exit_code = EXIT_COMPUTATION_ERROR


@contextmanager
def _reported_errors() -> Iterator[None]:
    """Turn endofuse and OS errors into click exceptions with the right exit code."""
    try:
        yield
    except (InvalidInput, InvalidConfiguration, OSError) as err:
        raise InputError(str(err)) from err
    except EndofuseError as err:
        raise ComputationError(str(err)) from err


def _to_camera_frame(cloud: PointCloud, config: CameraConfigFile) -> PointCloud:
    if config.pose is None or config.pose.is_identity():
        return cloud
    return PointCloud(config.pose.inverse().apply(cloud.positions), cloud.colors)


def _to_scene_frame(cloud: PointCloud, config: CameraConfigFile) -> PointCloud:
    if config.pose is None or config.pose.is_identity():
        return cloud
    return PointCloud(config.pose.apply(cloud.positions), cloud.colors)


@click.group()
@click.option("--verbose", "-v", is_flag=True, help="Enable verbose debug logging")
@click.option(
    "--log-file",
    type=_OUTPUT_FILE,
    default=None,
    help="Append log records to this file",
)
def cli(verbose: bool, log_file: Path | None) -> None:
    """endofuse - place reconstructed tool models into a tissue point cloud.

    Without --verbose the log level comes from ENDOFUSE_LOG_LEVEL
    (DEBUG, INFO, WARNING, ERROR, CRITICAL), defaulting to WARNING.

    Example pipeline:

    \b
        $ endofuse synth --seed 0 --difficulty displaced --out-dir scene
        $ endofuse backproject --image scene/image.png --depth scene/depth.png \\
              --mask scene/mask.png --camera scene/camera.json --out tissue.ply
        $ endofuse opjpo --tissue scene/tissue.ply --tool scene/tool.obj \\
              --mask scene/mask.png --camera scene/camera.json \\
              --out-placement placement.json --out-scene composed.ply
        $ endofuse render --scene composed.ply --camera scene/camera.json \\
              --out-color render.png --out-depth render_depth.png
        $ endofuse metrics --rendered render.png --reference scene/image.png \\
              --mask scene/mask.png --report metrics.json
    """
    level, rejected = resolve_log_level(verbose)
    setup_logging(level=level, use_rich=True, log_file=log_file, console=console)
    if rejected is not None:
        logger.warning(f"Unknown log level {rejected!r} in ENDOFUSE_LOG_LEVEL; using {level}")


@cli.command()
@click.option("--image", type=_EXISTING_FILE, required=True, help="8-bit RGB PNG")
@click.option("--depth", type=_EXISTING_FILE, required=True, help="16-bit depth PNG")
@click.option("--mask", type=_EXISTING_FILE, required=True, help="Tool label PNG (nonzero = tool)")
@click.option("--camera", type=_EXISTING_FILE, required=True, help="Camera configuration JSON")
@click.option("--out", type=_OUTPUT_FILE, required=True, help="Tissue PLY to write")
@click.option(
    "--dilate",
    type=int,
    default=DEFAULT_DILATION_KERNEL,
    show_default=True,
    help="Odd square kernel used to grow the tool mask before excluding it",
)
def backproject(image: Path, depth: Path, mask: Path, camera: Path, out: Path, dilate: int) -> None:
    """Back-project the tissue pixels of one frame into a coloured point cloud."""
    timings = StageTimings()
    with _reported_errors():
        with timings.stage("read inputs"):
            config = read_camera_config(camera)
            colour = read_image(image)
            observed = read_depth(depth, config.depth_scale)
            tools = read_mask(mask)
        with timings.stage("back-projection"):
            keep = dilate_mask(tools, dilate).complement(MaskSemantics.KEEP)
            cloud = back_project(colour, observed, keep, config.camera, config.pose)
        with timings.stage("write tissue"):
            write_pointcloud(cloud, out)
    click.echo(len(cloud))


def _load_tools(
    tool_specs: tuple[str, ...], masks: dict[int, BinaryMask], shape: tuple[int, int]
) -> tuple[list[ToolInstance], dict[int, str]]:
    """
    Pair tool models with mask labels.

    A spec is either ``ID=PATH`` (the model for one label) or ``PATH`` (the
    model for every label without an explicit one).
    """
    explicit: dict[int, Path] = {}
    fallback: Path | None = None
    for spec in tool_specs:
        label, sep, model = spec.partition("=")
        if sep:
            try:
                explicit[int(label)] = Path(model)
            except ValueError as err:
                raise InvalidInput(f"--tool {spec!r}: expected ID=PATH with an integer id") from err
        elif fallback is not None:
            raise InvalidInput("only one --tool may omit the ID= prefix")
        else:
            fallback = Path(spec)

    sources: dict[int, Path] = {tool_id: fallback for tool_id in masks} if fallback is not None else {}
    sources.update(explicit)
    if not sources:
        raise InvalidInput("no tools to place: the mask has no labels and no --tool gives an id")

    instances: list[ToolInstance] = []
    errors: dict[int, str] = {}
    geometry_cache: dict[Path, PointCloud | TriangleMesh] = {}
    for tool_id, path in sorted(sources.items()):
        if path not in geometry_cache:
            geometry_cache[path] = read_tool_geometry(path)
        mask = masks.get(tool_id, BinaryMask.empty(*shape, semantics=MaskSemantics.TOOL))
        try:
            instances.append(ToolInstance(id=tool_id, geometry=geometry_cache[path], mask=mask))
        except InvalidInput as err:
            errors[tool_id] = str(err)
    return instances, errors


def _place_one(
    tool: ToolInstance, tissue: PointCloud, config: CameraConfigFile, settings: OpjpoSettings
) -> tuple[int, PlacementResult | str]:
    """Place one tool, returning its result or the error message."""
    try:
        result = place_tool(
            tool,
            tissue,
            config.camera,
            settings.search,
            settings.raster,
            settings.scale_mode,
            settings.scale_mask_dilation,
            settings.use_depth_prior,
        )
    except EndofuseError as err:
        logger.warning(f"tool {tool.id}: {err}")
        return tool.id, f"{type(err).__name__}: {err}"
    return tool.id, result


@cli.command()
@click.option("--tissue", type=_EXISTING_FILE, required=True, help="Tissue PLY (scene frame)")
@click.option(
    "--tool",
    "tool_specs",
    multiple=True,
    required=True,
    help="Tool model (OBJ or PLY) as PATH for every label, or ID=PATH for one label",
)
@click.option("--mask", type=_EXISTING_FILE, required=True, help="Tool label PNG")
@click.option("--camera", type=_EXISTING_FILE, required=True, help="Camera configuration JSON")
@click.option("--config", "config_path", type=_EXISTING_FILE, default=None, help="Search configuration JSON")
@click.option("--out-placement", type=_OUTPUT_FILE, required=True, help="Placement report JSON")
@click.option("--out-scene", type=_OUTPUT_FILE, default=None, help="Composed labelled PLY")
@click.option("--out-silhouette", type=_OUTPUT_FILE, default=None, help="Label PNG of placed silhouettes")
@click.option("--workers", type=click.IntRange(min=1), default=1, show_default=True, help="Parallel tool solvers")
def opjpo(
    tissue: Path,
    tool_specs: tuple[str, ...],
    mask: Path,
    camera: Path,
    config_path: Path | None,
    out_placement: Path,
    out_scene: Path | None,
    out_silhouette: Path | None,
    workers: int,
) -> None:
    """Solve each tool's scale, then refine its position by silhouette IoU."""
    timings = StageTimings()
    with _reported_errors():
        with timings.stage("read inputs"):
            settings = load_opjpo_config(config_path)
            config = read_camera_config(camera)
            masks = read_label_masks(mask)
            for tool_id, tool_mask in masks.items():
                config.camera.check_shape(f"mask {tool_id}", tool_mask.shape)
            cloud = _to_camera_frame(read_pointcloud(tissue), config)
            tools, load_errors = _load_tools(tool_specs, masks, config.camera.shape)

        report = PlacementReport(scale_mode=settings.scale_mode.value)
        for tool_id, message in load_errors.items():
            report.add_error(tool_id, message)

        with timings.stage("placement"):
            if workers > 1 and len(tools) > 1:
                with ProcessPoolExecutor(max_workers=min(workers, len(tools), os.cpu_count() or 1)) as pool:
                    outcomes = list(
                        pool.map(
                            _place_one,
                            tools,
                            [cloud] * len(tools),
                            [config] * len(tools),
                            [settings] * len(tools),
                        )
                    )
            else:
                outcomes = [_place_one(tool, cloud, config, settings) for tool in tools]

        placed: list[tuple[ToolInstance, PlacementResult]] = []
        for tool, (tool_id, outcome) in zip(tools, outcomes):
            if isinstance(outcome, PlacementResult):
                report.add_result(tool_id, outcome)
                placed.append((tool, outcome))
            else:
                report.add_error(tool_id, outcome)

        with timings.stage("write outputs"):
            if out_scene is not None:
                composed = compose_scene(cloud, placed)
                write_pointcloud(_to_scene_frame(composed.cloud, config), out_scene, labels=composed.labels)
            if out_silhouette is not None:
                silhouettes = {
                    tool.id: SilhouetteScorer(tool, result.sigma, config.camera, settings.raster).silhouette(
                        result.offset
                    )
                    for tool, result in placed
                }
                write_label_mask(silhouettes, config.camera.shape, out_silhouette)
            report.timings = timings.as_dict()
            report.export_to_json(out_placement)

    print_table(placement_table(report), console)
    if not placed:
        raise ComputationError("no tool could be placed; see the placement report for per-tool errors")


@cli.command(name="render")
@click.option("--scene", type=_EXISTING_FILE, required=True, help="Point cloud PLY (scene frame)")
@click.option("--camera", type=_EXISTING_FILE, required=True, help="Camera configuration JSON")
@click.option("--out-color", type=_OUTPUT_FILE, required=True, help="RGB PNG to write")
@click.option("--out-depth", type=_OUTPUT_FILE, required=True, help="16-bit depth PNG to write")
@click.option(
    "--splat-radius",
    type=float,
    default=None,
    help="World-space splat radius (default: half the median nearest-neighbour spacing)",
)
def render_command(
    scene: Path, camera: Path, out_color: Path, out_depth: Path, splat_radius: float | None
) -> None:
    """Render a point cloud as Gaussian splats into colour and depth images."""
    timings = StageTimings()
    with _reported_errors():
        with timings.stage("read inputs"):
            config = read_camera_config(camera)
            cloud, _ = read_labeled_pointcloud(scene)
            cloud = _to_camera_frame(cloud, config)

        with timings.stage("render"):
            if cloud.is_empty:
                splats = SplatSet.empty()
            else:
                radius = splat_radius if splat_radius is not None else estimate_splat_radius(cloud)
                if not radius > 0:
                    raise InvalidInput(f"--splat-radius must be positive, got {radius}")
                splats = splats_from_cloud(cloud, radius)
            output = render(splats, config.camera)

        with timings.stage("write images"):
            write_image(output.color, out_color)
            write_depth(output.depth, out_depth, config.depth_scale)
    logger.info(f"Rendered {len(splats)} splats to {out_color} and {out_depth}")


@cli.command()
@click.option("--rendered", type=_EXISTING_FILE, required=True, help="Rendered RGB PNG")
@click.option("--reference", type=_EXISTING_FILE, required=True, help="Observed RGB PNG")
@click.option("--mask", type=_EXISTING_FILE, required=True, help="Tool label PNG")
@click.option("--report", type=_OUTPUT_FILE, required=True, help="Metrics report JSON")
@click.option("--silhouette", type=_EXISTING_FILE, default=None, help="Label PNG of rendered tool silhouettes")
def metrics(rendered: Path, reference: Path, mask: Path, report: Path, silhouette: Path | None) -> None:
    """Score a rendered image per tool region and for the tissue region."""
    with _reported_errors():
        observed = read_image(reference)
        candidate = read_image(rendered)
        masks = read_label_masks(mask)
        silhouettes = read_label_masks(silhouette) if silhouette is not None else None
        if silhouettes is not None:
            # tools without a drawn silhouette score IoU 0
            height, width = candidate.shape
            for tool_id in masks:
                silhouettes.setdefault(tool_id, BinaryMask.empty(height, width, MaskSemantics.TOOL))
        regions = evaluate_regions(candidate, observed, masks, silhouettes)
        result = MetricsReport(regions=regions)
        result.export_to_json(report)
    print_table(metrics_table(result), console)


@cli.command()
@click.option("--seed", type=int, required=True, help="Generator seed")
@click.option(
    "--difficulty",
    type=click.Choice([d.value for d in Difficulty]),
    default=Difficulty.EASY.value,
    show_default=True,
)
@click.option(
    "--out-dir",
    type=click.Path(file_okay=False, path_type=Path),
    required=True,
    help="Scene directory to create",
)
def synth(seed: int, difficulty: str, out_dir: Path) -> None:
    """Generate a synthetic scene with exact ground truth."""
    with _reported_errors():
        scene = generate(seed, difficulty)
        export_scene(scene, out_dir)
    click.echo(str(out_dir))
    logger.info(
        f"sigma={scene.true_sigma:.6f} offset={np.round(scene.true_offset, 6).tolist()} "
        f"mask pixels={scene.mask.count}"
    )


if __name__ == "__main__":
    cli()
