"""Tests for the deterministic generator and synthetic scenes."""

import json
from pathlib import Path

import numpy as np
import pytest

from endofuse.core.placement import SilhouetteScorer
from endofuse.formats.camera import read_camera_config
from endofuse.formats.images import read_depth, read_image, read_label_masks
from endofuse.formats.obj import read_obj
from endofuse.formats.ply import read_pointcloud
from endofuse.synth.rng import SplitMix64
from endofuse.synth.scene import SCENE_FILES, SYNTH_TOOL_ID, Difficulty, export_scene, generate
from endofuse.types import RasterConfig


class TestSplitMix64:
    """Tests for the pseudo-random generator."""

    def test_first_output_for_seed_zero(self) -> None:
        """Test the reference first output."""
        assert SplitMix64(0).next_u64() == 16294208416658607535

    def test_same_seed_same_stream(self) -> None:
        """Test that two generators with one seed agree."""
        a, b = SplitMix64(123), SplitMix64(123)
        assert [a.next_u64() for _ in range(5)] == [b.next_u64() for _ in range(5)]

    def test_random_in_unit_interval(self) -> None:
        """Test that floats lie in [0, 1)."""
        rng = SplitMix64(7)
        values = [rng.random() for _ in range(1000)]
        assert min(values) >= 0.0
        assert max(values) < 1.0

    def test_choice_index_range(self) -> None:
        """Test that indices lie in [0, n)."""
        rng = SplitMix64(9)
        assert {rng.choice_index(4) for _ in range(200)} == {0, 1, 2, 3}


class TestGenerate:
    """Tests for synthetic scene generation."""

    @pytest.mark.parametrize("difficulty", ["easy", "displaced", "occluded"])
    def test_deterministic(self, difficulty: str) -> None:
        """Test that a seed always yields the same scene."""
        first, second = generate(5, difficulty), generate(5, difficulty)
        assert first.true_sigma == second.true_sigma
        assert first.true_offset == second.true_offset
        np.testing.assert_array_equal(first.tissue.positions, second.tissue.positions)
        np.testing.assert_array_equal(first.mask.values, second.mask.values)
        np.testing.assert_array_equal(first.depth.values, second.depth.values)
        np.testing.assert_array_equal(first.image.pixels, second.image.pixels)

    def test_seeds_differ(self) -> None:
        """Test that different seeds give different scenes."""
        assert generate(1).true_sigma != generate(2).true_sigma

    @pytest.mark.parametrize("difficulty", list(Difficulty))
    def test_ground_truth_silhouette_matches_mask(self, difficulty: Difficulty) -> None:
        """Test that the tool at its true pose reproduces the mask exactly."""
        scene = generate(11, difficulty)
        scorer = SilhouetteScorer(scene.tool_instance(), scene.true_sigma, scene.camera, RasterConfig())
        assert scorer(scene.true_offset) == 1.0
        assert scene.mask.count > 0

    def test_easy_centroid_on_optical_axis(self) -> None:
        """Test that the easy tool centroid has zero lateral offset."""
        scene = generate(4, "easy")
        centroid = scene.placed_tool().vertices.mean(axis=0)
        assert centroid[0] == pytest.approx(0.0, abs=1e-9)
        assert centroid[1] == pytest.approx(0.0, abs=1e-9)
        assert centroid[2] > 0.0

    def test_displaced_within_reach(self) -> None:
        """Test that the lateral displacement stays within 10% of the tissue diagonal."""
        for seed in range(5):
            scene = generate(seed, "displaced")
            low, high = scene.tissue.aabb()
            centroid = scene.placed_tool().vertices.mean(axis=0)
            assert np.linalg.norm(centroid[:2]) <= 0.1 * np.linalg.norm(high - low) + 1e-9

    def test_occluded_centroid_near_border(self) -> None:
        """Test that the occluded tool centroid projects next to an image border."""
        for seed in range(5):
            scene = generate(seed, "occluded")
            cam = scene.camera
            x, y, z = scene.placed_tool().vertices.mean(axis=0)
            u, v = cam.fx * x / z + cam.cx, cam.fy * y / z + cam.cy
            margin = min(u, cam.width - 1 - u, v, cam.height - 1 - v)
            assert -1e-6 <= margin <= 6.0 + 1e-6

    def test_tool_hovers_above_tissue(self) -> None:
        """Test that the tool centroid sits 0.15 to 0.25 in front of the tissue on its ray."""
        scene = generate(6, "easy")
        centroid = scene.placed_tool().vertices.mean(axis=0)
        positions = scene.tissue.positions
        on_axis = positions[np.argmin(positions[:, 0] ** 2 + positions[:, 1] ** 2)]
        assert 0.15 - 1e-9 <= on_axis[2] - centroid[2] <= 0.25 + 1e-9

    def test_depth_is_quantized(self) -> None:
        """Test that stored depth lies on the depth_scale grid."""
        scene = generate(2, "easy")
        steps = scene.depth.values / scene.depth_scale
        np.testing.assert_allclose(steps, np.rint(steps), atol=1e-6)

    def test_unknown_difficulty(self) -> None:
        """Test that only the three difficulties exist."""
        with pytest.raises(ValueError):
            generate(0, "impossible")


class TestExportScene:
    """Tests for writing scene directories."""

    def test_files_written_and_readable(self, tmp_path: Path) -> None:
        """Test that every scene file exists and reads back to the scene."""
        scene = generate(8, "displaced")
        out = export_scene(scene, tmp_path / "scene")
        assert sorted(p.name for p in out.iterdir()) == sorted(SCENE_FILES)

        config = read_camera_config(out / "camera.json")
        assert config.camera == scene.camera
        assert config.depth_scale == scene.depth_scale

        masks = read_label_masks(out / "mask.png")
        assert list(masks) == [SYNTH_TOOL_ID]
        np.testing.assert_array_equal(masks[SYNTH_TOOL_ID].values, scene.mask.values)

        np.testing.assert_allclose(read_depth(out / "depth.png", scene.depth_scale).values, scene.depth.values, atol=1e-9)
        np.testing.assert_allclose(read_image(out / "image.png").pixels, scene.image.pixels, atol=1e-12)
        np.testing.assert_array_equal(read_pointcloud(out / "tissue.ply").positions, scene.tissue.positions)
        np.testing.assert_array_equal(read_obj(out / "tool.obj").vertices, scene.tool.vertices)

    def test_truth_document(self, tmp_path: Path) -> None:
        """Test the ground-truth JSON."""
        scene = generate(3, "occluded")
        export_scene(scene, tmp_path)
        truth = json.loads((tmp_path / "truth.json").read_text())
        assert truth["schema_version"] == 1
        assert truth["seed"] == 3
        assert truth["difficulty"] == "occluded"
        assert truth["tool_id"] == SYNTH_TOOL_ID
        assert truth["sigma"] == scene.true_sigma
        assert truth["offset"] == list(scene.true_offset)
