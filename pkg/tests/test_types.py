"""Tests for value types and their validation."""

import numpy as np
import pytest

from endofuse.types import (
    BinaryMask,
    Camera,
    DimensionMismatch,
    InvalidConfiguration,
    InvalidInput,
    MaskSemantics,
    PointCloud,
    SearchConfig,
    ToolInstance,
)


class TestCamera:
    """Tests for pinhole camera validation."""

    def test_shape_and_intrinsics(self) -> None:
        """Test the (height, width) shape and the K matrix."""
        camera = Camera(100.0, 120.0, 40.0, 30.0, 80, 60)
        assert camera.shape == (60, 80)
        np.testing.assert_array_equal(camera.intrinsic_matrix, [[100, 0, 40], [0, 120, 30], [0, 0, 1]])

    @pytest.mark.parametrize(
        "fx, width, cx",
        [(0.0, 80, 40.0), (100.0, 0, 0.0), (100.0, 80, 80.0), (100.0, 80, -0.5)],
    )
    def test_invalid_intrinsics(self, fx: float, width: int, cx: float) -> None:
        """Test that focal length, size and principal point are checked."""
        with pytest.raises(InvalidInput):
            Camera(fx, 100.0, cx, 30.0, width, 60)

    def test_check_shape_names_input(self) -> None:
        """Test that a shape mismatch names the offending input."""
        camera = Camera(100.0, 100.0, 40.0, 30.0, 80, 60)
        with pytest.raises(DimensionMismatch, match="depth"):
            camera.check_shape("depth", (60, 81))
        camera.check_shape("depth", (60, 80, 3))


class TestPointCloud:
    """Tests for point clouds."""

    def test_payload_is_read_only(self) -> None:
        """Test that the stored positions cannot be modified in place."""
        source = np.zeros((2, 3))
        cloud = PointCloud(source)
        source[0, 0] = 5.0
        assert cloud.positions[0, 0] == 0.0
        with pytest.raises(ValueError):
            cloud.positions[0, 0] = 1.0

    def test_rejects_bad_colours(self) -> None:
        """Test colour range and length checks."""
        with pytest.raises(InvalidInput):
            PointCloud(np.zeros((1, 3)), np.array([[1.5, 0.0, 0.0]]))
        with pytest.raises(InvalidInput):
            PointCloud(np.zeros((2, 3)), np.zeros((1, 3)))

    def test_rejects_non_finite(self) -> None:
        """Test that NaN positions are rejected."""
        with pytest.raises(InvalidInput):
            PointCloud(np.array([[0.0, np.nan, 1.0]]))

    def test_concatenate_mixed_colours(self) -> None:
        """Test that uncoloured clouds take the fill colour in a mixed join."""
        coloured = PointCloud(np.zeros((2, 3)), np.full((2, 3), 0.5))
        bare = PointCloud(np.ones((1, 3)))
        joined = PointCloud.concatenate([coloured, bare], fill_color=(1.0, 0.0, 0.0))
        assert len(joined) == 3
        assert joined.colors is not None
        np.testing.assert_array_equal(joined.colors[2], [1.0, 0.0, 0.0])
        assert PointCloud.concatenate([coloured, bare]).colors is None

    def test_empty_cloud_has_no_centroid(self) -> None:
        """Test that summaries of an empty cloud are rejected."""
        with pytest.raises(InvalidInput):
            PointCloud.empty().centroid()
        with pytest.raises(InvalidInput):
            PointCloud.empty().aabb()


class TestBinaryMask:
    """Tests for masks."""

    def test_integer_values_accepted(self) -> None:
        """Test that 0/1 integers are converted to booleans."""
        mask = BinaryMask(np.array([[0, 1], [1, 1]]))
        assert mask.count == 3
        assert mask.values.dtype == np.bool_

    def test_other_values_rejected(self) -> None:
        """Test that values other than 0 and 1 are rejected."""
        with pytest.raises(InvalidInput):
            BinaryMask(np.array([[0, 2]]))

    def test_complement_and_centroid(self) -> None:
        """Test the complement semantics and the pixel centroid."""
        values = np.zeros((3, 4), dtype=bool)
        values[1, 1:3] = True
        mask = BinaryMask(values, MaskSemantics.TOOL)
        keep = mask.complement()
        assert keep.semantics is MaskSemantics.KEEP
        assert keep.count == 10
        assert mask.centroid() == (1.5, 1.0)


class TestToolInstance:
    """Tests for tool validation."""

    def test_empty_mask_rejected(self) -> None:
        """Test that a tool needs at least one mask pixel."""
        with pytest.raises(InvalidInput, match="no set pixels"):
            ToolInstance(1, PointCloud(np.eye(3)), BinaryMask.empty(2, 2))

    def test_non_positive_id_rejected(self) -> None:
        """Test that id 0 is reserved for tissue."""
        with pytest.raises(InvalidInput):
            ToolInstance(0, PointCloud(np.eye(3)), BinaryMask.full(2, 2))

    def test_mask_takes_tool_semantics(self) -> None:
        """Test that the mask is retagged as a tool mask."""
        tool = ToolInstance(1, PointCloud(np.eye(3)), BinaryMask.full(2, 2))
        assert tool.mask.semantics is MaskSemantics.TOOL
        assert tool.faces is None


class TestSearchConfig:
    """Tests for the step schedule."""

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"min_step": 0.5, "initial_step": 0.1},
            {"shrink_factor": 1.0},
            {"max_iterations": -1},
            {"depth_prior": 0.0},
            {"initial_offset": (0.0, float("inf"), 1.0)},
        ],
    )
    def test_invalid_schedules(self, kwargs: dict[str, object]) -> None:
        """Test that inconsistent search parameters are configuration errors."""
        with pytest.raises(InvalidConfiguration):
            SearchConfig(**kwargs)  # type: ignore[arg-type]

    def test_initial_offset_normalized(self) -> None:
        """Test that a warm start is stored as a float tuple."""
        config = SearchConfig(initial_offset=[0, 1, 2])  # type: ignore[arg-type]
        assert config.initial_offset == (0.0, 1.0, 2.0)
