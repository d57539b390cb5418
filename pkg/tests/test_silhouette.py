"""Tests for silhouette and depth rasterization."""

import numpy as np
import pytest

from endofuse.core.projection import perspective_project
from endofuse.render.silhouette import rasterize_depth, rasterize_silhouette
from endofuse.types import Camera, InvalidInput, MaskSemantics, RasterConfig

CAM = Camera(fx=100, fy=100, cx=50, cy=50, width=100, height=100)


def _inside_brute_force(a: np.ndarray, b: np.ndarray, c: np.ndarray, width: int, height: int) -> np.ndarray:
    """Per-pixel sign test, closed edges, either winding."""
    result = np.zeros((height, width), dtype=bool)
    for y in range(height):
        for x in range(width):
            p = np.array([x, y], dtype=np.float64)
            d1 = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])
            d2 = (c[0] - b[0]) * (p[1] - b[1]) - (c[1] - b[1]) * (p[0] - b[0])
            d3 = (a[0] - c[0]) * (p[1] - c[1]) - (a[1] - c[1]) * (p[0] - c[0])
            has_neg = d1 < 0 or d2 < 0 or d3 < 0
            has_pos = d1 > 0 or d2 > 0 or d3 > 0
            result[y, x] = not (has_neg and has_pos)
    return result


class TestRasterizeSilhouette:
    """Tests for binary footprints."""

    def test_single_point_disc(self) -> None:
        """Test that one point at a pixel center covers the 5-pixel disc of radius 1."""
        mask = rasterize_silhouette(np.array([[50.0, 50.0, 1.0]]), CAM)
        assert mask.count == 5
        assert mask.semantics is MaskSemantics.TOOL
        assert mask.values[50, 50] and mask.values[49, 50] and mask.values[50, 51]
        assert not mask.values[49, 49]

    def test_disc_radius(self) -> None:
        """Test that a radius-2 disc at a pixel center covers 13 pixels."""
        mask = rasterize_silhouette(np.array([[20.0, 30.0, 1.0]]), CAM, RasterConfig(splat_px=2.0))
        assert mask.count == 13

    def test_empty_input(self) -> None:
        """Test that no points give an empty mask."""
        assert rasterize_silhouette(np.zeros((0, 3)), CAM).count == 0
        assert rasterize_silhouette(np.zeros((0, 3)), CAM, faces=np.zeros((0, 3))).count == 0

    def test_points_behind_camera_skipped(self) -> None:
        """Test that points with non-positive depth draw nothing."""
        mask = rasterize_silhouette(np.array([[50.0, 50.0, -1.0], [10.0, 10.0, 0.0]]), CAM)
        assert mask.count == 0

    def test_points_outside_image_clipped(self) -> None:
        """Test that a disc at the image corner is clipped to the image."""
        mask = rasterize_silhouette(np.array([[0.0, 0.0, 1.0]]), CAM)
        assert mask.count == 3

    @pytest.mark.parametrize("seed", range(5))
    def test_triangle_matches_brute_force(self, seed: int) -> None:
        """Test filled triangles against a per-pixel sign test."""
        rng = np.random.default_rng(seed)
        cam = Camera(fx=50, fy=50, cx=20, cy=15, width=40, height=30)
        corners = rng.uniform([-5.0, -5.0], [45.0, 35.0], size=(3, 2))
        triples = np.column_stack([corners, np.ones(3)])
        mask = rasterize_silhouette(triples, cam, faces=np.array([[0, 1, 2]]))
        expected = _inside_brute_force(corners[0], corners[1], corners[2], 40, 30)
        np.testing.assert_array_equal(mask.values, expected)

    def test_winding_does_not_matter(self) -> None:
        """Test that reversing a triangle's winding gives the same footprint."""
        triples = np.array([[10.0, 10.0, 1.0], [40.0, 12.0, 1.0], [20.0, 35.0, 1.0]])
        forward = rasterize_silhouette(triples, CAM, faces=np.array([[0, 1, 2]]))
        backward = rasterize_silhouette(triples, CAM, faces=np.array([[0, 2, 1]]))
        np.testing.assert_array_equal(forward.values, backward.values)
        assert forward.count > 0

    def test_axis_aligned_square(self) -> None:
        """Test that a square with corners on pixel centers covers its closed extent."""
        triples = np.array(
            [[10.0, 20.0, 1.0], [19.0, 20.0, 1.0], [19.0, 29.0, 1.0], [10.0, 29.0, 1.0]]
        )
        mask = rasterize_silhouette(triples, CAM, faces=np.array([[0, 1, 2], [0, 2, 3]]))
        assert mask.count == 100
        assert mask.values[20:30, 10:20].all()

    def test_triangle_with_vertex_behind_dropped(self) -> None:
        """Test that a triangle with a vertex behind the camera is not drawn."""
        triples = np.array([[10.0, 10.0, 1.0], [40.0, 12.0, 1.0], [20.0, 35.0, -1.0]])
        mask = rasterize_silhouette(triples, CAM, faces=np.array([[0, 1, 2]]))
        assert mask.count == 0

    def test_face_index_out_of_range(self) -> None:
        """Test that a face referencing a missing vertex is rejected."""
        with pytest.raises(InvalidInput):
            rasterize_silhouette(np.array([[1.0, 1.0, 1.0]]), CAM, faces=np.array([[0, 1, 2]]))

    def test_many_triangles_give_their_union(self) -> None:
        """Test that a large mesh covers exactly the union of its triangles."""
        rng = np.random.default_rng(7)
        corners = rng.uniform(0.0, 99.0, size=(300, 3, 2))
        triples = np.column_stack([corners.reshape(-1, 2), np.ones(900)])
        faces = np.arange(900).reshape(300, 3)
        combined = rasterize_silhouette(triples, CAM, faces=faces)
        union = np.zeros((100, 100), dtype=bool)
        for face in faces:
            union |= rasterize_silhouette(triples, CAM, faces=face.reshape(1, 3)).values
        np.testing.assert_array_equal(combined.values, union)

    def test_matches_depth_coverage(self) -> None:
        """Test that the silhouette and the z-buffer cover the same pixels."""
        rng = np.random.default_rng(11)
        vertices = np.column_stack([rng.uniform(-0.6, 0.6, size=(30, 2)), rng.uniform(1.0, 3.0, 30)])
        faces = rng.integers(0, 30, size=(40, 3))
        projected = perspective_project(vertices, CAM)
        _, covered = rasterize_depth(projected, faces, CAM)
        mask = rasterize_silhouette(projected, CAM, faces=faces)
        np.testing.assert_array_equal(mask.values, covered.values)

    def test_triangle_partly_outside_image(self) -> None:
        """Test that spans are clipped to the image on every side."""
        triples = np.array([[-30.0, -20.0, 1.0], [130.0, 50.0, 1.0], [40.0, 140.0, 1.0]])
        mask = rasterize_silhouette(triples, CAM, faces=np.array([[0, 1, 2]]))
        a, b, c = triples[:, :2]
        np.testing.assert_array_equal(mask.values, _inside_brute_force(a, b, c, 100, 100))


class TestRasterizeDepth:
    """Tests for z-buffered mesh depth."""

    def test_fronto_parallel_plane_depth(self) -> None:
        """Test that a plane at constant depth renders that depth where covered."""
        vertices = np.array([[-0.5, -0.5, 2.0], [0.5, -0.5, 2.0], [0.5, 0.5, 2.0], [-0.5, 0.5, 2.0]])
        faces = np.array([[0, 1, 2], [0, 2, 3]])
        depth, covered = rasterize_depth(perspective_project(vertices, CAM), faces, CAM)
        assert covered.count == 51 * 51
        np.testing.assert_allclose(depth.values[covered.values], 2.0)
        assert np.all(depth.values[~covered.values] == 0.0)

    def test_nearest_triangle_wins(self) -> None:
        """Test that overlapping triangles keep the smaller depth."""
        near = np.array([[-0.5, -0.5, 1.0], [0.5, -0.5, 1.0], [0.0, 0.5, 1.0]])
        far = near * np.array([2.0, 2.0, 2.0])
        vertices = np.vstack([far, near])
        faces = np.array([[0, 1, 2], [3, 4, 5]])
        depth, _ = rasterize_depth(perspective_project(vertices, CAM), faces, CAM)
        assert depth.values[50, 50] == pytest.approx(1.0)

    def test_perspective_correct_interpolation(self) -> None:
        """Test that a tilted plane's depth matches the ray-plane intersection."""
        vertices = np.array([[-1.0, -1.0, 2.0], [1.0, -1.0, 4.0], [1.0, 1.0, 4.0], [-1.0, 1.0, 2.0]])
        faces = np.array([[0, 1, 2], [0, 2, 3]])
        depth, covered = rasterize_depth(perspective_project(vertices, CAM), faces, CAM)
        rows, cols = np.nonzero(covered.values)
        # plane z = 3 + x, ray x = z * (u - cx) / fx  =>  z = 3 / (1 - (u - cx) / fx)
        expected = 3.0 / (1.0 - (cols - CAM.cx) / CAM.fx)
        np.testing.assert_allclose(depth.values[rows, cols], expected, rtol=1e-9)
