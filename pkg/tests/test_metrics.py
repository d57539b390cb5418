"""Tests for IoU, PSNR, SSIM and per-region evaluation."""

import math

import numpy as np
import pytest

from endofuse.metrics.quality import evaluate_regions, iou, luma, psnr, ssim, ssim_map
from endofuse.render.morphology import dilate_mask
from endofuse.types import BinaryMask, DimensionMismatch, ImageRGB, InvalidInput, MaskSemantics


def _gaussian_blur_reference(image: np.ndarray) -> np.ndarray:
    """Separable 11-tap Gaussian (sigma 1.5) with mirrored borders."""
    taps = np.exp(-(np.arange(-5, 6) ** 2) / (2.0 * 1.5**2))
    taps /= taps.sum()
    height, width = image.shape
    padded = np.pad(image, 5, mode="symmetric")
    rows = sum(taps[i] * padded[:, i : i + width] for i in range(11))
    return sum(taps[j] * rows[j : j + height, :] for j in range(11))


def _ssim_reference(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    c1, c2 = 0.01**2, 0.03**2
    mu_x, mu_y = _gaussian_blur_reference(x), _gaussian_blur_reference(y)
    var_x = _gaussian_blur_reference(x * x) - mu_x**2
    var_y = _gaussian_blur_reference(y * y) - mu_y**2
    cov = _gaussian_blur_reference(x * y) - mu_x * mu_y
    return ((2 * mu_x * mu_y + c1) * (2 * cov + c2)) / ((mu_x**2 + mu_y**2 + c1) * (var_x + var_y + c2))


class TestIoU:
    """Tests for mask intersection over union."""

    def test_overlapping_bars(self) -> None:
        """Test that two 2-pixel bars sharing one pixel give 1/3."""
        left = np.array([[True, True, False]])
        right = np.array([[False, True, True]])
        assert iou(BinaryMask(left), BinaryMask(right)) == pytest.approx(1.0 / 3.0)

    def test_identical_and_disjoint(self) -> None:
        """Test the extreme values."""
        a = BinaryMask(np.array([[True, False]]))
        b = BinaryMask(np.array([[False, True]]))
        assert iou(a, a) == 1.0
        assert iou(a, b) == 0.0

    def test_both_empty(self) -> None:
        """Test that two empty masks count as a perfect match."""
        assert iou(BinaryMask.empty(3, 3), BinaryMask.empty(3, 3)) == 1.0

    def test_symmetric(self) -> None:
        """Test that swapping the arguments never changes the score."""
        rng = np.random.default_rng(4)
        for _ in range(100):
            a = BinaryMask(rng.random((12, 15)) < rng.uniform(0.0, 0.6))
            b = BinaryMask(rng.random((12, 15)) < rng.uniform(0.0, 0.6))
            assert iou(a, b) == iou(b, a)

    @pytest.mark.parametrize("kernel", [3, 5, 9])
    def test_against_own_dilation(self, kernel: int) -> None:
        """Test that a mask scores |m| / |dilate(m)| against its dilation."""
        rng = np.random.default_rng(kernel)
        for _ in range(20):
            mask = BinaryMask(rng.random((32, 32)) < 0.03)
            grown = dilate_mask(mask, kernel)
            if grown.count == 0:
                continue
            assert iou(mask, grown) == mask.count / grown.count

    def test_size_mismatch(self) -> None:
        """Test that masks of different sizes are rejected."""
        with pytest.raises(DimensionMismatch):
            iou(BinaryMask.empty(3, 3), BinaryMask.empty(3, 4))


class TestPsnr:
    """Tests for masked PSNR."""

    def test_half_grey_against_black(self) -> None:
        """Test that an MSE of 0.25 gives 10 log10(4) dB."""
        value = psnr(ImageRGB.zeros(4, 4), ImageRGB(np.full((4, 4, 3), 0.5)), BinaryMask.full(4, 4))
        assert value == pytest.approx(6.0206, abs=1e-4)

    def test_identical_is_infinite(self) -> None:
        """Test that identical regions have infinite PSNR."""
        image = ImageRGB(np.random.default_rng(0).random((4, 4, 3)))
        assert math.isinf(psnr(image, image, BinaryMask.full(4, 4)))

    def test_only_masked_pixels_count(self) -> None:
        """Test that differences outside the mask are ignored."""
        reference = np.zeros((2, 2, 3))
        rendered = reference.copy()
        rendered[1, 1] = 1.0
        keep = BinaryMask(np.array([[True, True], [True, False]]))
        assert math.isinf(psnr(ImageRGB(rendered), ImageRGB(reference), keep))

    def test_empty_mask_rejected(self) -> None:
        """Test that an empty region has no PSNR."""
        with pytest.raises(InvalidInput):
            psnr(ImageRGB.zeros(2, 2), ImageRGB.zeros(2, 2), BinaryMask.empty(2, 2))

    def test_single_pixel_single_channel(self) -> None:
        """Test one masked pixel off by 0.1 on one channel: MSE 0.01/3, 10 log10(300) dB."""
        reference = np.zeros((3, 3, 3))
        rendered = reference.copy()
        rendered[1, 2, 0] = 0.1
        rendered[0, 0] = 0.9
        keep = np.zeros((3, 3), dtype=bool)
        keep[1, 2] = True
        value = psnr(ImageRGB(rendered), ImageRGB(reference), BinaryMask(keep))
        assert value == pytest.approx(24.7712, abs=1e-4)

    def test_matches_direct_mse(self) -> None:
        """Test random images and masks against an explicit per-pixel loop."""
        rng = np.random.default_rng(8)
        for _ in range(20):
            a, b = rng.random((6, 7, 3)), rng.random((6, 7, 3))
            keep = rng.random((6, 7)) < 0.5
            keep[0, 0] = True
            squared = [
                (a[r, c, ch] - b[r, c, ch]) ** 2
                for r, c in zip(*np.nonzero(keep))
                for ch in range(3)
            ]
            expected = 10.0 * math.log10(1.0 / (sum(squared) / len(squared)))
            value = psnr(ImageRGB(a), ImageRGB(b), BinaryMask(keep))
            assert value == pytest.approx(expected, rel=1e-12)


class TestSsim:
    """Tests for masked SSIM."""

    def test_self_similarity_is_one(self) -> None:
        """Test that an image is perfectly similar to itself."""
        image = ImageRGB(np.random.default_rng(1).random((16, 20, 3)))
        assert ssim(image, image, BinaryMask.full(16, 20)) == pytest.approx(1.0)

    def test_matches_reference_window(self) -> None:
        """Test the SSIM map against an explicit mirrored-border Gaussian window."""
        rng = np.random.default_rng(2)
        x, y = rng.random((16, 20)), rng.random((16, 20))
        np.testing.assert_allclose(ssim_map(x, y), _ssim_reference(x, y), atol=1e-10)

    def test_masked_mean(self) -> None:
        """Test that SSIM averages the map over masked pixels only."""
        rng = np.random.default_rng(3)
        a, b = ImageRGB(rng.random((16, 20, 3))), ImageRGB(rng.random((16, 20, 3)))
        keep = np.zeros((16, 20), dtype=bool)
        keep[4:10, 5:15] = True
        expected = ssim_map(luma(a), luma(b))[keep].mean()
        assert ssim(a, b, BinaryMask(keep)) == pytest.approx(expected)

    def test_luma_weights(self) -> None:
        """Test the BT.601 luma of pure primaries."""
        primaries = ImageRGB(np.eye(3).reshape(1, 3, 3))
        np.testing.assert_allclose(luma(primaries)[0], [0.299, 0.587, 0.114])

    def test_constant_black_against_white(self) -> None:
        """Test that flat 0 against flat 1 leaves only the stabilizing constants: C1 / (1 + C1)."""
        black, white = ImageRGB.zeros(16, 16), ImageRGB(np.ones((16, 16, 3)))
        c1 = 0.01**2
        value = ssim(black, white, BinaryMask.full(16, 16))
        assert value == pytest.approx(c1 / (1.0 + c1), rel=1e-6)
        reference = _ssim_reference(np.zeros((16, 16)), np.ones((16, 16)))
        assert value == pytest.approx(float(reference.mean()), rel=1e-6)
        assert 0.0 < value < 1e-3

    def test_noise_lowers_similarity(self) -> None:
        """Test that added noise gives an SSIM strictly below 1."""
        rng = np.random.default_rng(9)
        clean = rng.random((24, 24, 3))
        noisy = np.clip(clean + rng.normal(scale=0.05, size=clean.shape), 0.0, 1.0)
        value = ssim(ImageRGB(clean), ImageRGB(noisy), BinaryMask.full(24, 24))
        assert -1.0 <= value < 1.0


class TestEvaluateRegions:
    """Tests for per-tool and tissue scoring."""

    def test_tool_and_tissue_regions(self) -> None:
        """Test that tools come first in id order, then tissue."""
        rng = np.random.default_rng(4)
        reference = ImageRGB(rng.random((16, 16, 3)))
        tool_a = np.zeros((16, 16), dtype=bool)
        tool_a[:4, :4] = True
        tool_b = np.zeros((16, 16), dtype=bool)
        tool_b[8:, 8:] = True
        masks = {
            2: BinaryMask(tool_b, MaskSemantics.TOOL),
            1: BinaryMask(tool_a, MaskSemantics.TOOL),
        }
        silhouettes = {1: BinaryMask(tool_a, MaskSemantics.TOOL)}
        reports = evaluate_regions(reference, reference, masks, silhouettes)
        assert [r.label for r in reports] == [1, 2, "tissue"]
        assert reports[0].iou == 1.0
        assert reports[1].iou is None
        assert all(math.isinf(r.psnr) for r in reports)
        assert all(r.ssim == pytest.approx(1.0) for r in reports)

    def test_tools_covering_image_omit_tissue(self) -> None:
        """Test that no tissue region is reported when tools cover everything."""
        image = ImageRGB.zeros(4, 4)
        reports = evaluate_regions(image, image, {1: BinaryMask.full(4, 4, MaskSemantics.TOOL)})
        assert [r.label for r in reports] == [1]

    def test_no_tools_scores_whole_image_as_tissue(self) -> None:
        """Test that without tools the tissue region is the whole image."""
        rendered = ImageRGB.zeros(4, 4)
        reference = ImageRGB(np.full((4, 4, 3), 0.5))
        reports = evaluate_regions(rendered, reference, {})
        assert len(reports) == 1
        assert reports[0].psnr == pytest.approx(6.0206, abs=1e-4)

    def test_mask_size_mismatch(self) -> None:
        """Test that a tool mask of the wrong size is rejected."""
        image = ImageRGB.zeros(4, 4)
        with pytest.raises(DimensionMismatch):
            evaluate_regions(image, image, {1: BinaryMask.full(3, 4, MaskSemantics.TOOL)})
