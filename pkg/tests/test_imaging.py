import numpy as np
import pytest

from ctpsynth import (
    AffineMap,
    BoundingBox,
    Kernel,
    color_histogram,
    composite,
    convolve,
    crop_with_pad,
    make_rng,
    quantize,
    shaking_blur_kernel,
    warp_affine,
)
from conftest import textured


def reference_warp(img, m, out_w, out_h):
    """Scalar-loop bilinear warp: output centers through the inverse
    map, edge-replicated neighbors, round-half-up.  Independent of the
    vectorized implementation."""
    inv = m.invert()
    h, w = img.shape[:2]
    out = np.zeros((out_h, out_w, 3), dtype=np.uint8)
    for i in range(out_h):
        for j in range(out_w):
            sx, sy = inv.apply_point(j + 0.5, i + 0.5)
            gx, gy = sx - 0.5, sy - 0.5
            x0, y0 = int(np.floor(gx)), int(np.floor(gy))
            fx, fy = gx - x0, gy - y0

            def at(yy, xx):
                return img[min(max(yy, 0), h - 1), min(max(xx, 0), w - 1)].astype(float)

            val = (
                at(y0, x0) * (1 - fx) * (1 - fy)
                + at(y0, x0 + 1) * fx * (1 - fy)
                + at(y0 + 1, x0) * (1 - fx) * fy
                + at(y0 + 1, x0 + 1) * fx * fy
            )
            out[i, j] = np.clip(np.floor(val + 0.5), 0, 255).astype(np.uint8)
    return out


def reference_convolve(img, weights):
    """Direct-summation correlation with edge replication."""
    k = weights.shape[0]
    r = k // 2
    h, w = img.shape[:2]
    out = np.zeros_like(img)
    for i in range(h):
        for j in range(w):
            acc = np.zeros(3)
            for di in range(-r, r + 1):
                for dj in range(-r, r + 1):
                    yy = min(max(i + di, 0), h - 1)
                    xx = min(max(j + dj, 0), w - 1)
                    acc += weights[di + r, dj + r] * img[yy, xx]
            out[i, j] = np.clip(np.floor(acc + 0.5), 0, 255)
    return out


class TestQuantize:
    def test_round_half_up_and_clamp(self):
        x = np.array([[-3.0, 0.49, 0.5, 127.5, 254.5, 300.0]])
        got = quantize(np.stack([x, x, x], axis=-1))
        assert got.dtype == np.uint8
        assert list(got[0, :, 0]) == [0, 0, 1, 128, 255, 255]


class TestCropWithPad:
    def test_basic_arithmetic(self, rng):
        img = textured(rng, 100, 100)
        patch, inner = crop_with_pad(img, BoundingBox(10, 10, 20, 20), 4)
        assert patch.shape == (28, 28, 3)
        assert inner.as_tuple() == (4, 4, 20, 20)
        assert np.array_equal(patch[4:24, 4:24], img[10:30, 10:30])

    def test_left_edge_replicates(self, rng):
        img = textured(rng, 60, 60)
        patch, _ = crop_with_pad(img, BoundingBox(0, 20, 10, 10), 4)
        # all 4 left pad columns replicate source column 0
        for c in range(4):
            assert np.array_equal(patch[4:14, c], img[20:30, 0])

    def test_pad_zero_is_exact_crop(self, rng):
        img = textured(rng, 50, 70)
        patch, inner = crop_with_pad(img, BoundingBox(5, 7, 11, 13), 0)
        assert np.array_equal(patch, img[7:20, 5:16])
        assert inner.as_tuple() == (0, 0, 11, 13)

    def test_outside_frame_rejected(self, rng):
        img = textured(rng, 50, 50)
        with pytest.raises(ValueError, match="box outside frame"):
            crop_with_pad(img, BoundingBox(100, 100, 10, 10), 2)


class TestWarpAffine:
    def test_identity_bit_exact(self, rng):
        img = textured(rng, 37, 23)
        out = warp_affine(img, AffineMap.identity(), 23, 37)
        assert np.array_equal(out, img)

    def test_checkerboard_2x_corners(self):
        img = np.zeros((2, 2, 3), dtype=np.uint8)
        img[0, 0] = 250
        img[0, 1] = 10
        img[1, 0] = 60
        img[1, 1] = 200
        out = warp_affine(img, AffineMap.scaling(2.0), 4, 4)
        assert np.array_equal(out, reference_warp(img, AffineMap.scaling(2.0), 4, 4))
        assert np.array_equal(out[0, 0], img[0, 0])
        assert np.array_equal(out[0, 3], img[0, 1])
        assert np.array_equal(out[3, 0], img[1, 0])
        assert np.array_equal(out[3, 3], img[1, 1])

    def test_hflip_is_column_reversal(self, rng):
        img = textured(rng, 12, 17)
        out = warp_affine(img, AffineMap.hflip(17), 17, 12)
        assert np.array_equal(out, img[:, ::-1])

    def test_reference_oracle_random_maps(self, rng):
        img = textured(rng, 9, 11)
        maps = [
            AffineMap.scaling(1.37),
            AffineMap.scaling(0.71),
            AffineMap.shearing(0.3, -0.2),
            AffineMap(1.1, 0.2, 1.5, -0.1, 0.9, -0.7),
        ]
        for m in maps:
            out = warp_affine(img, m, 13, 10)
            assert np.array_equal(out, reference_warp(img, m, 13, 10)), m

    def test_singular_rejected(self, rng):
        img = textured(rng, 8, 8)
        with pytest.raises(ValueError, match="singular"):
            warp_affine(img, AffineMap(1, 0, 0, 2, 0, 0), 8, 8)


class TestConvolve:
    def test_identity_kernel(self, rng):
        img = textured(rng, 20, 20)
        w = np.zeros((3, 3))
        w[1, 1] = 1.0
        assert np.array_equal(convolve(img, Kernel(w)), img)

    def test_uniform_image_unchanged(self):
        img = np.full((16, 16, 3), 77, dtype=np.uint8)
        assert np.array_equal(convolve(img, shaking_blur_kernel(5)), img)

    def test_cross_on_single_white_pixel(self):
        img = np.zeros((9, 9, 3), dtype=np.uint8)
        img[4, 4] = 255
        out = convolve(img, shaking_blur_kernel(3))
        # 255/5 = 51 at the center and its 4 neighbors
        assert out[4, 4, 0] == 51
        assert out[4, 3, 0] == out[4, 5, 0] == out[3, 4, 0] == out[5, 4, 0] == 51
        assert out[3, 3, 0] == 0

    def test_direct_summation_oracle_asymmetric(self, rng):
        # asymmetric kernel pins the orientation (unflipped correlation)
        img = textured(rng, 10, 12)
        w = np.array([[0.5, 0.2, 0.0], [0.1, 0.1, 0.0], [0.1, 0.0, 0.0]])
        out = convolve(img, Kernel(w))
        assert np.array_equal(out, reference_convolve(img, w))

    def test_direct_summation_oracle_cross(self, rng):
        img = textured(rng, 11, 9)
        k = shaking_blur_kernel(5)
        assert np.array_equal(convolve(img, k), reference_convolve(img, k.weights))


class TestKernel:
    def test_validation(self):
        with pytest.raises(ValueError):
            Kernel(np.ones((4, 4)) / 16)  # even
        with pytest.raises(ValueError):
            Kernel(np.ones((3, 3)))  # sums to 9
        with pytest.raises(ValueError):
            Kernel(np.ones((1, 1)))  # too small


class TestComposite:
    def test_alpha_one_replaces(self, rng):
        dst = textured(rng, 20, 20)
        src = textured(rng, 6, 6)
        out = composite(dst, src, np.ones((6, 6)), (3, 4))
        assert np.array_equal(out[4:10, 3:9], src)
        mask = np.ones((20, 20), dtype=bool)
        mask[4:10, 3:9] = False
        assert np.array_equal(out[mask], dst[mask])

    def test_alpha_zero_noop(self, rng):
        dst = textured(rng, 20, 20)
        src = textured(rng, 6, 6)
        out = composite(dst, src, np.zeros((6, 6)), (3, 4))
        assert np.array_equal(out, dst)

    def test_half_alpha_rounds_up(self):
        dst = np.zeros((4, 4, 3), dtype=np.uint8)
        src = np.full((4, 4, 3), 255, dtype=np.uint8)
        out = composite(dst, src, np.full((4, 4), 0.5), (0, 0))
        assert np.all(out == 128)  # 127.5 rounds up

    def test_placement_clips_outside(self, rng):
        dst = textured(rng, 10, 10)
        src = np.full((6, 6, 3), 200, dtype=np.uint8)
        out = composite(dst, src, np.ones((6, 6)), (-3, 7))
        assert np.array_equal(out[7:10, 0:3], src[0:3, 3:6])
        assert np.array_equal(out[:7], dst[:7])

    def test_dims_mismatch(self, rng):
        dst = textured(rng, 10, 10)
        with pytest.raises(ValueError):
            composite(dst, np.zeros((4, 4, 3), np.uint8), np.ones((5, 5)), (0, 0))

    def test_complementary_masks_agree(self, rng):
        a = textured(rng, 8, 8)
        b = textured(rng, 8, 8)
        alpha = make_rng(3).uniform(0, 1, size=(8, 8))
        ab = composite(a, b, alpha, (0, 0)).astype(int)
        ba = composite(b, a, 1.0 - alpha, (0, 0)).astype(int)
        assert np.abs(ab - ba).max() <= 1  # rounding slack only


class TestColorHistogram:
    def test_black_single_bin(self):
        img = np.zeros((5, 5, 3), dtype=np.uint8)
        h = color_histogram(img)
        assert h.shape == (512,)
        assert h[0] == 1.0
        assert h.sum() == pytest.approx(1.0)

    def test_known_bin(self):
        # (r, g, b) = (255, 0, 64): bins (7, 0, 2) -> 7*64 + 0*8 + 2
        img = np.zeros((2, 2, 3), dtype=np.uint8)
        img[:, :] = (255, 0, 64)
        h = color_histogram(img)
        assert h[7 * 64 + 2] == 1.0

    def test_normalized(self, rng):
        h = color_histogram(textured(rng, 13, 7))
        assert h.sum() == pytest.approx(1.0, abs=1e-9)
        assert (h >= 0).all()

    def test_spatial_permutation_invariant(self, rng):
        img = textured(rng, 10, 10)
        flipped = img[:, ::-1]
        shuffled = img.reshape(-1, 3)[make_rng(5).permutation(100)].reshape(10, 10, 3)
        assert np.array_equal(color_histogram(img), color_histogram(flipped))
        assert np.array_equal(color_histogram(img), color_histogram(shuffled))
