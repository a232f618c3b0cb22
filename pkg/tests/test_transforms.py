import math

import numpy as np
import pytest

from incontext.stimuli import transforms
from incontext.stimuli.images import quantize
from conftest import random_image


def dense_gaussian_blur(image, sigma):
    """Brute-force 2-D Gaussian convolution; the independent blur oracle."""
    radius = math.ceil(3 * sigma)
    j = np.arange(-radius, radius + 1, dtype=np.float64)
    k1 = np.exp(-(j * j) / (2.0 * sigma * sigma))
    k1 /= k1.sum()
    k2 = np.outer(k1, k1)
    src = image.astype(np.float64)
    padded = np.pad(src, ((radius, radius), (radius, radius), (0, 0)),
                    mode="symmetric")
    h, w = src.shape[:2]
    out = np.empty_like(src)
    for i in range(h):
        for j2 in range(w):
            window = padded[i:i + 2 * radius + 1, j2:j2 + 2 * radius + 1]
            out[i, j2] = np.tensordot(k2, window, axes=([0, 1], [0, 1]))
    return out


class TestMinimalContext:
    def test_full_image_bbox_is_identity(self, rng):
        img = random_image(rng, 30, 40)
        out = transforms.gen_minimal_context(img, (0, 0, 40, 30))
        assert np.array_equal(out, img)

    def test_checker_surround_is_midgray(self):
        img = np.indices((4, 4)).sum(axis=0) % 2 * 255
        img = np.repeat(img[:, :, None], 3, axis=2).astype(np.uint8)
        out = transforms.gen_minimal_context(img, (0, 0, 2, 2))
        assert np.array_equal(out[:2, :2], img[:2, :2])
        outside = np.ones((4, 4), dtype=bool)
        outside[:2, :2] = False
        assert (out[outside] == 128).all()

    def test_output_dimensions_match_source(self):
        img = np.zeros((1024, 1280, 3), dtype=np.uint8)
        out = transforms.gen_minimal_context(img, (100, 100, 50, 60))
        assert out.shape == img.shape

    def test_degenerate_bbox_rejected(self, rng):
        img = random_image(rng, 10, 10)
        with pytest.raises(ValueError):
            transforms.gen_minimal_context(img, (2, 2, 0, 5))


class TestCoCrop:
    def test_zero_ratio_equals_bbox(self, rng):
        img = random_image(rng, 80, 90)
        crop = transforms.gen_co_crop(img, (10, 20, 30, 25), 0)
        assert crop.window == (10, 20, 30, 25)
        assert crop.achieved_ratio == 0.0
        assert np.array_equal(crop.image, img[20:45, 10:40])

    def test_ratio_three_square(self, rng):
        img = random_image(rng, 200, 200)
        crop = transforms.gen_co_crop(img, (95, 95, 10, 10), 3)
        x0, y0, w, h = crop.window
        assert (w, h) == (20, 20)
        assert abs(crop.achieved_ratio - 3) < 1e-12

    def test_scale_three_rectangle(self, rng):
        img = random_image(rng, 300, 300)
        crop = transforms.gen_co_crop(img, (120, 140, 20, 10), 8)
        assert crop.window[2:] == (60, 30)

    def test_ratio_law_random(self, rng):
        for _ in range(60):
            w = int(rng.integers(12, 40))
            h = int(rng.integers(12, 40))
            co = int(rng.choice([2, 4, 8, 16]))
            side = int(math.ceil(max(w, h) * math.sqrt(co + 1))) + 60
            img = random_image(rng, side, side)
            x = (side - w) // 2
            y = (side - h) // 2
            crop = transforms.gen_co_crop(img, (x, y, w, h), co)
            assert not crop.clamped
            assert abs(crop.achieved_ratio - co) / co <= 0.02

    def test_clamped_when_window_exceeds_image(self, rng):
        img = random_image(rng, 50, 50)
        crop = transforms.gen_co_crop(img, (10, 10, 30, 30), 16)
        assert crop.clamped
        assert not crop.feasible
        assert crop.image.shape[:2] == (50, 50)

    def test_shifted_near_border_still_contains_bbox(self, rng):
        img = random_image(rng, 100, 100)
        crop = transforms.gen_co_crop(img, (0, 0, 10, 10), 3)
        x0, y0, w, h = crop.window
        assert x0 == 0 and y0 == 0
        assert not crop.clamped
        assert abs(crop.achieved_ratio - 3) / 3 <= 0.02


class TestBlur:
    def test_constant_image_fixed_point(self):
        img = np.full((40, 30, 3), 77, dtype=np.uint8)
        for sigma in (2, 8, 32):
            out = transforms.gen_blur(img, (5, 5, 10, 10), sigma, "context")
            assert np.array_equal(out, img)

    def test_context_blur_protects_bbox(self, rng):
        img = random_image(rng, 40, 50)
        out = transforms.gen_blur(img, (12, 8, 13, 17), 4, "context")
        assert np.array_equal(out[8:25, 12:25], img[8:25, 12:25])
        assert not np.array_equal(out, img)

    def test_object_blur_protects_context(self, rng):
        img = random_image(rng, 40, 50)
        out = transforms.gen_blur(img, (12, 8, 13, 17), 4, "object")
        mask = transforms.bbox_mask(img.shape, (12, 8, 13, 17))
        assert np.array_equal(out[~mask], img[~mask])
        assert not np.array_equal(out[mask], img[mask])

    def test_impulse_matches_dense_oracle(self):
        img = np.zeros((24, 20, 3), dtype=np.uint8)
        img[12, 9] = 255
        sigma = 2
        ours = transforms.gaussian_blur_float(img, sigma)
        oracle = dense_gaussian_blur(img, sigma)
        denom = np.maximum(np.abs(oracle), 1e-30)
        mask = np.abs(oracle) > 1e-12 * 255
        rel = np.abs(ours - oracle)[mask] / denom[mask]
        assert rel.max() < 1e-6
        assert np.array_equal(quantize(ours), quantize(oracle))

    def test_random_image_matches_dense_oracle(self, rng):
        img = random_image(rng, 18, 22)
        ours = transforms.gaussian_blur_float(img, 2)
        oracle = dense_gaussian_blur(img, 2)
        assert np.abs(ours - oracle).max() / 255 < 1e-9


class TestTexture:
    def test_amplitude_spectrum_preserved(self, rng):
        img = random_image(rng, 32, 48)
        scrambled = transforms.phase_scramble(img, rng)
        for c in range(3):
            a0 = np.abs(np.fft.fft2(img[:, :, c].astype(np.float64)))
            a1 = np.abs(np.fft.fft2(scrambled[:, :, c]))
            denom = np.maximum(a0, 1e-9)
            assert (np.abs(a1 - a0) / denom).max() < 1e-6

    def test_constant_image_stays_constant(self, rng):
        img = np.full((16, 16, 3), 99, dtype=np.uint8)
        out = transforms.gen_texture_context(img, (4, 4, 4, 4), rng)
        assert np.array_equal(out, img)

    def test_object_region_bit_exact(self, rng):
        img = random_image(rng, 48, 32)
        out = transforms.gen_texture_context(img, (8, 10, 12, 14), rng)
        assert np.array_equal(out[10:24, 8:20], img[10:24, 8:20])

    def test_deterministic_under_seed(self, rng):
        img = random_image(rng, 32, 32)
        a = transforms.gen_texture_context(
            img, (4, 4, 8, 8), np.random.default_rng(7))
        b = transforms.gen_texture_context(
            img, (4, 4, 8, 8), np.random.default_rng(7))
        assert np.array_equal(a, b)


def piece_hashes(image, grid):
    g = int(grid.split("x")[0])
    rows = transforms.jigsaw_edges(image.shape[0], g)
    cols = transforms.jigsaw_edges(image.shape[1], g)
    return {
        (i, j): image[rows[i]:rows[i + 1], cols[j]:cols[j + 1]].tobytes()
        for i in range(g) for j in range(g)
    }


class _IdentityRng:
    def permutation(self, n):
        return np.arange(n)


class TestJigsaw:
    def test_spanning_object_rejected(self, rng):
        img = random_image(rng, 64, 64)
        # 8x8 pieces are 8 px; this bbox crosses a piece boundary
        out = transforms.gen_jigsaw(img, (6, 6, 6, 6), "8x8", rng)
        assert out is None

    def test_identity_permutation_is_identity(self, rng):
        img = random_image(rng, 64, 64)
        out = transforms.gen_jigsaw(img, (9, 9, 5, 5), "8x8", _IdentityRng())
        assert np.array_equal(out, img)

    def test_multiset_conserved_and_target_fixed(self, rng):
        img = random_image(rng, 61, 67)  # remainder pieces exercise grouping
        bbox = (17, 17, 10, 10)  # inside piece (1, 1) of 4x4
        out = transforms.gen_jigsaw(img, bbox, "4x4", rng)
        before = piece_hashes(img, "4x4")
        after = piece_hashes(out, "4x4")
        assert after[(1, 1)] == before[(1, 1)]
        assert sorted(after.values()) == sorted(before.values())
        assert np.array_equal(out[17:27, 17:27], img[17:27, 17:27])

    def test_scrambles_something(self, rng):
        img = random_image(rng, 64, 64)
        out = transforms.gen_jigsaw(
            img, (2, 2, 4, 4), "4x4", np.random.default_rng(5))
        assert out is not None and not np.array_equal(out, img)


def _ann(image_id, category, bbox=(4, 4, 6, 6), size=(40, 40)):
    from incontext.stimuli import TargetAnnotation
    return TargetAnnotation(
        image_id=image_id, file_name=f"{image_id}.png", image_size=size,
        bbox=bbox, category=category, extent=6.0, size_bin="unbinned")


class TestCongruencePaste:
    def _pool(self):
        return [
            _ann("t", "mouse"),
            _ann("d1", "mouse"),
            _ann("d2", "keyboard"),
            _ann("d2b", "mouse"),  # second object of image d2
            _ann("d3", "cup"),
        ]

    def test_congruent_donor_contains_category(self, rng):
        pool = self._pool()
        pool[3] = _ann("d2", "mouse")  # d2 now has mouse + keyboard
        donors = transforms.eligible_donors(pool[0], pool, "congruent")
        assert {d.image_id for d in donors} == {"d1", "d2"}

    def test_incongruent_donor_lacks_category(self):
        pool = self._pool()
        pool[3] = _ann("d2", "mouse")
        donors = transforms.eligible_donors(pool[0], pool, "incongruent")
        assert {d.image_id for d in donors} == {"d3"}

    def test_paste_pixels_bit_exact(self, rng):
        pool = [_ann("t", "mouse"), _ann("d", "cup")]
        src = random_image(rng, 40, 40)
        donor_img = random_image(rng, 40, 40)
        images = {"t": src, "d": donor_img}
        result = transforms.gen_congruence_paste(
            pool[0], pool, "incongruent", rng,
            lambda a: images[a.image_id])
        assert result.donor.image_id == "d"
        out = result.image
        assert np.array_equal(out[4:10, 4:10], src[4:10, 4:10])
        mask = transforms.bbox_mask(out.shape, (4, 4, 6, 6))
        assert np.array_equal(out[~mask], donor_img[~mask])

    def test_no_donor_returns_none(self, rng):
        pool = [_ann("t", "mouse"), _ann("d", "mouse")]
        assert transforms.gen_congruence_paste(
            pool[0], pool, "incongruent", rng, lambda a: None) is None
