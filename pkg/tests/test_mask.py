import numpy as np
import pytest
from PIL import Image

import spinecurve.mask as mk
from conftest import render_tube, sine_center


def rectangle_mask(height=100, width=40, x0=10, x1=20):
    data = np.zeros((height, width), dtype=bool)
    data[:, x0: x1 + 1] = True
    return mk.BinaryMask(data)


def rectangle_annotation(x_left=10.0, x_right=20.0, y_max=99.0):
    ys = np.linspace(0.0, y_max, 17)
    return mk.ContourAnnotation(
        tuple((x_left, y) for y in ys), tuple((x_right, y) for y in ys)
    )


class TestLoadMask:
    def test_all_white_png(self, tmp_path):
        path = tmp_path / "white.png"
        Image.fromarray(np.full((512, 256), 255, dtype=np.uint8)).save(path)
        mask = mk.load_mask(path)
        assert (mask.width, mask.height) == (256, 512)
        assert mask.foreground_count == 131072

    def test_all_black_is_empty_error(self, tmp_path):
        path = tmp_path / "black.png"
        Image.fromarray(np.zeros((64, 64), dtype=np.uint8)).save(path)
        with pytest.raises(mk.MaskError, match="empty mask"):
            mk.load_mask(path)

    def test_checkerboard_pgm_counts(self, tmp_path):
        grid = np.indices((32, 48)).sum(axis=0) % 2 == 0
        pixels = grid.astype(np.uint8) * 255
        path = tmp_path / "board.pgm"
        Image.fromarray(pixels).save(path)
        mask = mk.load_mask(path)
        # independent pixel-count oracle on the raw grid
        assert mask.foreground_count == int((pixels > 127).sum())

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            mk.load_mask(tmp_path / "nope.png")

    def test_garbage_file(self, tmp_path):
        path = tmp_path / "junk.png"
        path.write_bytes(b"not an image at all")
        with pytest.raises(mk.MaskError, match="cannot read"):
            mk.load_mask(path)

    def test_threshold_at_127(self, tmp_path):
        pixels = np.array([[127, 128], [0, 255]], dtype=np.uint8)
        path = tmp_path / "thr.png"
        Image.fromarray(pixels).save(path)
        mask = mk.load_mask(path)
        assert mask.data.tolist() == [[False, True], [False, True]]


class TestCleanMask:
    def test_solid_blob_unchanged(self):
        mask = rectangle_mask()
        assert mk.clean_mask(mask) == mask

    def test_speckle_removed(self):
        data = np.zeros((80, 80), dtype=bool)
        data[10:60, 30:41] = True   # 550 px blob
        data[70:72, 3:5] = True     # 4 px speckle
        with pytest.warns(RuntimeWarning, match="components"):
            cleaned = mk.clean_mask(mk.BinaryMask(data))
        assert not cleaned.data[70, 3]
        assert cleaned.data[10:60, 30:41].all()

    def test_single_pixel_hole_filled_hand_example(self):
        # 5x5 block with its centre off; closing by the 3x3 square fills
        # the hole: dilation covers everything, erosion keeps the block.
        data = np.ones((5, 5), dtype=bool)
        data[2, 2] = False
        cleaned = mk.clean_mask(mk.BinaryMask(data))
        assert cleaned.data.all()

    def test_idempotent_on_noise(self, rng):
        for _ in range(10):
            data = np.zeros((120, 60), dtype=bool)
            data[10:110, 20:40] = True
            holes = rng.integers(0, 2, size=(100, 20)).astype(bool)
            data[10:110, 20:40] &= ~(holes & (rng.random((100, 20)) < 0.08))
            speck_r = rng.integers(0, 120, 8)
            speck_c = rng.integers(0, 60, 8)
            data[speck_r, speck_c] = True
            import warnings

            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                once = mk.clean_mask(mk.BinaryMask(data))
                twice = mk.clean_mask(once)
            assert once == twice

    def test_empty_mask_rejected(self):
        with pytest.raises(mk.MaskError, match="empty"):
            mk.clean_mask(mk.BinaryMask(np.zeros((4, 4), dtype=bool)))


class TestExtractCenterline:
    def test_rectangle_midline(self):
        pts = mk.extract_centerline(rectangle_mask(), 17)
        assert pts.shape == (17, 2)
        np.testing.assert_allclose(pts[:, 0], 15.0)
        np.testing.assert_allclose(pts[0], [15.0, 0.0])
        np.testing.assert_allclose(pts[-1], [15.0, 99.0])
        # even spacing over rows 0..99 up to integer-row rounding
        assert np.max(np.abs(pts[:, 1] - np.linspace(0.0, 99.0, 17))) <= 0.5

    def test_strictly_increasing_y(self, rng):
        mask = render_tube(sine_center(25.0, 1.0, 512), 512, 256)
        pts = mk.extract_centerline(mask, 34)
        assert np.all(np.diff(pts[:, 1]) > 0)

    def test_linear_tube_within_half_pixel(self):
        mask = render_tube(lambda y: 50.0 + 0.2 * y, 200, 120, half_width=5.0)
        pts = mk.extract_centerline(mask, 17)
        expected = 50.0 + 0.2 * pts[:, 1]
        assert np.max(np.abs(pts[:, 0] - expected)) <= 0.5

    def test_sine_tube_within_one_pixel(self):
        center = sine_center(30.0, 1.5, 512)
        mask = render_tube(center, 512, 256)
        pts = mk.extract_centerline(mask, 34)
        expected = np.asarray([center(y) for y in pts[:, 1]])
        assert np.max(np.abs(pts[:, 0] - expected)) <= 1.0

    def test_widest_run_wins(self):
        data = np.zeros((60, 100), dtype=bool)
        data[:, 40:61] = True   # 21 px spine
        data[:, 5:8] = True     # 3 px streak artifact
        pts = mk.extract_centerline(mk.BinaryMask(data), 17)
        np.testing.assert_allclose(pts[:, 0], 50.0)

    def test_horizontal_flip_equivariance(self):
        center = sine_center(20.0, 1.0, 300, center_x=60.0)
        mask = render_tube(center, 300, 140, half_width=9.0)
        flipped = mk.BinaryMask(mask.data[:, ::-1])
        pts = mk.extract_centerline(mask, 17)
        pts_flipped = mk.extract_centerline(flipped, 17)
        expected_x = mask.width - 1 - pts[:, 0]
        assert np.max(np.abs(pts_flipped[:, 0] - expected_x)) <= 1.0

    def test_too_few_rows(self):
        mask = rectangle_mask(height=10, width=30)
        with pytest.raises(mk.MaskError, match="need at least 17"):
            mk.extract_centerline(mask, 17)

    def test_gap_rows_skipped_with_warning(self):
        data = np.zeros((50, 30), dtype=bool)
        data[0:20, 10:20] = True
        data[23:50, 10:20] = True
        with pytest.warns(RuntimeWarning, match="no foreground"):
            pts = mk.extract_centerline(mk.BinaryMask(data), 17)
        assert np.all(np.diff(pts[:, 1]) > 0)


class TestContourAnnotation:
    def test_wrong_count_rejected(self):
        ys = np.linspace(0, 99, 16)
        with pytest.raises(mk.ContourError, match="left contour must contain 17"):
            mk.ContourAnnotation(
                tuple((10.0, y) for y in ys),
                tuple((20.0, y) for y in np.linspace(0, 99, 17)),
            )

    def test_non_increasing_y_rejected(self):
        ys = list(np.linspace(0, 99, 17))
        ys[5] = ys[4]
        with pytest.raises(mk.ContourError, match="strictly increase"):
            mk.ContourAnnotation(
                tuple((10.0, y) for y in ys),
                tuple((20.0, y) for y in np.linspace(0, 99, 17)),
            )

    def test_sides_crossing_rejected(self):
        ys = np.linspace(0, 99, 17)
        left = [(10.0, y) for y in ys]
        right = [(20.0, y) for y in ys]
        left[8] = (25.0, left[8][1])
        with pytest.raises(mk.ContourError, match="stay left"):
            mk.ContourAnnotation(tuple(left), tuple(right))

    def test_json_round_trip(self):
        ann = rectangle_annotation()
        clone = mk.ContourAnnotation.from_dict(ann.to_dict())
        assert clone == ann


class TestContourToMask:
    def test_rectangle_fills_solid(self):
        mask = mk.contour_to_mask(rectangle_annotation(), 40, 100)
        assert mask.data[:, 10:21].all()
        assert not mask.data[:, :10].any()
        assert not mask.data[:, 22:].any()

    def test_out_of_bounds_point(self):
        ann = rectangle_annotation(x_right=20.0)
        with pytest.raises(mk.ContourError, match="outside image bounds"):
            mk.contour_to_mask(ann, 18, 100)

    def test_trapezoid_area_matches_shoelace(self):
        ys = np.linspace(0.0, 99.0, 17)
        left = tuple((10.0 + 0.1 * y, y) for y in ys)
        right = tuple((30.0 + 0.2 * y, y) for y in ys)
        ann = mk.ContourAnnotation(left, right)
        mask = mk.contour_to_mask(ann, 80, 100)
        area = abs(mk.shoelace_area(ann.polygon()))
        perimeter = 2 * 99.0 + 2 * 40.0  # generous bound on boundary pixels
        assert abs(mask.foreground_count - area) <= perimeter

    def test_self_intersection_named(self):
        # Both sides keep their per-index ordering invariants, but the left
        # polyline swings right across the dipping right polyline.
        ys_l = np.linspace(0.0, 99.0, 17)
        ys_r = np.linspace(3.0, 96.0, 17)
        left = [(10.0, y) for y in ys_l]
        right = [(20.0, y) for y in ys_r]
        left[8] = (19.0, ys_l[8])
        left[9] = (10.0, ys_l[9])
        right[7] = (10.5, ys_r[7])
        right[8] = (19.5, ys_r[8])
        crossed = mk.ContourAnnotation(tuple(left), tuple(right))
        with pytest.raises(mk.ContourError, match="self-intersects: segment"):
            mk.contour_to_mask(crossed, 40, 110)

    def test_round_trip_rectangle_midline(self):
        mask = mk.contour_to_mask(rectangle_annotation(), 40, 100)
        pts = mk.extract_centerline(mask, 17)
        assert np.max(np.abs(pts[:, 0] - 15.0)) <= 0.5


class TestMaskToContour:
    def test_rectangle_contour(self):
        ann = mk.mask_to_contour(rectangle_mask())
        assert all(p[0] == 10.0 for p in ann.left)
        assert all(p[0] == 20.0 for p in ann.right)
        mask = mk.contour_to_mask(ann, 40, 100)
        pts = mk.extract_centerline(mask, 17)
        assert np.max(np.abs(pts[:, 0] - 15.0)) <= 0.5

    def test_tube_round_trip(self):
        center = sine_center(20.0, 1.0, 512)
        mask = render_tube(center, 512, 256)
        ann = mk.mask_to_contour(mask)
        rebuilt = mk.contour_to_mask(ann, 256, 512)
        pts = mk.extract_centerline(rebuilt, 17)
        expected = np.asarray([center(y) for y in pts[:, 1]])
        assert np.max(np.abs(pts[:, 0] - expected)) <= 2.0


class TestSaveMask:
    def test_png_round_trip(self, tmp_path):
        mask = rectangle_mask()
        path = tmp_path / "mask.png"
        mk.save_mask(mask, path)
        assert mk.load_mask(path) == mask
