import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ctpsynth import (
    AffineMap,
    BoundingBox,
    center_error,
    clamp_box,
    corners_to_box,
    iou,
    iround,
    make_rng,
    round_half_up,
    transform_box,
)

finite_coord = st.floats(min_value=-200, max_value=200, allow_nan=False)
positive_size = st.floats(min_value=0.5, max_value=150, allow_nan=False)
boxes = st.builds(BoundingBox, finite_coord, finite_coord, positive_size, positive_size)


def centipixel_box(rng):
    """Box whose coordinates are exact multiples of 0.01 px."""
    x = int(rng.integers(0, 10000)) / 100.0
    y = int(rng.integers(0, 10000)) / 100.0
    w = int(rng.integers(1, 5000)) / 100.0
    h = int(rng.integers(1, 5000)) / 100.0
    return BoundingBox(x, y, w, h)


def iou_counting_oracle(a, b):
    """IoU by counting 0.01-px cells on an integer grid: exact for
    centipixel boxes, no interval arithmetic shared with the library."""

    def cells(box):
        x0, y0 = round(box.x * 100), round(box.y * 100)
        return x0, y0, x0 + round(box.w * 100), y0 + round(box.h * 100)

    ax0, ay0, ax1, ay1 = cells(a)
    bx0, by0, bx1, by1 = cells(b)
    ix = max(0, min(ax1, bx1) - max(ax0, bx0))
    iy = max(0, min(ay1, by1) - max(ay0, by0))
    inter = ix * iy
    union = (ax1 - ax0) * (ay1 - ay0) + (bx1 - bx0) * (by1 - by0) - inter
    return inter / union


class TestIoU:
    def test_identity(self):
        b = BoundingBox(0, 0, 10, 10)
        assert iou(b, b) == 1.0

    def test_disjoint(self):
        assert iou(BoundingBox(0, 0, 10, 10), BoundingBox(20, 20, 5, 5)) == 0.0

    def test_half_overlap(self):
        # inter 50, union 150
        got = iou(BoundingBox(0, 0, 10, 10), BoundingBox(5, 0, 10, 10))
        assert got == pytest.approx(1 / 3, abs=1e-9)

    def test_counting_oracle_100_instances(self):
        rng = make_rng(2024)
        for _ in range(100):
            a, b = centipixel_box(rng), centipixel_box(rng)
            assert iou(a, b) == pytest.approx(iou_counting_oracle(a, b), abs=1e-6)

    @given(boxes, boxes)
    def test_symmetric_and_bounded(self, a, b):
        ab, ba = iou(a, b), iou(b, a)
        assert ab == ba
        assert 0.0 <= ab <= 1.0

    @given(boxes, finite_coord, finite_coord)
    def test_translation_invariant(self, b, dx, dy):
        a2 = BoundingBox(b.x + dx, b.y + dy, b.w, b.h)
        b2 = BoundingBox(b.x + dx + 1, b.y + dy, b.w, b.h)
        base = iou(b, BoundingBox(b.x + 1, b.y, b.w, b.h))
        assert iou(a2, b2) == pytest.approx(base, abs=1e-9)

    @given(boxes)
    def test_self_is_one(self, b):
        assert iou(b, b) == 1.0


class TestTransformBox:
    def test_identity(self):
        b = BoundingBox(3, 4, 10, 20)
        got = transform_box(AffineMap.identity(), b)
        assert got.as_tuple() == pytest.approx(b.as_tuple())

    def test_translation(self):
        got = transform_box(AffineMap.translation(100, 50), BoundingBox(5, 5, 20, 20))
        assert got.as_tuple() == pytest.approx((105, 55, 20, 20))

    def test_shear_example(self):
        # x' = x + 0.5 y on (0,0,20,10): corners reach x = 20 + 0.5*10
        m = AffineMap(1, 0.5, 0, 0, 1, 0)
        got = transform_box(m, BoundingBox(0, 0, 20, 10))
        assert got.as_tuple() == pytest.approx((0, 0, 25, 10))

    def test_corner_enumeration_oracle(self):
        rng = make_rng(7)
        for _ in range(200):
            m = AffineMap(*(rng.uniform(-2, 2, size=6)))
            if abs(m.det) < 1e-3:
                continue
            b = centipixel_box(rng)
            pts = [
                (b.x, b.y),
                (b.x + b.w, b.y),
                (b.x, b.y + b.h),
                (b.x + b.w, b.y + b.h),
            ]
            mapped = [
                (m.a11 * x + m.a12 * y + m.tx, m.a21 * x + m.a22 * y + m.ty) for x, y in pts
            ]
            xs = [p[0] for p in mapped]
            ys = [p[1] for p in mapped]
            got = transform_box(m, b)
            want = (min(xs), min(ys), max(xs) - min(xs), max(ys) - min(ys))
            assert got.as_tuple() == pytest.approx(want, abs=1e-9)

    def test_singular_rejected(self):
        with pytest.raises(ValueError):
            transform_box(AffineMap(1, 0, 0, 2, 0, 0), BoundingBox(0, 0, 1, 1))

    def test_chain_corners_tighter_than_stepwise_aabb(self):
        # one final AABB over composed corners is never looser than
        # re-AABBing after every step
        rng = make_rng(11)
        for _ in range(200):
            m1 = AffineMap(*(rng.uniform(-1.5, 1.5, size=6)))
            m2 = AffineMap(*(rng.uniform(-1.5, 1.5, size=6)))
            if abs(m1.det) < 1e-3 or abs(m2.det) < 1e-3:
                continue
            b = centipixel_box(rng)
            final = transform_box(m2.compose(m1), b)
            stepwise = transform_box(m2, transform_box(m1, b))
            eps = 1e-9
            assert stepwise.x <= final.x + eps
            assert stepwise.y <= final.y + eps
            assert stepwise.x2 >= final.x2 - eps
            assert stepwise.y2 >= final.y2 - eps


class TestAffineMap:
    @given(st.floats(-50, 50), st.floats(-50, 50))
    def test_compose_matches_sequential(self, px, py):
        m1 = AffineMap(1.2, 0.3, 4, -0.1, 0.8, -2)
        m2 = AffineMap(0.5, -0.2, 1, 0.4, 1.1, 3)
        x1, y1 = m1.apply_point(px, py)
        want = m2.apply_point(x1, y1)
        got = m2.compose(m1).apply_point(px, py)
        assert got == pytest.approx(want, abs=1e-9)

    @given(st.floats(-50, 50), st.floats(-50, 50))
    def test_invert_round_trip(self, px, py):
        m = AffineMap(1.3, 0.2, 5, -0.4, 0.9, 2)
        x, y = m.apply_point(px, py)
        back = m.invert().apply_point(x, y)
        assert back == pytest.approx((px, py), abs=1e-8)

    def test_hflip_maps_width_interval_onto_itself(self):
        m = AffineMap.hflip(10)
        assert m.apply_point(0, 3) == pytest.approx((10, 3))
        assert m.apply_point(10, 3) == pytest.approx((0, 3))
        # pixel cell centers swap ends: 0.5 <-> 9.5
        assert m.apply_point(0.5, 0) == pytest.approx((9.5, 0))

    def test_scaling_and_shearing_constructors(self):
        assert AffineMap.scaling(2).apply_point(3, 4) == pytest.approx((6, 8))
        assert AffineMap.shearing(0.5, 0).apply_point(2, 4) == pytest.approx((4, 4))
        assert AffineMap.shearing(0, 0.5).apply_point(2, 4) == pytest.approx((2, 5))


class TestClampBox:
    def test_interior_unchanged(self):
        got = clamp_box(BoundingBox(10, 10, 20, 20), 100, 100)
        assert got.as_tuple() == pytest.approx((10, 10, 20, 20))

    def test_clipped(self):
        got = clamp_box(BoundingBox(-5, -5, 20, 20), 100, 100)
        assert got.as_tuple() == pytest.approx((0, 0, 15, 15))

    def test_outside_is_none(self):
        assert clamp_box(BoundingBox(200, 200, 10, 10), 100, 100) is None

    def test_sliver_is_none(self):
        assert clamp_box(BoundingBox(99.8, 10, 20, 20), 100, 100) is None

    @given(boxes)
    def test_contained_in_frame_and_input(self, b):
        got = clamp_box(b, 120, 90)
        if got is None:
            return
        assert got.x >= 0 and got.y >= 0
        assert got.x2 <= 120 and got.y2 <= 90
        assert got.x >= b.x - 1e-9 and got.x2 <= b.x2 + 1e-9
        assert got.y >= b.y - 1e-9 and got.y2 <= b.y2 + 1e-9


class TestCenterError:
    def test_identical(self):
        b = BoundingBox(1, 2, 3, 4)
        assert center_error(b, b) == 0.0

    def test_three_four_five(self):
        a = BoundingBox(0, 0, 10, 10)  # center (5,5)
        b = BoundingBox(3, 4, 10, 10)  # center (8,9)
        assert center_error(a, b) == pytest.approx(5.0)

    def test_axis_aligned(self):
        a = BoundingBox(-5, -10, 10, 20)  # center (0,0)
        b = BoundingBox(-5, 10, 10, 20)  # center (0,20)
        assert center_error(a, b) == pytest.approx(20.0)


class TestBoxBasics:
    def test_validation(self):
        with pytest.raises(ValueError):
            BoundingBox(0, 0, 0, 10)
        with pytest.raises(ValueError):
            BoundingBox(0, 0, 10, -1)

    def test_corners_to_box(self):
        pts = np.array([(1.0, 2.0), (5.0, 2.0), (1.0, 9.0), (5.0, 9.0)])
        assert corners_to_box(pts).as_tuple() == pytest.approx((1, 2, 4, 7))

    def test_properties(self):
        b = BoundingBox(10, 20, 30, 40)
        assert (b.x2, b.y2) == (40, 60)
        assert b.center == (25, 40)
        assert b.area == 1200


class TestRounding:
    def test_half_up(self):
        assert iround(0.5) == 1
        assert iround(1.5) == 2
        assert iround(2.5) == 3  # not banker's rounding
        assert iround(-0.5) == 0
        assert iround(-1.5) == -1

    def test_array(self):
        got = round_half_up(np.array([0.49, 0.5, 1.5, -0.5]))
        assert np.array_equal(got, [0, 1, 2, 0])

    @settings(max_examples=50)
    @given(st.floats(-1e6, 1e6))
    def test_within_half(self, x):
        assert abs(iround(x) - x) <= 0.5 + 1e-9
