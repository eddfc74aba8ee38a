"""Axis-aligned boxes and 2x3 affine maps.

Coordinates are continuous and real-valued: pixel column j occupies the
interval [j, j+1), so a box at x=0 with w=10 covers exactly columns 0..9
(half-open coverage).  Origin is the top-left corner and y grows
downward.  Boxes stay in floats through every transform; rounding to
integer pixels happens only where pixels are actually addressed
(rasterization, crops, file I/O).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


def round_half_up(a):
    """Project-wide rounding rule: halves go up (toward +inf)."""
    return np.floor(np.asarray(a, dtype=np.float64) + 0.5)


def iround(x: float) -> int:
    return int(math.floor(float(x) + 0.5))


@dataclass(frozen=True)
class BoundingBox:
    """Axis-aligned box (x, y, w, h) with w, h > 0."""

    x: float
    y: float
    w: float
    h: float

    def __post_init__(self) -> None:
        if not (self.w > 0 and self.h > 0):
            raise ValueError(f"box sides must be positive, got w={self.w} h={self.h}")

    @property
    def x2(self) -> float:
        return self.x + self.w

    @property
    def y2(self) -> float:
        return self.y + self.h

    @property
    def center(self) -> tuple[float, float]:
        return (self.x + self.w / 2.0, self.y + self.h / 2.0)

    @property
    def area(self) -> float:
        return self.w * self.h

    def corners(self) -> np.ndarray:
        """The four corner points as a (4, 2) array of (x, y)."""
        return np.array(
            [
                (self.x, self.y),
                (self.x2, self.y),
                (self.x, self.y2),
                (self.x2, self.y2),
            ],
            dtype=np.float64,
        )

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.x, self.y, self.w, self.h)


@dataclass(frozen=True)
class AffineMap:
    """2x3 map (x, y) -> (a11 x + a12 y + tx, a21 x + a22 y + ty)."""

    a11: float
    a12: float
    tx: float
    a21: float
    a22: float
    ty: float

    @property
    def det(self) -> float:
        return self.a11 * self.a22 - self.a12 * self.a21

    def require_invertible(self) -> None:
        if abs(self.det) < 1e-12:
            raise ValueError("singular affine map")

    @classmethod
    def identity(cls) -> "AffineMap":
        return cls(1.0, 0.0, 0.0, 0.0, 1.0, 0.0)

    @classmethod
    def translation(cls, dx: float, dy: float) -> "AffineMap":
        return cls(1.0, 0.0, dx, 0.0, 1.0, dy)

    @classmethod
    def scaling(cls, sx: float, sy: float | None = None) -> "AffineMap":
        sy = sx if sy is None else sy
        return cls(sx, 0.0, 0.0, 0.0, sy, 0.0)

    @classmethod
    def shearing(cls, mx: float, my: float) -> "AffineMap":
        """x' = x + mx*y, y' = y + my*x."""
        return cls(1.0, mx, 0.0, my, 1.0, 0.0)

    @classmethod
    def hflip(cls, width: float) -> "AffineMap":
        # In cell coordinates (pixel j occupies [j, j+1)) the map that
        # reverses the columns of a width-wide image is x' = width - x.
        return cls(-1.0, 0.0, width, 0.0, 1.0, 0.0)

    def compose(self, inner: "AffineMap") -> "AffineMap":
        """self ∘ inner: apply `inner` first, then self."""
        return AffineMap(
            self.a11 * inner.a11 + self.a12 * inner.a21,
            self.a11 * inner.a12 + self.a12 * inner.a22,
            self.a11 * inner.tx + self.a12 * inner.ty + self.tx,
            self.a21 * inner.a11 + self.a22 * inner.a21,
            self.a21 * inner.a12 + self.a22 * inner.a22,
            self.a21 * inner.tx + self.a22 * inner.ty + self.ty,
        )

    def invert(self) -> "AffineMap":
        self.require_invertible()
        d = self.det
        ia11 = self.a22 / d
        ia12 = -self.a12 / d
        ia21 = -self.a21 / d
        ia22 = self.a11 / d
        return AffineMap(
            ia11,
            ia12,
            -(ia11 * self.tx + ia12 * self.ty),
            ia21,
            ia22,
            -(ia21 * self.tx + ia22 * self.ty),
        )

    def apply_points(self, pts: np.ndarray) -> np.ndarray:
        """Map an (N, 2) array of points."""
        pts = np.asarray(pts, dtype=np.float64)
        out = np.empty_like(pts)
        out[:, 0] = self.a11 * pts[:, 0] + self.a12 * pts[:, 1] + self.tx
        out[:, 1] = self.a21 * pts[:, 0] + self.a22 * pts[:, 1] + self.ty
        return out

    def apply_point(self, x: float, y: float) -> tuple[float, float]:
        return (
            self.a11 * x + self.a12 * y + self.tx,
            self.a21 * x + self.a22 * y + self.ty,
        )


def iou(a: BoundingBox, b: BoundingBox) -> float:
    """Intersection over union on the real-valued half-open regions."""
    iw = min(a.x2, b.x2) - max(a.x, b.x)
    ih = min(a.y2, b.y2) - max(a.y, b.y)
    if iw <= 0.0 or ih <= 0.0:
        return 0.0
    inter = iw * ih
    # areas from the same x2 - x differences as the intersection, so
    # identical boxes give exactly 1.0 in floats
    area_a = (a.x2 - a.x) * (a.y2 - a.y)
    area_b = (b.x2 - b.x) * (b.y2 - b.y)
    return inter / (area_a + area_b - inter)


def center_error(a: BoundingBox, b: BoundingBox) -> float:
    """Euclidean distance between box centers, in pixels."""
    (ax, ay), (bx, by) = a.center, b.center
    return math.hypot(ax - bx, ay - by)


def corners_to_box(corners: np.ndarray) -> BoundingBox:
    """Axis-aligned bounding box of a point set."""
    xs = corners[:, 0]
    ys = corners[:, 1]
    x1, y1 = float(xs.min()), float(ys.min())
    w = float(xs.max()) - x1
    h = float(ys.max()) - y1
    return BoundingBox(x1, y1, w, h)


def transform_box(m: AffineMap, b: BoundingBox) -> BoundingBox:
    """AABB of the four transformed corners of b.

    For chained maps, compose the maps (or propagate the corner set) and
    take a single final AABB; taking an AABB after every step inflates
    the box under shear.
    """
    m.require_invertible()
    return corners_to_box(m.apply_points(b.corners()))


def clamp_box(b: BoundingBox, frame_w: float, frame_h: float) -> BoundingBox | None:
    """Intersect with the frame; none if empty or degenerate (≤ 0.5 px)."""
    if frame_w <= 0 or frame_h <= 0:
        raise ValueError("frame dims must be positive")
    x1 = max(b.x, 0.0)
    y1 = max(b.y, 0.0)
    x2 = min(b.x2, float(frame_w))
    y2 = min(b.y2, float(frame_h))
    if x2 - x1 <= 0.5 or y2 - y1 <= 0.5:
        return None
    return BoundingBox(x1, y1, x2 - x1, y2 - y1)
