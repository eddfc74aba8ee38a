"""Transform schedule: sampling compatible subsets and applying them.

Every synthesized sample gets a chain of transforms drawn from a
:class:`SchedulePolicy`.  Two of the kinds (Shift, SimilarPatchPaste)
are consumed at paste time; the rest operate on the target patch in a
fixed order: Rescale -> Shear -> Flip -> ColorJitter -> ShakingBlur ->
Cutout.  Geometric steps move both pixels and the inner box; the box is
carried as a corner set through the whole chain and collapsed to an
axis-aligned box exactly once at the end, so shear does not inflate it
step by step.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping

import numpy as np

from .geometry import AffineMap, BoundingBox, corners_to_box, iround
from .imaging import ImageBuffer, Kernel, convolve, quantize, warp_affine
from .seeding import make_rng


class TransformKind(Enum):
    SHIFT = "Shift"
    RESCALE = "Rescale"
    FLIP = "Flip"
    SHEAR = "Shear"
    CUTOUT = "Cutout"
    SHAKING_BLUR = "ShakingBlur"
    COLOR_JITTER = "ColorJitter"
    SIMILAR_PATCH_PASTE = "SimilarPatchPaste"


# Patch-op application order; Shift and SimilarPatchPaste act at paste time.
_PATCH_OP_ORDER = (
    TransformKind.RESCALE,
    TransformKind.SHEAR,
    TransformKind.FLIP,
    TransformKind.COLOR_JITTER,
    TransformKind.SHAKING_BLUR,
    TransformKind.CUTOUT,
)


@dataclass(frozen=True)
class TransformParams:
    """One sampled transform: its kind plus kind-specific parameters."""

    kind: TransformKind
    params: Mapping[str, float]


@dataclass(frozen=True)
class TransformChain:
    """Ordered transform subset for one sample, with the seed that drew it."""

    steps: tuple[TransformParams, ...]
    seed: int

    def find(self, kind: TransformKind) -> TransformParams | None:
        for step in self.steps:
            if step.kind is kind:
                return step
        return None

    def __contains__(self, kind: TransformKind) -> bool:
        return self.find(kind) is not None


@dataclass(frozen=True)
class KindPolicy:
    """Schedule entry for one transform kind.

    `range` holds the kind's parameter bounds: (lo, hi) for continuous
    draws, (lo, hi) odd bounds for the blur kernel, a single value for
    the distractor count, and the symmetric pixel bound pair for shift.
    """

    enable: bool
    probability: float
    range: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if not (0.0 <= self.probability <= 1.0):
            raise ValueError(f"probability must be in [0,1], got {self.probability}")
        if len(self.range) == 2 and self.range[1] < self.range[0]:
            raise ValueError(f"empty range {self.range}")


@dataclass(frozen=True)
class SchedulePolicy:
    """Per-kind schedule settings.

    Defaults: shift is applied to every sample (it has no inclusion
    probability) with offsets in ±96 px; rescale is likewise always
    drawn, from [0.7, 1.3]; flip is wired at p=0.5 but disabled, since
    mirrored targets hurt more than they help; shear p=0.5 in ±0.3;
    cutout p=0.15 with area fraction [0.10, 0.40]; shaking blur p=0.2
    with odd kernel sizes 3..15; similar-patch paste p=0.8 with one
    distractor; color jitter p=0.4 with factors in [0.6, 1.4].
    """

    shift: KindPolicy = field(default_factory=lambda: KindPolicy(True, 1.0, (-96.0, 96.0)))
    rescale: KindPolicy = field(default_factory=lambda: KindPolicy(True, 1.0, (0.7, 1.3)))
    flip: KindPolicy = field(default_factory=lambda: KindPolicy(False, 0.5))
    shear: KindPolicy = field(default_factory=lambda: KindPolicy(True, 0.5, (-0.3, 0.3)))
    cutout: KindPolicy = field(default_factory=lambda: KindPolicy(True, 0.15, (0.10, 0.40)))
    shaking_blur: KindPolicy = field(default_factory=lambda: KindPolicy(True, 0.2, (3.0, 15.0)))
    color_jitter: KindPolicy = field(default_factory=lambda: KindPolicy(True, 0.4, (0.6, 1.4)))
    similar_patch_paste: KindPolicy = field(default_factory=lambda: KindPolicy(True, 0.8, (1.0,)))

    def __post_init__(self) -> None:
        if self.rescale.enable and self.rescale.range and self.rescale.range[0] <= 0.0:
            raise ValueError("rescale lower bound must be > 0")
        for name in ("rescale", "shear", "cutout", "shaking_blur", "color_jitter"):
            pol: KindPolicy = getattr(self, name)
            if pol.enable and len(pol.range) != 2:
                raise ValueError(f"{name} needs a (lo, hi) range")


def default_policy() -> SchedulePolicy:
    return SchedulePolicy()


@dataclass(frozen=True, eq=False)
class TargetPatch:
    """Cropped target pixels: core content plus the pad ring around it.

    inner_box locates the target inside the patch; at creation it is
    (pad, pad, w, h) and the ring tiles the rest of the patch exactly.
    After transforms the box is wherever the chain moved it, still
    inside the patch extent.
    """

    image: ImageBuffer
    inner_box: BoundingBox
    pad: int
    provenance: str


def shaking_blur_kernel(k: int) -> Kernel:
    """Cross-shaped blur kernel: nonzero only on the central row and
    column, uniform weights 1/(2k-1)."""
    if k < 3 or k % 2 == 0:
        raise ValueError(f"kernel size must be odd and >= 3, got {k}")
    w = np.zeros((k, k), dtype=np.float64)
    c = k // 2
    w[c, :] = 1.0 / (2 * k - 1)
    w[:, c] = 1.0 / (2 * k - 1)
    return Kernel(w)


def _luma(x: np.ndarray) -> np.ndarray:
    return 0.299 * x[:, :, 0] + 0.587 * x[:, :, 1] + 0.114 * x[:, :, 2]


def color_jitter(img: ImageBuffer, brightness: float, contrast: float, saturation: float) -> ImageBuffer:
    """Photometric jitter: brightness, then contrast about the image's
    mean luma, then saturation toward per-pixel luma; one final clamp
    and round."""
    if brightness <= 0 or contrast <= 0 or saturation < 0:
        raise ValueError("jitter factors must be positive")
    x = img.astype(np.float64) * brightness
    mean = float(_luma(x).mean())
    x = (x - mean) * contrast + mean
    luma = _luma(x)[:, :, None]
    x = luma + (x - luma) * saturation
    return quantize(x)


def sample_chain(policy: SchedulePolicy, seed: int) -> TransformChain:
    """Draw one compatible transform subset with its parameters.

    Pure function of (policy, seed).  Cutout and ShakingBlur never
    co-occur; when both are enabled, blur is drawn only on the
    no-cutout branch with probability p_blur/(1-p_cutout), so its
    marginal inclusion rate stays at the configured p_blur instead of
    being depressed by the drop rule (cutout still wins every tie).
    """
    rng = make_rng(seed)
    drawn: dict[TransformKind, TransformParams] = {}

    pol = policy.rescale
    if pol.enable and rng.random() < pol.probability:
        s = float(rng.uniform(pol.range[0], pol.range[1]))
        drawn[TransformKind.RESCALE] = TransformParams(TransformKind.RESCALE, {"s": s})

    pol = policy.shear
    if pol.enable and rng.random() < pol.probability:
        mx = float(rng.uniform(pol.range[0], pol.range[1]))
        my = float(rng.uniform(pol.range[0], pol.range[1]))
        drawn[TransformKind.SHEAR] = TransformParams(TransformKind.SHEAR, {"mx": mx, "my": my})

    pol = policy.flip
    if pol.enable and rng.random() < pol.probability:
        drawn[TransformKind.FLIP] = TransformParams(TransformKind.FLIP, {"horizontal": True})

    pol = policy.color_jitter
    if pol.enable and rng.random() < pol.probability:
        b = float(rng.uniform(pol.range[0], pol.range[1]))
        c = float(rng.uniform(pol.range[0], pol.range[1]))
        s = float(rng.uniform(pol.range[0], pol.range[1]))
        drawn[TransformKind.COLOR_JITTER] = TransformParams(
            TransformKind.COLOR_JITTER, {"brightness": b, "contrast": c, "saturation": s}
        )

    pol = policy.cutout
    cutout_drawn = False
    if pol.enable and rng.random() < pol.probability:
        cutout_drawn = True
        area = float(rng.uniform(pol.range[0], pol.range[1]))
        # log-uniform aspect in [0.5, 2] keeps cuts rectangular but sane
        aspect = float(np.exp(rng.uniform(np.log(0.5), np.log(2.0))))
        rw = min(1.0, float(np.sqrt(area * aspect)))
        rh = min(1.0, float(np.sqrt(area / aspect)))
        rx = float(rng.uniform(0.0, 1.0 - rw))
        ry = float(rng.uniform(0.0, 1.0 - rh))
        drawn[TransformKind.CUTOUT] = TransformParams(
            TransformKind.CUTOUT, {"rx": rx, "ry": ry, "rw": rw, "rh": rh}
        )

    pol = policy.shaking_blur
    if pol.enable and not cutout_drawn:
        p_cut = policy.cutout.probability if policy.cutout.enable else 0.0
        p_eff = 0.0 if p_cut >= 1.0 else min(1.0, pol.probability / (1.0 - p_cut))
        if rng.random() < p_eff:
            lo, hi = int(pol.range[0]), int(pol.range[1])
            sizes = np.arange(lo, hi + 1, 2)
            k = int(sizes[rng.integers(0, len(sizes))])
            drawn[TransformKind.SHAKING_BLUR] = TransformParams(
                TransformKind.SHAKING_BLUR, {"k": k}
            )

    pol = policy.shift
    if pol.enable:
        # shift has no inclusion probability: it applies to every sample
        lo, hi = int(pol.range[0]), int(pol.range[1])
        dx = int(rng.integers(lo, hi + 1))
        dy = int(rng.integers(lo, hi + 1))
        drawn[TransformKind.SHIFT] = TransformParams(TransformKind.SHIFT, {"dx": dx, "dy": dy})

    pol = policy.similar_patch_paste
    if pol.enable and rng.random() < pol.probability:
        count = int(pol.range[0]) if pol.range else 1
        drawn[TransformKind.SIMILAR_PATCH_PASTE] = TransformParams(
            TransformKind.SIMILAR_PATCH_PASTE, {"count": count}
        )

    steps = [drawn[k] for k in _PATCH_OP_ORDER if k in drawn]
    for kind in (TransformKind.SHIFT, TransformKind.SIMILAR_PATCH_PASTE):
        if kind in drawn:
            steps.append(drawn[kind])
    return TransformChain(tuple(steps), seed)


class TransformCollapse(ValueError):
    pass


def _geometric_map(step: TransformParams, w: int, h: int) -> tuple[AffineMap, int, int]:
    """The affine map and output dims for one geometric step on a w x h patch."""
    if step.kind is TransformKind.RESCALE:
        s = float(step.params["s"])
        return AffineMap.scaling(s), iround(w * s), iround(h * s)
    if step.kind is TransformKind.SHEAR:
        m = AffineMap.shearing(float(step.params["mx"]), float(step.params["my"]))
        rect = np.array([(0.0, 0.0), (w, 0.0), (0.0, h), (w, h)])
        mapped = m.apply_points(rect)
        minx, miny = mapped[:, 0].min(), mapped[:, 1].min()
        shifted = AffineMap.translation(-float(minx), -float(miny)).compose(m)
        out_w = iround(float(mapped[:, 0].max() - minx))
        out_h = iround(float(mapped[:, 1].max() - miny))
        return shifted, out_w, out_h
    if step.kind is TransformKind.FLIP:
        return AffineMap.hflip(float(w)), w, h
    raise ValueError(f"not a geometric step: {step.kind}")


def _flush_geometric(
    img: ImageBuffer, pending: list[TransformParams], corners: np.ndarray
) -> tuple[ImageBuffer, np.ndarray]:
    """Resample once through the composed map of a run of geometric steps.

    Composing first keeps the pixels as sharp as a single warp and, more
    to the point, keeps the rendered target inside the propagated box:
    every extra resample dilates bilinear support by up to a pixel, so
    warping per step would smear content past the box the corners
    predict.
    """
    if not pending:
        return img, corners
    h, w = img.shape[:2]
    m = AffineMap.identity()
    for step in pending:
        sm, w, h = _geometric_map(step, w, h)
        m = sm.compose(m)
    return warp_affine(img, m, w, h), m.apply_points(corners)


def apply_chain(patch: TargetPatch, chain: TransformChain) -> TargetPatch:
    """Run the chain's patch ops on a target patch.

    Pixels change in the fixed order Rescale -> Shear -> Flip ->
    ColorJitter -> ShakingBlur -> Cutout; consecutive geometric steps
    are composed into one warp.  The inner box rides along as a corner
    set through the geometric maps and becomes an AABB once at the end;
    photometric steps and Cutout leave it alone.
    """
    img = patch.image
    corners = patch.inner_box.corners()
    pending: list[TransformParams] = []
    for step in chain.steps:
        if step.kind in (TransformKind.SHIFT, TransformKind.SIMILAR_PATCH_PASTE):
            continue
        if step.kind in (TransformKind.RESCALE, TransformKind.SHEAR, TransformKind.FLIP):
            pending.append(step)
            continue
        img, corners = _flush_geometric(img, pending, corners)
        pending = []
        if step.kind is TransformKind.COLOR_JITTER:
            img = color_jitter(
                img,
                float(step.params["brightness"]),
                float(step.params["contrast"]),
                float(step.params["saturation"]),
            )
        elif step.kind is TransformKind.SHAKING_BLUR:
            img = convolve(img, shaking_blur_kernel(int(step.params["k"])))
        elif step.kind is TransformKind.CUTOUT:
            h, w = img.shape[:2]
            cx = iround(float(step.params["rx"]) * w)
            cy = iround(float(step.params["ry"]) * h)
            cw = iround(float(step.params["rw"]) * w)
            ch = iround(float(step.params["rh"]) * h)
            img = img.copy()
            img[cy : min(cy + ch, h), cx : min(cx + cw, w)] = 0
        else:
            raise ValueError(f"unknown transform kind {step.kind}")
    img, corners = _flush_geometric(img, pending, corners)
    box = corners_to_box(corners)
    if box.w < 2.0 or box.h < 2.0:
        raise TransformCollapse("transform collapsed target")
    return TargetPatch(img, box, patch.pad, patch.provenance)
