"""Crop-Transform-Paste synthesis.

One annotated frame per sequence is enough: the target patch is cropped
once with a pad ring, a transform chain reshapes a copy of it per
sample, and the result is pasted onto a background frame with an alpha
ramp over the pad ring.  Because the box is propagated analytically
through the same maps that move the pixels, every synthesized frame
comes with an exact ground-truth box for free.  Similar-looking patches
from other sequences can be pasted alongside as background clutter.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .dataset import Frame, ReferenceAnnotation, SequenceDataset
from .geometry import BoundingBox, iou, iround
from .imaging import (
    AlphaMask,
    ImageBuffer,
    color_histogram,
    composite,
    crop_with_pad,
)
from .seeding import hash_name, make_rng, mix64
from .transforms import (
    SchedulePolicy,
    TargetPatch,
    TransformChain,
    TransformKind,
    apply_chain,
    sample_chain,
)

# sub-stream tags hung off each per-sample seed
_TAG_CHAIN = 1
_TAG_BACKGROUND = 2
_TAG_DISTRACTORS = 3


@dataclass(frozen=True, eq=False)
class SynthesizedSample:
    """One pseudo frame with its exact box and full provenance."""

    image: ImageBuffer
    box: BoundingBox
    background: tuple[str, int]
    chain: TransformChain
    distractor_boxes: tuple[BoundingBox, ...]
    seed: int
    sequence_id: str
    index: int
    skipped_distractors: int = 0
    frame_path: str | None = None

    @property
    def sample_id(self) -> str:
        return f"{self.sequence_id}:{self.index:06d}"


@dataclass(frozen=True, eq=False)
class LibraryEntry:
    patch: TargetPatch
    feature: np.ndarray
    origin: str


@dataclass(eq=False)
class PatchLibrary:
    """Distractor pool: padded patches with histogram features.

    Nothing is excluded at build time; same-sequence exclusion happens
    query-side.
    """

    entries: list[LibraryEntry] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.entries)

    def query(self, feature: np.ndarray, k: int, exclude_sequence: str | None = None) -> list[LibraryEntry]:
        candidates = [e for e in self.entries if e.origin != exclude_sequence]
        if not candidates or k <= 0:
            return []
        dists = np.array([float(np.sum((e.feature - feature) ** 2)) for e in candidates])
        order = np.argsort(dists, kind="stable")
        return [candidates[i] for i in order[:k]]


def crop_target(ann: ReferenceAnnotation, pad_ratio: float) -> TargetPatch:
    """Crop the base target patch with its pad ring.

    pad = max(2, round(pad_ratio * min(w, h))).
    """
    if pad_ratio < 0:
        raise ValueError("pad_ratio must be >= 0")
    b = ann.box
    pad = max(2, iround(pad_ratio * min(b.w, b.h)))
    patch, inner = crop_with_pad(ann.frame.image, b, pad)
    return TargetPatch(patch, inner, pad, ann.provenance)


def pad_blend_mask(patch: TargetPatch) -> AlphaMask:
    """Blend weights for pasting: 1 on the inner box, 0 on the patch's
    outer boundary, a linear per-axis ramp across the pad ring, the two
    axes combined by min."""
    h, w = patch.image.shape[:2]
    inner = patch.inner_box
    ix0 = max(0, iround(inner.x))
    iy0 = max(0, iround(inner.y))
    ix1 = min(w, iround(inner.x2))
    iy1 = min(h, iround(inner.y2))

    def axis_ramp(n: int, lo: int, hi: int) -> np.ndarray:
        ramp = np.ones(n, dtype=np.float64)
        if lo > 0:
            ramp[:lo] = np.arange(lo) / lo
        right = n - hi
        if right > 0:
            ramp[hi - 1 :] = np.minimum(ramp[hi - 1 :], (n - 1 - np.arange(hi - 1, n)) / right)
        return ramp

    ax = axis_ramp(w, ix0, ix1)
    ay = axis_ramp(h, iy0, iy1)
    return np.minimum(ax[None, :], ay[:, None])


def paste(patch: TargetPatch, background: Frame, at: tuple[int, int]) -> tuple[ImageBuffer, BoundingBox]:
    """Blend the patch into a background frame.

    `at` is the frame position where the inner-box origin lands; the
    returned box is inner_box translated by (at - inner-box origin).
    The inner box must stay fully inside the frame (the pad ring may
    clip).
    """
    inner = patch.inner_box
    fh, fw = background.image.shape[:2]
    box = BoundingBox(float(at[0]), float(at[1]), inner.w, inner.h)
    if box.x < 0 or box.y < 0 or box.x2 > fw or box.y2 > fh:
        raise ValueError("paste out of frame")
    mask = pad_blend_mask(patch)
    origin = (iround(at[0] - inner.x), iround(at[1] - inner.y))
    return composite(background.image, patch.image, mask, origin), box


def build_patch_library(dataset: SequenceDataset, per_sequence: int, seed: int, pad_ratio: float = 0.1) -> PatchLibrary:
    """Crop per_sequence patches around each annotated box (the exact
    crop plus jittered variants) and store their histogram features."""
    if not dataset.sequences:
        raise ValueError("dataset is empty")
    library = PatchLibrary()
    for seq_id in dataset.sequence_ids():
        ann = dataset.annotations[seq_id]
        frame = ann.frame
        fh, fw = frame.image.shape[:2]
        rng = make_rng(mix64(seed, hash_name(seq_id)))
        for i in range(per_sequence):
            box = ann.box
            if i > 0:
                # jitter: up to ±15% center shift and ±20% scale
                scale = float(rng.uniform(0.8, 1.2))
                dx = float(rng.uniform(-0.15, 0.15)) * box.w
                dy = float(rng.uniform(-0.15, 0.15)) * box.h
                w = max(4.0, box.w * scale)
                h = max(4.0, box.h * scale)
                cx, cy = box.center
                x = min(max(cx + dx - w / 2.0, 0.0), max(0.0, fw - w))
                y = min(max(cy + dy - h / 2.0, 0.0), max(0.0, fh - h))
                box = BoundingBox(x, y, min(w, fw), min(h, fh))
            patch = crop_target(ReferenceAnnotation(frame, box, ann.source), pad_ratio)
            library.entries.append(
                LibraryEntry(patch, color_histogram(patch.image), seq_id)
            )
    return library


def inject_distractors(
    sample: SynthesizedSample,
    library: PatchLibrary,
    target_feature: np.ndarray,
    count: int,
    seed: int,
    own_sequence: str | None = None,
) -> SynthesizedSample:
    """Paste the count nearest library patches as background clutter.

    Placement is uniform, re-drawn until the distractor box overlaps
    the target with IoU <= 0.2; after 50 failed draws the distractor is
    skipped (recorded in skipped_distractors).  Entries from the
    sample's own sequence are excluded.
    """
    if count <= 0:
        return sample
    own = own_sequence if own_sequence is not None else sample.background[0]
    entries = library.query(target_feature, count, exclude_sequence=own)
    rng = make_rng(seed)
    img = sample.image
    fh, fw = img.shape[:2]
    boxes: list[BoundingBox] = list(sample.distractor_boxes)
    skipped = sample.skipped_distractors + (count - len(entries))
    for entry in entries:
        inner = entry.patch.inner_box
        max_x = fw - int(math.ceil(inner.w))
        max_y = fh - int(math.ceil(inner.h))
        if max_x < 0 or max_y < 0:
            skipped += 1
            continue
        placed = None
        for _ in range(50):
            at = (int(rng.integers(0, max_x + 1)), int(rng.integers(0, max_y + 1)))
            candidate = BoundingBox(float(at[0]), float(at[1]), inner.w, inner.h)
            if iou(candidate, sample.box) <= 0.2:
                placed = at
                break
        if placed is None:
            skipped += 1
            continue
        bg = Frame(sample.sequence_id, sample.index, img, "")
        img, box = paste(entry.patch, bg, placed)
        boxes.append(box)
    return replace(
        sample,
        image=img,
        distractor_boxes=tuple(boxes),
        skipped_distractors=skipped,
    )


def _background_pool(dataset: SequenceDataset, sequence_id: str, mode: str) -> list[Frame]:
    if mode == "same":
        return list(dataset.sequences[sequence_id])
    if mode == "different":
        pool = [
            f
            for seq in dataset.sequence_ids()
            if seq != sequence_id
            for f in dataset.sequences[seq]
        ]
        if not pool:
            raise ValueError("different-sequence mode needs at least two sequences")
        return pool
    raise ValueError(f"unknown background mode {mode!r} (same|different)")


def synthesize_one(
    dataset: SequenceDataset,
    sequence_id: str,
    policy: SchedulePolicy,
    j: int,
    master_seed: int,
    background_mode: str = "same",
    library: PatchLibrary | None = None,
    pad_ratio: float = 0.1,
    _base: TargetPatch | None = None,
    _pool: list[Frame] | None = None,
    _feature: np.ndarray | None = None,
) -> SynthesizedSample:
    """Synthesize sample j.  Pure function of its arguments; the _-prefixed
    parameters are precomputed invariants that synthesize() passes to
    avoid redoing the base crop per sample."""
    ann = dataset.annotations.get(sequence_id)
    if ann is None:
        raise ValueError(f"annotation missing for sequence {sequence_id!r}")
    base = _base if _base is not None else crop_target(ann, pad_ratio)
    pool = _pool if _pool is not None else _background_pool(dataset, sequence_id, background_mode)
    feature = _feature if _feature is not None else color_histogram(base.image)

    seed_j = mix64(master_seed, hash_name(sequence_id), j)
    chain = sample_chain(policy, mix64(seed_j, _TAG_CHAIN))
    bg_rng = make_rng(mix64(seed_j, _TAG_BACKGROUND))
    bg = pool[int(bg_rng.integers(0, len(pool)))]

    patch = apply_chain(base, chain)
    inner = patch.inner_box
    fh, fw = bg.image.shape[:2]
    if inner.w > fw or inner.h > fh:
        raise ValueError("transformed target larger than background frame")

    shift = chain.find(TransformKind.SHIFT)
    dx = float(shift.params["dx"]) if shift else 0.0
    dy = float(shift.params["dy"]) if shift else 0.0
    cx, cy = ann.box.center
    at_x = iround(cx + dx - inner.w / 2.0)
    at_y = iround(cy + dy - inner.h / 2.0)
    at_x = min(max(at_x, 0), int(math.floor(fw - inner.w)))
    at_y = min(max(at_y, 0), int(math.floor(fh - inner.h)))

    image, box = paste(patch, bg, (at_x, at_y))
    sample = SynthesizedSample(
        image=image,
        box=box,
        background=(bg.sequence_id, bg.index),
        chain=chain,
        distractor_boxes=(),
        seed=seed_j,
        sequence_id=sequence_id,
        index=j,
    )
    spp = chain.find(TransformKind.SIMILAR_PATCH_PASTE)
    if spp is not None:
        n = int(spp.params["count"])
        if library is not None and len(library):
            sample = inject_distractors(
                sample,
                library,
                feature,
                n,
                mix64(seed_j, _TAG_DISTRACTORS),
                own_sequence=sequence_id,
            )
        else:
            sample = replace(sample, skipped_distractors=n)
    return sample


def synthesize(
    dataset: SequenceDataset,
    sequence_id: str,
    policy: SchedulePolicy,
    n: int,
    master_seed: int,
    background_mode: str = "same",
    library: PatchLibrary | None = None,
    pad_ratio: float = 0.1,
) -> list[SynthesizedSample]:
    """Synthesize n samples for one sequence.

    Sample j is seeded by mix64(master_seed, hash(sequence_id), j), so
    the output is a deterministic function of the inputs and each
    sample is independent of generation order (and of worker count).
    """
    if sequence_id not in dataset.sequences or not dataset.sequences[sequence_id]:
        raise ValueError(f"sequence {sequence_id!r} is empty or unknown")
    ann = dataset.annotations.get(sequence_id)
    if ann is None:
        raise ValueError(f"annotation missing for sequence {sequence_id!r}")
    base = crop_target(ann, pad_ratio)
    pool = _background_pool(dataset, sequence_id, background_mode)
    feature = color_histogram(base.image)
    return [
        synthesize_one(
            dataset,
            sequence_id,
            policy,
            j,
            master_seed,
            background_mode,
            library,
            pad_ratio,
            _base=base,
            _pool=pool,
            _feature=feature,
        )
        for j in range(n)
    ]
