"""Sequence datasets on disk.

Layout, one directory per sequence under a dataset root:

    <root>/<sequence_id>/img/000001.png   (or .jpg; any zero-padded names,
    <root>/<sequence_id>/img/000002.png    sorted lexically)
    <root>/<sequence_id>/groundtruth_rect.txt
    <root>/<sequence_id>/attributes.txt   (optional)
    <root>/<sequence_id>/detector_rect.txt (optional, externally supplied)

groundtruth_rect.txt holds one `x,y,w,h` line per frame (comma, tab or
space separated, 1-based integer coordinates; converted to 0-based
here).  Synthesis consumes only line 1 — the single annotated frame per
video.  attributes.txt is one comma-separated list of challenge tags
(SV, OCC, MB, BC, DEF, IV).
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from .geometry import BoundingBox
from .imaging import ImageBuffer, load_image
from .seeding import hash_name, make_rng, mix64

KNOWN_TAGS = ("SV", "OCC", "MB", "BC", "DEF", "IV")


class AnnotationSource(Enum):
    ANNOTATED = "Annotated"
    EXTERNAL_DETECTOR = "ExternalDetector"
    RANDOM_CROP = "RandomCrop"


@dataclass(frozen=True, eq=False)
class Frame:
    sequence_id: str
    index: int
    image: ImageBuffer
    source_path: str


@dataclass(frozen=True, eq=False)
class ReferenceAnnotation:
    """The one annotated frame of a sequence: x_r with its box b_r."""

    frame: Frame
    box: BoundingBox
    source: AnnotationSource

    @property
    def provenance(self) -> str:
        return f"{self.frame.sequence_id}:{self.frame.index}:{self.source.value}"


@dataclass(eq=False)
class SequenceDataset:
    sequences: dict[str, list[Frame]]
    annotations: dict[str, ReferenceAnnotation]
    tags: dict[str, tuple[str, ...]]

    def sequence_ids(self) -> list[str]:
        return sorted(self.sequences)


def parse_box_line(line: str) -> tuple[float, float, float, float]:
    parts = [p for p in re.split(r"[,\t ]+", line.strip()) if p]
    if len(parts) != 4:
        raise ValueError(f"expected 4 fields x,y,w,h, got {line.strip()!r}")
    return tuple(float(p) for p in parts)  # type: ignore[return-value]


def read_box_file(path: Path) -> list[BoundingBox]:
    """All boxes of an OTB-style rect file, converted 1-based -> 0-based."""
    boxes = []
    for raw in path.read_text().splitlines():
        if not raw.strip():
            continue
        x, y, w, h = parse_box_line(raw)
        boxes.append(BoundingBox(x - 1.0, y - 1.0, w, h))
    return boxes


def random_annotation(frame: Frame, seed: int) -> ReferenceAnnotation:
    """Draw a RandomCrop reference box, w and h uniform integers in
    [32, min(128, floor(min(frame dims)/2))], fully inside the frame."""
    rng = make_rng(seed)
    fh, fw = frame.image.shape[:2]
    hi = min(128, min(fw, fh) // 2)
    lo = min(32, hi)  # tiny frames degrade gracefully
    w = int(rng.integers(lo, hi + 1))
    h = int(rng.integers(lo, hi + 1))
    x = int(rng.integers(0, fw - w + 1))
    y = int(rng.integers(0, fh - h + 1))
    return ReferenceAnnotation(frame, BoundingBox(x, y, w, h), AnnotationSource.RANDOM_CROP)


def _frame_files(img_dir: Path) -> list[Path]:
    files = [p for p in img_dir.iterdir() if p.suffix.lower() in (".png", ".jpg", ".jpeg")]
    return sorted(files, key=lambda p: p.name)


def load_frame_images(seq_dir) -> list[ImageBuffer]:
    """Images of one sequence directory's img/ folder, file-name order."""
    img_dir = Path(seq_dir) / "img"
    if not img_dir.is_dir():
        raise FileNotFoundError(f"no img/ directory under {seq_dir}")
    files = _frame_files(img_dir)
    if not files:
        raise ValueError(f"no frames in {img_dir}")
    return [load_image(p) for p in files]


def read_attributes(path: Path) -> tuple[str, ...]:
    """Challenge tags from an attributes.txt file; () if absent."""
    path = Path(path)
    if not path.is_file():
        return ()
    raw = path.read_text().strip()
    return tuple(t.strip() for t in raw.split(",") if t.strip())


def load_sequence_dataset(
    root,
    source: AnnotationSource = AnnotationSource.ANNOTATED,
    seed: int = 0,
) -> SequenceDataset:
    """Load every sequence directory under `root`.

    `source` picks where reference boxes come from: the groundtruth
    file, the detector sidecar file, or a seeded random crop.
    """
    root = Path(root)
    if not root.is_dir():
        raise FileNotFoundError(f"dataset root not found: {root}")
    sequences: dict[str, list[Frame]] = {}
    annotations: dict[str, ReferenceAnnotation] = {}
    tags: dict[str, tuple[str, ...]] = {}
    for seq_dir in sorted(p for p in root.iterdir() if p.is_dir()):
        img_dir = seq_dir / "img"
        if not img_dir.is_dir():
            continue
        seq_id = seq_dir.name
        frames = [
            Frame(seq_id, i, load_image(p), str(p))
            for i, p in enumerate(_frame_files(img_dir))
        ]
        if not frames:
            continue
        sequences[seq_id] = frames
        if source is AnnotationSource.RANDOM_CROP:
            annotations[seq_id] = random_annotation(frames[0], mix64(seed, hash_name(seq_id)))
        else:
            name = (
                "detector_rect.txt"
                if source is AnnotationSource.EXTERNAL_DETECTOR
                else "groundtruth_rect.txt"
            )
            rect_file = seq_dir / name
            if not rect_file.is_file():
                raise FileNotFoundError(f"{seq_id}: missing {name}")
            boxes = read_box_file(rect_file)
            if not boxes:
                raise ValueError(f"{seq_id}: {name} is empty")
            annotations[seq_id] = ReferenceAnnotation(frames[0], boxes[0], source)
        tags[seq_id] = read_attributes(seq_dir / "attributes.txt")
    if not sequences:
        raise ValueError(f"no sequences found under {root}")
    return SequenceDataset(sequences, annotations, tags)
