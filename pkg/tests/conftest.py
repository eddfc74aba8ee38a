import numpy as np
import pytest

from ctpsynth import (
    AnnotationSource,
    BoundingBox,
    Frame,
    ReferenceAnnotation,
    SequenceDataset,
    make_rng,
    save_png,
)


def textured(rng, h, w, block=8):
    """Blocky color texture with pixel noise; enough structure for
    histograms and correlation peaks to mean something."""
    base = rng.integers(0, 256, size=(h // block + 1, w // block + 1, 3))
    img = np.kron(base, np.ones((block, block, 1), dtype=np.int64))[:h, :w]
    noise = rng.integers(-12, 13, size=(h, w, 3))
    return np.clip(img + noise, 0, 255).astype(np.uint8)


def marker_blob(h, w):
    """A deterministic high-contrast pattern distinct from textured() output."""
    yy, xx = np.mgrid[0:h, 0:w]
    return np.stack(
        [(xx * 5) % 256, (yy * 7) % 256, ((xx + yy) * 3) % 256], axis=-1
    ).astype(np.uint8)


def memory_sequence(seq_id, n_frames, fw, fh, box, seed):
    rng = make_rng(seed)
    frames = []
    for i in range(n_frames):
        img = textured(rng, fh, fw)
        if i == 0:
            x, y, w, h = (int(v) for v in box)
            img[y : y + h, x : x + w] = marker_blob(h, w)
        frames.append(Frame(seq_id, i, img, f"<mem:{seq_id}:{i}>"))
    ann = ReferenceAnnotation(frames[0], BoundingBox(*box), AnnotationSource.ANNOTATED)
    return frames, ann


def build_dataset(spec, seed=99):
    """spec: {seq_id: (n_frames, (fw, fh), (x, y, w, h), tags)}"""
    sequences, annotations, tags = {}, {}, {}
    for i, (seq_id, (n, dims, box, seq_tags)) in enumerate(sorted(spec.items())):
        frames, ann = memory_sequence(seq_id, n, dims[0], dims[1], box, seed + i)
        sequences[seq_id] = frames
        annotations[seq_id] = ann
        tags[seq_id] = tuple(seq_tags)
    return SequenceDataset(sequences, annotations, tags)


DEFAULT_SPEC = {
    "ball": (5, (200, 150), (60, 50, 40, 36), ("SV", "OCC")),
    "car": (5, (240, 160), (90, 60, 48, 30), ("MB",)),
    "dog": (5, (180, 140), (50, 40, 32, 44), ()),
}


@pytest.fixture
def rng():
    return make_rng(1234)


@pytest.fixture
def dataset():
    return build_dataset(DEFAULT_SPEC)


def write_dataset(root, dataset, gt_lines=None):
    """Write a SequenceDataset to disk in the expected layout.

    Boxes go out 1-based, mirroring how the loader reads them.
    gt_lines optionally extends groundtruth files beyond line 1:
    {seq_id: list of (x, y, w, h) 0-based}.
    """
    for seq_id, frames in dataset.sequences.items():
        img_dir = root / seq_id / "img"
        img_dir.mkdir(parents=True)
        for frame in frames:
            save_png(frame.image, img_dir / f"{frame.index + 1:06d}.png")
        boxes = [dataset.annotations[seq_id].box.as_tuple()]
        if gt_lines and seq_id in gt_lines:
            boxes = gt_lines[seq_id]
        lines = [f"{x + 1:.0f},{y + 1:.0f},{w:.0f},{h:.0f}" for x, y, w, h in boxes]
        (root / seq_id / "groundtruth_rect.txt").write_text("\n".join(lines) + "\n")
        if dataset.tags.get(seq_id):
            (root / seq_id / "attributes.txt").write_text(",".join(dataset.tags[seq_id]) + "\n")
    return root


@pytest.fixture
def disk_dataset(tmp_path, dataset):
    root = tmp_path / "data"
    root.mkdir()
    return write_dataset(root, dataset)
