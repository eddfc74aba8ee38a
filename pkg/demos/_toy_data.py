"""Toy dataset + drawing helpers shared by the demo scripts.

Builds three short sequences of blocky color noise under
demos/out/toy_data, each with a distinctive striped target stamped
into frame 1 and an OTB-style groundtruth file, so every demo can run
without shipping real video.  Not part of the library.
"""
from pathlib import Path

import numpy as np

from ctpsynth import make_rng, save_png

OUT = Path(__file__).parent / "out"

SEQUENCES = {
    # seq_id: (n_frames, (frame_w, frame_h), (x, y, w, h), tags)
    "ball": (5, (320, 240), (120, 90, 56, 48), ("SV", "OCC")),
    "car": (5, (360, 240), (200, 120, 64, 40), ("MB",)),
    "dog": (5, (300, 220), (80, 60, 48, 60), ("BC",)),
}


def blocky(rng, h, w, block=12):
    base = rng.integers(0, 256, size=(h // block + 1, w // block + 1, 3))
    img = np.kron(base, np.ones((block, block, 1), dtype=np.int64))[:h, :w]
    noise = rng.integers(-10, 11, size=(h, w, 3))
    return np.clip(img + noise, 0, 255).astype(np.uint8)


def stripes(h, w):
    """High-contrast diagonal stripes, unmistakable against blocky()."""
    yy, xx = np.mgrid[0:h, 0:w]
    return np.stack(
        [((xx + yy) // 4 % 2) * 255, (xx * 6) % 256, (yy * 6) % 256], axis=-1
    ).astype(np.uint8)


def build_toy_dataset(root=None, seed=2026):
    """Write the toy sequences to disk; returns the dataset root path.

    Skips the write when the root already exists so repeated demo runs
    stay fast.
    """
    root = Path(root) if root else OUT / "toy_data"
    if root.exists():
        return root
    rng = make_rng(seed)
    for seq_id, (n, (fw, fh), (x, y, w, h), tags) in sorted(SEQUENCES.items()):
        img_dir = root / seq_id / "img"
        img_dir.mkdir(parents=True)
        for i in range(n):
            img = blocky(rng, fh, fw)
            if i == 0:
                img[y : y + h, x : x + w] = stripes(h, w)
            save_png(img, img_dir / f"{i + 1:06d}.png")
        # groundtruth files are 1-based on disk
        (root / seq_id / "groundtruth_rect.txt").write_text(f"{x + 1},{y + 1},{w},{h}\n")
        if tags:
            (root / seq_id / "attributes.txt").write_text(",".join(tags) + "\n")
    return root


def outline(img, box, color=(60, 230, 60), thick=2):
    """Draw a box outline on a copy of img; returns the copy."""
    out = img.copy()
    h, w = out.shape[:2]
    x0 = max(0, int(round(box.x)))
    y0 = max(0, int(round(box.y)))
    x1 = min(w, int(round(box.x2)))
    y1 = min(h, int(round(box.y2)))
    out[y0 : min(y0 + thick, y1), x0:x1] = color
    out[max(y1 - thick, y0) : y1, x0:x1] = color
    out[y0:y1, x0 : min(x0 + thick, x1)] = color
    out[y0:y1, max(x1 - thick, x0) : x1] = color
    return out


def tile(images, cols, gap=4, bg=24):
    """Pack equally-or-unequally sized images into a grid sheet."""
    rows = (len(images) + cols - 1) // cols
    cell_h = max(im.shape[0] for im in images)
    cell_w = max(im.shape[1] for im in images)
    sheet = np.full(
        (rows * (cell_h + gap) + gap, cols * (cell_w + gap) + gap, 3), bg, dtype=np.uint8
    )
    for i, im in enumerate(images):
        r, c = divmod(i, cols)
        y = gap + r * (cell_h + gap)
        x = gap + c * (cell_w + gap)
        sheet[y : y + im.shape[0], x : x + im.shape[1]] = im
    return sheet
