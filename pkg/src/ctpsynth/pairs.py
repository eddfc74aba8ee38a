"""Template/search training pairs and the JSONL manifest.

A pair is two crops: a tight template around one sample's box and a
wider search region around another's, with the search box mapped into
crop coordinates as the regression target.  The manifest is the
hand-off boundary to external training stacks: one JSON object per
line, floats fixed to 6 decimals so round trips are exact.

Manifest schema:
  sample: {"kind":"sample","id","frame_path","box":[x,y,w,h],
           "background":[seq,idx],"chain":[{"kind","params"}...],
           "distractors":[[x,y,w,h]...],"seed"}
  pair:   {"kind":"pair","template_id","search_id",
           "target_in_search":[x,y,w,h],"seed"}

When crops are materialized they live at pairs/{i:06d}_t.png and
pairs/{i:06d}_s.png next to the manifest, i being the 0-based index of
the pair record in manifest order.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .geometry import AffineMap, BoundingBox, transform_box
from .imaging import ImageBuffer, load_image, warp_affine
from .seeding import make_rng, mix64
from .synthesis import SynthesizedSample
from .transforms import TransformChain, TransformKind, TransformParams


@dataclass(frozen=True, eq=False)
class TrainingPair:
    template: ImageBuffer
    search: ImageBuffer
    target_in_search: BoundingBox
    template_source: str
    search_source: str
    seed: int


def _crop_map(box: BoundingBox, ctx: float, out: int) -> AffineMap:
    """Frame -> crop coordinates for a square context crop around box."""
    side = ctx * max(box.w, box.h)
    if side <= 0:
        raise ValueError("degenerate box")
    scale = out / side
    cx, cy = box.center
    return AffineMap(
        scale, 0.0, (side / 2.0 - cx) * scale,
        0.0, scale, (side / 2.0 - cy) * scale,
    )


def make_pair(
    a: SynthesizedSample,
    b: SynthesizedSample,
    t: int = 127,
    s: int = 255,
    ctx_t: float = 2.0,
    ctx_s: float = 4.0,
    seed: int = 0,
) -> TrainingPair:
    """Build one training pair from two synthesized samples.

    template: square crop around a.box of side ctx_t*max(w,h), resized
    to t x t; search: same around b.box with ctx_s, resized to s x s;
    target_in_search is b.box through the identical crop-and-resize
    map, so mapping it back through the inverse recovers b.box.
    """
    if not t < s:
        raise ValueError(f"template size must be smaller than search size ({t} >= {s})")
    if ctx_t <= 0 or ctx_s <= 0:
        raise ValueError("context factors must be positive")
    mt = _crop_map(a.box, ctx_t, t)
    ms = _crop_map(b.box, ctx_s, s)
    return TrainingPair(
        template=warp_affine(a.image, mt, t, t),
        search=warp_affine(b.image, ms, s, s),
        target_in_search=transform_box(ms, b.box),
        template_source=a.sample_id,
        search_source=b.sample_id,
        seed=seed,
    )


def sample_pairs(
    samples: list[SynthesizedSample],
    n_pairs: int,
    seed: int,
    t: int = 127,
    s: int = 255,
    ctx_t: float = 2.0,
    ctx_s: float = 4.0,
) -> list[TrainingPair]:
    """Uniform with-replacement (template, search) draws over samples."""
    if not samples:
        raise ValueError("no samples to pair")
    rng = make_rng(seed)
    out = []
    for i in range(n_pairs):
        ia = int(rng.integers(0, len(samples)))
        ib = int(rng.integers(0, len(samples)))
        out.append(make_pair(samples[ia], samples[ib], t, s, ctx_t, ctx_s, seed=mix64(seed, i)))
    return out


def _fmt_value(v) -> str:
    # bool before int: bool is an int subclass
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.6f}"
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, (list, tuple)):
        return "[" + ",".join(_fmt_value(x) for x in v) + "]"
    if isinstance(v, dict):
        return "{" + ",".join(f"{json.dumps(str(k))}:{_fmt_value(x)}" for k, x in v.items()) + "}"
    raise TypeError(f"cannot serialize {type(v)!r}")


def _box_list(b: BoundingBox) -> list[float]:
    return [float(b.x), float(b.y), float(b.w), float(b.h)]


def sample_record(sample: SynthesizedSample) -> dict:
    if sample.frame_path is None:
        raise ValueError(f"sample {sample.sample_id} has no frame_path; write its frame first")
    return {
        "kind": "sample",
        "id": sample.sample_id,
        "frame_path": sample.frame_path,
        "box": _box_list(sample.box),
        "background": [sample.background[0], int(sample.background[1])],
        "chain": [
            {"kind": step.kind.value, "params": dict(step.params)}
            for step in sample.chain.steps
        ],
        "distractors": [_box_list(b) for b in sample.distractor_boxes],
        "seed": int(sample.seed),
    }


def pair_record(pair: TrainingPair) -> dict:
    return {
        "kind": "pair",
        "template_id": pair.template_source,
        "search_id": pair.search_source,
        "target_in_search": _box_list(pair.target_in_search),
        "seed": int(pair.seed),
    }


def write_manifest_records(records, path) -> int:
    """Write record dicts one JSON object per line, floats fixed to 6
    decimal places.  Returns the number of lines written."""
    path = Path(path)
    lines = [_fmt_value(r) for r in records]
    try:
        with open(path, "w", encoding="utf-8") as fh:
            for line in lines:
                fh.write(line + "\n")
    except OSError as e:
        raise OSError(f"writing manifest {path}: {e}") from e
    return len(lines)


def export_manifest(samples, pairs, path) -> int:
    """Write sample records then pair records to a manifest file."""
    records = [sample_record(s) for s in samples]
    records += [pair_record(p) for p in pairs]
    return write_manifest_records(records, path)


def read_manifest(path) -> tuple[list[dict], list[dict]]:
    """Parse a manifest back into (sample records, pair records).

    Malformed lines raise with the 1-based line number.
    """
    path = Path(path)
    samples: list[dict] = []
    pairs: list[dict] = []
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise OSError(f"reading manifest {path}: {e}") from e
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip():
            continue
        try:
            record = json.loads(raw)
        except json.JSONDecodeError as e:
            raise ValueError(f"{path}:{lineno}: invalid JSON: {e.msg}") from e
        kind = record.get("kind")
        if kind == "sample":
            samples.append(record)
        elif kind == "pair":
            pairs.append(record)
        else:
            raise ValueError(f"{path}:{lineno}: unknown record kind {kind!r}")
    return samples, pairs


def manifest_sample(record: dict, root) -> SynthesizedSample:
    """Rebuild a sample from its manifest record, loading the frame
    from frame_path relative to `root` (the manifest's directory)."""
    sequence_id, _, idx = record["id"].rpartition(":")
    chain = TransformChain(
        steps=tuple(
            TransformParams(TransformKind(s["kind"]), s["params"]) for s in record["chain"]
        ),
        seed=int(record["seed"]),
    )
    return SynthesizedSample(
        image=load_image(Path(root) / record["frame_path"]),
        box=BoundingBox(*record["box"]),
        background=(record["background"][0], int(record["background"][1])),
        chain=chain,
        distractor_boxes=tuple(BoundingBox(*d) for d in record["distractors"]),
        seed=int(record["seed"]),
        sequence_id=sequence_id,
        index=int(idx),
        frame_path=record["frame_path"],
    )
