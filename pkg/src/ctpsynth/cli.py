"""`ctp` command line.

Binds the pipeline end to end: synthesize frames, build training
pairs, run the baseline tracker, score results, and inspect manifests.
Every command is deterministic given config + seed; set CTP_LOG to
DEBUG/INFO/WARNING to control logging.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from .config import Config, apply_overrides, format_config, load_config, parse_config
from .dataset import (
    AnnotationSource,
    load_frame_images,
    load_sequence_dataset,
    parse_box_line,
    read_attributes,
    read_box_file,
)
from .evaluation import (
    attribute_report,
    auc,
    format_report_table,
    precision_at,
    precision_curve,
    success_curve,
    SequenceScore,
)
from .geometry import BoundingBox, iround
from .imaging import save_png
from .pairs import (
    manifest_sample,
    pair_record,
    read_manifest,
    sample_pairs,
    sample_record,
    write_manifest_records,
)
from .synthesis import build_patch_library, synthesize
from .tracker import track_sequence
from .transforms import TransformKind

log = logging.getLogger("ctp")

# challenge presets: each overrides only its named fields
PRESETS = {
    "sv": {"policy.rescale.range": (0.5, 1.5)},
    "occ": {"policy.cutout.probability": 0.5},
    "mb": {"policy.shaking_blur.probability": 0.5},
    "bc": {"policy.similar_patch_paste.range": (3.0,)},
}
PRESET_ALIASES = {"scale": "sv", "occlusion": "occ", "blur": "mb", "clutter": "bc"}

_ANNOTATION_SOURCES = {
    "annotated": AnnotationSource.ANNOTATED,
    "detector": AnnotationSource.EXTERNAL_DETECTOR,
    "random": AnnotationSource.RANDOM_CROP,
}

_HIST_PARAMS = {
    "Shift": ("dx", "dy"),
    "Rescale": ("s",),
    "Shear": ("mx", "my"),
    "Cutout": ("rw", "rh"),
    "ShakingBlur": ("k",),
    "ColorJitter": ("brightness", "contrast", "saturation"),
}


def _setup_logging() -> None:
    level = getattr(logging, os.environ.get("CTP_LOG", "WARNING").upper(), logging.WARNING)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def _config_from_args(args: argparse.Namespace) -> Config:
    """Layer the config: defaults < file < presets < explicit flags."""
    config = Config()
    if args.config:
        config = load_config(args.config, config)
    for name in getattr(args, "preset", []) or []:
        key = PRESET_ALIASES.get(name, name)
        config = apply_overrides(config, PRESETS[key])
    overrides: dict = {}
    if args.seed is not None:
        overrides["master_seed"] = args.seed
    if args.out:
        overrides["out_root"] = args.out
    if getattr(args, "dataset", None):
        overrides["dataset_root"] = args.dataset
    if getattr(args, "num", None) is not None and args.command == "synth":
        overrides["samples_per_sequence"] = args.num
    if getattr(args, "background", None):
        overrides["background_mode"] = args.background
    if getattr(args, "flip", None) is not None:
        overrides["policy.flip.enable"] = args.flip
    return apply_overrides(config, overrides)


def _synth_sequence(
    config_text: str,
    sequence_id: str,
    source_value: str,
    dataset=None,
    library=None,
) -> list[dict]:
    """Synthesize one sequence and write its frames; returns manifest
    records.  Loads the dataset itself when none is passed, so it can
    run in a worker process; output is identical either way."""
    config = parse_config(config_text)
    source = AnnotationSource(source_value)
    if dataset is None:
        dataset = load_sequence_dataset(config.dataset_root, source, config.master_seed)
    if library is None:
        library = build_patch_library(
            dataset, config.library_per_sequence, config.master_seed, config.pad_ratio
        )
    samples = synthesize(
        dataset,
        sequence_id,
        config.policy,
        config.samples_per_sequence,
        config.master_seed,
        config.background_mode,
        library,
        config.pad_ratio,
    )
    out = Path(config.out_root)
    records = []
    for s in samples:
        rel = f"frames/{s.sequence_id}_{s.index:06d}.png"
        save_png(s.image, out / rel)
        records.append(sample_record(replace(s, frame_path=rel)))
    return records


def cmd_synth(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    source = _ANNOTATION_SOURCES[args.annotation]
    root = Path(config.dataset_root)
    if not root.is_dir():
        raise FileNotFoundError(f"dataset root not found: {root}")
    ids = sorted(d.name for d in root.iterdir() if (d / "img").is_dir())
    if args.sequences:
        wanted = [s.strip() for s in args.sequences.split(",") if s.strip()]
        missing = [s for s in wanted if s not in ids]
        if missing:
            raise ValueError(f"unknown sequences: {', '.join(missing)}")
        ids = [s for s in ids if s in wanted]
    if not ids:
        raise ValueError(f"no sequences found under {root}")

    out = Path(config.out_root)
    (out / "frames").mkdir(parents=True, exist_ok=True)
    config_text = format_config(config)

    if args.jobs > 1:
        log.info("synthesizing %d sequences on %d workers", len(ids), args.jobs)
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            futures = [
                pool.submit(_synth_sequence, config_text, sid, source.value) for sid in ids
            ]
            records = [rec for fut in futures for rec in fut.result()]
    else:
        dataset = load_sequence_dataset(config.dataset_root, source, config.master_seed)
        library = build_patch_library(
            dataset, config.library_per_sequence, config.master_seed, config.pad_ratio
        )
        records = []
        for sid in ids:
            log.info("synthesizing %s", sid)
            records += _synth_sequence(config_text, sid, source.value, dataset, library)

    manifest = out / "manifest.jsonl"
    write_manifest_records(records, manifest)
    print(f"wrote {len(records)} samples over {len(ids)} sequences -> {manifest}")
    print("effective policy:")
    for line in format_config(config).splitlines():
        if line.startswith("policy."):
            print(f"  {line}")
    return 0


def cmd_pairs(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    manifest_path = Path(args.manifest)
    sample_records, _ = read_manifest(manifest_path)
    if not sample_records:
        raise ValueError(f"{manifest_path}: no sample records")
    root = manifest_path.parent
    out = Path(args.out) if args.out else root
    out.mkdir(parents=True, exist_ok=True)

    samples = [manifest_sample(rec, root) for rec in sample_records]
    n_pairs = args.num if args.num is not None else len(samples)
    geometry = config.pairs
    pairs = sample_pairs(
        samples,
        n_pairs,
        config.master_seed,
        t=geometry.template_size,
        s=geometry.search_size,
        ctx_t=geometry.template_context,
        ctx_s=geometry.search_context,
    )
    if args.crops:
        (out / "pairs").mkdir(exist_ok=True)
        for i, p in enumerate(pairs):
            save_png(p.template, out / "pairs" / f"{i:06d}_t.png")
            save_png(p.search, out / "pairs" / f"{i:06d}_s.png")

    records = []
    for rec in sample_records:
        rec = dict(rec)
        # keep frame paths resolvable from where this manifest lands
        rec["frame_path"] = os.path.relpath(root / rec["frame_path"], out)
        records.append(rec)
    records += [pair_record(p) for p in pairs]
    pairs_manifest = out / "pairs.jsonl"
    write_manifest_records(records, pairs_manifest)
    print(f"wrote {len(pairs)} pairs over {len(samples)} samples -> {pairs_manifest}")
    return 0


def cmd_track(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    seq_dir = Path(args.sequence)
    frames = load_frame_images(seq_dir)
    if args.init:
        x, y, w, h = parse_box_line(args.init)
        init = BoundingBox(x - 1.0, y - 1.0, w, h)
    else:
        gt_file = seq_dir / "groundtruth_rect.txt"
        if not gt_file.is_file():
            raise FileNotFoundError(f"{seq_dir}: missing groundtruth_rect.txt (or pass --init)")
        boxes = read_box_file(gt_file)
        if not boxes:
            raise ValueError(f"{gt_file}: empty")
        init = boxes[0]
    boxes = track_sequence(frames, init)
    out = Path(config.out_root)
    out.mkdir(parents=True, exist_ok=True)
    result = out / f"{seq_dir.name}.txt"
    with open(result, "w", encoding="utf-8") as fh:
        for b in boxes:
            fh.write(f"{b.x + 1.0:.3f},{b.y + 1.0:.3f},{b.w:.3f},{b.h:.3f}\n")
    print(f"tracked {len(frames)} frames -> {result}")
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    results_dir = Path(args.results)
    gt_root = Path(args.dataset)
    result_files = sorted(results_dir.glob("*.txt"))
    if not result_files:
        raise ValueError(f"no result files (*.txt) under {results_dir}")
    scores: dict[str, SequenceScore] = {}
    tags: dict[str, tuple[str, ...]] = {}
    curves: list[tuple[str, str, float, float]] = []
    for result_file in result_files:
        seq = result_file.stem
        gt_file = gt_root / seq / "groundtruth_rect.txt"
        if not gt_file.is_file():
            raise FileNotFoundError(f"{seq}: missing {gt_file}")
        pred = read_box_file(result_file)
        gt = read_box_file(gt_file)
        try:
            s_curve = success_curve(pred, gt)
            p_curve = precision_curve(pred, gt)
        except ValueError as exc:
            raise ValueError(f"{seq}: {exc}") from None
        scores[seq] = SequenceScore(auc(s_curve), precision_at(p_curve, 20))
        tags[seq] = read_attributes(gt_root / seq / "attributes.txt")
        curves += [
            (seq, "success", float(t), float(r))
            for t, r in zip(s_curve.thresholds, s_curve.success_rate)
        ]
        curves += [
            (seq, "precision", float(t), float(r))
            for t, r in zip(p_curve.thresholds, p_curve.rate)
        ]
    report = attribute_report(scores, tags)
    out = Path(config.out_root)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "report.json", "w", encoding="utf-8") as fh:
        json.dump(report.to_dict(), fh, indent=2)
        fh.write("\n")
    with open(out / "curves.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sequence", "curve", "threshold", "rate"])
        writer.writerows(curves)
    print(format_report_table(report))
    print(f"report -> {out / 'report.json'}")
    return 0


def _draw_box(img: np.ndarray, box: BoundingBox, color: tuple[int, int, int]) -> None:
    h, w = img.shape[:2]
    x0, y0 = max(0, iround(box.x)), max(0, iround(box.y))
    x1, y1 = min(w, iround(box.x2)), min(h, iround(box.y2))
    if x0 >= x1 or y0 >= y1:
        return
    t = 2
    img[y0:min(y0 + t, y1), x0:x1] = color
    img[max(y1 - t, y0):y1, x0:x1] = color
    img[y0:y1, x0:min(x0 + t, x1)] = color
    img[y0:y1, max(x1 - t, x0):x1] = color


def cmd_preview(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    manifest_path = Path(args.manifest)
    sample_records, _ = read_manifest(manifest_path)
    if not sample_records:
        raise ValueError(f"{manifest_path}: no sample records")
    records = sample_records[: args.num]
    tiles = []
    for rec in records:
        sample = manifest_sample(rec, manifest_path.parent)
        img = sample.image.copy()
        for d in sample.distractor_boxes:
            _draw_box(img, d, (230, 60, 60))
        _draw_box(img, sample.box, (60, 230, 60))
        tiles.append(img)
    cols = int(math.ceil(math.sqrt(len(tiles))))
    rows = int(math.ceil(len(tiles) / cols))
    th = max(t.shape[0] for t in tiles)
    tw = max(t.shape[1] for t in tiles)
    canvas = np.full((rows * th, cols * tw, 3), 24, dtype=np.uint8)
    for i, tile in enumerate(tiles):
        r, c = divmod(i, cols)
        canvas[r * th : r * th + tile.shape[0], c * tw : c * tw + tile.shape[1]] = tile
    out = Path(config.out_root)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "preview.png"
    save_png(canvas, path)
    print(f"preview of {len(tiles)} samples -> {path}")
    return 0


def compute_stats(sample_records: list[dict]) -> dict:
    """Per-kind inclusion frequencies and parameter histograms."""
    n = len(sample_records)
    if n == 0:
        raise ValueError("no sample records")
    freq = {k.value: 0 for k in TransformKind}
    values: dict[str, list[float]] = {}
    for rec in sample_records:
        for step in rec["chain"]:
            kind = step["kind"]
            freq[kind] = freq.get(kind, 0) + 1
            for param in _HIST_PARAMS.get(kind, ()):
                values.setdefault(f"{kind}.{param}", []).append(float(step["params"][param]))
    histograms = {}
    for key in sorted(values):
        counts, edges = np.histogram(values[key], bins=8)
        histograms[key] = {
            "counts": [int(c) for c in counts],
            "edges": [float(e) for e in edges],
        }
    return {
        "samples": n,
        "frequency": {k: c / n for k, c in freq.items()},
        "histograms": histograms,
    }


def cmd_stats(args: argparse.Namespace) -> int:
    sample_records, pair_records = read_manifest(Path(args.manifest))
    stats = compute_stats(sample_records)
    print(f"samples: {stats['samples']}   pairs: {len(pair_records)}")
    print(f"{'kind':<20} {'frequency':>9}")
    for kind, f in stats["frequency"].items():
        print(f"{kind:<20} {f:>9.3f}")
    if stats["histograms"]:
        print("\nparameter histograms (8 bins)")
        for key, h in stats["histograms"].items():
            lo, hi = h["edges"][0], h["edges"][-1]
            bins = " ".join(str(c) for c in h["counts"])
            print(f"{key:<28} {lo:>8.3f}..{hi:<8.3f} [{bins}]")
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="config file (dotted keys)")
    common.add_argument("--seed", type=int, metavar="U64", help="master seed")
    common.add_argument("--jobs", type=int, default=1, metavar="N", help="worker processes")
    common.add_argument("--out", metavar="DIR", help="output root")

    parser = argparse.ArgumentParser(
        prog="ctp",
        description="Synthesize tracking data from one annotated frame per video, "
        "build training pairs, and score a baseline tracker.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", parents=[common], help="synthesize frames + manifest")
    p.add_argument("dataset", nargs="?", help="dataset root (default: config dataset_root)")
    p.add_argument("--num", type=int, metavar="N", help="samples per sequence")
    p.add_argument("--sequences", metavar="A,B", help="only these sequences")
    p.add_argument(
        "--preset",
        action="append",
        default=[],
        choices=sorted(PRESETS) + sorted(PRESET_ALIASES),
        help="challenge preset, repeatable",
    )
    p.add_argument(
        "--annotation",
        choices=sorted(_ANNOTATION_SOURCES),
        default="annotated",
        help="reference box source",
    )
    p.add_argument("--background", choices=["same", "different"], help="background frame pool")
    flip = p.add_mutually_exclusive_group()
    flip.add_argument("--flip", dest="flip", action="store_true", help="enable mirroring")
    flip.add_argument("--no-flip", dest="flip", action="store_false", help="disable mirroring")
    p.set_defaults(func=cmd_synth, flip=None)

    p = sub.add_parser("pairs", parents=[common], help="build template/search pairs")
    p.add_argument("manifest", help="manifest.jsonl from synth")
    p.add_argument("--num", type=int, metavar="N", help="pair count (default: one per sample)")
    p.add_argument(
        "--no-crops", dest="crops", action="store_false", help="skip writing crop PNGs"
    )
    p.set_defaults(func=cmd_pairs, crops=True)

    p = sub.add_parser("track", parents=[common], help="run the correlation-filter tracker")
    p.add_argument("sequence", help="sequence directory (with img/)")
    p.add_argument("--init", metavar="X,Y,W,H", help="init box, ground-truth file convention")
    p.set_defaults(func=cmd_track)

    p = sub.add_parser("eval", parents=[common], help="score result files against ground truth")
    p.add_argument("results", help="directory of <sequence>.txt result files")
    p.add_argument("dataset", help="dataset root with groundtruth_rect.txt files")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("preview", parents=[common], help="contact sheet with drawn boxes")
    p.add_argument("manifest", help="manifest.jsonl")
    p.add_argument("--num", type=int, default=16, metavar="N", help="samples to show")
    p.set_defaults(func=cmd_preview)

    p = sub.add_parser("stats", parents=[common], help="transform frequencies in a manifest")
    p.add_argument("manifest", help="manifest.jsonl")
    p.set_defaults(func=cmd_stats)
    return parser


def main(argv: list[str] | None = None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
