"""
Closing the loop: track a synthesized sequence and score it
============================================================

Synthesize a motion sequence (shift-only, so the target wanders but
keeps its size), run the correlation-filter tracker from frame 0, and
score the predictions against the synthesized ground truth with the
OTB-style success/precision machinery.  Synthetic data with exact
labels means the evaluation needs no hand annotation at all.
"""
import time

from _toy_data import build_toy_dataset

from ctpsynth import (
    KindPolicy,
    SchedulePolicy,
    attribute_report,
    format_report_table,
    iou,
    load_sequence_dataset,
    score_sequence,
    synthesize,
    track_sequence,
)

root = build_toy_dataset()
dataset = load_sequence_dataset(root)

# Shift-only motion: rescale pinned to 1.0, everything else off.  The
# target drifts up to +/-12 px per frame around the reference spot.
motion = SchedulePolicy(
    shift=KindPolicy(True, 1.0, (-12.0, 12.0)),
    rescale=KindPolicy(False, 1.0, (1.0, 1.0)),
    flip=KindPolicy(False, 0.5),
    shear=KindPolicy(False, 0.5, (-0.3, 0.3)),
    cutout=KindPolicy(False, 0.15, (0.10, 0.40)),
    shaking_blur=KindPolicy(False, 0.2, (3.0, 15.0)),
    color_jitter=KindPolicy(False, 0.4, (0.6, 1.4)),
    similar_patch_paste=KindPolicy(False, 0.8, (1.0,)),
)

scores = {}
for seq_id in dataset.sequence_ids():
    samples = synthesize(dataset, seq_id, motion, n=60, master_seed=5150)
    frames = [s.image for s in samples]
    gt = [s.box for s in samples]

    t0 = time.perf_counter()
    pred = track_sequence(frames, gt[0])
    dt = time.perf_counter() - t0

    ious = [iou(p, g) for p, g in zip(pred, gt)]
    scores[seq_id] = score_sequence(pred, gt)
    print(f"{seq_id}: {len(frames)} frames in {dt:.2f}s,"
          f" mean IoU {sum(ious) / len(ious):.3f},"
          f" worst frame {min(ious):.3f}")

print()
print(format_report_table(attribute_report(scores, dataset.tags)))

# The same loop against frames on disk, via the CLI:
#   ctp synth --root demos/out/toy_data --seed 5150 --num 60 --out out/run
#   ctp track --root demos/out/toy_data --out out/results
#   ctp eval --root demos/out/toy_data --results out/results --out out/report
