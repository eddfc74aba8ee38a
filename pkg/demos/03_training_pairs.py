"""
Template/search training pairs and the JSONL manifest
======================================================

Synthesized frames become Siamese-style training pairs: a tight 127px
template crop around one sample's box, a wide 255px search crop around
another's, and the search box mapped into crop coordinates as the
regression target.  The manifest serializes all of it as one JSON
object per line with floats fixed to 6 decimals, so external training
stacks (see loader/) can consume it without importing this package.
"""
from dataclasses import replace

from _toy_data import OUT, build_toy_dataset, outline, tile

from ctpsynth import (
    default_policy,
    export_manifest,
    load_sequence_dataset,
    read_manifest,
    sample_pairs,
    save_png,
    synthesize,
)

root = build_toy_dataset()
dataset = load_sequence_dataset(root)

samples = synthesize(dataset, "car", default_policy(), n=6, master_seed=21)
pairs = sample_pairs(samples, n_pairs=8, seed=99)
print(f"{len(samples)} samples -> {len(pairs)} (template, search) pairs")
for p in pairs:
    b = p.target_in_search
    print(f"  {p.template_source} / {p.search_source}"
          f"  target_in_search=({b.x:6.2f},{b.y:6.2f},{b.w:6.2f},{b.h:6.2f})")

# Template crops are 127x127, search crops 255x255; the target box
# lands somewhere near the middle of the search crop by construction.
panels = []
for p in pairs[:4]:
    panels.append(p.template)
    panels.append(outline(p.search, p.target_in_search))
OUT.mkdir(exist_ok=True)
save_png(tile(panels, cols=4), OUT / "03_pairs.png")
print(f"\ntemplate/search pairs (green = regression target) -> {OUT / '03_pairs.png'}")

# The manifest needs each sample's frame written somewhere first;
# frame_path is recorded relative to the manifest's directory.
run = OUT / "03_run"
(run / "frames").mkdir(parents=True, exist_ok=True)
on_disk = []
for s in samples:
    rel = f"frames/{s.sequence_id}_{s.index:06d}.png"
    save_png(s.image, run / rel)
    on_disk.append(replace(s, frame_path=rel))

n_lines = export_manifest(on_disk, pairs, run / "manifest.jsonl")
print(f"\nwrote {n_lines} manifest lines -> {run / 'manifest.jsonl'}")

sample_records, pair_records = read_manifest(run / "manifest.jsonl")
print(f"read back: {len(sample_records)} sample records, {len(pair_records)} pair records")
print("first pair record:")
print(" ", pair_records[0])

# The equivalent CLI pipeline (synth writes frames + manifest, pairs
# appends pair records and materializes crops under pairs/):
#   ctp synth --root demos/out/toy_data --seed 21 --num 6 --out out/run
#   ctp pairs --seed 99 --num 8 --out out/run
