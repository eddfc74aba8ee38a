"""
Sampling and applying transform chains
=======================================

Crop the annotated target out of a frame, draw random transform chains
under the default schedule, and apply them.  The point to notice: the
box that comes back with each transformed patch is computed
analytically from the drawn parameters, never re-detected from pixels.
"""
from collections import Counter

from _toy_data import build_toy_dataset, outline, tile

from ctpsynth import (
    apply_chain,
    crop_target,
    default_policy,
    load_sequence_dataset,
    mix64,
    sample_chain,
    save_png,
)
from _toy_data import OUT

root = build_toy_dataset()
dataset = load_sequence_dataset(root)
ann = dataset.annotations["ball"]
print(f"annotated frame: {ann.provenance}, box {ann.box.as_tuple()}")

# crop_target takes the box plus a pad ring (10% of the short side here)
patch = crop_target(ann, pad_ratio=0.1)
print(f"patch {patch.image.shape[1]}x{patch.image.shape[0]}, pad {patch.pad}px,"
      f" inner box {patch.inner_box.as_tuple()}")

# Draw 15 chains from the default policy.  Shift and rescale always
# fire; the rest are coin flips with their own probabilities.
policy = default_policy()
master = 424242
panels = [outline(patch.image, patch.inner_box)]
for j in range(15):
    chain = sample_chain(policy, mix64(master, j))
    out = apply_chain(patch, chain)
    kinds = [s.kind.value for s in chain.steps]
    print(f"chain {j:2d}: {', '.join(kinds)}")
    panels.append(outline(out.image, out.inner_box))

sheet = tile(panels, cols=4)
OUT.mkdir(exist_ok=True)
save_png(sheet, OUT / "01_chains.png")
print(f"\ncontact sheet (original top-left, green = propagated box) -> {OUT / '01_chains.png'}")

# Kind frequencies over a bigger draw, to see the schedule at work.
counts = Counter()
n = 2000
for j in range(n):
    for step in sample_chain(policy, mix64(master, j)).steps:
        counts[step.kind.value] += 1
print(f"\ninclusion frequency over {n} chains:")
for kind, c in sorted(counts.items()):
    print(f"  {kind:<18} {c / n:.3f}")
print("(shift/rescale are always on; flip defaults off; cutout and"
      " shaking_blur never co-occur)")
