"""
Scoring against generated ground truth
======================================

Synthetic sheets come with the partition they were drawn from, so we can
measure how merging degrades as the detector output gets worse.
"""

from pid_linker import MergeConfig, SynthSpec, batch_evaluate, difficulty_sweep, digitize, generate

# One clean sheet first: the pipeline should recover it exactly.
scene, truth = generate(SynthSpec(seed=3, clutter_count=4))
print(len(scene.segments), "strokes,", len(truth.lines), "true lines")
result = digitize(scene)
print(batch_evaluate([(result.scored_lines(), truth)]).table())

# A noisy batch: wobbly endpoints, doubled strokes, more breaks per leg.
noisy = SynthSpec(jitter_sigma=2.5, duplicate_prob=0.2, split_count_range=(2, 4),
                  clutter_count=5)
cases = []
for seed in range(30):
    scene, truth = generate(noisy.replace(seed=seed))
    cases.append((digitize(scene).scored_lines(), truth))
pooled = batch_evaluate(cases).pooled
print(f"\nnoisy batch: P={pooled.precision:.3f} R={pooled.recall:.3f} "
      f"F1={pooled.f1:.3f} exact={pooled.exact_accuracy:.3f}")

# Widen the breaks between fragments past the gap tolerance and watch F1 fall.
print("\ngap_range.max   F1")
for value, m in difficulty_sweep(SynthSpec(seed=100, gap_range=(1.0, 2.0)),
                                 "gap_range.max", [2, 5, 10, 15, 20], batch_size=10):
    print(f"{value:>13}   {m.f1:.3f}")

# Tolerances are ordinary config: a looser gap recovers some of the loss.
wide = SynthSpec(seed=100, gap_range=(1.0, 15.0))
for eps in (10, 16):
    cfg = MergeConfig(eps_gap=eps)
    ((_, m),) = difficulty_sweep(wide, "gap_range.max", [15], cfg=cfg, batch_size=10)
    print(f"eps_gap={eps}: F1={m.f1:.3f}")
