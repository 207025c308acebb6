"""
Merging broken pipe strokes, one step at a time
================================================

A detector hands us short axis-aligned strokes. Here we build a tiny sheet
by hand and watch each stage turn them into merged lines.
"""

from pid_linker import (
    DetectedSymbol,
    DiagramScene,
    Segment,
    close_merge_relation,
    digitize,
    find_step1_pairs,
    find_step2_pairs,
    suppress_duplicates,
)

# A pump on the left and a tank on the right, joined by a run that the
# detector broke in two and also traced twice (id 5 shadows id 1).
# A branch drops from the run to a valve, and an elbow leads to a gauge.
segments = [
    Segment.horizontal(1, 62, 200, 100),
    Segment.horizontal(5, 70, 190, 102.5),
    Segment.horizontal(2, 205, 338, 100),
    Segment.vertical(3, 150, 103, 248),
    Segment.vertical(4, 340, 100, 30),
    Segment.horizontal(6, 343, 420, 28),
    Segment.horizontal(9, 600, 700, 600),      # stray stroke near nothing
]
symbols = [
    DetectedSymbol(1, "pump", (20, 80, 60, 120), "P-101"),
    DetectedSymbol(2, "valve", (130, 250, 170, 290), "V-7"),
    DetectedSymbol(3, "gauge", (422, 10, 460, 46), "PI-3"),
]
scene = DiagramScene("walkthrough", 200, 800, 800, symbols, segments)

# Stage 1: near-identical parallels collapse into one stroke.
survivors, report = suppress_duplicates(scene.segments)
print("duplicates folded:", report.replaced)

# Stage 2: endpoints close to each other (collinear gaps and corners).
step1 = find_step1_pairs(survivors)
for p in step1:
    print(f"  {p.kind.value:<12} {p.a}-{p.b}  gap {p.evidence:.2f}")

# Stage 3: an endpoint resting on another stroke's interior is a tee.
step2 = find_step2_pairs(survivors, step1=step1)
for p in step2:
    print(f"  {p.kind.value:<12} {p.a}-{p.b}  off by {p.evidence:.2f}")

# Stage 4: chains of pairs close into lines.
lines = close_merge_relation([s.id for s in survivors], step1 + step2)
print("merged lines:", lines.to_dict())

# The full pipeline also attaches symbols and drops lines touching none.
result = digitize(scene)
print(result.summary())
print("after pruning:", result.lines.to_dict())
for a in result.attachments:
    print(f"  S{a.symbol_id} touches L{a.line_id} via segment {a.segment_id} "
          f"at distance {a.distance:.1f}")
