"""
Seeing the merge
================

Two SVG views of one sheet: every raw stroke in its own colour, then
strokes coloured by the merged line they joined.
"""

import sys
from pathlib import Path

from pid_linker import SynthSpec, digitize, generate, render_svg

out = Path(sys.argv[1] if len(sys.argv) > 1 else "overlay_out")
out.mkdir(exist_ok=True)

scene, _ = generate(SynthSpec(seed=8, split_count_range=(2, 4), duplicate_prob=0.15,
                              clutter_count=6))
result = digitize(scene)

(out / "raw.svg").write_text(render_svg(scene, raw=True))
(out / "merged.svg").write_text(
    render_svg(result.scene, result.lines, result.attachments, segments=result.merge.segments))

# grey dashed strokes in merged.svg are clutter that attached to nothing
print(result.summary())
print("wrote", out / "raw.svg", "and", out / "merged.svg")
