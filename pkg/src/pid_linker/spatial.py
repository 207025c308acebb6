"""Uniform grid index for near-pair discovery among axis-aligned segments."""

from __future__ import annotations

import itertools
import math
from collections import defaultdict
from typing import Sequence

from .geometry import Segment, box_distance

# widen cell coverage slightly so float rounding never drops a touching pair
_SLACK = 1e-6


class SegmentGrid:
    """Buckets segment bounding boxes into square cells.

    Each box is grown by ``radius / 2`` on every side before bucketing, so
    any two segments within ``radius`` of each other share at least one
    cell. ``cell_size`` defaults to ``2 * radius``.
    """

    def __init__(self, segments: Sequence[Segment], radius: float,
                 cell_size: float | None = None):
        if radius < 0:
            raise ValueError("radius must be non-negative")
        self.segments = list(segments)
        self.radius = radius
        self.cell_size = cell_size or max(2.0 * radius, 1.0)
        self.boxes = [s.bbox for s in self.segments]
        self.cells: dict[tuple[int, int], list[int]] = defaultdict(list)
        half = radius / 2.0 + _SLACK
        inv = 1.0 / self.cell_size
        for idx, (x0, y0, x1, y1) in enumerate(self.boxes):
            cx0 = math.floor((x0 - half) * inv)
            cx1 = math.floor((x1 + half) * inv)
            cy0 = math.floor((y0 - half) * inv)
            cy1 = math.floor((y1 + half) * inv)
            for cx in range(cx0, cx1 + 1):
                for cy in range(cy0, cy1 + 1):
                    self.cells[cx, cy].append(idx)

    def candidate_pairs(self) -> list[tuple[int, int]]:
        """Index pairs ``(i, j)``, ``i < j``, whose boxes lie within ``radius``."""
        seen: set[tuple[int, int]] = set()
        for members in self.cells.values():
            if len(members) > 1:
                seen.update(itertools.combinations(members, 2))
        boxes, r = self.boxes, self.radius
        return sorted(p for p in seen if box_distance(boxes[p[0]], boxes[p[1]]) <= r)


def near_pairs(segments: Sequence[Segment], radius: float,
               index: str = "grid") -> list[tuple[int, int]]:
    """Candidate index pairs for predicates that need proximity ``<= radius``.

    ``index="brute"`` returns every pair, which is the reference the grid
    must agree with once the exact predicates are applied.
    """
    if index == "grid":
        return SegmentGrid(segments, radius).candidate_pairs()
    if index == "brute":
        return list(itertools.combinations(range(len(segments)), 2))
    raise ValueError(f"unknown index {index!r}")
