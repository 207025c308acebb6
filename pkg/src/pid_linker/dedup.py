"""Collapse parallel re-detections of one thick line into a single segment."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .config import DedupConfig
from .geometry import H, Point, Segment, axial_overlap, axis_offset
from .spatial import near_pairs
from .unionfind import UnionFind


@dataclass(frozen=True)
class DedupReport:
    replaced: dict[int, int] = field(default_factory=dict)  # removed id -> representative id
    survivors: list[int] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"replaced": {str(k): v for k, v in sorted(self.replaced.items())}}


def are_duplicates(a: Segment, b: Segment, cfg: DedupConfig) -> bool:
    if a.orientation is not b.orientation:
        return False
    if axis_offset(a, b) > cfg.max_offset:
        return False
    return axial_overlap(a, b) >= cfg.min_overlap_ratio * min(a.length, b.length)


def merge_group(members: Sequence[Segment]) -> Segment:
    """Representative of a duplicate group.

    Axial extent is the union of the members' extents, the off-axis
    coordinate is the length-weighted mean, and the smallest id is kept.
    """
    members = sorted(members, key=lambda s: s.id)
    if len(members) == 1:
        return members[0]
    lo = min(s.extent[0] for s in members)
    hi = max(s.extent[1] for s in members)
    total = math.fsum(s.length for s in members)
    coord = math.fsum(s.length * s.axis_coord for s in members) / total
    first = members[0]
    if first.orientation is H:
        return Segment(first.id, Point(lo, coord), Point(hi, coord), first.extra)
    return Segment(first.id, Point(coord, lo), Point(coord, hi), first.extra)


def suppress_duplicates(segments: Sequence[Segment], cfg: DedupConfig | None = None,
                        index: str = "grid") -> tuple[list[Segment], DedupReport]:
    """Replace every group of duplicate detections by one representative.

    Groups are connected components of the duplicate relation. Merging can
    widen a representative enough to make it a duplicate of another one, so
    the grouping is repeated on representatives until nothing changes; the
    result is therefore idempotent.
    """
    cfg = cfg or DedupConfig()
    by_id = {s.id: s for s in segments}
    uf = UnionFind(sorted(by_id))
    reps = [by_id[i] for i in sorted(by_id)]
    while True:
        changed = False
        for i, j in near_pairs(reps, cfg.max_offset, index):
            if are_duplicates(reps[i], reps[j], cfg):
                changed |= uf.union(reps[i].id, reps[j].id)
        if not changed:
            break
        reps = [merge_group([by_id[m] for m in g]) for g in uf.groups()]
    replaced = {}
    for group in uf.groups():
        for member in group[1:]:
            replaced[member] = group[0]
    return reps, DedupReport(replaced, [s.id for s in reps])
