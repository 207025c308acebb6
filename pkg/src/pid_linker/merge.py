"""Merge detected segments into continuous lines.

Pairs are discovered in two passes: endpoint vicinity (collinear gaps and,
optionally, perpendicular corners) and endpoint-on-interior contact
(T-junctions). Segments that cross each other are never paired. The pair
relation is then closed transitively into a partition, the merged-line map.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from typing import Any, Iterable, Mapping, NamedTuple, Sequence

from .config import MergeConfig
from .dedup import DedupReport, suppress_duplicates
from .errors import TypeMismatch, UnknownSegmentId
from .geometry import (
    Segment,
    axis_offset,
    endpoint_gap,
    point_segment_distance,
    proper_crossing,
)
from .scene import DiagramScene
from .spatial import near_pairs
from .unionfind import UnionFind


class PairKind(str, enum.Enum):
    COLLINEAR_GAP = "CollinearGap"
    CORNER = "Corner"
    TEE = "Tee"


class MergePair(NamedTuple):
    a: int
    b: int
    kind: PairKind
    evidence: float

    def to_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "kind": self.kind.value, "evidence": self.evidence}


@dataclass(frozen=True)
class MergedLineMap:
    """Partition of segment ids into merged lines, keyed 1..K.

    Keys are assigned in ascending order of each line's smallest member id,
    so the numbering depends only on the partition itself.
    """

    lines: Mapping[int, tuple[int, ...]]

    @classmethod
    def from_groups(cls, groups: Iterable[Iterable[int]]) -> "MergedLineMap":
        ordered = sorted((tuple(sorted(g)) for g in groups if g), key=lambda g: g[0])
        return cls({k: g for k, g in enumerate(ordered, start=1)})

    def __len__(self) -> int:
        return len(self.lines)

    def __iter__(self):
        return iter(self.lines)

    def __getitem__(self, line_id: int) -> tuple[int, ...]:
        return self.lines[line_id]

    def items(self):
        return self.lines.items()

    def segment_ids(self) -> list[int]:
        return sorted(i for members in self.lines.values() for i in members)

    def line_of(self) -> dict[int, int]:
        return {m: k for k, members in self.lines.items() for m in members}

    def partition(self) -> frozenset[frozenset[int]]:
        """The map's content with line ids forgotten."""
        return frozenset(frozenset(m) for m in self.lines.values())

    def with_replaced(self, replaced: Mapping[int, int]) -> "MergedLineMap":
        """Fold removed duplicate ids back into their representative's line."""
        groups = {k: list(v) for k, v in self.lines.items()}
        owner = self.line_of()
        for removed, rep in replaced.items():
            if rep in owner:
                groups[owner[rep]].append(removed)
        return MergedLineMap.from_groups(groups.values())

    def to_dict(self) -> dict[str, list[int]]:
        return {str(k): list(v) for k, v in self.lines.items()}

    @classmethod
    def from_dict(cls, doc: Any, path: str = "lines") -> "MergedLineMap":
        if not isinstance(doc, dict):
            raise TypeMismatch("expected an object of line id -> member list", path)
        lines = {}
        for key, members in doc.items():
            try:
                line_id = int(key)
            except ValueError:
                raise TypeMismatch(f"line id {key!r} is not an integer", path) from None
            if not isinstance(members, list) or not all(
                    isinstance(m, int) and not isinstance(m, bool) for m in members):
                raise TypeMismatch("expected a list of integer segment ids", f"{path}.{key}")
            lines[line_id] = tuple(members)
        return cls(lines)


def _ordered(a: Segment, b: Segment) -> tuple[Segment, Segment]:
    return (a, b) if a.id < b.id else (b, a)


def find_step1_pairs(segments: Sequence[Segment], cfg: MergeConfig | None = None,
                     index: str = "grid") -> list[MergePair]:
    """Endpoint-vicinity pairs: collinear gaps and perpendicular corners."""
    cfg = cfg or MergeConfig()
    pairs = []
    for i, j in near_pairs(segments, cfg.eps_gap, index):
        a, b = _ordered(segments[i], segments[j])
        if a.orientation is b.orientation:
            if axis_offset(a, b) > cfg.delta_collinear:
                continue
            gap = endpoint_gap(a, b)
            if gap <= cfg.eps_gap:
                pairs.append(MergePair(a.id, b.id, PairKind.COLLINEAR_GAP, gap))
        elif cfg.corner_merge:
            gap = endpoint_gap(a, b)
            if gap <= cfg.eps_gap and not proper_crossing(a, b, cfg.crossing_margin):
                pairs.append(MergePair(a.id, b.id, PairKind.CORNER, gap))
    pairs.sort()
    return pairs


def tee_contact(a: Segment, b: Segment, cfg: MergeConfig) -> float | None:
    """Smallest distance from an endpoint of ``a`` onto the interior of ``b``.

    Returns ``None`` when no endpoint lands within ``eps_contact`` at a
    projection parameter at least ``crossing_margin`` away from both ends
    of ``b``.
    """
    length = b.length
    if length <= 2 * cfg.crossing_margin:
        return None
    t_lo = cfg.crossing_margin / length
    t_hi = 1.0 - t_lo
    best = None
    for p in (a.p1, a.p2):
        d, t = point_segment_distance(p, b)
        if d <= cfg.eps_contact and t_lo < t < t_hi and (best is None or d < best):
            best = d
    return best


def find_step2_pairs(segments: Sequence[Segment], cfg: MergeConfig | None = None,
                     index: str = "grid",
                     step1: Sequence[MergePair] | None = None) -> list[MergePair]:
    """T-junction pairs: an endpoint of one segment resting on another's interior.

    Properly crossing pairs are skipped. Pairs listed in ``step1`` are not
    emitted again; a tee sitting near the host's end can qualify as both.
    """
    cfg = cfg or MergeConfig()
    known = {(p.a, p.b) for p in step1 or ()}
    pairs = []
    for i, j in near_pairs(segments, cfg.eps_contact, index):
        a, b = _ordered(segments[i], segments[j])
        if (a.id, b.id) in known:
            continue
        hits = [d for d in (tee_contact(a, b, cfg), tee_contact(b, a, cfg)) if d is not None]
        if hits and not proper_crossing(a, b, cfg.crossing_margin):
            pairs.append(MergePair(a.id, b.id, PairKind.TEE, min(hits)))
    pairs.sort()
    return pairs


def close_merge_relation(segment_ids: Iterable[int],
                         pairs: Iterable[MergePair | tuple]) -> MergedLineMap:
    """Transitive closure of the pair relation: its connected components."""
    uf = UnionFind(segment_ids)
    for pair in pairs:
        a, b = pair[0], pair[1]
        for x in (a, b):
            if x not in uf:
                raise UnknownSegmentId(x)
        uf.union(a, b)
    return MergedLineMap.from_groups(uf.groups())


class MergeResult(NamedTuple):
    lines: MergedLineMap
    dedup: DedupReport
    pairs: list[MergePair]
    segments: list[Segment]     # post-dedup segments the map refers to


def merge_segments(segments: Sequence[Segment], cfg: MergeConfig | None = None,
                   index: str = "grid") -> MergeResult:
    cfg = cfg or MergeConfig()
    survivors, report = suppress_duplicates(segments, cfg.dedup, index)
    step1 = find_step1_pairs(survivors, cfg, index)
    step2 = find_step2_pairs(survivors, cfg, index, step1=step1)
    pairs = sorted(step1 + step2)
    lines = close_merge_relation([s.id for s in survivors], pairs)
    return MergeResult(lines, report, pairs, survivors)


def merge_pipeline(scene: DiagramScene, cfg: MergeConfig | None = None,
                   index: str = "grid") -> MergeResult:
    """Dedup, pair discovery and closure for one prepared scene.

    ``scene`` must already have gone through
    :func:`~pid_linker.scene.prepare_scene`. Unattached lines are still
    present; pruning happens in the connectivity stage.
    """
    return merge_segments(scene.segments, cfg, index)


def lines_document(sheet_id: str, lines: MergedLineMap, pairs: Sequence[MergePair],
                   dedup: DedupReport) -> dict:
    return {
        "sheet_id": sheet_id,
        "lines": lines.to_dict(),
        "pairs": [p.to_dict() for p in pairs],
        "dedup": dedup.to_dict(),
    }


def dump_lines_document(doc: dict) -> str:
    return json.dumps(doc, indent=1) + "\n"


def read_lines_document(doc: Any) -> tuple[MergedLineMap, dict[int, int]]:
    """Merged lines and the dedup replacement map from an output document."""
    if not isinstance(doc, dict) or "lines" not in doc:
        raise TypeMismatch("expected a merged-line document with a 'lines' key", "$")
    lines = MergedLineMap.from_dict(doc["lines"])
    replaced = {int(k): int(v) for k, v in doc.get("dedup", {}).get("replaced", {}).items()}
    return lines, replaced
