"""End-to-end processing of one scene."""

from __future__ import annotations

from dataclasses import dataclass

from .config import MergeConfig
from .graph import Attachment, ConnectivityGraph, attach_symbols, build_graph, prune_unattached
from .merge import MergedLineMap, MergeResult, lines_document, merge_pipeline
from .scene import DiagramScene, prepare_scene


@dataclass
class Digitization:
    scene: DiagramScene          # prepared (validated, snapped, 200 dpi)
    merge: MergeResult           # pre-pruning lines, dedup report, pair audit trail
    lines: MergedLineMap         # attached lines only, renumbered
    attachments: list[Attachment]
    graph: ConnectivityGraph

    @property
    def lines_pruned(self) -> int:
        return len(self.merge.lines) - len(self.lines)

    def scored_lines(self) -> MergedLineMap:
        """Final lines with dedup-removed ids folded back in, for scoring."""
        return self.lines.with_replaced(self.merge.dedup.replaced)

    def document(self) -> dict:
        return lines_document(self.scene.sheet_id, self.lines, self.merge.pairs,
                              self.merge.dedup)

    def summary(self) -> str:
        return (f"{self.scene.sheet_id}: segments_in={len(self.scene.segments)} "
                f"duplicates_removed={len(self.merge.dedup.replaced)} "
                f"lines_out={len(self.lines)} lines_pruned={self.lines_pruned}")


def digitize(scene: DiagramScene, cfg: MergeConfig | None = None,
             index: str = "grid") -> Digitization:
    """Prepare ``scene`` and run merge, attachment, pruning and graph building."""
    cfg = cfg or MergeConfig()
    prepared = prepare_scene(scene, cfg)
    merged = merge_pipeline(prepared, cfg, index)
    atts = attach_symbols(prepared, merged.lines, cfg, segments=merged.segments)
    lines, atts = prune_unattached(merged.lines, atts)
    graph = build_graph(prepared, lines, atts)
    return Digitization(prepared, merged, lines, atts, graph)
