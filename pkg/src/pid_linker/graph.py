"""Symbol attachment, pruning, and the symbol/line connectivity graph.

The graph is bipartite: symbol nodes on one side, merged-line nodes on the
other, with an edge wherever a line touches a symbol. Queries walk this
bipartite graph so that routes name the physical lines they traverse.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from typing import Any, Iterable, NamedTuple, Sequence

import numpy as np

from .config import MergeConfig
from .errors import DanglingReference, TypeMismatch, UnknownSymbol
from .geometry import Point, Segment
from .merge import MergedLineMap
from .scene import DiagramScene


class Attachment(NamedTuple):
    symbol_id: int
    line_id: int
    segment_id: int | None
    contact: Point | None
    distance: float


class Node(NamedTuple):
    kind: str   # "S" for symbols, "L" for merged lines
    id: int

    def __str__(self):
        return f"{self.kind}{self.id}"


def S(i: int) -> Node:
    return Node("S", i)


def L(i: int) -> Node:
    return Node("L", i)


# -- attachment & pruning ------------------------------------------------------

_CHUNK = 4096


def attach_symbols(scene: DiagramScene, lines: MergedLineMap,
                   cfg: MergeConfig | None = None,
                   segments: Sequence[Segment] | None = None) -> list[Attachment]:
    """Attach each merged line to every symbol one of its endpoints reaches.

    An endpoint reaches a symbol when its Euclidean distance to the bbox is
    at most ``attach_inflation``. Per (line, symbol) the closest endpoint
    wins, ties going to the smaller segment id. ``segments`` supplies the
    geometry the map refers to (post-dedup); it defaults to the scene's.
    """
    cfg = cfg or MergeConfig()
    geom = {s.id: s for s in (segments if segments is not None else scene.segments)}
    symbols = sorted(scene.symbols, key=lambda s: s.id)
    if not symbols or not len(lines):
        return []
    ends, owners = [], []
    for line_id, members in lines.items():
        for seg_id in members:
            seg = geom[seg_id]
            for k, p in enumerate((seg.p1, seg.p2)):
                ends.append(p)
                owners.append((line_id, seg_id, k))
    pts = np.asarray(ends, dtype=float)
    boxes = np.asarray([s.bbox for s in symbols], dtype=float)
    best: dict[tuple[int, int], tuple] = {}
    for start in range(0, len(pts), _CHUNK):
        chunk = pts[start:start + _CHUNK]
        x, y = chunk[:, :1], chunk[:, 1:]
        dx = np.maximum(0.0, np.maximum(boxes[:, 0] - x, x - boxes[:, 2]))
        dy = np.maximum(0.0, np.maximum(boxes[:, 1] - y, y - boxes[:, 3]))
        dist = np.hypot(dx, dy)
        for n, m in zip(*np.nonzero(dist <= cfg.attach_inflation)):
            line_id, seg_id, k = owners[start + n]
            key = (line_id, symbols[m].id)
            cand = (float(dist[n, m]), seg_id, k, ends[start + n])
            if key not in best or cand[:3] < best[key][:3]:
                best[key] = cand
    atts = [Attachment(sym_id, line_id, seg_id, Point(*p), d)
            for (line_id, sym_id), (d, seg_id, _, p) in best.items()]
    atts.sort(key=lambda a: (a.line_id, a.symbol_id))
    return atts


def prune_unattached(lines: MergedLineMap,
                     atts: Sequence[Attachment]) -> tuple[MergedLineMap, list[Attachment]]:
    """Drop lines without attachments and renumber the rest.

    Surviving member lists are untouched; attachments are remapped to the
    new line ids.
    """
    attached = {a.line_id for a in atts}
    kept = MergedLineMap.from_groups(m for k, m in lines.items() if k in attached)
    by_first = {members[0]: k for k, members in kept.items()}
    remap = {k: by_first[m[0]] for k, m in lines.items() if k in attached}
    new_atts = sorted((a._replace(line_id=remap[a.line_id]) for a in atts),
                      key=lambda a: (a.line_id, a.symbol_id))
    return kept, new_atts


# -- graph -------------------------------------------------------------------

@dataclass
class ConnectivityGraph:
    symbols: dict[int, str]                      # id -> class label
    lines: dict[int, tuple[int, ...]]            # id -> member segment ids
    attachments: list[Attachment]
    derived_adjacency: dict[int, set[tuple[int, int]]] = field(default_factory=dict)
    adjacency: dict[Node, list[Node]] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        adj: dict[Node, set[Node]] = {S(i): set() for i in self.symbols}
        adj.update({L(i): set() for i in self.lines})
        by_line: dict[int, list[int]] = {i: [] for i in self.lines}
        for a in self.attachments:
            if a.symbol_id not in self.symbols:
                raise DanglingReference(f"attachment names unknown symbol {a.symbol_id}")
            if a.line_id not in self.lines:
                raise DanglingReference(f"attachment names unknown line {a.line_id}")
            adj[S(a.symbol_id)].add(L(a.line_id))
            adj[L(a.line_id)].add(S(a.symbol_id))
            by_line[a.line_id].append(a.symbol_id)
        self.adjacency = {n: sorted(adj[n]) for n in sorted(adj)}
        derived: dict[int, set[tuple[int, int]]] = {i: set() for i in sorted(self.symbols)}
        for line_id, syms in by_line.items():
            for s1 in syms:
                for s2 in syms:
                    if s1 != s2:
                        derived[s1].add((s2, line_id))
        self.derived_adjacency = derived

    @property
    def nodes(self) -> list[Node]:
        return list(self.adjacency)

    @property
    def edges(self) -> list[tuple[Node, Node]]:
        return sorted((S(a.symbol_id), L(a.line_id)) for a in self.attachments)

    def _check_symbol(self, s: int) -> None:
        if s not in self.symbols:
            raise UnknownSymbol(s)


def build_graph(scene: DiagramScene, lines: MergedLineMap,
                atts: Iterable[Attachment]) -> ConnectivityGraph:
    return ConnectivityGraph(
        symbols={s.id: s.class_label for s in sorted(scene.symbols, key=lambda s: s.id)},
        lines={k: tuple(v) for k, v in sorted(lines.items())},
        attachments=sorted(atts, key=lambda a: (a.symbol_id, a.line_id)),
    )


def _bfs_depths(g: ConnectivityGraph, source: Node) -> dict[Node, int]:
    depth = {source: 0}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v in g.adjacency[u]:
            if v not in depth:
                depth[v] = depth[u] + 1
                queue.append(v)
    return depth


def find_route(g: ConnectivityGraph, s: int, t: int) -> list[Node] | None:
    """Fewest-hop alternating symbol/line path from ``s`` to ``t``.

    Among equally short paths the lexicographically smallest id sequence is
    returned. ``None`` when the symbols are not connected.
    """
    g._check_symbol(s)
    g._check_symbol(t)
    to_target = _bfs_depths(g, S(t))
    if S(s) not in to_target:
        return None
    path = [S(s)]
    while path[-1] != S(t):
        here = to_target[path[-1]]
        path.append(min(v for v in g.adjacency[path[-1]] if to_target.get(v) == here - 1))
    return path


def reachable_set(g: ConnectivityGraph, s: int) -> set[int]:
    """Every symbol connected to ``s`` through lines, including ``s``."""
    g._check_symbol(s)
    return {n.id for n in _bfs_depths(g, S(s)) if n.kind == "S"}


def _canonical_cycle(cycle: list[Node]) -> list[Node]:
    symbols = [n for n in cycle if n.kind == "S"]
    start = cycle.index(min(symbols))
    rotated = cycle[start:] + cycle[:start]
    backwards = [rotated[0]] + rotated[:0:-1]
    return min(rotated, backwards, key=lambda c: c[1])


def detect_cycles(g: ConnectivityGraph) -> list[list[Node]]:
    """A fundamental cycle basis of the bipartite graph.

    Each cycle starts at its smallest symbol and heads toward the smaller
    of its two neighbouring lines. The basis has |E| - |V| + |C| cycles.
    """
    parent: dict[Node, Node | None] = {}
    depth: dict[Node, int] = {}
    tree_edges: set[frozenset] = set()
    for root in g.adjacency:
        if root in parent:
            continue
        parent[root], depth[root] = None, 0
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for v in g.adjacency[u]:
                if v not in parent:
                    parent[v], depth[v] = u, depth[u] + 1
                    tree_edges.add(frozenset((u, v)))
                    queue.append(v)
    cycles = []
    for u, v in g.edges:
        if frozenset((u, v)) in tree_edges:
            continue
        left, right = [u], [v]
        while left[-1] != right[-1]:
            if depth[left[-1]] >= depth[right[-1]]:
                left.append(parent[left[-1]])
            else:
                right.append(parent[right[-1]])
        cycles.append(_canonical_cycle(left + right[-2::-1]))
    cycles.sort(key=lambda c: (len(c), c))
    return cycles


# -- export ------------------------------------------------------------------

def graph_to_dict(g: ConnectivityGraph) -> dict:
    return {
        "symbols": [{"id": i, "class_label": label} for i, label in g.symbols.items()],
        "lines": [{"id": i, "segments": list(m)} for i, m in g.lines.items()],
        "attachments": [{"symbol": a.symbol_id, "line": a.line_id, "distance": a.distance}
                        for a in g.attachments],
    }


def graph_from_dict(doc: Any) -> ConnectivityGraph:
    try:
        symbols = {int(s["id"]): str(s["class_label"]) for s in doc["symbols"]}
        lines = {int(l["id"]): tuple(int(m) for m in l["segments"]) for l in doc["lines"]}
        atts = [Attachment(int(a["symbol"]), int(a["line"]), None, None, float(a["distance"]))
                for a in doc["attachments"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise TypeMismatch(f"bad graph document: {exc!r}", "$") from None
    return ConnectivityGraph(symbols, lines, sorted(atts, key=lambda a: (a.symbol_id, a.line_id)))


def dump_graph(g: ConnectivityGraph) -> str:
    return json.dumps(graph_to_dict(g), indent=1) + "\n"


def to_dot(g: ConnectivityGraph, name: str = "pid") -> str:
    out = [f"graph {json.dumps(name)} {{"]
    for i, label in g.symbols.items():
        out.append(f'  S{i} [shape=box, label={json.dumps(f"S{i} {label}")}];')
    for i in g.lines:
        out.append(f'  L{i} [shape=point, xlabel="L{i}"];')
    for a in g.attachments:
        out.append(f"  S{a.symbol_id} -- L{a.line_id};")
    out.append("}")
    return "\n".join(out) + "\n"


def format_route(route: Sequence[Node] | None) -> str:
    if route is None:
        return "none"
    parts = [str(route[0])]
    for i in range(1, len(route), 2):
        parts.append(f"-({route[i]})- {route[i + 1]}")
    return " ".join(parts)
