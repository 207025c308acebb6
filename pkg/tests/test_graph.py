import json
import random

import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from pid_linker.config import MergeConfig
from pid_linker.errors import DanglingReference, UnknownSymbol
from pid_linker.graph import (
    L,
    S,
    Attachment,
    ConnectivityGraph,
    attach_symbols,
    build_graph,
    detect_cycles,
    find_route,
    format_route,
    graph_from_dict,
    graph_to_dict,
    prune_unattached,
    reachable_set,
    to_dot,
)
from pid_linker.merge import MergedLineMap, merge_pipeline
from pid_linker.pipeline import digitize
from pid_linker.scene import DetectedSymbol

from conftest import hseg, make_scene
from oracles import bfs_hops, dfs_component


def att(sym, line, d=0.0):
    return Attachment(sym, line, None, None, d)


def graph(n_symbols, lines, edges):
    """``lines`` is a list of line ids, ``edges`` (symbol, line) pairs."""
    return ConnectivityGraph({i: "valve" for i in range(1, n_symbols + 1)},
                             {k: (k,) for k in lines}, [att(s, l) for s, l in edges])


class TestAttach:
    def one(self, seg, bbox, **cfg):
        scene = make_scene([seg], [(1, bbox)])
        lines = MergedLineMap.from_groups([[seg.id]])
        return attach_symbols(scene, lines, MergeConfig(**cfg))

    def test_near_endpoint(self):
        (a,) = self.one(hseg(20, 50, 100, id=3), (105, 40, 140, 60))
        assert (a.symbol_id, a.line_id, a.segment_id, a.distance) == (1, 1, 3, 5.0)
        assert tuple(a.contact) == (100, 50)

    def test_inside(self):
        (a,) = self.one(hseg(20, 50, 110, id=3), (105, 40, 140, 60))
        assert a.distance == 0.0

    def test_too_far(self):
        assert self.one(hseg(20, 50, 75, id=3), (105, 40, 140, 60)) == []

    def test_closest_endpoint_then_smallest_segment(self, tee_scene):
        lines = MergedLineMap.from_groups([[1, 2, 3]])
        atts = attach_symbols(tee_scene, lines)
        assert [(a.symbol_id, a.segment_id, a.distance) for a in atts] == \
            [(1, 1, 2.0), (2, 2, 2.0), (3, 3, 2.0)]
        tie = make_scene([hseg(0, 50, 40, id=8), hseg(50, 50, 90, id=5)],
                         [(1, (42, 40, 48, 60))])
        (a,) = attach_symbols(tie, MergedLineMap.from_groups([[5, 8]]))
        assert (a.segment_id, a.distance) == (5, 2.0)

    def test_distance_within_inflation(self):
        # inside the inflated rectangle's corner, but 11.3 px from the box
        scene = make_scene([hseg(0, 0, 100, id=1)], [(1, (108, 8, 120, 20))])
        lines = MergedLineMap.from_groups([[1]])
        assert attach_symbols(scene, lines) == []
        (a,) = attach_symbols(scene, lines, MergeConfig(attach_inflation=12))
        assert a.distance == pytest.approx(8 * 2 ** 0.5)


class TestPrune:
    def test_drops_unattached(self):
        lines = MergedLineMap.from_groups([[1], [2, 3]])
        kept, atts = prune_unattached(lines, [att(7, 2)])
        assert kept.to_dict() == {"1": [2, 3]} and atts == [att(7, 1)]

    def test_all_attached(self):
        lines = MergedLineMap.from_groups([[1], [2, 3]])
        kept, _ = prune_unattached(lines, [att(1, 1), att(1, 2)])
        assert kept == lines

    def test_nothing_attached(self):
        kept, atts = prune_unattached(MergedLineMap.from_groups([[1], [2]]), [])
        assert len(kept) == 0 and atts == []


class TestBuild:
    def test_derived_adjacency(self):
        g = graph(2, [1], [(1, 1), (2, 1)])
        assert g.derived_adjacency == {1: {(2, 1)}, 2: {(1, 1)}}

    def test_single_attachment_line(self):
        g = graph(2, [1], [(1, 1)])
        assert L(1) in g.nodes and g.derived_adjacency == {1: set(), 2: set()}

    def test_empty_map(self):
        scene = make_scene(symbols=[(1, (0, 0, 5, 5)), (2, (9, 9, 20, 20))])
        g = build_graph(scene, MergedLineMap({}), [])
        assert g.nodes == [S(1), S(2)] and g.edges == []

    def test_dangling(self):
        with pytest.raises(DanglingReference):
            graph(1, [1], [(2, 1)])
        with pytest.raises(DanglingReference):
            graph(1, [1], [(1, 5)])

    def test_tee_line_projects_to_clique(self, tee_scene):
        d = digitize(tee_scene)
        assert d.lines.to_dict() == {"1": [1, 2, 3]}
        assert d.graph.derived_adjacency == {1: {(2, 1), (3, 1)}, 2: {(1, 1), (3, 1)},
                                             3: {(1, 1), (2, 1)}}


class TestQueries:
    def test_route(self):
        g = graph(2, [1], [(1, 1), (2, 1)])
        assert find_route(g, 1, 2) == [S(1), L(1), S(2)]
        assert format_route(find_route(g, 1, 2)) == "S1 -(L1)- S2"

    def test_disconnected(self):
        g = graph(3, [1], [(1, 1), (2, 1)])
        assert find_route(g, 1, 3) is None and format_route(None) == "none"

    def test_lexicographic_tie_break(self):
        g = graph(4, [1, 2, 3, 4], [(1, 4), (3, 4), (1, 2), (2, 2), (2, 3), (3, 3),
                                    (4, 1), (3, 1)])
        assert find_route(g, 1, 3) == [S(1), L(4), S(3)]
        two = graph(4, [5, 6, 7, 8], [(1, 5), (2, 5), (1, 6), (3, 6), (2, 7), (4, 7),
                                      (3, 8), (4, 8)])
        assert find_route(two, 1, 4) == [S(1), L(5), S(2), L(7), S(4)]

    def test_unknown_symbol(self):
        g = graph(1, [], [])
        with pytest.raises(UnknownSymbol):
            find_route(g, 1, 9)
        with pytest.raises(UnknownSymbol):
            reachable_set(g, 9)

    def test_tree_has_no_cycles(self):
        assert detect_cycles(graph(3, [1, 2], [(1, 1), (2, 1), (2, 2), (3, 2)])) == []

    def test_two_lines_between_two_symbols(self):
        g = graph(2, [4, 9], [(1, 4), (2, 4), (1, 9), (2, 9)])
        assert detect_cycles(g) == [[S(1), L(4), S(2), L(9)]]

    def test_reach(self):
        assert reachable_set(graph(1, [], []), 1) == {1}
        chain = graph(5, [1, 2, 3, 4], [(i, i) for i in range(1, 5)] +
                      [(i + 1, i) for i in range(1, 5)])
        assert reachable_set(chain, 3) == {1, 2, 3, 4, 5}


def random_graph(rng, max_nodes=100):
    n_sym = rng.randint(1, max_nodes // 2)
    n_line = rng.randint(0, max_nodes - n_sym)
    edges = set()
    for line in range(1, n_line + 1):
        for s in rng.sample(range(1, n_sym + 1), min(n_sym, rng.randint(1, 3))):
            edges.add((s, line))
    return graph(n_sym, list(range(1, n_line + 1)), sorted(edges))


def nx_graph(g):
    h = nx.Graph()
    h.add_nodes_from(g.nodes)
    h.add_edges_from(g.edges)
    return h


@pytest.mark.parametrize("seed", range(40))
def test_queries_against_oracles(seed):
    rng = random.Random(seed)
    g = random_graph(rng)
    h = nx_graph(g)
    symbols = sorted(g.symbols)
    for _ in range(20):
        s, t = rng.choice(symbols), rng.choice(symbols)
        route = find_route(g, s, t)
        hops = bfs_hops(g.adjacency, S(s), S(t))
        if hops is None:
            assert route is None and not nx.has_path(h, S(s), S(t))
        else:
            assert len(route) - 1 == hops == nx.shortest_path_length(h, S(s), S(t))
            assert all(h.has_edge(u, v) for u, v in zip(route, route[1:]))
            assert route[0] == S(s) and route[-1] == S(t)
        assert reachable_set(g, s) == {n.id for n in dfs_component(g.adjacency, S(s))
                                       if n.kind == "S"}
    cycles = detect_cycles(g)
    assert len(cycles) == len(g.edges) - len(g.nodes) + nx.number_connected_components(h)
    for c in cycles:
        assert len(set(c)) == len(c) and c[0].kind == "S"
        assert all(h.has_edge(c[i], c[(i + 1) % len(c)]) for i in range(len(c)))
    assert detect_cycles(graph_from_dict(json.loads(json.dumps(graph_to_dict(g))))) == cycles


@settings(max_examples=60, deadline=None)
@given(st.randoms(use_true_random=False))
def test_reach_is_an_equivalence(rnd):
    g = random_graph(rnd, 40)
    reach = {s: reachable_set(g, s) for s in g.symbols}
    for s in g.symbols:
        assert s in reach[s]
        assert find_route(g, s, s) == [S(s)]
        for t in reach[s]:
            assert s in reach[t] and reach[t] == reach[s]
            assert (find_route(g, s, t) is None) == (find_route(g, t, s) is None) is False


def test_export_round_trip_and_dot(tee_scene):
    g = digitize(tee_scene).graph
    doc = json.loads(json.dumps(graph_to_dict(g)))
    assert doc == {
        "symbols": [{"id": i, "class_label": "valve"} for i in (1, 2, 3)],
        "lines": [{"id": 1, "segments": [1, 2, 3]}],
        "attachments": [{"symbol": i, "line": 1, "distance": 2.0} for i in (1, 2, 3)],
    }
    back = graph_from_dict(doc)
    assert back.adjacency == g.adjacency and back.derived_adjacency == g.derived_adjacency
    dot = to_dot(g, "sheet")
    assert dot.startswith('graph "sheet" {')
    assert 'S1 [shape=box, label="S1 valve"];' in dot and "L1 [shape=point" in dot
    assert dot.count(" -- ") == 3


def test_post_pruning_every_line_attached():
    scene = make_scene([hseg(0, 10, 50, id=1), hseg(300, 300, 400, id=2)],
                       [DetectedSymbol(1, "pump", (52, 0, 70, 20), None)])
    d = digitize(scene)
    assert d.lines.to_dict() == {"1": [1]} and d.lines_pruned == 1
    attached = {a.line_id for a in d.attachments}
    assert attached == set(d.lines)
