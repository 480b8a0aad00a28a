import json

import pytest

from kirchberg.graphs import (INF, DirectedGraph, GraphError, GraphPath, SubgraphFiltration,
                              cuntz_graph, enumerate_paths, load_graph, paths_of_length,
                              regular_adjacency)


def test_cuntz_graph_shapes():
    c3 = cuntz_graph(3)
    assert c3.name == "C3" and c3.is_regular("v") and c3.out_degree("v") == 3
    lin = cuntz_graph(INF)
    assert lin.name == "Linf" and lin.is_infinite_emitter("v") and lin.distinguished == "v"


def test_vertex_classes(g2):
    assert g2.regular_vertices == ["w"]
    assert g2.infinite_emitters == ["v"]
    assert g2.singular_vertices == ["v"]


def test_sinks_are_singular():
    g = DirectedGraph.from_edges("S", ["a", "b"], [("a", "b", 1)])
    assert "b" in g.singular_vertices and not g.is_infinite_emitter("b")


def test_capped_out_edges(linf):
    assert len(linf.out_edges("v", 3)) == 3
    assert linf.has_edge_beyond("v", 3)
    with pytest.raises(GraphError):
        linf.out_edges("v")


def test_round_trip(g2):
    assert DirectedGraph.from_data(g2.to_data()) == g2
    assert g2.to_data()["edges"][0]["count"] == "inf"


def test_load_graph_reports_position(tmp_path):
    p = tmp_path / "bad.graph"
    p.write_text('{"name": "x",\n "vertices": ["v"] "edges": []}')
    with pytest.raises(GraphError, match=r":2:\d+:"):
        load_graph(p)


def test_load_graph_rejects_bad_count(tmp_path):
    p = tmp_path / "bad.graph"
    p.write_text(json.dumps({"name": "x", "vertices": ["v"],
                             "edges": [{"from": "v", "to": "v", "count": 0}]}))
    with pytest.raises(GraphError):
        load_graph(p)


def test_paths(g2):
    p = GraphPath.of(g2, "v", [g2.out_edges("v", 1)[0]])
    q = p.extend(g2, g2.out_edges("w")[0])
    assert q.terminus == "v" and len(q) == 2
    assert p.is_prefix_of(q) and q.drop_prefix(p).origin == "w"
    assert len(paths_of_length(g2, 2, cap=2)) == 2 + 2
    assert all(len(x) <= 2 for x in enumerate_paths(g2, "v", 2, 2))


def test_path_rejects_broken_edges(g2):
    with pytest.raises(GraphError):
        GraphPath.of(g2, "w", [g2.out_edges("v", 1)[0]])


def test_regular_adjacency():
    g = DirectedGraph.from_edges("A", ["a", "b"], [("a", "b", 2), ("b", "a", 1), ("a", "a", 1)])
    adj = regular_adjacency(g)
    assert adj.rows == ("a", "b")
    assert adj.entries.tolist() == [[1, 2], [1, 0]]


def test_filtration_levels(g2):
    f = SubgraphFiltration(g2, (1, 2))
    with pytest.raises(GraphError, match="circuit"):
        f.check_level(1)
    f.check_level(2)
    assert f.cap(2) == 2
    assert len(f.level_edges(1)) < len(f.level_edges(2))
