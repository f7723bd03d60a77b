"""Tests for the graph value type, elementary edits and the graph6 codec."""

from __future__ import annotations

import sys
from pathlib import Path

import pytest
from hypothesis import given
from hypothesis import strategies as st

sys.path.append(str(Path(__file__).resolve().parents[1]))

from graph_core import (
    ColorLengthMismatch,
    EdgeAbsent,
    EdgeCollision,
    Graph,
    InvalidGraph,
    MalformedGraph6,
    add_edges,
    attach_pendants,
    complement,
    complete_bipartite_graph,
    complete_graph,
    cycle_graph,
    degrees,
    delete_edge,
    delete_vertex,
    emit_graph6,
    empty_graph,
    end_vertices,
    from_edges,
    from_mask,
    induced_subgraph,
    is_connected,
    pair_index,
    pair_list,
    parse_graph6,
    path_graph,
    read_graph6_file,
    relabel,
    remove_edges,
    star_graph,
    write_graph6_file,
)


def test_edges_are_normalized_and_sorted():
    graph = from_edges(4, [(3, 2), (1, 0), (0, 1)])
    assert graph.edges == ((0, 1), (2, 3))
    assert graph.m == 2


def test_loops_and_out_of_range_endpoints_rejected():
    with pytest.raises(InvalidGraph):
        from_edges(3, [(1, 1)])
    with pytest.raises(InvalidGraph):
        from_edges(3, [(0, 3)])
    with pytest.raises(InvalidGraph):
        Graph(-1)


def test_colour_length_must_match_vertex_count():
    with pytest.raises(ColorLengthMismatch):
        from_edges(3, [(0, 1)], colors=[0, 1])


def test_pair_index_is_lexicographic():
    pairs = pair_list(4)
    assert pairs == [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
    assert [pair_index(u, v, 4) for u, v in pairs] == list(range(6))


def test_mask_and_adjacency_views():
    graph = path_graph(4)
    assert graph.mask == (1 << 0) | (1 << 3) | (1 << 5)
    assert graph.adjacency == (0b0010, 0b0101, 0b1010, 0b0100)
    assert from_mask(4, graph.mask) == graph


def test_delete_edge_requires_presence():
    graph = path_graph(3)
    assert delete_edge(graph, (2, 1)).edges == ((0, 1),)
    with pytest.raises(EdgeAbsent):
        delete_edge(graph, (0, 2))


def test_delete_vertex_relabels_and_keeps_colours():
    graph = from_edges(4, [(0, 1), (1, 2), (2, 3)], colors=[1, 2, 3, 4])
    smaller = delete_vertex(graph, 1)
    assert smaller.n == 3
    assert smaller.edges == ((1, 2),)
    assert smaller.colors == (1, 3, 4)


def test_add_and_remove_edge_sets():
    graph = path_graph(4)
    grown = add_edges(graph, [(0, 3)])
    assert grown == cycle_graph(4)
    with pytest.raises(EdgeCollision):
        add_edges(graph, [(1, 0)])
    assert remove_edges(grown, [(0, 3), (1, 2)]).edges == ((0, 1), (2, 3))
    with pytest.raises(EdgeAbsent):
        remove_edges(graph, [(0, 2)])


def test_degrees_and_end_vertices():
    star = star_graph(3)
    assert degrees(star) == (3, 1, 1, 1)
    assert end_vertices(star) == (1, 2, 3)
    assert end_vertices(cycle_graph(5)) == ()


def test_complement_of_complete_graph_is_empty():
    assert complement(complete_graph(5)) == empty_graph(5)
    assert complement(path_graph(4)).m == 3


def test_relabel_moves_colours_with_vertices():
    graph = from_edges(3, [(0, 1)], colors=[5, 6, 7])
    moved = relabel(graph, [2, 0, 1])
    assert moved.edges == ((0, 2),)
    assert moved.colors == (6, 7, 5)
    with pytest.raises(InvalidGraph):
        relabel(graph, [0, 0, 1])


def test_induced_subgraph_relabels_ascending():
    sub = induced_subgraph(cycle_graph(5), [4, 0, 1])
    assert sub.n == 3
    assert sub.edges == ((0, 1), (0, 2))


def test_attach_pendants_numbers_new_vertices_after_base():
    base = cycle_graph(4)
    grown = attach_pendants(base, {2: 1, 0: 2})
    assert grown.n == 7
    assert {(0, 4), (0, 5), (2, 6)} <= grown.edge_set
    assert end_vertices(grown) == (4, 5, 6)


def test_connectivity():
    assert is_connected(path_graph(5))
    assert not is_connected(from_edges(4, [(0, 1), (2, 3)]))
    assert is_connected(empty_graph(1))
    assert not is_connected(empty_graph(2))


def test_named_constructors():
    assert complete_graph(4).m == 6
    assert cycle_graph(6).m == 6
    assert complete_bipartite_graph(2, 3).m == 6
    with pytest.raises(InvalidGraph):
        cycle_graph(2)


def test_graph6_known_codes():
    assert parse_graph6("C~") == complete_graph(4)
    assert parse_graph6("Bw") == complete_graph(3)
    assert parse_graph6("Ch") == path_graph(4)
    assert emit_graph6(empty_graph(1)) == "@"
    assert emit_graph6(path_graph(4)) == "Ch"


def test_graph6_colour_annotation():
    graph = parse_graph6("A_ colors=0,1")
    assert graph.edges == ((0, 1),)
    assert graph.colors == (0, 1)
    assert emit_graph6(graph) == "A_ colors=0,1"


def test_graph6_rejects_garbage():
    with pytest.raises(MalformedGraph6):
        parse_graph6("")
    with pytest.raises(MalformedGraph6):
        parse_graph6("C~ weight=3")
    with pytest.raises(ColorLengthMismatch):
        parse_graph6("A_ colors=0,1,2")


def test_graph6_file_round_trip_skips_comments(tmp_path):
    target = tmp_path / "graphs.g6"
    graphs = [path_graph(4), cycle_graph(5), from_edges(2, [(0, 1)], colors=[1, 2])]
    write_graph6_file(target, graphs, comment="three graphs")
    assert target.read_text(encoding="ascii").startswith("# three graphs\n")
    assert read_graph6_file(target) == graphs


def _graph_cases():
    def with_mask(n):
        top = (1 << (n * (n - 1) // 2)) - 1
        return st.tuples(st.just(n), st.integers(min_value=0, max_value=top))

    return st.integers(min_value=1, max_value=9).flatmap(with_mask)


@given(_graph_cases())
def test_graph6_preserves_every_graph(case):
    n, mask = case
    graph = from_mask(n, mask)
    assert parse_graph6(emit_graph6(graph)) == graph
