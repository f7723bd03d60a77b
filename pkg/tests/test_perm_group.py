"""Tests for permutations, named groups and their action on graphs."""

from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.append(str(Path(__file__).resolve().parents[1]))

from graph_core import complete_bipartite_graph, cycle_graph, from_edges, path_graph
from perm_group import (
    BadCycleNotation,
    DegreeMismatch,
    NotInvariant,
    OrderCapExceeded,
    Permutation,
    alternating,
    apply,
    aut_complete_bipartite,
    closure,
    group_intersect_aut,
    map_element_chunks,
    orbit,
    restrict_to,
    symmetric,
    trivial,
)


def test_cycle_notation_round_trip():
    perm = Permutation.from_cycles("(0 2)(1 3 4)", 5)
    assert perm.images == (2, 3, 0, 4, 1)
    assert perm.cycle_notation() == "(0 2)(1 3 4)"
    assert not perm.is_even()
    assert Permutation.from_cycles("", 3).is_identity


def test_cycle_notation_errors():
    with pytest.raises(BadCycleNotation):
        Permutation.from_cycles("(0 1)(1 2)", 3)
    with pytest.raises(BadCycleNotation):
        Permutation.from_cycles("(0 5)", 3)
    with pytest.raises(BadCycleNotation):
        Permutation.from_cycles("0 1", 3)


def test_compose_applies_right_factor_first():
    a = Permutation.from_cycles("(0 1)", 3)
    b = Permutation.from_cycles("(1 2)", 3)
    assert a.compose(b)(1) == 2
    assert a.compose(a.inverse()).is_identity


def test_named_group_orders():
    assert symmetric(4).order == 24
    assert alternating(4).order == 12
    assert trivial(5).order == 1
    assert aut_complete_bipartite(3, 3).order == 72
    assert aut_complete_bipartite(2, 3).order == 12
    assert alternating(4).is_subgroup_of(symmetric(4))


def test_order_cap_is_enforced():
    with pytest.raises(OrderCapExceeded):
        symmetric(6, max_order=100)


def test_closure_of_generators():
    cyclic = closure(4, [Permutation.from_cycles("(0 1 2)", 4)])
    assert cyclic.order == 3
    swap = Permutation.from_cycles("(0 1)", 4)
    rotation = Permutation.from_cycles("(0 1 2 3)", 4)
    full = closure(4, [swap, rotation])
    assert full == symmetric(4)
    with pytest.raises(OrderCapExceeded):
        closure(5, [(1, 0, 2, 3, 4), (1, 2, 3, 4, 0)], max_order=50)


def test_apply_maps_edges_and_colours():
    graph = from_edges(3, [(0, 1)], colors=[1, 0, 0])
    image = apply(Permutation.from_cycles("(0 2)", 3), graph)
    assert image.edges == ((1, 2),)
    assert image.colors == (0, 0, 1)
    with pytest.raises(DegreeMismatch):
        apply((0, 1), graph)


def test_group_intersect_aut_of_cycle():
    assert group_intersect_aut(symmetric(5), cycle_graph(5)).order == 10
    c4 = cycle_graph(4)
    assert group_intersect_aut(symmetric(4), c4).order == 8
    assert group_intersect_aut(alternating(4), c4).order == 4


def test_group_intersect_aut_respects_colours():
    coloured = from_edges(4, [(0, 1), (1, 2), (2, 3)], colors=[1, 0, 0, 0])
    assert group_intersect_aut(symmetric(4), coloured).order == 1


def test_restrict_to_invariant_set():
    group = aut_complete_bipartite(2, 3)
    left = restrict_to(group, [0, 1])
    assert left.n == 2
    assert left.order == 2
    with pytest.raises(NotInvariant):
        restrict_to(symmetric(4), [0, 1])


def test_orbit_size_matches_stabilizer():
    p4 = path_graph(4)
    assert len(orbit(p4, symmetric(4))) == 24 // 2
    assert len(orbit(complete_bipartite_graph(2, 2), symmetric(4))) == 3


def test_map_element_chunks_matches_serial_run():
    group = symmetric(5)

    def row_sums(chunk):
        return int(np.asarray(chunk, dtype=np.int64)[:, 0].sum())

    serial = sum(map_element_chunks(row_sums, group, workers=1, chunk_size=7))
    threaded = sum(map_element_chunks(row_sums, group, workers=4, chunk_size=7))
    assert serial == threaded == 24 * (0 + 1 + 2 + 3 + 4)
