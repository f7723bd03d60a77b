"""Tests for edge, vertex and end-vertex decks and attachment profiles."""

from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.append(str(Path(__file__).resolve().parents[1]))

from decks import (
    EDGE,
    AmbiguousProfile,
    AttachmentProfile,
    ClassOutOfRange,
    Deck,
    DeckError,
    EmptyGraph,
    InconsistentDeck,
    NoEndVertices,
    SizeMismatch,
    attach_profile,
    build_Xj,
    contract_end_vertices,
    contracted_edge_deck,
    contraction_group,
    edge_deck,
    end_vertex_deck,
    infer_attachment_profile,
    is_G_edge_hypomorphic,
    vertex_deck,
)
from graph_core import (
    BLUE,
    RED,
    attach_pendants,
    complete_graph,
    cycle_graph,
    empty_graph,
    from_edges,
    path_graph,
    star_graph,
)
from isomorphism import CodeCache, canonical_form, is_isomorphic
from perm_group import alternating, symmetric

TWO_K2 = from_edges(4, [(0, 1), (2, 3)])
P3_K1 = from_edges(4, [(0, 1), (1, 2)])


def test_edge_deck_of_triangle_has_one_class():
    deck = edge_deck(complete_graph(3), symmetric(3))
    assert deck.kind == EDGE
    assert len(deck.entries) == 1
    assert deck.total == 3
    assert deck.entries[0][0] == canonical_form(path_graph(3))


def test_edge_deck_requires_an_edge():
    with pytest.raises(EmptyGraph):
        edge_deck(empty_graph(3), symmetric(3))


def test_edge_deck_json_lists_hex_codes():
    document = edge_deck(TWO_K2, symmetric(4)).to_json()
    assert document["group"] == "S"
    assert document["entries"] == [
        {"code": canonical_form(from_edges(4, [(0, 1)])).to_hex(), "mult": 2}
    ]


def test_hypomorphic_but_not_isomorphic_pair():
    group = symmetric(4)
    assert is_G_edge_hypomorphic(TWO_K2, P3_K1, group)
    assert not is_isomorphic(TWO_K2, P3_K1)


def test_hypomorphism_reuses_cache_and_detects_difference():
    group = alternating(4)
    cache = CodeCache(group)
    assert not is_G_edge_hypomorphic(path_graph(4), star_graph(3), group, cache=cache)
    assert cache.misses > 0


def test_hypomorphism_requires_equal_sizes():
    with pytest.raises(SizeMismatch):
        is_G_edge_hypomorphic(TWO_K2, path_graph(4), symmetric(4))


def test_hypomorphism_of_edgeless_graphs_is_trivial():
    assert is_G_edge_hypomorphic(empty_graph(3), empty_graph(3), symmetric(3))


def test_vertex_and_end_vertex_decks():
    cards = vertex_deck(cycle_graph(5))
    assert cards.entries == ((canonical_form(path_graph(4)), 5),)
    ends = end_vertex_deck(star_graph(3))
    assert ends.entries == ((canonical_form(path_graph(3)), 3),)
    with pytest.raises(NoEndVertices):
        end_vertex_deck(cycle_graph(5))


def test_deck_rejects_unknown_kind():
    with pytest.raises(DeckError):
        Deck.from_codes("mystery", "S", [])


def test_profile_normalizes_trailing_zeros():
    profile = AttachmentProfile((2, 1, 0, 0))
    assert profile.r == (2, 1)
    assert profile.k == 2
    assert profile.end_vertex_count == 4
    assert profile.count(5) == 0
    assert profile.r0(6) == 3


def test_profile_partition_must_realize_counts():
    profile = AttachmentProfile.from_partition([1, 1, 2, 0, 0])
    assert profile.r == (2, 1)
    assert profile.members(1) == (0, 1)
    with pytest.raises(DeckError):
        AttachmentProfile((1,), (1, 1, 0))


def test_infer_profile_recovers_graph():
    x = attach_pendants(cycle_graph(5), {0: 1, 1: 1, 2: 1})
    inference = infer_attachment_profile(end_vertex_deck(x))
    assert inference.profile.r == (3,)
    assert is_isomorphic(inference.reconstruction, x)
    assert canonical_form(inference.z) == canonical_form(cycle_graph(5))
    assert inference.decks[1].total == 3
    assert inference.reduced[1].total == 3


def test_infer_profile_divides_class_multiplicities():
    x = attach_pendants(cycle_graph(5), {0: 2, 2: 1})
    inference = infer_attachment_profile(end_vertex_deck(x))
    assert inference.profile.r == (1, 1)
    assert inference.decks[2].total == 2
    assert inference.reduced[2].total == 1


def test_infer_profile_reports_ambiguity():
    x = attach_pendants(cycle_graph(4), {0: 2})
    with pytest.raises(AmbiguousProfile):
        infer_attachment_profile(end_vertex_deck(x))


def test_infer_profile_rejects_non_end_vertex_decks():
    with pytest.raises(DeckError):
        infer_attachment_profile(edge_deck(complete_graph(3), symmetric(3)))
    tree = end_vertex_deck(path_graph(5))
    with pytest.raises(InconsistentDeck):
        infer_attachment_profile(tree)


def test_attach_profile_and_build_Xj():
    z = cycle_graph(5)
    profile = AttachmentProfile.from_partition([1, 1, 2, 0, 0])
    assert attach_profile(z, profile).n == 9

    x1 = build_Xj(z, profile, 1)
    assert x1.n == 7
    assert x1.colors == (0, 0, 2, 0, 0, 0, 0)
    assert {(0, 5), (1, 6)} <= x1.edge_set

    x2 = build_Xj(z, profile, 2)
    assert x2.n == 6
    assert set(x2.colors) == {0}
    assert (2, 5) in x2.edge_set

    with pytest.raises(ClassOutOfRange):
        build_Xj(z, profile, 3)


def test_contract_end_vertices_builds_blue_vertex():
    x = attach_pendants(cycle_graph(4), {0: 1, 2: 1})
    contracted = contract_end_vertices(x)
    assert contracted.n == 5
    assert contracted.colors == (RED, RED, RED, RED, BLUE)
    assert contracted.neighbors(4) == [0, 2]
    with pytest.raises(DeckError):
        contract_end_vertices(attach_pendants(cycle_graph(4), {0: 2}))


def test_contraction_group_fixes_blue_vertex():
    x = attach_pendants(cycle_graph(4), {0: 1, 2: 1})
    group = contraction_group(x)
    assert group.order == 8
    assert all(int(row[4]) == 4 for row in group.elements)
    assert contracted_edge_deck(x).total == 6
