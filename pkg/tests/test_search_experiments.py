"""Tests for enumeration, pair searches, replacing sets and the end-vertex experiment."""

from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.append(str(Path(__file__).resolve().parents[1]))

from decks import AttachmentProfile, is_G_edge_hypomorphic
from graph_core import (
    complement,
    complete_graph,
    cycle_graph,
    degrees,
    from_edges,
    pair_count,
    path_graph,
    star_graph,
)
from isomorphism import canonical_form, is_isomorphic
from perm_group import alternating, symmetric
from search_experiments import (
    EnumerationCapExceeded,
    InvalidBaseGraph,
    ProfileTooLarge,
    SearchError,
    attachment_count,
    burnside_graph_count,
    edge_deck_collisions,
    end_vertex_experiment,
    enumerate_graphs,
    enumerate_trees,
    find_hypomorphic_pairs,
    find_irreplaceable_edge_set,
    find_replacing_sets,
    is_tree,
    profile_conditions,
    survey_trees,
)

END_VERTEX_PROFILES = [
    (1,),
    (2,),
    (3,),
    (4,),
    (0, 1),
    (1, 1),
    (2, 1),
    (0, 2),
    (0, 0, 1),
    (1, 0, 1),
    (0, 0, 0, 1),
]


def triangle_and_vertex():
    return from_edges(4, [(0, 1), (0, 2), (1, 2)])


@pytest.mark.parametrize("n,count", [(1, 1), (2, 2), (3, 4), (4, 11), (5, 34), (6, 156)])
def test_class_counts(n, count):
    assert len(enumerate_graphs(n)) == count
    assert burnside_graph_count(n) == count


def test_burnside_matches_enumeration_per_edge_count():
    for m in range(11):
        assert burnside_graph_count(5, m) == len(enumerate_graphs(5, m))
    assert burnside_graph_count(7) == 1044
    assert burnside_graph_count(4, 7) == 0


def test_enumeration_edge_cases():
    assert len(enumerate_graphs(3, 2)) == 1
    assert enumerate_graphs(4, 9) == []
    assert len(enumerate_graphs(4, predicate=is_tree)) == 2
    with pytest.raises(EnumerationCapExceeded):
        enumerate_graphs(9)


def test_representatives_are_pairwise_non_isomorphic():
    graphs = enumerate_graphs(5, 5)
    for i, first in enumerate(graphs):
        assert not any(is_isomorphic(first, second) for second in graphs[i + 1 :])


@pytest.mark.parametrize("n,count", [(1, 1), (2, 1), (4, 2), (5, 3), (6, 6), (7, 11), (9, 47)])
def test_tree_counts(n, count):
    trees = enumerate_trees(n)
    assert len(trees) == count
    assert all(is_tree(t) for t in trees)


def test_tree_enumeration_bounds():
    with pytest.raises(SearchError):
        enumerate_trees(0)
    with pytest.raises(EnumerationCapExceeded):
        enumerate_trees(13)


def test_symmetric_pairs_on_four_vertices():
    pairs = find_hypomorphic_pairs(4, 2, symmetric(4))
    assert len(pairs) == 1
    witness = pairs[0]
    assert witness.lemma_verdict == "holds"
    assert not is_isomorphic(witness.x, witness.y)
    document = witness.to_json()
    assert document["checks"]["hypomorphic"] is True
    assert document["checks"]["isomorphic"] is False


def test_alternating_pairs_include_the_path():
    pairs = find_hypomorphic_pairs(4, 3, alternating(4))
    assert len(pairs) == 2
    (path_pair,) = [p for p in pairs if is_isomorphic(p.x, path_graph(4))]
    assert is_isomorphic(path_pair.y, path_graph(4))
    assert path_pair.lemma.aut_term == 2
    (other,) = [p for p in pairs if p is not path_pair]
    shapes = {canonical_form(other.x), canonical_form(other.y)}
    assert shapes == {canonical_form(star_graph(3)), canonical_form(triangle_and_vertex())}
    assert all(p.lemma_verdict == "holds" for p in pairs)


def test_pair_search_trivial_cases():
    assert find_hypomorphic_pairs(4, 5, symmetric(4)) == []
    assert find_hypomorphic_pairs(4, 0, symmetric(4)) == []
    with pytest.raises(SearchError):
        find_hypomorphic_pairs(5, 2, symmetric(4))


def test_replacing_sets_of_path_middle_edge():
    found = find_replacing_sets(path_graph(4), [(1, 2)], symmetric(4))
    assert ((0, 3),) in found
    assert find_replacing_sets(path_graph(4), [(1, 2)], symmetric(4), first_only=True) == found[:1]


def test_irreplaceable_sets():
    assert find_replacing_sets(complete_graph(3), [(0, 1)], symmetric(3)) == []
    assert find_irreplaceable_edge_set(complete_graph(3), symmetric(3)) == ((0, 1),)
    assert find_irreplaceable_edge_set(path_graph(4), symmetric(4), max_k=1) is None
    assert find_irreplaceable_edge_set(cycle_graph(4), symmetric(4)) == ((0, 1),)


def test_tree_survey_flags_small_exceptions():
    survey = survey_trees(4)
    assert len(survey.entries) == 5
    assert survey.entries[0].status == "edgeless"
    assert [e.status for e in survey.entries[1:3]] == ["irreplaceable", "irreplaceable"]
    exceptional = [e.tree for e in survey.exceptional]
    assert len(exceptional) == 2
    assert any(is_isomorphic(t, path_graph(4)) for t in exceptional)
    assert any(is_isomorphic(t, star_graph(3)) for t in exceptional)
    assert survey.to_json()["group"] == "S"


def test_tree_survey_cap():
    with pytest.raises(EnumerationCapExceeded):
        survey_trees(11)


def test_profile_conditions():
    assert profile_conditions(5, 10, (3,)) == {
        "r1_majority": True,
        "r1_power": False,
        "r1_exceeds_r0": True,
    }
    conditions = profile_conditions(5, 10, (1, 1))
    assert set(conditions) == {"r1_exceeds_r0", "r1_power", "r2_exceeds_r1", "r2_power"}
    assert not any(conditions.values())


def test_attachment_count():
    assert attachment_count(5, (1, 1)) == 20
    assert attachment_count(5, (3,)) == 10


def test_majority_profile_is_unique():
    verdict = end_vertex_experiment(cycle_graph(5), AttachmentProfile((3,)))
    assert verdict.unique
    assert verdict.conditions["r1_majority"]
    assert verdict.attachments == 10
    assert verdict.aut_z_order == 10
    assert not verdict.caveat
    assert verdict.to_json()["verdict"] == "unique"


def test_split_profile_fires_no_condition():
    verdict = end_vertex_experiment(cycle_graph(5), AttachmentProfile((1, 1)))
    assert not verdict.condition_fired
    assert verdict.attachments == 20


def test_pair_profile_is_ambiguous_with_caveat():
    verdict = end_vertex_experiment(cycle_graph(5), AttachmentProfile((2,)))
    assert not verdict.unique
    assert len(verdict.witnesses) == 2
    assert not is_isomorphic(*verdict.witnesses)
    assert verdict.caveat
    assert verdict.caveat_collision is True


def test_end_vertex_experiment_rejects_bad_input():
    with pytest.raises(InvalidBaseGraph):
        end_vertex_experiment(path_graph(4), AttachmentProfile((1,)))
    with pytest.raises(ProfileTooLarge):
        end_vertex_experiment(cycle_graph(5), AttachmentProfile(()))
    with pytest.raises(ProfileTooLarge):
        end_vertex_experiment(cycle_graph(5), AttachmentProfile((6,)))
    with pytest.raises(ProfileTooLarge):
        end_vertex_experiment(cycle_graph(5), AttachmentProfile((1,)), max_attachments=2)


def test_edge_deck_collisions():
    collisions = edge_deck_collisions(4, min_edges=1)
    assert len(collisions) == 2
    assert sorted(pair[0].m for pair in collisions) == [2, 3]
    assert all(first.m == second.m for first, second in collisions)
    (three_edges,) = [pair for pair in collisions if pair[0].m == 3]
    shapes = {canonical_form(g) for g in three_edges}
    assert shapes == {canonical_form(star_graph(3)), canonical_form(triangle_and_vertex())}
    assert edge_deck_collisions(4) == []


@pytest.mark.parametrize("n", [3, 4, 5])
@pytest.mark.parametrize("factory", [symmetric, alternating])
def test_every_found_pair_satisfies_the_counting_identity(n, factory):
    group = factory(n)
    for m in range(1, pair_count(n) + 1):
        pairs = find_hypomorphic_pairs(n, m, group)
        if 2 ** (m - 1) > group.order:
            assert pairs == []
        for pair in pairs:
            report = pair.lemma
            assert report.verdict == "holds"
            assert report.residuals == {}
            assert report.max_abs_residual == 0
            assert report.subsets_checked == 2**m
            assert report.alternating_sum == report.alternating_expected


def test_complements_of_a_hypomorphic_pair_need_not_be_hypomorphic():
    group = symmetric(4)
    (pair,) = find_hypomorphic_pairs(4, 2, group)
    assert not is_G_edge_hypomorphic(complement(pair.x), complement(pair.y), group)
    assert find_hypomorphic_pairs(4, 4, group) == []


@pytest.mark.parametrize("n", [5, 6])
def test_edge_decks_separate_classes_with_four_or_more_edges(n):
    assert edge_deck_collisions(n, min_edges=4) == []


def test_fired_end_vertex_conditions_give_unique_verdicts():
    fired = 0
    for n in range(3, 7):
        for z in enumerate_graphs(n, predicate=lambda g: min(degrees(g)) >= 2):
            for r in END_VERTEX_PROFILES:
                if sum(r) > n:
                    continue
                verdict = end_vertex_experiment(z, AttachmentProfile(r))
                if verdict.condition_fired:
                    fired += 1
                    assert verdict.unique, (z.edges, r)
    assert fired > 0
