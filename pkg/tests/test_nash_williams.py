"""Tests for overlap histograms, the counting identity and reconstructibility."""

from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.append(str(Path(__file__).resolve().parents[1]))

from graph_core import (
    CapacityError,
    complete_bipartite_graph,
    complete_graph,
    cycle_graph,
    empty_graph,
    from_edges,
    path_graph,
)
from isomorphism import CodeCache, is_G_isomorphic, is_isomorphic
from nash_williams import (
    BIPARTITE,
    CENTER_KNOWN,
    CandidateCapExceeded,
    ColorSequenceMismatch,
    HypothesisNotMet,
    LemmaError,
    NotBipartite,
    NotTwoEdgeConnected,
    SubsetCapExceeded,
    alternating_sum,
    candidate_count,
    is_G_edge_reconstructible,
    overlap_histogram,
    sufficient_conditions,
    verify_lemma,
)
from perm_group import (
    Permutation,
    alternating,
    apply,
    aut_complete_bipartite,
    group_intersect_aut,
    symmetric,
    trivial,
)
from search_experiments import enumerate_graphs

TWO_K2 = from_edges(4, [(0, 1), (2, 3)])
P3_K1 = from_edges(4, [(0, 1), (1, 2)])


def odd_path_image():
    return apply(Permutation.from_cycles("(0 1)", 4), path_graph(4))


def test_self_overlap_of_matching():
    histogram = overlap_histogram(TWO_K2, TWO_K2, symmetric(4))
    assert histogram.counts == {0: 16, 3: 8}
    assert histogram.total == 24
    assert histogram.full_mask == 3


def test_cross_overlap_of_hypomorphic_pair():
    histogram = overlap_histogram(P3_K1, TWO_K2, symmetric(4))
    assert histogram.counts == {0: 8, 1: 8, 2: 8}
    assert histogram.subset_edges(2) == ((2, 3),)
    assert histogram.to_json()[1] == {"edges": [[0, 1]], "count": 8}


def test_overlap_with_edgeless_side_is_one_bucket():
    histogram = overlap_histogram(empty_graph(4), TWO_K2, alternating(4))
    assert histogram.counts == {0: 12}


def test_threaded_histogram_matches_serial():
    serial = overlap_histogram(P3_K1, TWO_K2, symmetric(4), workers=1)
    threaded = overlap_histogram(P3_K1, TWO_K2, symmetric(4), workers=4)
    assert serial.counts == threaded.counts


def test_identity_holds_for_matching_pair():
    report = verify_lemma(TWO_K2, P3_K1, symmetric(4))
    assert report.holds
    assert report.aut_term == 8
    assert report.residuals == {}
    assert report.subsets_checked == 4
    assert report.max_abs_residual == 0
    assert report.alternating_sum == report.alternating_expected == 32
    assert alternating_sum(report.histogram_xx, report.histogram_yx) == 32


def test_identity_holds_for_path_under_alternating_group():
    report = verify_lemma(path_graph(4), odd_path_image(), alternating(4))
    assert report.holds
    assert report.aut_term == 2
    document = report.to_json()
    assert document["verdict"] == "holds"
    assert document["alternating_sum"]["value"] == document["alternating_sum"]["expected"]


def test_identity_requires_its_hypotheses():
    with pytest.raises(HypothesisNotMet):
        verify_lemma(TWO_K2, TWO_K2, symmetric(4))
    with pytest.raises(HypothesisNotMet):
        verify_lemma(TWO_K2, path_graph(4), symmetric(4))
    with pytest.raises(HypothesisNotMet):
        verify_lemma(path_graph(4), from_edges(4, [(0, 1), (0, 2), (0, 3)]), symmetric(4))
    with pytest.raises(ColorSequenceMismatch):
        verify_lemma(TWO_K2.with_colors([1, 0, 0, 0]), P3_K1, symmetric(4))


def test_subset_cap_is_a_capacity_error():
    with pytest.raises(SubsetCapExceeded) as excinfo:
        verify_lemma(TWO_K2, P3_K1, symmetric(4), max_subsets=2)
    assert isinstance(excinfo.value, CapacityError)


def test_generic_power_bound():
    flags = sufficient_conditions(cycle_graph(4), trivial(4))
    assert flags.power_bound
    assert flags.density_bound is None
    assert flags.any
    assert not sufficient_conditions(TWO_K2, symmetric(4)).any


def test_bipartite_density_bound():
    k33 = sufficient_conditions(
        complete_bipartite_graph(3, 3), aut_complete_bipartite(3, 3), BIPARTITE
    )
    assert k33.density_bound
    c6 = sufficient_conditions(cycle_graph(6), aut_complete_bipartite(3, 3), BIPARTITE)
    assert c6.density_bound
    assert not c6.power_bound
    assert c6.details["s"] == c6.details["t"] == 3


def test_bipartite_context_preconditions():
    with pytest.raises(NotBipartite):
        sufficient_conditions(cycle_graph(5), symmetric(5), BIPARTITE)
    with pytest.raises(NotTwoEdgeConnected):
        sufficient_conditions(path_graph(4), symmetric(4), BIPARTITE)
    with pytest.raises(LemmaError):
        sufficient_conditions(path_graph(4), symmetric(4), "elsewhere")


def test_center_known_bounds():
    flags = sufficient_conditions(complete_graph(4), symmetric(4), CENTER_KNOWN)
    assert flags.power_bound
    assert flags.density_bound
    assert flags.to_json()["context"] == CENTER_KNOWN


def test_path_is_not_alternating_reconstructible():
    verdict = is_G_edge_reconstructible(path_graph(4), alternating(4))
    assert not verdict.reconstructible
    assert is_isomorphic(verdict.witness, path_graph(4))
    assert not is_G_isomorphic(verdict.witness, path_graph(4), alternating(4))
    assert verdict.to_json()["verdict"] == "witness"


def test_matching_has_symmetric_witness():
    verdict = is_G_edge_reconstructible(TWO_K2, symmetric(4))
    assert not verdict.reconstructible
    assert is_isomorphic(verdict.witness, P3_K1)


def test_cycle_is_reconstructible():
    verdict = is_G_edge_reconstructible(cycle_graph(4), symmetric(4))
    assert verdict.reconstructible
    assert verdict.witness is None
    assert verdict.candidates_checked == verdict.candidate_total == candidate_count(4, 4) == 15


def test_edgeless_graph_is_reconstructible():
    verdict = is_G_edge_reconstructible(empty_graph(3), symmetric(3))
    assert (verdict.reconstructible, verdict.candidates_checked) == (True, 1)


def test_candidate_cap():
    with pytest.raises(CandidateCapExceeded):
        is_G_edge_reconstructible(path_graph(4), symmetric(4), candidate_cap=1)


def test_six_vertex_path_is_alternating_reconstructible():
    reversal = Permutation.from_cycles("(0 5)(1 4)(2 3)", 6)
    assert not reversal.is_even()
    group = alternating(6)
    assert group_intersect_aut(group, path_graph(6)).order == 1
    verdict = is_G_edge_reconstructible(path_graph(6), group)
    assert verdict.reconstructible
    assert verdict.witness is None
    assert verdict.candidates_checked == verdict.candidate_total == 3003


@pytest.mark.parametrize("n", [4, 5, 6])
@pytest.mark.parametrize("factory", [symmetric, alternating])
def test_power_bound_agrees_with_exhaustive_search(n, factory):
    group = factory(n)
    cache = CodeCache(group)
    covered = 0
    for graph in enumerate_graphs(n):
        flags = sufficient_conditions(graph, group)
        assert flags.power_bound == (graph.m >= 1 and 2 ** (graph.m - 1) > group.order)
        if flags.power_bound:
            covered += 1
            assert is_G_edge_reconstructible(graph, group, cache=cache).reconstructible
    assert covered > 0
