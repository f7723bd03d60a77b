"""Overlap histograms and the generalized Nash-Williams counting identity.

For graphs X and Y on a shared vertex set and a permutation group G, the
overlap count ``|Y -> X|_F`` is the number of ``g`` in G with
``g(Y) ∩ X = F``. When X and Y are G-edge-hypomorphic but not G-isomorphic,
every edge subset F of X satisfies

    |X -> X|_F - |Y -> X|_F = (-1)^(m - |F|) |G ∩ aut X|.

This module computes the histograms exactly, checks the identity over every
subset, evaluates the sufficient conditions that follow from it, and decides
G-edge reconstructibility by exhausting all same-size candidates.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, List, Optional

import numpy as np

from decks import edge_deck, is_G_edge_hypomorphic
from graph_core import (
    CapacityError,
    EdgeSet,
    Graph,
    emit_graph6,
    from_mask,
    pair_count,
    pair_list,
)
from isomorphism import CodeCache, is_G_isomorphic
from logger import LogCategory, get_logger, progress
from perm_group import (
    DegreeMismatch,
    PermGroup,
    group_intersect_aut,
    map_element_chunks,
    pair_indices,
)
from structure import bipartition, is_2_edge_connected

DEFAULT_MAX_SUBSETS = 1 << 20
DEFAULT_MAX_CANDIDATES = 10_000_000

GENERIC = "generic"
BIPARTITE = "bipartite"
CENTER_KNOWN = "center_known"
CONTEXTS = (GENERIC, BIPARTITE, CENTER_KNOWN)


class LemmaError(ValueError):
    """Base error for the counting-identity machinery."""


class HypothesisNotMet(LemmaError):
    """Raised when a pair is G-isomorphic or not G-edge-hypomorphic."""


class SubsetCapExceeded(LemmaError, CapacityError):
    """Raised when ``2^m`` exceeds the subset cap."""


class CandidateCapExceeded(LemmaError, CapacityError):
    """Raised when the number of candidate graphs exceeds the cap."""


class NotBipartite(LemmaError):
    """Raised when the bipartite context meets an odd cycle."""


class NotTwoEdgeConnected(LemmaError):
    """Raised when the bipartite context meets a bridge or a disconnected graph."""


class ColorSequenceMismatch(LemmaError):
    """Raised when two graphs do not carry identical colour sequences."""


def _check_shared(first: Graph, second: Graph, group: PermGroup) -> None:
    if not first.n == second.n == group.n:
        raise DegreeMismatch(
            f"graphs on {first.n} and {second.n} vertices with a group on {group.n} points"
        )


# ----------------------------------------------------------------------
# Histograms
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class OverlapHistogram:
    """Counts of ``g(Y) ∩ X`` per edge subset of X (bit ``i`` is ``X.edges[i]``)."""

    base: Graph
    counts: Dict[int, int]

    def count(self, subset: int) -> int:
        return self.counts.get(subset, 0)

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    @property
    def full_mask(self) -> int:
        return (1 << self.base.m) - 1

    def subset_edges(self, subset: int) -> EdgeSet:
        return tuple(e for i, e in enumerate(self.base.edges) if subset >> i & 1)

    def to_json(self) -> List[Dict]:
        return [
            {"edges": [list(e) for e in self.subset_edges(key)], "count": self.counts[key]}
            for key in sorted(self.counts)
        ]


def _overlap_keys(y: Graph, x: Graph):
    n = x.n
    position = np.full(pair_count(n), -1, dtype=np.int64)
    x_ends = np.asarray(x.edges, dtype=np.int64).reshape(-1, 2)
    position[pair_indices(x_ends[:, 0], x_ends[:, 1], n)] = np.arange(x.m)
    y_ends = np.asarray(y.edges, dtype=np.int64).reshape(-1, 2)

    def run(chunk: np.ndarray) -> Counter:
        hits = position[pair_indices(chunk[:, y_ends[:, 0]], chunk[:, y_ends[:, 1]], n)]
        if x.m <= 62:
            weights = np.where(hits >= 0, np.left_shift(1, np.maximum(hits, 0)), 0)
            keys, counts = np.unique(weights.sum(axis=1), return_counts=True)
            return Counter({int(k): int(c) for k, c in zip(keys, counts)})
        present = np.zeros((chunk.shape[0], x.m), dtype=bool)
        rows, cols = np.nonzero(hits >= 0)
        present[rows, hits[rows, cols]] = True
        packed = np.packbits(present, axis=1, bitorder="little")
        result: Counter = Counter()
        for row in packed:
            result[int.from_bytes(row.tobytes(), "little")] += 1
        return result

    return run


def overlap_histogram(y: Graph, x: Graph, group: PermGroup, workers: int = 1) -> OverlapHistogram:
    """``|{g in G : g(Y) ∩ X = F}|`` for every F that occurs."""

    _check_shared(y, x, group)
    if x.m == 0 or y.m == 0:
        return OverlapHistogram(x, {0: group.order})
    merged: Counter = Counter()
    for part in map_element_chunks(_overlap_keys(y, x), group, workers):
        merged.update(part)
    return OverlapHistogram(x, dict(sorted(merged.items())))


# ----------------------------------------------------------------------
# Identity verification
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class LemmaReport:
    m: int
    aut_term: int
    residuals: Dict[int, int]
    verdict: str
    worst_subset: int
    worst_edges: EdgeSet
    subsets_checked: int
    max_abs_residual: int
    alternating_sum: int
    alternating_expected: int
    histogram_xx: OverlapHistogram = field(repr=False)
    histogram_yx: OverlapHistogram = field(repr=False)

    @property
    def holds(self) -> bool:
        return self.verdict == "holds"

    def to_json(self) -> Dict:
        base = self.histogram_xx.base
        return {
            "m": self.m,
            "aut_term": self.aut_term,
            "verdict": self.verdict,
            "subsets_checked": self.subsets_checked,
            "max_abs_residual": self.max_abs_residual,
            "worst_F": [list(e) for e in self.worst_edges],
            "residuals": [
                {
                    "F": [list(e) for e in self.histogram_xx.subset_edges(key)],
                    "residual": value,
                }
                for key, value in sorted(self.residuals.items())
            ],
            "alternating_sum": {
                "value": self.alternating_sum,
                "expected": self.alternating_expected,
            },
            "histograms": {
                "x_to_x": self.histogram_xx.to_json(),
                "y_to_x": self.histogram_yx.to_json(),
            },
            "edges": [list(e) for e in base.edges],
        }


def _popcounts(size: int, bits: int) -> np.ndarray:
    index = np.arange(size, dtype=np.int64)
    counts = np.zeros(size, dtype=np.int64)
    for b in range(bits):
        counts += (index >> b) & 1
    return counts


def alternating_sum(hxx: OverlapHistogram, hyx: OverlapHistogram) -> int:
    """``Σ_F (-1)^|F| (|X->X|_F - |Y->X|_F)`` over the subsets that occur."""

    total = 0
    for key, count in hxx.counts.items():
        total += (-1) ** bin(key).count("1") * count
    for key, count in hyx.counts.items():
        total -= (-1) ** bin(key).count("1") * count
    return total


def verify_lemma(
    x: Graph,
    y: Graph,
    group: PermGroup,
    max_subsets: int = DEFAULT_MAX_SUBSETS,
    workers: int = 1,
) -> LemmaReport:
    """Check the identity on all ``2^m`` edge subsets of X."""

    _check_shared(x, y, group)
    if x.colors != y.colors:
        raise ColorSequenceMismatch("X and Y must carry identical colour sequences")
    if x.m != y.m:
        raise HypothesisNotMet(f"edge counts differ ({x.m} vs {y.m}); not G-edge-hypomorphic")
    cache = CodeCache(group, workers)
    if is_G_isomorphic(x, y, group, workers):
        raise HypothesisNotMet("the pair is G-isomorphic")
    if x.m and not is_G_edge_hypomorphic(x, y, group, cache):
        raise HypothesisNotMet("the pair is not G-edge-hypomorphic")
    m = x.m
    size = 1 << m
    if size > max_subsets:
        raise SubsetCapExceeded(f"2^{m} subsets exceed the cap {max_subsets}")

    hxx = overlap_histogram(x, x, group, workers)
    hyx = overlap_histogram(y, x, group, workers)
    aut_term = group_intersect_aut(group, x, workers).order

    difference = np.zeros(size, dtype=np.int64)
    for key, count in hxx.counts.items():
        difference[key] += count
    for key, count in hyx.counts.items():
        difference[key] -= count
    parity = (m - _popcounts(size, m)) % 2
    residual = difference - np.where(parity == 0, aut_term, -aut_term)

    nonzero = np.flatnonzero(residual)
    worst = int(np.argmax(np.abs(residual)))
    report = LemmaReport(
        m=m,
        aut_term=aut_term,
        residuals={int(k): int(residual[k]) for k in nonzero},
        verdict="fails" if len(nonzero) else "holds",
        worst_subset=worst,
        worst_edges=hxx.subset_edges(worst),
        subsets_checked=size,
        max_abs_residual=int(np.abs(residual).max()),
        alternating_sum=alternating_sum(hxx, hyx),
        alternating_expected=(-1) ** m * size * aut_term,
        histogram_xx=hxx,
        histogram_yx=hyx,
    )
    get_logger().debug(
        "Verified counting identity",
        category=LogCategory.LEMMA,
        m=m,
        aut_term=aut_term,
        verdict=report.verdict,
        group=group.tag,
    )
    return report


# ----------------------------------------------------------------------
# Sufficient conditions
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class ConditionFlags:
    """Each true flag means "G-edge reconstructible by this criterion"."""

    context: str
    power_bound: bool
    density_bound: Optional[bool]
    details: Dict[str, object]

    @property
    def any(self) -> bool:
        return bool(self.power_bound or self.density_bound)

    def to_json(self) -> Dict:
        return {
            "context": self.context,
            "power_bound": self.power_bound,
            "density_bound": self.density_bound,
            "details": dict(self.details),
        }


def sufficient_conditions(graph: Graph, group: PermGroup, context: str = GENERIC) -> ConditionFlags:
    m, order = graph.m, group.order
    if context == GENERIC:
        power = m >= 1 and 2 ** (m - 1) > order
        return ConditionFlags(context, power, None, {"m": m, "group_order": order})
    if context == BIPARTITE:
        parts = bipartition(graph)
        if parts is None:
            raise NotBipartite("the graph contains an odd cycle")
        if not is_2_edge_connected(graph):
            raise NotTwoEdgeConnected("the bipartition is only recognizable when 2-edge-connected")
        s, t = parts
        return ConditionFlags(
            context,
            m >= 1 and 2 ** (m - 1) > order,
            2 * m > s * t,
            {"m": m, "group_order": order, "s": s, "t": t},
        )
    if context == CENTER_KNOWN:
        return ConditionFlags(
            context,
            2**m > order,
            2 * m > graph.n,
            {"m": m, "n": graph.n, "group_order": order},
        )
    raise LemmaError(f"unknown context {context!r}; expected one of {CONTEXTS}")


# ----------------------------------------------------------------------
# Brute-force decision
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class ReconstructionVerdict:
    reconstructible: bool
    witness: Optional[Graph]
    candidates_checked: int
    candidate_total: int

    def to_json(self) -> Dict:
        return {
            "verdict": "reconstructible" if self.reconstructible else "witness",
            "witness": emit_graph6(self.witness) if self.witness is not None else None,
            "candidates_checked": self.candidates_checked,
            "candidate_total": self.candidate_total,
        }


def candidate_count(n: int, m: int) -> int:
    return math.comb(pair_count(n), m)


def is_G_edge_reconstructible(
    graph: Graph,
    group: PermGroup,
    candidate_cap: int = DEFAULT_MAX_CANDIDATES,
    workers: int = 1,
    cache: Optional[CodeCache] = None,
) -> ReconstructionVerdict:
    """Search every same-size labeled graph for a hypomorphic, non-isomorphic witness."""

    if graph.n != group.n:
        raise DegreeMismatch(f"group acts on {group.n} points but graph has {graph.n} vertices")
    total = candidate_count(graph.n, graph.m)
    if total > candidate_cap:
        raise CandidateCapExceeded(f"{total} candidates exceed the cap {candidate_cap}")
    if graph.m == 0:
        return ReconstructionVerdict(True, None, 1, 1)
    if cache is None or cache.group is not group:
        cache = CodeCache(group, workers)
    target = edge_deck(graph, group, cache).counter()
    own_code = cache.code(graph)
    pairs = len(pair_list(graph.n))

    checked = 0
    for chosen in progress(combinations(range(pairs), graph.m), total=total, desc="candidates"):
        checked += 1
        mask = 0
        for p in chosen:
            mask |= 1 << p
        if mask == graph.mask:
            continue
        remaining = Counter(target)
        matched = True
        for p in chosen:
            code = cache.code(from_mask(graph.n, mask & ~(1 << p), graph.colors))
            if remaining[code] == 0:
                matched = False
                break
            remaining[code] -= 1
        if not matched:
            continue
        candidate = from_mask(graph.n, mask, graph.colors)
        if cache.code(candidate) != own_code:
            get_logger().debug(
                "Found reconstruction witness",
                category=LogCategory.LEMMA,
                group=group.tag,
                checked=checked,
            )
            return ReconstructionVerdict(False, candidate, checked, total)
    cache.report()
    return ReconstructionVerdict(True, None, checked, total)


__all__ = [
    "BIPARTITE",
    "CENTER_KNOWN",
    "CONTEXTS",
    "CandidateCapExceeded",
    "ColorSequenceMismatch",
    "ConditionFlags",
    "GENERIC",
    "HypothesisNotMet",
    "LemmaError",
    "LemmaReport",
    "NotBipartite",
    "NotTwoEdgeConnected",
    "OverlapHistogram",
    "ReconstructionVerdict",
    "SubsetCapExceeded",
    "alternating_sum",
    "candidate_count",
    "is_G_edge_reconstructible",
    "overlap_histogram",
    "sufficient_conditions",
    "verify_lemma",
]
