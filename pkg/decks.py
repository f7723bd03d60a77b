"""Vertex, edge and end-vertex decks and the end-vertex profile inference.

A deck is stored as a sorted multiset of canonical codes. Edge decks are
canonicalized under an arbitrary group acting on the shared vertex set; vertex
and end-vertex decks live on ``n - 1`` points and always use the full
symmetric group there.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np

from graph_core import (
    BLUE,
    DEFAULT_COLOR,
    RED,
    Graph,
    attach_pendants,
    degrees,
    delete_edge,
    delete_vertex,
    emit_graph6,
    end_vertices,
    from_edges,
    induced_subgraph,
)
from isomorphism import CanonicalCode, CodeCache, automorphism_group, canonical_form
from logger import LogCategory, get_logger
from perm_group import DEFAULT_MAX_ORDER, PermGroup

EDGE = "edge"
VERTEX = "vertex"
END_VERTEX = "end-vertex"
DECK_KINDS = (VERTEX, EDGE, END_VERTEX)


class DeckError(ValueError):
    """Base error for deck construction and inference."""


class EmptyGraph(DeckError):
    """Raised when a deck would have no members."""


class NoEndVertices(DeckError):
    """Raised when an end-vertex operation meets a graph without degree-1 vertices."""


class SizeMismatch(DeckError):
    """Raised when compared graphs differ in vertex or edge count."""


class InconsistentDeck(DeckError):
    """Raised when deck members cannot come from one attachment of pendants."""


class AmbiguousProfile(DeckError):
    """Raised when two different attachment profiles explain the same deck."""


class ClassOutOfRange(DeckError):
    """Raised when a class index lies outside ``1..k``."""


@dataclass(frozen=True)
class Deck:
    """Sorted multiset of canonical codes, tagged with its kind and group."""

    kind: str
    group_tag: str
    entries: Tuple[Tuple[CanonicalCode, int], ...]

    @classmethod
    def from_codes(cls, kind: str, group_tag: str, codes: Iterable[CanonicalCode]) -> "Deck":
        if kind not in DECK_KINDS:
            raise DeckError(f"unknown deck kind {kind!r}")
        counts = Counter(codes)
        return cls(kind, group_tag, tuple(sorted(counts.items())))

    @property
    def total(self) -> int:
        return sum(mult for _, mult in self.entries)

    def counter(self) -> Counter:
        return Counter(dict(self.entries))

    def same_members(self, other: "Deck") -> bool:
        """Multiset equality of members (the hypomorphism test)."""

        return self.kind == other.kind and self.entries == other.entries

    def to_json(self) -> Dict:
        return {
            "kind": self.kind,
            "group": self.group_tag,
            "entries": [{"code": code.to_hex(), "mult": mult} for code, mult in self.entries],
        }


# ----------------------------------------------------------------------
# Deck construction
# ----------------------------------------------------------------------
def edge_deck(
    graph: Graph, group: PermGroup, cache: Optional[CodeCache] = None, workers: int = 1
) -> Deck:
    """``{ code(X - e, G) : e in E(X) }`` as a multiset."""

    if graph.m == 0:
        raise EmptyGraph("edge decks need at least one edge")
    if cache is None or cache.group is not group:
        cache = CodeCache(group, workers)
    codes = [cache.code(delete_edge(graph, e)) for e in graph.edges]
    return Deck.from_codes(EDGE, group.tag, codes)


def vertex_deck(graph: Graph) -> Deck:
    if graph.n < 2:
        raise EmptyGraph("vertex decks need at least two vertices")
    codes = [canonical_form(delete_vertex(graph, u)) for u in range(graph.n)]
    return Deck.from_codes(VERTEX, "S", codes)


def end_vertex_deck(graph: Graph) -> Deck:
    ends = end_vertices(graph)
    if not ends:
        raise NoEndVertices("the graph has no vertex of degree one")
    codes = [canonical_form(delete_vertex(graph, u)) for u in ends]
    return Deck.from_codes(END_VERTEX, "S", codes)


def is_G_edge_hypomorphic(
    first: Graph,
    second: Graph,
    group: PermGroup,
    cache: Optional[CodeCache] = None,
    workers: int = 1,
) -> bool:
    """Edge decks agree under ``group``."""

    if first.n != second.n or first.m != second.m:
        raise SizeMismatch(
            f"graphs differ in size: (n={first.n}, m={first.m}) vs (n={second.n}, m={second.m})"
        )
    if first.m == 0:
        return True
    if cache is None or cache.group is not group:
        cache = CodeCache(group, workers)
    reference = edge_deck(first, group, cache).counter()
    # Early exit on the first member the reference deck cannot absorb.
    for e in second.edges:
        code = cache.code(delete_edge(second, e))
        if reference[code] == 0:
            return False
        reference[code] -= 1
    return True


# ----------------------------------------------------------------------
# Attachment profiles (pendants on a pruned graph of minimum degree >= 2)
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class AttachmentProfile:
    """Counts ``r_i`` of pruned-graph vertices carrying exactly ``i`` pendants.

    ``partition[v]`` is the class of pruned-graph vertex ``v`` (0 for R_0).
    """

    r: Tuple[int, ...]
    partition: Tuple[int, ...] = field(default=())

    def __post_init__(self) -> None:
        r = tuple(int(x) for x in self.r)
        while r and r[-1] == 0:
            r = r[:-1]
        if any(x < 0 for x in r):
            raise DeckError("profile counts must be nonnegative")
        object.__setattr__(self, "r", r)
        if self.partition:
            partition = tuple(int(x) for x in self.partition)
            observed = Counter(c for c in partition if c > 0)
            expected = {i: count for i, count in enumerate(r, start=1) if count}
            if dict(observed) != expected:
                raise DeckError(f"partition {partition} does not realize counts {r}")
            object.__setattr__(self, "partition", partition)

    @classmethod
    def from_partition(cls, partition: Iterable[int]) -> "AttachmentProfile":
        partition = tuple(partition)
        top = max(partition, default=0)
        counts = Counter(partition)
        return cls(tuple(counts.get(i, 0) for i in range(1, top + 1)), partition)

    @property
    def k(self) -> int:
        return len(self.r)

    def count(self, i: int) -> int:
        """``r_i`` for ``i >= 1``; zero beyond ``k``."""

        return self.r[i - 1] if 1 <= i <= self.k else 0

    @property
    def end_vertex_count(self) -> int:
        return sum(i * ri for i, ri in enumerate(self.r, start=1))

    def r0(self, z_order: int) -> int:
        return z_order - sum(self.r)

    def members(self, i: int) -> Tuple[int, ...]:
        return tuple(v for v, c in enumerate(self.partition) if c == i)

    def to_json(self) -> Dict:
        return {"r": list(self.r), "partition": list(self.partition)}


@dataclass(frozen=True)
class ProfileInference:
    """Result of reading an attachment profile off an end-vertex deck."""

    z: Graph
    profile: AttachmentProfile
    decks: Dict[int, Deck]
    reduced: Dict[int, Deck]
    reconstruction: Graph

    def to_json(self) -> Dict:
        return {
            "z": emit_graph6(self.z),
            "profile": self.profile.to_json(),
            "decks": {str(i): deck.to_json() for i, deck in sorted(self.decks.items())},
            "reduced": {str(i): deck.to_json() for i, deck in sorted(self.reduced.items())},
            "reconstruction": emit_graph6(self.reconstruction),
        }


def split_pendants(graph: Graph) -> Tuple[List[int], Dict[int, int]]:
    """Core vertices (degree >= 2) and the pendant count hanging on each.

    Raises :class:`InconsistentDeck` unless every other vertex is an end
    vertex attached to the core and the core has minimum degree two.
    """

    degs = degrees(graph)
    core = [v for v in range(graph.n) if degs[v] >= 2]
    core_set = set(core)
    counts = {v: 0 for v in core}
    for v in range(graph.n):
        if v in core_set:
            continue
        if degs[v] != 1:
            raise InconsistentDeck(f"vertex {v} is neither a core vertex nor an end vertex")
        (anchor,) = graph.neighbors(v)
        if anchor not in core_set:
            raise InconsistentDeck(f"end vertex {v} hangs on another end vertex")
        counts[anchor] += 1
    inner = induced_subgraph(graph, core)
    if inner.n < 3 or min(degrees(inner)) < 2:
        raise InconsistentDeck("the pruned graph does not have minimum degree two")
    return core, counts


def _statistic(counts: Dict[int, int]) -> Tuple[int, ...]:
    histogram = Counter(counts.values())
    top = max(histogram, default=0)
    return tuple(histogram.get(c, 0) for c in range(top + 1))


def _shift(stat: Tuple[int, ...], up: int) -> Optional[Tuple[int, ...]]:
    """Move one vertex from pendant count ``up - 1`` to ``up``; None if impossible."""

    values = list(stat) + [0] * max(0, up + 1 - len(stat))
    if values[up - 1] == 0:
        return None
    values[up - 1] -= 1
    values[up] += 1
    while len(values) > 1 and values[-1] == 0:
        values.pop()
    return tuple(values)


def _unshift(stat_x: Tuple[int, ...], i: int) -> Tuple[int, ...]:
    """Statistic after deleting one pendant at a vertex carrying ``i`` pendants."""

    values = list(stat_x)
    values[i] -= 1
    values[i - 1] += 1
    while len(values) > 1 and values[-1] == 0:
        values.pop()
    return tuple(values)


def _regenerated(stat_x: Tuple[int, ...]) -> Counter:
    """Member statistics, with multiplicity, of a graph whose statistic is ``stat_x``."""

    result: Counter = Counter()
    for i in range(1, len(stat_x)):
        if stat_x[i]:
            result[_unshift(stat_x, i)] += i * stat_x[i]
    return result


def infer_attachment_profile(deck: Deck) -> ProfileInference:
    """Recover the pruned graph, the profile and the class decks from an end-vertex deck."""

    if deck.kind != END_VERTEX:
        raise DeckError(f"expected an end-vertex deck, got a {deck.kind} deck")
    if not deck.entries:
        raise InconsistentDeck("the deck is empty")

    members = [(code, mult, code.to_graph(colored=False)) for code, mult in deck.entries]
    z_codes = set()
    member_stats: Counter = Counter()
    stat_of: Dict[CanonicalCode, Tuple[int, ...]] = {}
    for code, mult, graph in members:
        core, counts = split_pendants(graph)
        z_codes.add(canonical_form(induced_subgraph(graph, core)))
        stat_of[code] = _statistic(counts)
        member_stats[stat_of[code]] += mult
    if len(z_codes) != 1:
        raise InconsistentDeck("deck members disagree on the pruned graph")

    # Candidate statistics of X: undo one pendant deletion in the first member.
    code0, _, graph0 = members[0]
    core0, counts0 = split_pendants(graph0)
    candidates = []
    for up in range(1, len(stat_of[code0]) + 1):
        stat_x = _shift(stat_of[code0], up)
        if stat_x is not None and _regenerated(stat_x) == member_stats:
            candidates.append((up, stat_x))

    realized = []
    for up, stat_x in candidates:
        for w in core0:
            if counts0[w] != up - 1:
                continue
            rebuilt = attach_pendants(graph0, {w: 1})
            if end_vertex_deck(rebuilt).entries == deck.entries:
                realized.append((stat_x, rebuilt))
                break
    if not realized:
        raise InconsistentDeck("no attachment of pendants regenerates this deck")
    if len(realized) > 1:
        profiles = [tuple(stat[1:]) for stat, _ in realized]
        raise AmbiguousProfile(f"the deck is explained by several profiles: {profiles}")

    stat_x, reconstruction = realized[0]
    core, counts = split_pendants(reconstruction)
    z = induced_subgraph(reconstruction, core)
    profile = AttachmentProfile.from_partition(counts[v] for v in core)

    grouped: Dict[int, List[Tuple[CanonicalCode, int]]] = {}
    for code, mult, _ in members:
        stat = stat_of[code]
        index = next(
            i
            for i in range(1, len(stat_x))
            if stat_x[i] and _unshift(stat_x, i) == stat
        )
        grouped.setdefault(index, []).append((code, mult))
    decks: Dict[int, Deck] = {}
    reduced: Dict[int, Deck] = {}
    for i, entries in sorted(grouped.items()):
        decks[i] = Deck(END_VERTEX, deck.group_tag, tuple(entries))
        if any(mult % i for _, mult in entries):
            raise InconsistentDeck(f"class {i} multiplicities are not multiples of {i}")
        reduced[i] = Deck(END_VERTEX, deck.group_tag, tuple((c, m // i) for c, m in entries))
    get_logger().debug(
        "Inferred attachment profile",
        category=LogCategory.DECK,
        r=list(profile.r),
        z_vertices=z.n,
        deck_size=deck.total,
    )
    return ProfileInference(z, profile, decks, reduced, reconstruction)


def attach_profile(z: Graph, profile: AttachmentProfile) -> Graph:
    """Z with ``partition[v]`` pendants joined to each vertex v."""

    if len(profile.partition) != z.n:
        raise DeckError(f"partition has {len(profile.partition)} entries for {z.n} vertices")
    return attach_pendants(z, {v: c for v, c in enumerate(profile.partition) if c})


def build_Xj(z: Graph, profile: AttachmentProfile, j: int) -> Graph:
    """Colour ``R_i`` with ``i`` for ``i`` outside ``{0, j-1, j}``; one pendant per R_j vertex."""

    if not 1 <= j <= profile.k:
        raise ClassOutOfRange(f"class index {j} outside 1..{profile.k}")
    if len(profile.partition) != z.n:
        raise DeckError(f"partition has {len(profile.partition)} entries for {z.n} vertices")
    if z.n and min(degrees(z)) < 2:
        raise DeckError("the pruned graph must have minimum degree two")
    colors = [
        DEFAULT_COLOR if c in (0, j - 1, j) else c for c in profile.partition
    ]
    base = Graph(z.n, z.edges, tuple(colors))
    return attach_pendants(base, {v: 1 for v in profile.members(j)})


# ----------------------------------------------------------------------
# Blue-vertex contraction
# ----------------------------------------------------------------------
def contract_end_vertices(graph: Graph) -> Graph:
    """Identify all end vertices into one blue vertex; the remaining vertices turn red.

    The remaining vertices keep their relative order and the blue vertex is
    numbered last.
    """

    ends = end_vertices(graph)
    if not ends:
        raise NoEndVertices("the graph has no vertex of degree one")
    end_set = set(ends)
    anchors = [graph.neighbors(u)[0] for u in ends]
    if any(a in end_set for a in anchors):
        raise DeckError("an end vertex is attached to another end vertex")
    if len(set(anchors)) != len(anchors):
        raise DeckError("two end vertices share a neighbour")
    keep = [v for v in range(graph.n) if v not in end_set]
    index = {v: i for i, v in enumerate(keep)}
    blue = len(keep)
    edges = [(index[u], index[v]) for u, v in graph.edges if u in index and v in index]
    edges.extend((index[a], blue) for a in anchors)
    return from_edges(blue + 1, edges, [RED] * blue + [BLUE])


def contraction_group(graph: Graph, max_order: int = DEFAULT_MAX_ORDER) -> PermGroup:
    """``aut Z`` of the pruned part, extended to fix the blue vertex."""

    ends = set(end_vertices(graph))
    z = induced_subgraph(graph, [v for v in range(graph.n) if v not in ends])
    aut_z = automorphism_group(z, max_order)
    rows = np.concatenate(
        [aut_z.elements, np.full((aut_z.order, 1), z.n, dtype=np.int8)], axis=1
    )
    return PermGroup(z.n + 1, rows, tag="autZ+blue")


def contracted_edge_deck(graph: Graph, max_order: int = DEFAULT_MAX_ORDER) -> Deck:
    """Edge deck of the blue-vertex contraction with respect to ``aut Z``."""

    return edge_deck(contract_end_vertices(graph), contraction_group(graph, max_order))


__all__ = [
    "AmbiguousProfile",
    "AttachmentProfile",
    "ClassOutOfRange",
    "DECK_KINDS",
    "Deck",
    "DeckError",
    "EDGE",
    "END_VERTEX",
    "EmptyGraph",
    "InconsistentDeck",
    "NoEndVertices",
    "ProfileInference",
    "SizeMismatch",
    "VERTEX",
    "attach_profile",
    "build_Xj",
    "contract_end_vertices",
    "contracted_edge_deck",
    "contraction_group",
    "edge_deck",
    "end_vertex_deck",
    "infer_attachment_profile",
    "is_G_edge_hypomorphic",
    "split_pendants",
    "vertex_deck",
]
