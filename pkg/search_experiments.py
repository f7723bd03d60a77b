"""Exhaustive desk-scale experiments.

Enumeration up to isomorphism, hypomorphic-pair discovery, replacing edge
sets, the end-vertex attachment experiment and the tree survey. Every search
runs in a fixed lexicographic order so repeated runs give identical results.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple

from decks import (
    AttachmentProfile,
    attach_profile,
    edge_deck,
    end_vertex_deck,
    is_G_edge_hypomorphic,
)
from graph_core import (
    CapacityError,
    EdgeSet,
    Graph,
    add_edges,
    degrees,
    emit_graph6,
    from_mask,
    is_connected,
    non_edges,
    normalize_edge_set,
    pair_count,
    remove_edges,
)
from isomorphism import CanonicalCode, CodeCache, automorphism_group, canonical_form
from logger import LogCategory, experiment_event, get_logger, progress
from nash_williams import (
    DEFAULT_MAX_CANDIDATES,
    DEFAULT_MAX_SUBSETS,
    CandidateCapExceeded,
    LemmaReport,
    candidate_count,
    verify_lemma,
)
from perm_group import PermGroup, symmetric

MAX_ENUMERATION_N = 8
MAX_TREE_N = 12
MAX_SURVEY_N = 10
DEFAULT_MAX_ATTACHMENTS = 200_000

GraphPredicate = Callable[[Graph], bool]
GroupFactory = Callable[[Graph], PermGroup]


class SearchError(RuntimeError):
    """Base error for the exhaustive experiments."""


class EnumerationCapExceeded(SearchError, CapacityError):
    """Raised when an enumeration is asked for more vertices than it supports."""


class ProfileTooLarge(SearchError):
    """Raised when an attachment profile does not fit the pruned graph."""


class InvalidBaseGraph(SearchError):
    """Raised when the pruned graph of an experiment has a vertex of degree below two."""


# ----------------------------------------------------------------------
# Enumeration
# ----------------------------------------------------------------------
def _augment(level: Dict[CanonicalCode, Graph]) -> Dict[CanonicalCode, Graph]:
    """Classes with one more edge: every class is some smaller class plus one edge."""

    following: Dict[CanonicalCode, Graph] = {}
    for graph in level.values():
        for e in non_edges(graph):
            code = canonical_form(add_edges(graph, [e]))
            if code not in following:
                following[code] = code.to_graph(colored=False)
    return following


def _levels(n: int, top: int) -> Iterator[Dict[CanonicalCode, Graph]]:
    empty = Graph(n)
    level = {canonical_form(empty): empty}
    yield level
    for _ in range(top):
        level = _augment(level)
        yield level


def enumerate_graphs(
    n: int,
    m: Optional[int] = None,
    predicate: Optional[GraphPredicate] = None,
    max_n: int = MAX_ENUMERATION_N,
) -> List[Graph]:
    """One representative per isomorphism class, in canonical-code order.

    Representatives are the S_n orbit minima. Classes are grown edge by edge
    from the empty graph and deduplicated by canonical form.
    """

    if n < 0:
        raise SearchError("vertex count must be nonnegative")
    if n > max_n:
        raise EnumerationCapExceeded(f"enumeration supports at most {max_n} vertices, got {n}")
    pairs = pair_count(n)
    if m is not None and not 0 <= m <= pairs:
        return []
    top = pairs if m is None else m
    found: Dict[CanonicalCode, Graph] = {}
    for size, level in enumerate(_levels(n, top)):
        if m is None or size == m:
            found.update(level)
    result = [found[code] for code in sorted(found)]
    if predicate is not None:
        result = [g for g in result if predicate(g)]
    get_logger().debug(
        "Enumerated graphs",
        category=LogCategory.SEARCH,
        n=n,
        m=m,
        classes=len(result),
    )
    return result


def is_tree(graph: Graph) -> bool:
    return graph.n >= 1 and graph.m == graph.n - 1 and is_connected(graph)


def enumerate_trees(n: int, max_n: int = MAX_TREE_N) -> List[Graph]:
    """All trees on ``n`` vertices up to isomorphism, in canonical-code order."""

    if n < 1:
        raise SearchError("trees need at least one vertex")
    if n > max_n:
        raise EnumerationCapExceeded(f"tree enumeration supports at most {max_n} vertices")
    if n <= MAX_ENUMERATION_N:
        return enumerate_graphs(n, n - 1, is_tree)
    # Grow by one leaf at a time from the largest size the graph enumeration covers.
    seed = enumerate_graphs(MAX_ENUMERATION_N, MAX_ENUMERATION_N - 1, is_tree)
    trees = {canonical_form(t): t for t in seed}
    for size in range(MAX_ENUMERATION_N, n):
        grown: Dict[CanonicalCode, Graph] = {}
        for tree in trees.values():
            for v in range(size):
                leafy = Graph(size + 1, tree.edges + ((v, size),))
                code = canonical_form(leafy)
                if code not in grown:
                    grown[code] = code.to_graph(colored=False)
        trees = grown
    return [trees[code] for code in sorted(trees)]


def _partitions(n: int, largest: Optional[int] = None) -> Iterator[Tuple[int, ...]]:
    largest = n if largest is None else largest
    if n == 0:
        yield ()
        return
    for part in range(min(n, largest), 0, -1):
        for rest in _partitions(n - part, part):
            yield (part,) + rest


def _pair_cycle_lengths(cycle_type: Sequence[int]) -> List[int]:
    lengths: List[int] = []
    for length in cycle_type:
        if length % 2:
            lengths.extend([length] * ((length - 1) // 2))
        else:
            lengths.extend([length] * ((length - 2) // 2) + [length // 2])
    for a, b in combinations(cycle_type, 2):
        g = math.gcd(a, b)
        lengths.extend([a * b // g] * g)
    return lengths


def burnside_graph_count(n: int, m: Optional[int] = None) -> int:
    """Number of isomorphism classes of graphs on ``n`` vertices, by cycle types of S_n.

    Each cycle type of S_n contributes ``2^c / z`` where ``c`` counts the cycles
    it induces on vertex pairs; with ``m`` given, the generating polynomial of
    those pair cycles is used instead of ``2^c``.
    """

    if n < 0:
        raise SearchError("vertex count must be nonnegative")
    total = Fraction(0)
    for cycle_type in _partitions(n):
        z = 1
        for length, multiplicity in Counter(cycle_type).items():
            z *= length**multiplicity * math.factorial(multiplicity)
        lengths = _pair_cycle_lengths(cycle_type)
        if m is None:
            fixed = 2 ** len(lengths)
        else:
            poly = [1]
            for length in lengths:
                grown = poly + [0] * length
                for i, coefficient in enumerate(poly):
                    grown[i + length] += coefficient
                poly = grown
            fixed = poly[m] if 0 <= m < len(poly) else 0
        total += Fraction(fixed, z)
    if total.denominator != 1:
        raise SearchError(f"orbit count {total} is not an integer")
    return int(total)


# ----------------------------------------------------------------------
# Hypomorphic pairs
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class PairWitness:
    """A G-edge-hypomorphic, non-G-isomorphic pair with its identity check attached."""

    x: Graph
    y: Graph
    group_tag: str
    hypomorphic: bool
    isomorphic: bool
    lemma: LemmaReport = field(repr=False)

    @property
    def lemma_verdict(self) -> str:
        return self.lemma.verdict

    def to_json(self) -> Dict:
        return {
            "x": emit_graph6(self.x),
            "y": emit_graph6(self.y),
            "y_code": canonical_form(self.y).to_hex(),
            "group": self.group_tag,
            "checks": {
                "hypomorphic": self.hypomorphic,
                "isomorphic": self.isomorphic,
                "lemma_verdict": self.lemma.verdict,
                "aut_term": self.lemma.aut_term,
                "subsets_checked": self.lemma.subsets_checked,
            },
        }


def _labeled_graphs(n: int, m: int, colors=None) -> Iterator[Graph]:
    for chosen in combinations(range(pair_count(n)), m):
        mask = 0
        for p in chosen:
            mask |= 1 << p
        yield from_mask(n, mask, colors)


def find_hypomorphic_pairs(
    n: int,
    m: int,
    group: PermGroup,
    candidate_cap: int = DEFAULT_MAX_CANDIDATES,
    max_subsets: int = DEFAULT_MAX_SUBSETS,
    workers: int = 1,
) -> List[PairWitness]:
    """Every unordered pair of G-orbits of ``m``-edge graphs sharing a G-edge deck."""

    if group.n != n:
        raise SearchError(f"group acts on {group.n} points, expected {n}")
    total = candidate_count(n, m) if 0 <= m <= pair_count(n) else 0
    if total > candidate_cap:
        raise CandidateCapExceeded(f"{total} candidates exceed the cap {candidate_cap}")
    if total == 0 or m == 0:
        return []
    cache = CodeCache(group, workers)
    orbits: Dict[CanonicalCode, Graph] = {}
    for graph in progress(_labeled_graphs(n, m), total=total, desc="orbits"):
        orbits.setdefault(cache.code(graph), graph)

    by_deck: Dict[Tuple, List[CanonicalCode]] = {}
    for code in sorted(orbits):
        deck = edge_deck(orbits[code], group, cache)
        by_deck.setdefault(deck.entries, []).append(code)

    witnesses: List[PairWitness] = []
    for codes in by_deck.values():
        for first, second in combinations(codes, 2):
            x, y = orbits[first], orbits[second]
            report = verify_lemma(x, y, group, max_subsets, workers)
            witnesses.append(PairWitness(x, y, group.tag, True, False, report))
    witnesses.sort(key=lambda w: (cache.code(w.x), cache.code(w.y)))
    cache.report()
    experiment_event(
        "hypomorphic pair search finished",
        n=n,
        m=m,
        group=group.tag,
        orbits=len(orbits),
        pairs=len(witnesses),
    )
    return witnesses


# ----------------------------------------------------------------------
# Replacing edge sets
# ----------------------------------------------------------------------
def _deck_degree_signature(graph: Graph) -> Tuple:
    """Sorted degree sequences of the edge-deleted subgraphs; invariant under every group."""

    degs = degrees(graph)
    signature = []
    for u, v in graph.edges:
        reduced = list(degs)
        reduced[u] -= 1
        reduced[v] -= 1
        signature.append(tuple(sorted(reduced)))
    return tuple(sorted(signature))


def find_replacing_sets(
    graph: Graph,
    removed: Sequence[Sequence[int]],
    group: PermGroup,
    cache: Optional[CodeCache] = None,
    first_only: bool = False,
) -> List[EdgeSet]:
    """Every F disjoint from E(X) with ``|F| = |E|`` and X - E + F G-edge-hypomorphic to X."""

    removed_set = normalize_edge_set(removed)
    base = remove_edges(graph, removed_set)
    if cache is None or cache.group is not group:
        cache = CodeCache(group)
    signature = _deck_degree_signature(graph)
    found: List[EdgeSet] = []
    for added in combinations(non_edges(graph), len(removed_set)):
        candidate = add_edges(base, added)
        if _deck_degree_signature(candidate) != signature:
            continue
        if is_G_edge_hypomorphic(graph, candidate, group, cache):
            found.append(tuple(added))
            if first_only:
                break
    return found


def find_irreplaceable_edge_set(
    graph: Graph,
    group: PermGroup,
    max_k: Optional[int] = None,
    cache: Optional[CodeCache] = None,
) -> Optional[EdgeSet]:
    """Smallest, then lexicographically first, edge set with no replacing set."""

    max_k = graph.m if max_k is None else min(max_k, graph.m)
    if cache is None or cache.group is not group:
        cache = CodeCache(group)
    for k in range(1, max_k + 1):
        for chosen in combinations(graph.edges, k):
            if not find_replacing_sets(graph, chosen, group, cache, first_only=True):
                return tuple(chosen)
    return None


# ----------------------------------------------------------------------
# End-vertex attachment experiment
# ----------------------------------------------------------------------
def _ambiguous_twin(r: Tuple[int, ...]) -> Optional[Tuple[int, ...]]:
    return {(2,): (0, 1), (0, 1): (2,)}.get(r)


def _assignments(n: int, r: Sequence[int]) -> Iterator[Tuple[int, ...]]:
    """Every partition vector with ``r[i-1]`` vertices in class ``i``."""

    def place(i: int, free: Tuple[int, ...], partition: List[int]) -> Iterator[Tuple[int, ...]]:
        if i > len(r):
            yield tuple(partition)
            return
        for chosen in combinations(free, r[i - 1]):
            for v in chosen:
                partition[v] = i
            rest = tuple(v for v in free if v not in chosen)
            yield from place(i + 1, rest, partition)
            for v in chosen:
                partition[v] = 0

    yield from place(1, tuple(range(n)), [0] * n)


def attachment_count(z_order: int, r: Sequence[int]) -> int:
    count, free = 1, z_order
    for ri in r:
        count *= math.comb(free, ri)
        free -= ri
    return count


@dataclass(frozen=True)
class EndVertexVerdict:
    z: Graph
    profile: AttachmentProfile
    unique: bool
    attachments: int
    deck_classes: int
    isomorphism_classes: int
    witnesses: Tuple[Graph, ...]
    aut_z_order: int
    conditions: Dict[str, bool]
    caveat: bool
    caveat_collision: Optional[bool]

    @property
    def verdict(self) -> str:
        return "unique" if self.unique else "ambiguous"

    @property
    def condition_fired(self) -> bool:
        return any(self.conditions.values())

    def to_json(self) -> Dict:
        return {
            "z": emit_graph6(self.z),
            "r": list(self.profile.r),
            "verdict": self.verdict,
            "attachments": self.attachments,
            "deck_classes": self.deck_classes,
            "isomorphism_classes": self.isomorphism_classes,
            "witnesses": [emit_graph6(g) for g in self.witnesses],
            "aut_z_order": self.aut_z_order,
            "conditions": dict(sorted(self.conditions.items())),
            "caveat": self.caveat,
            "caveat_collision": self.caveat_collision,
        }


def profile_conditions(z_order: int, aut_order: int, r: Sequence[int]) -> Dict[str, bool]:
    """The inequalities under which the attachment is end-vertex reconstructible."""

    r = tuple(r)
    conditions: Dict[str, bool] = {}
    if len(r) == 1:
        conditions["r1_majority"] = 2 * r[0] > z_order
        conditions["r1_power"] = r[0] >= 1 and 2 ** (r[0] - 1) > aut_order
    r0 = z_order - sum(r)
    for j, rj in enumerate(r, start=1):
        previous = r0 if j == 1 else r[j - 2]
        conditions[f"r{j}_exceeds_r{j - 1}"] = rj > previous
        conditions[f"r{j}_power"] = rj >= 1 and 2 ** (rj - 1) > aut_order
    return conditions


def _deck_classes(z: Graph, r: Tuple[int, ...]) -> Dict[Tuple, Dict[CanonicalCode, Graph]]:
    classes: Dict[Tuple, Dict[CanonicalCode, Graph]] = {}
    for partition in _assignments(z.n, r):
        built = attach_profile(z, AttachmentProfile(r, partition))
        members = classes.setdefault(end_vertex_deck(built).entries, {})
        members.setdefault(canonical_form(built), built)
    return classes


def end_vertex_experiment(
    z: Graph,
    profile: AttachmentProfile,
    max_attachments: int = DEFAULT_MAX_ATTACHMENTS,
) -> EndVertexVerdict:
    """Attach pendants to Z in every way the profile allows and compare end-vertex decks."""

    r = profile.r
    if not r:
        raise ProfileTooLarge("the profile attaches no end vertices")
    if z.n < 3 or min(degrees(z)) < 2:
        raise InvalidBaseGraph("the pruned graph must have minimum degree two")
    if sum(r) > z.n:
        raise ProfileTooLarge(f"profile {list(r)} needs {sum(r)} vertices, Z has {z.n}")
    if z.n + profile.end_vertex_count > 24:
        raise ProfileTooLarge("attached graph would exceed 24 vertices")
    count = attachment_count(z.n, r)
    if count > max_attachments:
        raise ProfileTooLarge(f"{count} attachments exceed the cap {max_attachments}")

    classes = _deck_classes(z, r)
    ambiguous = [members for members in classes.values() if len(members) > 1]
    witnesses: Tuple[Graph, ...] = ()
    if ambiguous:
        first = ambiguous[0]
        witnesses = tuple(first[code] for code in sorted(first)[:2])
    aut_order = automorphism_group(z).order
    conditions = profile_conditions(z.n, aut_order, r)

    twin = _ambiguous_twin(r)
    collision: Optional[bool] = None
    if twin is not None and sum(twin) <= z.n:
        collision = bool(set(classes) & set(_deck_classes(z, twin)))

    verdict = EndVertexVerdict(
        z=z,
        profile=AttachmentProfile(r),
        unique=not ambiguous,
        attachments=count,
        deck_classes=len(classes),
        isomorphism_classes=sum(len(members) for members in classes.values()),
        witnesses=witnesses,
        aut_z_order=aut_order,
        conditions=conditions,
        caveat=twin is not None,
        caveat_collision=collision,
    )
    if verdict.condition_fired and not verdict.unique:
        get_logger().warning(
            "Sufficient condition fired on an ambiguous attachment",
            category=LogCategory.SEARCH,
            z=emit_graph6(z),
            r=list(r),
        )
    experiment_event(
        "end-vertex experiment finished",
        z=emit_graph6(z),
        r=list(r),
        verdict=verdict.verdict,
        attachments=count,
    )
    return verdict


# ----------------------------------------------------------------------
# Surveys
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class TreeEntry:
    tree: Graph
    status: str
    irreplaceable: Optional[EdgeSet]

    def to_json(self) -> Dict:
        return {
            "tree": emit_graph6(self.tree),
            "n": self.tree.n,
            "status": self.status,
            "irreplaceable": (
                [list(e) for e in self.irreplaceable] if self.irreplaceable is not None else None
            ),
        }


@dataclass(frozen=True)
class TreeSurvey:
    max_n: int
    group_spec: str
    entries: Tuple[TreeEntry, ...]

    @property
    def exceptional(self) -> Tuple[TreeEntry, ...]:
        return tuple(e for e in self.entries if e.status == "exceptional")

    def to_json(self) -> Dict:
        return {
            "max_n": self.max_n,
            "group": self.group_spec,
            "trees": [e.to_json() for e in self.entries],
            "exceptional": [emit_graph6(e.tree) for e in self.exceptional],
        }


def survey_trees(
    max_n: int,
    group_factory: Optional[GroupFactory] = None,
    group_spec: str = "S",
    max_k: Optional[int] = None,
) -> TreeSurvey:
    """Search every tree with at most ``max_n`` vertices for an irreplaceable edge set.

    Finding one is sufficient for G-edge reconstructibility; trees without one
    are listed as exceptional.
    """

    if max_n > MAX_SURVEY_N:
        raise EnumerationCapExceeded(f"the tree survey supports at most {MAX_SURVEY_N} vertices")
    factory = group_factory or (lambda tree: symmetric(tree.n))
    entries: List[TreeEntry] = []
    for n in range(1, max_n + 1):
        for tree in progress(enumerate_trees(n), desc=f"trees n={n}"):
            if tree.m == 0:
                entries.append(TreeEntry(tree, "edgeless", None))
                continue
            found = find_irreplaceable_edge_set(tree, factory(tree), max_k)
            status = "irreplaceable" if found is not None else "exceptional"
            entries.append(TreeEntry(tree, status, found))
    survey = TreeSurvey(max_n, group_spec, tuple(entries))
    experiment_event(
        "tree survey finished",
        max_n=max_n,
        group=group_spec,
        trees=len(entries),
        exceptional=len(survey.exceptional),
    )
    return survey


def edge_deck_collisions(n: int, min_edges: int = 4) -> List[Tuple[Graph, Graph]]:
    """Non-isomorphic graph pairs with at least ``min_edges`` edges sharing an S_n edge deck."""

    group = symmetric(n)
    cache = CodeCache(group)
    by_deck: Dict[Tuple, List[Graph]] = {}
    for graph in enumerate_graphs(n, predicate=lambda g: g.m >= max(1, min_edges)):
        by_deck.setdefault((graph.m, edge_deck(graph, group, cache).entries), []).append(graph)
    collisions = [
        pair for graphs in by_deck.values() if len(graphs) > 1 for pair in combinations(graphs, 2)
    ]
    experiment_event(
        "edge deck collision survey finished", n=n, min_edges=min_edges, collisions=len(collisions)
    )
    return collisions


__all__ = [
    "EndVertexVerdict",
    "EnumerationCapExceeded",
    "InvalidBaseGraph",
    "MAX_ENUMERATION_N",
    "PairWitness",
    "ProfileTooLarge",
    "SearchError",
    "TreeEntry",
    "TreeSurvey",
    "attachment_count",
    "burnside_graph_count",
    "edge_deck_collisions",
    "end_vertex_experiment",
    "enumerate_graphs",
    "enumerate_trees",
    "find_hypomorphic_pairs",
    "find_irreplaceable_edge_set",
    "find_replacing_sets",
    "is_tree",
    "profile_conditions",
    "survey_trees",
]
