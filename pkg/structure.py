"""Structural decompositions and recognizers.

Blocks and cut vertices come from networkx's biconnected-component routines;
the pruned graph, its block-cutpoint tree and the pruned centre are built on
top. The separable reduction turns a graph with a 3-connected pruned centre
into a coloured edge-reconstruction problem on that centre.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from itertools import combinations
from typing import Dict, List, Optional, Tuple

import networkx as nx

from decks import Deck, NoEndVertices
from graph_core import (
    BLUE,
    RED,
    EdgeSet,
    Graph,
    delete_edge,
    degrees,
    end_vertices,
    induced_subgraph,
    is_connected,
    normalize_edge,
    remove_edges,
)
from isomorphism import automorphism_group, canonical_form
from logger import LogCategory, get_logger
from perm_group import DEFAULT_MAX_ORDER, PermGroup, restrict_to


class StructureError(ValueError):
    """Base error for structural decompositions."""


class Disconnected(StructureError):
    """Raised when a decomposition needs a connected graph."""


class EmptyPrunedGraph(StructureError):
    """Raised when the pruned graph has no edge (or no vertex)."""


class DisconnectedPrunedGraph(StructureError):
    """Raised when the pruned graph falls apart."""


class NotSeparable(StructureError):
    """Raised when a graph has no cut vertex."""


class CenterNotThreeConnected(StructureError):
    """Raised when the pruned centre block is not 3-connected."""


class CenterIsCutVertex(StructureError):
    """Raised when the pruned centre is a cut vertex instead of a block."""


class NotEndVertex(StructureError):
    """Raised when a vertex expected to have degree one does not."""


# ----------------------------------------------------------------------
# Blocks and the block-cutpoint tree
# ----------------------------------------------------------------------
def blocks_and_cutpoints(graph: Graph) -> Tuple[List[EdgeSet], Tuple[int, ...]]:
    """2-blocks (as edge sets, ordered by their smallest edge) and cut vertices."""

    if not is_connected(graph):
        raise Disconnected("blocks are only defined here for connected graphs")
    if graph.n < 2:
        return [], ()
    nx_graph = graph.to_networkx()
    blocks = [
        tuple(sorted(normalize_edge(u, v) for u, v in component))
        for component in nx.biconnected_component_edges(nx_graph)
    ]
    blocks.sort()
    return blocks, tuple(sorted(nx.articulation_points(nx_graph)))


@dataclass(frozen=True)
class BlockCutTree:
    """Tree whose nodes are the blocks (indices ``0..B-1``) then the cut vertices."""

    blocks: Tuple[EdgeSet, ...]
    cutpoints: Tuple[int, ...]
    tree_edges: EdgeSet

    @property
    def node_count(self) -> int:
        return len(self.blocks) + len(self.cutpoints)

    def is_block(self, node: int) -> bool:
        return node < len(self.blocks)

    def block_vertices(self, index: int) -> Tuple[int, ...]:
        return tuple(sorted({v for e in self.blocks[index] for v in e}))

    def to_networkx(self) -> nx.Graph:
        tree = nx.Graph()
        for node in range(self.node_count):
            tree.add_node(node, kind="block" if self.is_block(node) else "cut")
        tree.add_edges_from(self.tree_edges)
        return tree

    def to_json(self) -> Dict:
        return {
            "blocks": [[list(e) for e in block] for block in self.blocks],
            "cutpoints": list(self.cutpoints),
            "tree_edges": [list(e) for e in self.tree_edges],
        }


def block_cut_tree(graph: Graph) -> BlockCutTree:
    blocks, cutpoints = blocks_and_cutpoints(graph)
    if not blocks:
        return BlockCutTree((), (), ())
    offset = len(blocks)
    cut_index = {c: offset + i for i, c in enumerate(cutpoints)}
    edges = []
    for b, block in enumerate(blocks):
        on_block = {v for e in block for v in e}
        edges.extend((b, cut_index[c]) for c in cutpoints if c in on_block)
    return BlockCutTree(tuple(blocks), cutpoints, tuple(sorted(edges)))


# ----------------------------------------------------------------------
# Pruned graph and pruned centre
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class PrunedGraph:
    """The pruned graph together with the original label of each surviving vertex."""

    graph: Graph
    vertices: Tuple[int, ...]
    rounds: int


def pruned_graph(graph: Graph) -> PrunedGraph:
    """Delete all degree-one vertices simultaneously, round after round."""

    alive = list(range(graph.n))
    current = graph
    rounds = 0
    while True:
        ends = set(end_vertices(current))
        if not ends:
            break
        keep = [i for i in range(current.n) if i not in ends]
        current = induced_subgraph(current, keep)
        alive = [alive[i] for i in keep]
        rounds += 1
    return PrunedGraph(current, tuple(alive), rounds)


@dataclass(frozen=True)
class CenterDescriptor:
    """The pruned centre, in the labels of the original graph."""

    kind: str
    vertices: Tuple[int, ...]
    edges: EdgeSet

    @property
    def is_block(self) -> bool:
        return self.kind == "block"

    def to_json(self) -> Dict:
        return {
            "kind": self.kind,
            "vertices": list(self.vertices),
            "edges": [list(e) for e in self.edges],
        }


def _center_of(pruned: PrunedGraph) -> Tuple[CenterDescriptor, BlockCutTree]:
    if pruned.graph.m == 0:
        raise EmptyPrunedGraph("the pruned graph has no edges")
    if not is_connected(pruned.graph):
        raise DisconnectedPrunedGraph("the pruned graph is disconnected")
    tree = block_cut_tree(pruned.graph)
    centers = nx.center(tree.to_networkx())
    if len(centers) != 1:
        raise StructureError(f"block-cutpoint tree has {len(centers)} centre nodes")
    node = centers[0]
    label = pruned.vertices
    if tree.is_block(node):
        edges = tuple(sorted(normalize_edge(label[u], label[v]) for u, v in tree.blocks[node]))
        vertices = tuple(sorted({v for e in edges for v in e}))
        return CenterDescriptor("block", vertices, edges), tree
    cut = label[tree.cutpoints[node - len(tree.blocks)]]
    return CenterDescriptor("cut", (cut,), ()), tree


def pruned_center(graph: Graph) -> CenterDescriptor:
    """Unique centre node of the block-cutpoint tree of the pruned graph."""

    center, _ = _center_of(pruned_graph(graph))
    return center


def _trees_match(first: BlockCutTree, second: BlockCutTree) -> bool:
    if first.node_count != second.node_count or len(first.blocks) != len(second.blocks):
        return False
    return nx.is_isomorphic(
        first.to_networkx(),
        second.to_networkx(),
        node_match=lambda a, b: a["kind"] == b["kind"],
    )


# ----------------------------------------------------------------------
# Separable reduction
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class SeparableReduction:
    """Centre block, the group it inherits, and the recognized centre-edge deletions."""

    center: Graph
    center_vertices: Tuple[int, ...]
    group: PermGroup
    recognized: EdgeSet
    sub_deck: Deck


def _criterion(graph: Graph, edge, tree: BlockCutTree, center_edges: int) -> bool:
    """``T(P(X)) ≅ T(P(X-e))`` and the centre loses exactly one edge."""

    try:
        center, other_tree = _center_of(pruned_graph(delete_edge(graph, edge)))
    except StructureError:
        return False
    return _trees_match(tree, other_tree) and len(center.edges) == center_edges - 1


def reduce_separable(graph: Graph, max_order: int = DEFAULT_MAX_ORDER) -> SeparableReduction:
    if not is_connected(graph):
        raise Disconnected("the separable reduction needs a connected graph")
    _, cutpoints = blocks_and_cutpoints(graph)
    if not cutpoints:
        raise NotSeparable("the graph has no cut vertex")
    if not end_vertices(graph):
        raise NoEndVertices("the graph has no vertex of degree one")
    center, tree = _center_of(pruned_graph(graph))
    if not center.is_block:
        raise CenterIsCutVertex(f"the pruned centre is cut vertex {center.vertices[0]}")
    center_graph = induced_subgraph(Graph(graph.n, center.edges), center.vertices)
    if not vertex_connectivity_at_least(center_graph, 3):
        raise CenterNotThreeConnected("the pruned centre block is not 3-connected")

    on_center = set(center.vertices)
    colors = tuple(BLUE if v in on_center else RED for v in range(graph.n))
    residual = remove_edges(graph, center.edges).with_colors(colors)
    group = restrict_to(automorphism_group(residual, max_order), center.vertices)
    group = group.with_tag("induced")

    recognized = tuple(
        e for e in graph.edges if _criterion(graph, e, tree, len(center.edges))
    )
    sub_deck = Deck.from_codes(
        "edge", "S", (canonical_form(delete_edge(graph, e)) for e in recognized)
    )
    get_logger().debug(
        "Reduced separable graph",
        category=LogCategory.STRUCTURE,
        center_vertices=list(center.vertices),
        group_order=group.order,
        recognized=len(recognized),
    )
    return SeparableReduction(center_graph, center.vertices, group, recognized, sub_deck)


# ----------------------------------------------------------------------
# Connectivity
# ----------------------------------------------------------------------
def vertex_connectivity_at_least(graph: Graph, k: int) -> bool:
    """True when ``n > k`` and removing any ``k - 1`` vertices leaves a connected graph."""

    if k <= 0:
        return True
    if graph.n <= k:
        return False
    for removed in combinations(range(graph.n), k - 1):
        gone = set(removed)
        if not is_connected(induced_subgraph(graph, [v for v in range(graph.n) if v not in gone])):
            return False
    return True


def is_2_edge_connected(graph: Graph) -> bool:
    if graph.n < 2 or not is_connected(graph):
        return False
    return not nx.has_bridges(graph.to_networkx())


# ----------------------------------------------------------------------
# Class recognizers
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class ClassFlags:
    bipartite: bool
    parts: Optional[Tuple[int, int]]
    tree: bool
    path: bool
    chordal: bool
    claw_free: bool
    p4_free: bool

    def to_json(self) -> Dict:
        return {
            "bipartite": self.bipartite,
            "parts": list(self.parts) if self.parts else None,
            "tree": self.tree,
            "path": self.path,
            "chordal": self.chordal,
            "claw_free": self.claw_free,
            "p4_free": self.p4_free,
        }


def bipartition(graph: Graph) -> Optional[Tuple[int, int]]:
    """Part sizes of a 2-colouring (smaller first), or None when an odd cycle exists."""

    nx_graph = graph.to_networkx()
    if not nx.is_bipartite(nx_graph):
        return None
    coloring = nx.bipartite.color(nx_graph)
    ones = sum(coloring.values())
    zeros = graph.n - ones
    return (min(zeros, ones), max(zeros, ones))


def max_cardinality_order(graph: Graph) -> List[int]:
    """Maximum cardinality search order (ties broken by the smallest vertex)."""

    adjacency = graph.adjacency
    weight = [0] * graph.n
    numbered = 0
    order: List[int] = []
    for _ in range(graph.n):
        v = max(
            (u for u in range(graph.n) if not numbered >> u & 1), key=lambda u: (weight[u], -u)
        )
        order.append(v)
        numbered |= 1 << v
        for w in range(graph.n):
            if adjacency[v] >> w & 1 and not numbered >> w & 1:
                weight[w] += 1
    return order


def is_chordal(graph: Graph) -> bool:
    """MCS order reversed must be a perfect elimination ordering."""

    order = max_cardinality_order(graph)
    position = {v: i for i, v in enumerate(order)}
    adjacency = graph.adjacency
    for v in order:
        earlier = [w for w in range(graph.n) if adjacency[v] >> w & 1 and position[w] < position[v]]
        if not earlier:
            continue
        parent = max(earlier, key=lambda w: position[w])
        for w in earlier:
            if w != parent and not adjacency[parent] >> w & 1:
                return False
    return True


def is_claw_free(graph: Graph) -> bool:
    adjacency = graph.adjacency
    for center in range(graph.n):
        around = graph.neighbors(center)
        for a, b, c in combinations(around, 3):
            if not (adjacency[a] >> b & 1 or adjacency[a] >> c & 1 or adjacency[b] >> c & 1):
                return False
    return True


def is_p4_free(graph: Graph) -> bool:
    for quad in combinations(range(graph.n), 4):
        sub = induced_subgraph(graph, quad)
        if sub.m == 3 and sorted(degrees(sub)) == [1, 1, 2, 2]:
            return False
    return True


def classify(graph: Graph) -> ClassFlags:
    parts = bipartition(graph)
    tree = graph.n >= 1 and is_connected(graph) and graph.m == graph.n - 1
    path = tree and max(degrees(graph), default=0) <= 2
    return ClassFlags(
        bipartite=parts is not None,
        parts=parts,
        tree=tree,
        path=path,
        chordal=is_chordal(graph),
        claw_free=is_claw_free(graph),
        p4_free=is_p4_free(graph),
    )


# ----------------------------------------------------------------------
# End-vertex depth
# ----------------------------------------------------------------------
def end_vertex_depth(graph: Graph, u: int, pruned: Optional[PrunedGraph] = None) -> int:
    """Distance from end vertex ``u`` to the nearest vertex of the pruned graph."""

    if not 0 <= u < graph.n or degrees(graph)[u] != 1:
        raise NotEndVertex(f"vertex {u} is not an end vertex")
    pruned = pruned or pruned_graph(graph)
    if not pruned.vertices:
        raise EmptyPrunedGraph("the pruned graph has no vertices")
    lengths = nx.single_source_shortest_path_length(graph.to_networkx(), u)
    reachable = [lengths[v] for v in pruned.vertices if v in lengths]
    if not reachable:
        raise EmptyPrunedGraph(f"no pruned-graph vertex is reachable from {u}")
    return min(reachable)


def end_vertex_depths(graph: Graph) -> Dict[int, int]:
    pruned = pruned_graph(graph)
    return {u: end_vertex_depth(graph, u, pruned) for u in end_vertices(graph)}


def depth_profile(graph: Graph) -> Tuple[Tuple[int, int], ...]:
    """``(depth, count)`` pairs over all end vertices, ascending by depth."""

    return tuple(sorted(Counter(end_vertex_depths(graph).values()).items()))


__all__ = [
    "BlockCutTree",
    "CenterDescriptor",
    "CenterIsCutVertex",
    "CenterNotThreeConnected",
    "ClassFlags",
    "Disconnected",
    "DisconnectedPrunedGraph",
    "EmptyPrunedGraph",
    "NotEndVertex",
    "NotSeparable",
    "PrunedGraph",
    "SeparableReduction",
    "StructureError",
    "bipartition",
    "block_cut_tree",
    "blocks_and_cutpoints",
    "classify",
    "depth_profile",
    "end_vertex_depth",
    "end_vertex_depths",
    "is_2_edge_connected",
    "is_chordal",
    "is_claw_free",
    "is_p4_free",
    "max_cardinality_order",
    "pruned_center",
    "pruned_graph",
    "reduce_separable",
    "vertex_connectivity_at_least",
]
