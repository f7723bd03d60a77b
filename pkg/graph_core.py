"""Labeled simple graphs for the G-Recon laboratory.

Graphs live on the vertex set ``0..n-1`` and optionally carry a small
nonnegative colour per vertex. They are immutable values: every edit returns a
new :class:`Graph`. Edge sets are kept sorted in the lexicographic pair order
``(0,1), (0,2), ..., (n-2,n-1)`` and mirrored into an integer bitmask where the
pair with lexicographic index ``p`` owns bit ``1 << p``.

The module also provides the graph6 codec (through :mod:`networkx`) with the
``colors=`` annotation used throughout the reports.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from pathlib import Path
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

import networkx as nx

MAX_VERTICES = 24
MAX_COLOR = 255

# Colour names used by the separable and end-vertex reductions.
DEFAULT_COLOR = 0
BLUE = 1
RED = 2

Edge = Tuple[int, int]
EdgeSet = Tuple[Edge, ...]


class CapacityError(Exception):
    """Marker base for every 'cap exceeded' condition (CLI exit code 3)."""


class GraphError(ValueError):
    """Base error for graph construction and editing."""


class InvalidGraph(GraphError):
    """Raised when a graph violates the vertex, edge or colour invariants."""


class EdgeAbsent(GraphError):
    """Raised when an edge to delete is not present."""


class EdgeCollision(GraphError):
    """Raised when an edge to add is already present."""


class VertexOutOfRange(GraphError):
    """Raised when a vertex index is outside ``0..n-1``."""


class MalformedGraph6(GraphError):
    """Raised when a graph6 line cannot be decoded."""


class ColorLengthMismatch(GraphError):
    """Raised when a colour annotation does not list exactly n colours."""


def normalize_edge(u: int, v: int) -> Edge:
    """Return the pair ``(min, max)``."""

    return (u, v) if u < v else (v, u)


def pair_index(u: int, v: int, n: int) -> int:
    """Index of the pair ``{u, v}`` in the lexicographic pair order on n points."""

    if u > v:
        u, v = v, u
    return u * (2 * n - u - 1) // 2 + (v - u - 1)


def pair_count(n: int) -> int:
    return n * (n - 1) // 2


def pair_list(n: int) -> List[Edge]:
    """All pairs on n points in lexicographic order."""

    return list(combinations(range(n), 2))


def normalize_edge_set(pairs: Iterable[Sequence[int]]) -> EdgeSet:
    """Orient, deduplicate and sort a collection of pairs."""

    return tuple(sorted({normalize_edge(int(p[0]), int(p[1])) for p in pairs}))


@dataclass(frozen=True)
class Graph:
    """An immutable labeled simple graph with optional vertex colours."""

    n: int
    edges: EdgeSet = ()
    colors: Optional[Tuple[int, ...]] = None

    def __post_init__(self) -> None:
        if not isinstance(self.n, int) or isinstance(self.n, bool) or self.n < 0:
            raise InvalidGraph(f"vertex count must be a nonnegative integer, got {self.n!r}")
        if self.n > MAX_VERTICES:
            raise InvalidGraph(f"graphs are limited to {MAX_VERTICES} vertices, got {self.n}")
        edges = []
        for pair in self.edges:
            if len(pair) != 2:
                raise InvalidGraph(f"edge {pair!r} is not a pair")
            u, v = int(pair[0]), int(pair[1])
            if u == v:
                raise InvalidGraph(f"loop at vertex {u} is not allowed")
            for w in (u, v):
                if not 0 <= w < self.n:
                    raise InvalidGraph(f"edge endpoint {w} outside 0..{self.n - 1}")
            edges.append(normalize_edge(u, v))
        object.__setattr__(self, "edges", tuple(sorted(set(edges))))
        if self.colors is not None:
            colors = tuple(int(c) for c in self.colors)
            if len(colors) != self.n:
                raise ColorLengthMismatch(
                    f"expected {self.n} colours, got {len(colors)}"
                )
            if any(not 0 <= c <= MAX_COLOR for c in colors):
                raise InvalidGraph(f"colours must be integers in 0..{MAX_COLOR}")
            object.__setattr__(self, "colors", colors)

    # ------------------------------------------------------------------
    # Derived views
    # ------------------------------------------------------------------
    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def is_colored(self) -> bool:
        return self.colors is not None

    @cached_property
    def mask(self) -> int:
        """Edge set as a bitmask over the lexicographic pair order."""

        mask = 0
        for u, v in self.edges:
            mask |= 1 << pair_index(u, v, self.n)
        return mask

    @cached_property
    def adjacency(self) -> Tuple[int, ...]:
        """Neighbourhood bitmask of each vertex (bit ``w`` set when ``w`` is adjacent)."""

        rows = [0] * self.n
        for u, v in self.edges:
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        return tuple(rows)

    @cached_property
    def edge_set(self) -> frozenset:
        return frozenset(self.edges)

    def color_of(self, u: int) -> int:
        return DEFAULT_COLOR if self.colors is None else self.colors[u]

    def color_tuple(self) -> Tuple[int, ...]:
        """Colours with the uncoloured case read as all-default."""

        return self.colors if self.colors is not None else (DEFAULT_COLOR,) * self.n

    def has_edge(self, u: int, v: int) -> bool:
        return normalize_edge(u, v) in self.edge_set

    def neighbors(self, u: int) -> List[int]:
        _check_vertex(self, u)
        row = self.adjacency[u]
        return [w for w in range(self.n) if row >> w & 1]

    def with_colors(self, colors: Optional[Sequence[int]]) -> "Graph":
        return Graph(self.n, self.edges, None if colors is None else tuple(colors))

    def uncolored(self) -> "Graph":
        return Graph(self.n, self.edges)

    def to_networkx(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(range(self.n))
        graph.add_edges_from(self.edges)
        if self.colors is not None:
            nx.set_node_attributes(graph, dict(enumerate(self.colors)), "color")
        return graph

    def __str__(self) -> str:
        return emit_graph6(self) if self.n else "Graph(n=0)"


def from_edges(
    n: int, edges: Iterable[Sequence[int]] = (), colors: Optional[Sequence[int]] = None
) -> Graph:
    """Build a graph from any iterable of pairs."""

    return Graph(n, tuple(tuple(e) for e in edges), None if colors is None else tuple(colors))


def from_mask(n: int, mask: int, colors: Optional[Sequence[int]] = None) -> Graph:
    """Build a graph from a pair-order bitmask."""

    pairs = pair_list(n)
    edges = tuple(pairs[p] for p in range(len(pairs)) if mask >> p & 1)
    return Graph(n, edges, None if colors is None else tuple(colors))


def from_networkx(graph: nx.Graph, colors: Optional[Sequence[int]] = None) -> Graph:
    """Convert a networkx graph whose nodes are ``0..n-1``."""

    nodes = sorted(graph.nodes)
    if nodes != list(range(len(nodes))):
        graph = nx.convert_node_labels_to_integers(graph, ordering="sorted")
    return from_edges(graph.number_of_nodes(), graph.edges, colors)


def edges_to_mask(n: int, edges: Iterable[Sequence[int]]) -> int:
    mask = 0
    for u, v in edges:
        mask |= 1 << pair_index(u, v, n)
    return mask


def mask_to_edges(n: int, mask: int) -> EdgeSet:
    pairs = pair_list(n)
    return tuple(pairs[p] for p in range(len(pairs)) if mask >> p & 1)


def _check_vertex(graph: Graph, u: int) -> None:
    if not 0 <= u < graph.n:
        raise VertexOutOfRange(f"vertex {u} outside 0..{graph.n - 1}")


# ----------------------------------------------------------------------
# Elementary edits
# ----------------------------------------------------------------------
def delete_edge(graph: Graph, edge: Sequence[int]) -> Graph:
    """Return ``X - e``; colours and vertex set are unchanged."""

    e = normalize_edge(int(edge[0]), int(edge[1]))
    if e not in graph.edge_set:
        raise EdgeAbsent(f"edge {e} is not in the graph")
    return Graph(graph.n, tuple(x for x in graph.edges if x != e), graph.colors)


def delete_vertex(graph: Graph, u: int) -> Graph:
    """Return ``X - u`` with the remaining vertices relabeled order-preservingly."""

    _check_vertex(graph, u)

    def shift(v: int) -> int:
        return v if v < u else v - 1

    edges = tuple((shift(a), shift(b)) for a, b in graph.edges if u not in (a, b))
    colors = None
    if graph.colors is not None:
        colors = graph.colors[:u] + graph.colors[u + 1 :]
    return Graph(graph.n - 1, edges, colors)


def add_edges(graph: Graph, new_edges: Iterable[Sequence[int]]) -> Graph:
    """Return ``X + F``; F must be disjoint from ``E(X)``."""

    additions = normalize_edge_set(new_edges)
    clashes = [e for e in additions if e in graph.edge_set]
    if clashes:
        raise EdgeCollision(f"edges already present: {clashes}")
    return Graph(graph.n, graph.edges + additions, graph.colors)


def remove_edges(graph: Graph, old_edges: Iterable[Sequence[int]]) -> Graph:
    """Return ``X - E`` for an edge set E contained in ``E(X)``."""

    removals = set(normalize_edge_set(old_edges))
    missing = sorted(removals - graph.edge_set)
    if missing:
        raise EdgeAbsent(f"edges not in the graph: {missing}")
    return Graph(graph.n, tuple(e for e in graph.edges if e not in removals), graph.colors)


def degrees(graph: Graph) -> Tuple[int, ...]:
    return tuple(bin(row).count("1") for row in graph.adjacency)


def end_vertices(graph: Graph) -> Tuple[int, ...]:
    """Vertices of degree exactly one, ascending."""

    return tuple(v for v, d in enumerate(degrees(graph)) if d == 1)


def non_edges(graph: Graph) -> EdgeSet:
    return tuple(p for p in pair_list(graph.n) if p not in graph.edge_set)


def complement(graph: Graph) -> Graph:
    return Graph(graph.n, non_edges(graph), graph.colors)


def relabel(graph: Graph, mapping: Sequence[int]) -> Graph:
    """Apply the bijection ``v -> mapping[v]`` to vertices and colours."""

    if sorted(mapping) != list(range(graph.n)):
        raise InvalidGraph("relabeling must be a bijection on the vertex set")
    edges = tuple((mapping[u], mapping[v]) for u, v in graph.edges)
    colors = None
    if graph.colors is not None:
        moved = [0] * graph.n
        for v, c in enumerate(graph.colors):
            moved[mapping[v]] = c
        colors = tuple(moved)
    return Graph(graph.n, edges, colors)


def induced_subgraph(graph: Graph, vertices: Iterable[int]) -> Graph:
    """Subgraph induced on ``vertices``, relabeled ascending to ``0..k-1``."""

    keep = sorted(set(vertices))
    for v in keep:
        _check_vertex(graph, v)
    index: Dict[int, int] = {v: i for i, v in enumerate(keep)}
    edges = tuple(
        (index[u], index[v]) for u, v in graph.edges if u in index and v in index
    )
    colors = None
    if graph.colors is not None:
        colors = tuple(graph.colors[v] for v in keep)
    return Graph(len(keep), edges, colors)


def disjoint_union(first: Graph, second: Graph) -> Graph:
    shift = first.n
    edges = first.edges + tuple((u + shift, v + shift) for u, v in second.edges)
    colors = None
    if first.colors is not None or second.colors is not None:
        colors = first.color_tuple() + second.color_tuple()
    return Graph(first.n + second.n, edges, colors)


def attach_pendants(base: Graph, counts: Dict[int, int]) -> Graph:
    """Join ``counts[v]`` fresh end vertices to each vertex v of ``base``.

    New vertices are numbered after the base vertices in ascending order of
    their attachment vertex and inherit the default colour.
    """

    n = base.n
    edges = list(base.edges)
    for v in sorted(counts):
        _check_vertex(base, v)
        for _ in range(counts[v]):
            edges.append((v, n))
            n += 1
    colors = None
    if base.colors is not None:
        colors = base.colors + (DEFAULT_COLOR,) * (n - base.n)
    return from_edges(n, edges, colors)


def is_connected(graph: Graph) -> bool:
    if graph.n == 0:
        return True
    seen = 1
    frontier = 1
    while frontier:
        reach = 0
        for v in range(graph.n):
            if frontier >> v & 1:
                reach |= graph.adjacency[v]
        frontier = reach & ~seen
        seen |= reach
    return seen == (1 << graph.n) - 1


# ----------------------------------------------------------------------
# Named constructors
# ----------------------------------------------------------------------
def empty_graph(n: int) -> Graph:
    return Graph(n)


def complete_graph(n: int) -> Graph:
    return Graph(n, tuple(pair_list(n)))


def path_graph(n: int) -> Graph:
    return Graph(n, tuple((i, i + 1) for i in range(n - 1)))


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise InvalidGraph("cycles need at least three vertices")
    return Graph(n, tuple((i, i + 1) for i in range(n - 1)) + ((0, n - 1),))


def star_graph(leaves: int) -> Graph:
    """K_{1,leaves} with centre 0."""

    return Graph(leaves + 1, tuple((0, i) for i in range(1, leaves + 1)))


def complete_bipartite_graph(s: int, t: int) -> Graph:
    return Graph(s + t, tuple((u, v) for u in range(s) for v in range(s, s + t)))


# ----------------------------------------------------------------------
# graph6 codec
# ----------------------------------------------------------------------
_COLOR_PREFIX = "colors="


def parse_graph6(text: str) -> Graph:
    """Decode one graph6 line, optionally annotated with ``colors=c0,c1,...``."""

    tokens = text.strip().split()
    if not tokens:
        raise MalformedGraph6("empty graph6 line")
    code = tokens[0]
    if code.startswith(">>graph6<<"):
        code = code[len(">>graph6<<") :]
    if not code or any(not 63 <= ord(ch) <= 126 for ch in code):
        raise MalformedGraph6(f"invalid graph6 characters in {code!r}")
    try:
        decoded = nx.from_graph6_bytes(code.encode("ascii"))
    except (nx.NetworkXError, ValueError, IndexError) as exc:
        raise MalformedGraph6(f"cannot decode graph6 {code!r}: {exc}") from exc
    n = decoded.number_of_nodes()
    if n < 1:
        raise MalformedGraph6("graph6 lines must describe at least one vertex")

    colors: Optional[Tuple[int, ...]] = None
    for token in tokens[1:]:
        if not token.startswith(_COLOR_PREFIX) or colors is not None:
            raise MalformedGraph6(f"unexpected annotation {token!r}")
        raw = token[len(_COLOR_PREFIX) :]
        try:
            colors = tuple(int(part) for part in raw.split(",")) if raw else ()
        except ValueError as exc:
            raise MalformedGraph6(f"colour annotation {raw!r} is not integral") from exc
        if len(colors) != n:
            raise ColorLengthMismatch(f"graph has {n} vertices but {len(colors)} colours")
    try:
        return from_networkx(decoded, colors)
    except InvalidGraph as exc:
        raise MalformedGraph6(str(exc)) from exc


def emit_graph6(graph: Graph) -> str:
    """Encode a graph as a graph6 line, appending the colour annotation if coloured."""

    if graph.n < 1:
        raise InvalidGraph("graph6 needs at least one vertex")
    code = nx.to_graph6_bytes(graph.to_networkx(), header=False).decode("ascii").strip()
    if graph.colors is None:
        return code
    return f"{code} {_COLOR_PREFIX}{','.join(str(c) for c in graph.colors)}"


def iter_graph6_lines(lines: Iterable[str]) -> Iterator[Graph]:
    """Decode graph6 lines, skipping blanks and ``#`` comments."""

    for line in lines:
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        yield parse_graph6(stripped)


def read_graph6_file(path: Path) -> List[Graph]:
    with Path(path).open("r", encoding="ascii") as handle:
        return list(iter_graph6_lines(handle))


def write_graph6_file(path: Path, graphs: Iterable[Graph], comment: Optional[str] = None) -> None:
    lines = [f"# {comment}"] if comment else []
    lines.extend(emit_graph6(g) for g in graphs)
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


__all__ = [
    "BLUE",
    "CapacityError",
    "ColorLengthMismatch",
    "DEFAULT_COLOR",
    "Edge",
    "EdgeAbsent",
    "EdgeCollision",
    "EdgeSet",
    "Graph",
    "GraphError",
    "InvalidGraph",
    "MAX_COLOR",
    "MAX_VERTICES",
    "MalformedGraph6",
    "RED",
    "VertexOutOfRange",
    "add_edges",
    "attach_pendants",
    "complement",
    "complete_bipartite_graph",
    "complete_graph",
    "cycle_graph",
    "degrees",
    "delete_edge",
    "delete_vertex",
    "disjoint_union",
    "edges_to_mask",
    "emit_graph6",
    "empty_graph",
    "end_vertices",
    "from_edges",
    "from_mask",
    "from_networkx",
    "induced_subgraph",
    "is_connected",
    "iter_graph6_lines",
    "mask_to_edges",
    "non_edges",
    "normalize_edge",
    "normalize_edge_set",
    "pair_count",
    "pair_index",
    "pair_list",
    "parse_graph6",
    "path_graph",
    "read_graph6_file",
    "relabel",
    "remove_edges",
    "star_graph",
    "write_graph6_file",
]
