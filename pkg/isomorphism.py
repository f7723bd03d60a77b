"""Orbit-minimal canonical codes, G-isomorphism and automorphism groups.

A canonical code is the lexicographic minimum, over every element ``g`` of a
group, of the pair (colour sequence, adjacency bit string) of ``g(X)``. For an
arbitrary group the minimum is taken over the explicit element array in
vectorized chunks. For the full symmetric group a refinement search finds the
same minimum without touching all ``n!`` elements.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import permutations, product
from typing import Dict, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from graph_core import Graph, pair_count, pair_index, pair_list
from logger import LogCategory, LoggableMixin, get_logger
from perm_group import (
    DEFAULT_MAX_ORDER,
    DegreeMismatch,
    GroupError,
    OrderCapExceeded,
    PermGroup,
    map_element_chunks,
)


class ColorArityMismatch(GroupError):
    """Raised when exactly one of two compared graphs carries colours."""


@dataclass(frozen=True, order=True)
class CanonicalCode:
    """Orbit-minimal encoding; ordered by colours, then adjacency as a big-endian integer."""

    color_part: Tuple[int, ...]
    adjacency: int

    @property
    def n(self) -> int:
        return len(self.color_part)

    def to_hex(self) -> str:
        colors = "".join(f"{c:02x}" for c in self.color_part)
        width = max(1, -(-pair_count(self.n) // 4))
        return f"{colors}|{self.adjacency:0{width}x}"

    @classmethod
    def from_hex(cls, text: str) -> "CanonicalCode":
        try:
            colors_hex, adjacency_hex = text.strip().split("|")
            if len(colors_hex) % 2:
                raise ValueError("odd-length colour part")
            colors = tuple(int(colors_hex[i : i + 2], 16) for i in range(0, len(colors_hex), 2))
            adjacency = int(adjacency_hex, 16) if adjacency_hex else 0
        except ValueError as exc:
            raise ValueError(f"malformed canonical code {text!r}: {exc}") from exc
        if adjacency >> pair_count(len(colors)):
            raise ValueError(f"adjacency part of {text!r} is too long for {len(colors)} vertices")
        return cls(colors, adjacency)

    def to_graph(self, colored: Optional[bool] = None) -> Graph:
        """Rebuild the orbit-minimal representative.

        Colours are attached when ``colored`` is true, or by default whenever some
        colour is nonzero.
        """

        n = self.n
        total = pair_count(n)
        pairs = pair_list(n)
        edges = tuple(pairs[p] for p in range(total) if self.adjacency >> (total - 1 - p) & 1)
        if colored is None:
            colored = any(self.color_part)
        return Graph(n, edges, self.color_part if colored else None)

    def __str__(self) -> str:
        return self.to_hex()


def encode(graph: Graph) -> CanonicalCode:
    """Code of ``graph`` under its own labeling (no minimization)."""

    total = pair_count(graph.n)
    adjacency = 0
    for u, v in graph.edges:
        adjacency |= 1 << (total - 1 - pair_index(u, v, graph.n))
    return CanonicalCode(graph.color_tuple(), adjacency)


def _bits_to_int(bits: Sequence[int]) -> int:
    value = 0
    for bit in bits:
        value = (value << 1) | int(bit)
    return value


def _check_degree(graph: Graph, group: PermGroup) -> None:
    if graph.n != group.n:
        raise DegreeMismatch(f"group acts on {group.n} points but graph has {graph.n} vertices")


# ----------------------------------------------------------------------
# Minimization over an explicit group
# ----------------------------------------------------------------------
def _lexmin_row(matrix: np.ndarray) -> np.ndarray:
    candidates = np.arange(matrix.shape[0])
    for column in range(matrix.shape[1]):
        values = matrix[candidates, column]
        candidates = candidates[values == values.min()]
        if len(candidates) == 1:
            break
    return matrix[candidates[0]]


def _chunk_minimum(adjacency: np.ndarray, colors: np.ndarray, pa, pb):
    def run(chunk: np.ndarray) -> Tuple[int, ...]:
        inverse = np.argsort(chunk, axis=1)
        bits = adjacency[inverse[:, pa], inverse[:, pb]]
        rows = np.concatenate([colors[inverse], bits], axis=1)
        return tuple(int(x) for x in _lexmin_row(rows))

    return run


def _group_code(graph: Graph, group: PermGroup, workers: int) -> CanonicalCode:
    n = graph.n
    adjacency = np.zeros((n, n), dtype=np.int64)
    for u, v in graph.edges:
        adjacency[u, v] = adjacency[v, u] = 1
    colors = np.asarray(graph.color_tuple(), dtype=np.int64)
    pairs = np.asarray(pair_list(n), dtype=np.int64).reshape(-1, 2)
    run = _chunk_minimum(adjacency, colors, pairs[:, 0], pairs[:, 1])
    best = min(map_element_chunks(run, group, workers))
    return CanonicalCode(best[:n], _bits_to_int(best[n:]))


# ----------------------------------------------------------------------
# Refinement search for the full symmetric group
# ----------------------------------------------------------------------
Cells = Tuple[Tuple[int, ...], ...]


def _twin_representatives(cell: Sequence[int], adjacency: Sequence[int]) -> List[int]:
    """One vertex per class of pairwise twins inside ``cell``."""

    reps: List[int] = []
    for v in cell:
        if not any(
            (adjacency[v] & ~(1 << w)) == (adjacency[w] & ~(1 << v)) for w in reps
        ):
            reps.append(v)
    return reps


def _split(v: int, cells: Cells, adjacency: Sequence[int]) -> Tuple[Tuple[int, ...], Cells]:
    row: List[int] = []
    refined: List[Tuple[int, ...]] = []
    remaining = (tuple(w for w in cells[0] if w != v),) + cells[1:]
    for cell in remaining:
        outside = tuple(w for w in cell if not adjacency[v] >> w & 1)
        inside = tuple(w for w in cell if adjacency[v] >> w & 1)
        row.extend([0] * len(outside) + [1] * len(inside))
        refined.extend(part for part in (outside, inside) if part)
    return tuple(row), tuple(refined)


def symmetric_order(graph: Graph) -> Tuple[int, ...]:
    """A vertex order whose read-out is the S_n orbit minimum.

    Position ``p`` of the result holds the vertex placed at ``p``. Cells start as
    colour classes in ascending colour; each chosen vertex splits every remaining
    cell into non-neighbours followed by neighbours, and only branches with the
    smallest row survive. Twins inside a cell are interchangeable by an
    automorphism, so only one of them is branched on.
    """

    n = graph.n
    if n == 0:
        return ()
    colors = graph.color_tuple()
    adjacency = graph.adjacency
    initial: Cells = tuple(
        tuple(v for v in range(n) if colors[v] == c) for c in sorted(set(colors))
    )
    states: List[Tuple[Tuple[int, ...], Cells]] = [((), initial)]
    for _ in range(n):
        best_row: Optional[Tuple[int, ...]] = None
        survivors: List[Tuple[Tuple[int, ...], Cells]] = []
        for prefix, cells in states:
            for v in _twin_representatives(cells[0], adjacency):
                row, refined = _split(v, cells, adjacency)
                if best_row is None or row < best_row:
                    best_row = row
                    survivors = [(prefix + (v,), refined)]
                elif row == best_row:
                    survivors.append((prefix + (v,), refined))
        states = survivors
    return states[0][0]


def canonical_form(graph: Graph) -> CanonicalCode:
    """Canonical code under the full symmetric group on the graph's vertices."""

    order = symmetric_order(graph)
    colors = graph.color_tuple()
    bits = [
        1 if graph.adjacency[order[p]] >> order[q] & 1 else 0
        for p in range(graph.n)
        for q in range(p + 1, graph.n)
    ]
    return CanonicalCode(tuple(colors[v] for v in order), _bits_to_int(bits))


def canonical_labeling(graph: Graph) -> Tuple[int, ...]:
    """Permutation images ``g`` with ``apply(g, X)`` equal to the S_n representative."""

    order = symmetric_order(graph)
    images = [0] * graph.n
    for position, v in enumerate(order):
        images[v] = position
    return tuple(images)


# ----------------------------------------------------------------------
# Public API
# ----------------------------------------------------------------------
def canonical_code(graph: Graph, group: PermGroup, workers: int = 1) -> CanonicalCode:
    """Minimum over ``g`` in ``group`` of the encoding of ``g(graph)``."""

    _check_degree(graph, group)
    if group.is_symmetric:
        return canonical_form(graph)
    if group.order == 1:
        return encode(graph)
    return _group_code(graph, group, workers)


def _quick_invariants(graph: Graph) -> Tuple:
    degrees = [bin(row).count("1") for row in graph.adjacency]
    return (graph.m, sorted(zip(graph.color_tuple(), degrees)))


def is_G_isomorphic(first: Graph, second: Graph, group: PermGroup, workers: int = 1) -> bool:
    """True when ``second`` lies in the ``group``-orbit of ``first``."""

    if first.n != second.n:
        raise DegreeMismatch(f"graphs have {first.n} and {second.n} vertices")
    _check_degree(first, group)
    if first.is_colored != second.is_colored:
        raise ColorArityMismatch("one graph is coloured and the other is not")
    if _quick_invariants(first) != _quick_invariants(second):
        return False
    if first == second:
        return True
    return canonical_code(first, group, workers) == canonical_code(second, group, workers)


def is_isomorphic(first: Graph, second: Graph) -> bool:
    """Plain isomorphism (the symmetric-group case), without enumerating S_n."""

    if first.n != second.n:
        raise DegreeMismatch(f"graphs have {first.n} and {second.n} vertices")
    if first.is_colored != second.is_colored:
        raise ColorArityMismatch("one graph is coloured and the other is not")
    if _quick_invariants(first) != _quick_invariants(second):
        return False
    return canonical_form(first) == canonical_form(second)


# ----------------------------------------------------------------------
# Automorphism groups
# ----------------------------------------------------------------------
def vertex_classes(graph: Graph) -> List[Tuple]:
    """Isomorphism-invariant vertex labels: colour, degree and WL subgraph hashes."""

    nx_graph = graph.to_networkx()
    nx.set_node_attributes(
        nx_graph, {v: str(c) for v, c in enumerate(graph.color_tuple())}, "color"
    )
    hashes = nx.weisfeiler_lehman_subgraph_hashes(
        nx_graph, node_attr="color", iterations=max(1, graph.n)
    )
    degrees = [bin(row).count("1") for row in graph.adjacency]
    colors = graph.color_tuple()
    return [(colors[v], degrees[v], tuple(hashes.get(v, ()))) for v in range(graph.n)]


def _all_twin_classes(graph: Graph, classes: Dict[Tuple, List[int]]) -> bool:
    adjacency = graph.adjacency
    for members in classes.values():
        for i, u in enumerate(members):
            for w in members[i + 1 :]:
                if (adjacency[u] & ~(1 << w)) != (adjacency[w] & ~(1 << u)):
                    return False
    return True


def _class_product(n: int, blocks: List[List[int]], max_order: int) -> np.ndarray:
    order = math.prod(math.factorial(len(b)) for b in blocks)
    if order > max_order:
        raise OrderCapExceeded(f"automorphism group has order {order}, above the cap {max_order}")
    rows = []
    for choice in product(*(list(permutations(b)) for b in blocks)):
        images = list(range(n))
        for block, image in zip(blocks, choice):
            for v, w in zip(block, image):
                images[v] = w
        rows.append(images)
    return np.asarray(rows, dtype=np.int8)


def _search_order(graph: Graph, sizes: Dict[int, int]) -> List[int]:
    adjacency = graph.adjacency
    order: List[int] = []
    placed = 0
    while len(order) < graph.n:
        best = min(
            (v for v in range(graph.n) if not placed >> v & 1),
            key=lambda v: (-bin(adjacency[v] & placed).count("1"), sizes[v], v),
        )
        order.append(best)
        placed |= 1 << best
    return order


def automorphism_group(graph: Graph, max_order: int = DEFAULT_MAX_ORDER) -> PermGroup:
    """All colour-preserving permutations fixing ``graph``, found by backtracking."""

    n = graph.n
    if n == 0:
        return PermGroup(0, np.zeros((1, 0), dtype=np.int8), tag="aut")
    labels = vertex_classes(graph)
    classes: Dict[Tuple, List[int]] = {}
    for v, label in enumerate(labels):
        classes.setdefault(label, []).append(v)

    if _all_twin_classes(graph, classes):
        # Every within-class permutation is a product of twin transpositions.
        rows = _class_product(n, list(classes.values()), max_order)
        return PermGroup(n, rows, tag="aut")

    adjacency = graph.adjacency
    members = [classes[labels[v]] for v in range(n)]
    order = _search_order(graph, {v: len(members[v]) for v in range(n)})
    mapping = [-1] * n
    found: List[List[int]] = []

    def extend(depth: int, domain: int, used: int) -> None:
        if depth == n:
            found.append(list(mapping))
            if len(found) > max_order:
                raise OrderCapExceeded(f"automorphism group exceeds the cap {max_order}")
            return
        v = order[depth]
        expected = 0
        mapped_neighbours = adjacency[v] & domain
        u = 0
        while mapped_neighbours:
            if mapped_neighbours & 1:
                expected |= 1 << mapping[u]
            mapped_neighbours >>= 1
            u += 1
        for w in members[v]:
            if used >> w & 1 or (adjacency[w] & used) != expected:
                continue
            mapping[v] = w
            extend(depth + 1, domain | (1 << v), used | (1 << w))
            mapping[v] = -1

    extend(0, 0, 0)
    group = PermGroup(n, np.asarray(found, dtype=np.int8), tag="aut")
    get_logger().trace(
        "Computed automorphism group",
        category=LogCategory.GROUP,
        n=n,
        order=group.order,
        classes=len(classes),
    )
    return group


class CodeCache(LoggableMixin):
    """Memoizes canonical codes under one group, keyed by edge mask and colours."""

    def __init__(self, group: PermGroup, workers: int = 1):
        super().__init__()
        self.group = group
        self.workers = workers
        self._codes: Dict[Tuple[int, Optional[Tuple[int, ...]]], CanonicalCode] = {}
        self.hits = 0
        self.misses = 0

    def code(self, graph: Graph) -> CanonicalCode:
        key = (graph.mask, graph.colors)
        cached = self._codes.get(key)
        if cached is not None:
            self.hits += 1
            return cached
        self.misses += 1
        computed = canonical_code(graph, self.group, self.workers)
        self._codes[key] = computed
        return computed

    def __len__(self) -> int:
        return len(self._codes)

    def report(self) -> None:
        self.log_debug(
            "Code cache statistics",
            category=LogCategory.CANONICAL,
            group=self.group.tag,
            entries=len(self._codes),
            hits=self.hits,
            misses=self.misses,
        )


__all__ = [
    "CanonicalCode",
    "CodeCache",
    "ColorArityMismatch",
    "automorphism_group",
    "canonical_code",
    "canonical_form",
    "canonical_labeling",
    "encode",
    "is_G_isomorphic",
    "is_isomorphic",
    "symmetric_order",
    "vertex_classes",
]
