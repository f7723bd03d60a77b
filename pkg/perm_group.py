"""Explicit permutations and fully enumerated permutation groups.

A :class:`PermGroup` stores every element as one row of an ``int8`` array
(row ``r`` holds the images ``g(0), ..., g(n-1)``), sorted lexicographically.
Keeping the complete element list makes every downstream computation exact:
orbit minima, overlap histograms and automorphism filters are vectorized
passes over that array, optionally split into chunks that run on a thread
pool.
"""

from __future__ import annotations

import math
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import cached_property
from itertools import chain, permutations
from typing import Callable, Iterable, Iterator, List, Optional, Sequence, Tuple, TypeVar, Union

import numpy as np

from graph_core import CapacityError, Graph, pair_count, pair_list
from logger import LogCategory, get_logger

DEFAULT_MAX_ORDER = math.factorial(10)
DEFAULT_CHUNK_SIZE = 1 << 15

T = TypeVar("T")


class GroupError(ValueError):
    """Base error for permutation and group operations."""


class InvalidPermutation(GroupError):
    """Raised when an image sequence is not a bijection on ``0..n-1``."""


class BadCycleNotation(GroupError):
    """Raised when cycle notation cannot be parsed."""


class DegreeMismatch(GroupError):
    """Raised when a group and a graph act on different numbers of points."""


class NotInvariant(GroupError):
    """Raised when a group element moves a vertex set off itself."""


class OrderCapExceeded(GroupError, CapacityError):
    """Raised when a group would grow past the configured order cap."""


# ----------------------------------------------------------------------
# Permutations
# ----------------------------------------------------------------------
_CYCLE_RE = re.compile(r"\(([^()]*)\)")


@dataclass(frozen=True, order=True)
class Permutation:
    """A bijection on ``0..n-1``; position ``i`` of ``images`` holds ``g(i)``."""

    images: Tuple[int, ...]

    def __post_init__(self) -> None:
        images = tuple(int(x) for x in self.images)
        if sorted(images) != list(range(len(images))):
            raise InvalidPermutation(f"{images} is not a permutation of 0..{len(images) - 1}")
        object.__setattr__(self, "images", images)

    @property
    def n(self) -> int:
        return len(self.images)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(n)))

    @classmethod
    def from_cycles(cls, text: str, n: int) -> "Permutation":
        """Parse cycle notation such as ``"(0 1)(2 3)"``; fixed points may be omitted."""

        stripped = text.strip()
        images = list(range(n))
        if not stripped:
            return cls(tuple(images))
        if _CYCLE_RE.sub("", stripped).strip():
            raise BadCycleNotation(f"unexpected text outside cycles in {text!r}")
        seen: set = set()
        for body in _CYCLE_RE.findall(stripped):
            try:
                points = [int(tok) for tok in body.replace(",", " ").split()]
            except ValueError as exc:
                raise BadCycleNotation(f"non-integer point in cycle ({body})") from exc
            for p in points:
                if not 0 <= p < n:
                    raise BadCycleNotation(f"point {p} outside 0..{n - 1}")
                if p in seen:
                    raise BadCycleNotation(f"point {p} appears in more than one cycle")
                seen.add(p)
            for i, p in enumerate(points):
                images[p] = points[(i + 1) % len(points)]
        return cls(tuple(images))

    def __call__(self, point: int) -> int:
        return self.images[point]

    def compose(self, other: "Permutation") -> "Permutation":
        """Return ``self ∘ other`` (apply ``other`` first)."""

        if other.n != self.n:
            raise DegreeMismatch(f"cannot compose degrees {self.n} and {other.n}")
        return Permutation(tuple(self.images[i] for i in other.images))

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for i, image in enumerate(self.images):
            inv[image] = i
        return Permutation(tuple(inv))

    def cycles(self) -> List[Tuple[int, ...]]:
        """Non-trivial cycles, each starting at its smallest point."""

        seen = [False] * self.n
        result = []
        for start in range(self.n):
            if seen[start]:
                continue
            cycle = [start]
            seen[start] = True
            nxt = self.images[start]
            while nxt != start:
                cycle.append(nxt)
                seen[nxt] = True
                nxt = self.images[nxt]
            if len(cycle) > 1:
                result.append(tuple(cycle))
        return result

    def cycle_notation(self) -> str:
        cycles = self.cycles()
        if not cycles:
            return "()"
        return "".join("(" + " ".join(str(p) for p in c) + ")" for c in cycles)

    def is_even(self) -> bool:
        return sum(len(c) - 1 for c in self.cycles()) % 2 == 0

    @property
    def is_identity(self) -> bool:
        return all(i == image for i, image in enumerate(self.images))

    def __str__(self) -> str:
        return self.cycle_notation()


def _as_images(perm: Union[Permutation, Sequence[int]]) -> Tuple[int, ...]:
    return perm.images if isinstance(perm, Permutation) else Permutation(tuple(perm)).images


# ----------------------------------------------------------------------
# Groups
# ----------------------------------------------------------------------
class PermGroup:
    """A permutation group with its complete, lexicographically sorted element list."""

    def __init__(
        self,
        n: int,
        elements: np.ndarray,
        generators: Iterable[Permutation] = (),
        tag: str = "",
    ):
        if n:
            array = np.unique(np.asarray(elements, dtype=np.int8).reshape(-1, n), axis=0)
        else:
            array = np.zeros((1, 0), dtype=np.int8)
        array.setflags(write=False)
        self.n = n
        self.elements = array
        self.generators: Tuple[Permutation, ...] = tuple(generators)
        self.tag = tag or f"group(order={len(array)})"

    @property
    def order(self) -> int:
        return int(self.elements.shape[0])

    def __len__(self) -> int:
        return self.order

    def __iter__(self) -> Iterator[Permutation]:
        for row in self.elements:
            yield Permutation(tuple(int(x) for x in row))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PermGroup):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.elements, other.elements)

    def __hash__(self) -> int:
        return hash((self.n, self.elements.tobytes()))

    def __repr__(self) -> str:
        return f"PermGroup(n={self.n}, order={self.order}, tag={self.tag!r})"

    @cached_property
    def _keys(self) -> frozenset:
        return frozenset(row.tobytes() for row in self.elements)

    @cached_property
    def inverse_elements(self) -> np.ndarray:
        """Row ``r`` holds the images of the inverse of element ``r``."""

        if self.n == 0:
            return self.elements
        return np.argsort(self.elements, axis=1).astype(np.int8)

    @property
    def is_symmetric(self) -> bool:
        return self.order == math.factorial(self.n)

    def contains(self, perm: Union[Permutation, Sequence[int]]) -> bool:
        images = _as_images(perm)
        if len(images) != self.n:
            return False
        return np.asarray(images, dtype=np.int8).tobytes() in self._keys

    def is_subgroup_of(self, other: "PermGroup") -> bool:
        return self.n == other.n and self._keys <= other._keys

    def chunks(self, chunk_size: int = DEFAULT_CHUNK_SIZE) -> List[np.ndarray]:
        return [self.elements[i : i + chunk_size] for i in range(0, self.order, chunk_size)]

    def with_tag(self, tag: str) -> "PermGroup":
        clone = PermGroup.__new__(PermGroup)
        clone.n = self.n
        clone.elements = self.elements
        clone.generators = self.generators
        clone.tag = tag
        return clone


def map_element_chunks(
    fn: Callable[[np.ndarray], T],
    group: PermGroup,
    workers: int = 1,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> List[T]:
    """Run ``fn`` over contiguous element chunks; results come back in chunk order."""

    chunks = group.chunks(chunk_size)
    if workers <= 1 or len(chunks) <= 1:
        return [fn(chunk) for chunk in chunks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, chunks))


def _check_cap(order: int, max_order: int, what: str) -> None:
    if order > max_order:
        raise OrderCapExceeded(f"{what} has order {order}, above the cap {max_order}")


def _all_permutations(points: Sequence[int]) -> np.ndarray:
    k = len(points)
    count = math.factorial(k)
    flat = np.fromiter(
        chain.from_iterable(permutations(points)), dtype=np.int8, count=count * k
    )
    return flat.reshape(count, k)


def trivial(n: int) -> PermGroup:
    return PermGroup(n, np.arange(n, dtype=np.int8).reshape(1, n), tag="trivial")


def symmetric(n: int, max_order: int = DEFAULT_MAX_ORDER) -> PermGroup:
    if n < 1:
        raise GroupError("symmetric groups need at least one point")
    _check_cap(math.factorial(n), max_order, f"S_{n}")
    return PermGroup(n, _all_permutations(range(n)), tag="S")


def _parities(elements: np.ndarray) -> np.ndarray:
    """Inversion-count parity of each row (0 even, 1 odd)."""

    n = elements.shape[1]
    parity = np.zeros(elements.shape[0], dtype=np.int64)
    for i in range(n):
        for j in range(i + 1, n):
            parity += elements[:, i] > elements[:, j]
    return parity % 2


def alternating(n: int, max_order: int = DEFAULT_MAX_ORDER) -> PermGroup:
    if n < 1:
        raise GroupError("alternating groups need at least one point")
    order = max(1, math.factorial(n) // 2)
    _check_cap(order, max_order, f"A_{n}")
    everything = _all_permutations(range(n))
    return PermGroup(n, everything[_parities(everything) == 0], tag="A")


def aut_complete_bipartite(s: int, t: int, max_order: int = DEFAULT_MAX_ORDER) -> PermGroup:
    """Automorphisms of K_{s,t} with parts ``0..s-1`` and ``s..s+t-1``."""

    if s < 1 or t < 1:
        raise GroupError("both parts of K_{s,t} must be nonempty")
    order = math.factorial(s) * math.factorial(t) * (2 if s == t else 1)
    _check_cap(order, max_order, f"aut K_{{{s},{t}}}")
    left = _all_permutations(range(s))
    right = _all_permutations(range(s, s + t))
    rows = np.concatenate(
        [np.repeat(left, len(right), axis=0), np.tile(right, (len(left), 1))], axis=1
    )
    if s == t:
        swap = np.concatenate([np.arange(s, 2 * s), np.arange(s)]).astype(np.int64)
        rows = np.concatenate([rows, rows[:, swap]], axis=0)
    return PermGroup(s + t, rows, tag=f"autKst:{s},{t}")


def closure(
    n: int,
    generators: Iterable[Union[Permutation, Sequence[int]]],
    max_order: int = DEFAULT_MAX_ORDER,
    tag: str = "",
) -> PermGroup:
    """Breadth-first product closure of ``generators`` on ``n`` points."""

    gens: List[Permutation] = []
    for gen in generators:
        perm = gen if isinstance(gen, Permutation) else Permutation(tuple(gen))
        if perm.n != n:
            raise InvalidPermutation(f"generator {perm.images} does not act on {n} points")
        gens.append(perm)
    gen_arrays = [np.asarray(g.images, dtype=np.int64) for g in gens if not g.is_identity]

    identity = np.arange(n, dtype=np.int8).reshape(1, n)
    seen = {identity[0].tobytes()}
    found = [identity]
    frontier = identity
    while len(frontier) and gen_arrays:
        products = np.concatenate([gen[frontier] for gen in gen_arrays]).astype(np.int8)
        products = np.unique(products, axis=0)
        fresh = [row for row in products if row.tobytes() not in seen]
        if not fresh:
            break
        for row in fresh:
            seen.add(row.tobytes())
        _check_cap(len(seen), max_order, "generated group")
        frontier = np.stack(fresh)
        found.append(frontier)
    group = PermGroup(n, np.concatenate(found), generators=gens, tag=tag)
    get_logger().debug(
        "Closed permutation group",
        category=LogCategory.GROUP,
        n=n,
        generators=len(gens),
        order=group.order,
    )
    return group


def from_elements(n: int, rows: Iterable[Sequence[int]], tag: str = "") -> PermGroup:
    """Wrap an element list already known to be closed (e.g. a filtered subgroup)."""

    array = np.asarray(list(rows), dtype=np.int8)
    if array.size == 0:
        return trivial(n)
    return PermGroup(n, array, tag=tag)


# ----------------------------------------------------------------------
# Graph actions
# ----------------------------------------------------------------------
def pair_indices(a: np.ndarray, b: np.ndarray, n: int) -> np.ndarray:
    """Vectorized lexicographic pair index of unordered pairs ``{a, b}``."""

    a = a.astype(np.int64)
    b = b.astype(np.int64)
    lo = np.minimum(a, b)
    hi = np.maximum(a, b)
    return lo * (2 * n - lo - 1) // 2 + (hi - lo - 1)


def _check_degree(group: PermGroup, graph: Graph) -> None:
    if group.n != graph.n:
        raise DegreeMismatch(f"group acts on {group.n} points but graph has {graph.n} vertices")


def apply(g: Union[Permutation, Sequence[int]], graph: Graph) -> Graph:
    """Image of ``graph`` under ``g``: edge ``(u, v)`` becomes ``(g(u), g(v))``."""

    images = _as_images(g)
    if len(images) != graph.n:
        raise DegreeMismatch(
            f"permutation acts on {len(images)} points but graph has {graph.n} vertices"
        )
    edges = tuple((images[u], images[v]) for u, v in graph.edges)
    colors = None
    if graph.colors is not None:
        moved = [0] * graph.n
        for v, c in enumerate(graph.colors):
            moved[images[v]] = c
        colors = tuple(moved)
    return Graph(graph.n, edges, colors)


def fixes_graph_mask(elements: np.ndarray, graph: Graph) -> np.ndarray:
    """Boolean mask of rows mapping ``graph`` onto itself (colours respected)."""

    keep = np.ones(elements.shape[0], dtype=bool)
    if graph.m:
        on_edges = np.zeros(pair_count(graph.n), dtype=bool)
        ends = np.asarray(graph.edges, dtype=np.int64)
        on_edges[pair_indices(ends[:, 0], ends[:, 1], graph.n)] = True
        moved = pair_indices(elements[:, ends[:, 0]], elements[:, ends[:, 1]], graph.n)
        keep &= on_edges[moved].all(axis=1)
    if graph.colors is not None:
        colors = np.asarray(graph.colors, dtype=np.int64)
        keep &= (colors[elements.astype(np.int64)] == colors).all(axis=1)
    return keep


def group_intersect_aut(group: PermGroup, graph: Graph, workers: int = 1) -> PermGroup:
    """The subgroup of ``group`` fixing ``graph`` (``G ∩ aut X``)."""

    _check_degree(group, graph)
    if graph.n == 0:
        return group
    masks = map_element_chunks(lambda chunk: fixes_graph_mask(chunk, graph), group, workers)
    keep = np.concatenate(masks)
    return PermGroup(graph.n, group.elements[keep], tag=f"{group.tag}∩aut")


def restrict_to(group: PermGroup, vertices: Iterable[int]) -> PermGroup:
    """Group induced on an invariant vertex set, relabeled ascending to ``0..|S|-1``."""

    subset = sorted(set(vertices))
    for v in subset:
        if not 0 <= v < group.n:
            raise NotInvariant(f"vertex {v} outside 0..{group.n - 1}")
    if not subset:
        raise NotInvariant("cannot restrict to an empty vertex set")
    inside = np.zeros(group.n, dtype=bool)
    inside[subset] = True
    images = group.elements[:, subset].astype(np.int64)
    if not inside[images].all():
        raise NotInvariant(f"some element moves {subset} off itself")
    relabel = np.full(group.n, -1, dtype=np.int64)
    relabel[subset] = np.arange(len(subset))
    return PermGroup(len(subset), relabel[images], tag=f"{group.tag}|S")


def orbit(graph: Graph, group: PermGroup) -> List[Graph]:
    """Distinct images of ``graph`` under ``group``, sorted by edge mask then colours."""

    _check_degree(group, graph)
    seen = {}
    for row in group.elements:
        image = apply(tuple(int(x) for x in row), graph)
        seen.setdefault((image.mask, image.colors), image)
    return [seen[key] for key in sorted(seen, key=lambda k: (k[0], k[1] or ()))]


def edge_image_table(group: PermGroup) -> np.ndarray:
    """``table[r, p]``: pair index of the image of pair ``p`` under element ``r``."""

    pairs = np.asarray(pair_list(group.n), dtype=np.int64).reshape(-1, 2)
    return pair_indices(group.elements[:, pairs[:, 0]], group.elements[:, pairs[:, 1]], group.n)


__all__ = [
    "BadCycleNotation",
    "DEFAULT_MAX_ORDER",
    "DegreeMismatch",
    "GroupError",
    "InvalidPermutation",
    "NotInvariant",
    "OrderCapExceeded",
    "PermGroup",
    "Permutation",
    "alternating",
    "apply",
    "aut_complete_bipartite",
    "closure",
    "edge_image_table",
    "fixes_graph_mask",
    "from_elements",
    "group_intersect_aut",
    "map_element_chunks",
    "orbit",
    "pair_indices",
    "restrict_to",
    "symmetric",
    "trivial",
]
