"""Rooted plane trees and their contour walks.

A plane tree is a finite rooted tree in which the children of every vertex
are ordered.  Vertices are addressed by finite tuples of positive integers:
the root is the empty tuple ``()``, and ``v + (i,)`` is the i-th child of
``v``.  Sorting vertices by tuple comparison (a prefix precedes its
extensions) is exactly depth-first preorder, so a tree is stored as the
tuple of child counts read off in that order.

The contour walk records the height of a particle that traverses the tree
left to right at unit speed, visiting each edge twice.  A tree with n
vertices yields 2n - 1 height values, starting and ending at 0 with steps
of +-1, and the encoding is a bijection (``contour_of`` / ``tree_of_contour``).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Sequence

Vertex = tuple[int, ...]

ROOT: Vertex = ()


class InvalidPreorder(ValueError):
    """Child-count sequence is not the preorder encoding of any plane tree."""


class InvalidContour(ValueError):
    """Height sequence is not the contour walk of any plane tree."""


class VertexNotInTree(ValueError):
    """The requested vertex address does not occur in the tree."""


def _check_counts(counts: tuple[int, ...]) -> None:
    if not counts:
        raise InvalidPreorder("empty count sequence, a tree has at least its root")
    running = 0
    last = len(counts) - 1
    for i, c in enumerate(counts):
        if c < 0:
            raise InvalidPreorder(f"negative child count {c} at position {i}")
        running += c - 1
        if running <= -1 and i < last:
            raise InvalidPreorder(
                f"count sequence closes the tree after position {i} "
                f"but {last - i} entries remain"
            )
    if running != -1:
        raise InvalidPreorder(
            f"counts sum to {running + len(counts)} children for {len(counts)} "
            "vertices; a tree needs exactly one less"
        )


@dataclass(frozen=True)
class PlaneTree:
    """A plane tree, canonically stored as preorder child counts."""

    counts: tuple[int, ...]

    def __post_init__(self) -> None:
        _check_counts(self.counts)

    @property
    def size(self) -> int:
        return len(self.counts)

    @property
    def n_edges(self) -> int:
        return len(self.counts) - 1

    @property
    def zeta(self) -> int:
        """Contour walk duration, twice the edge count."""
        return 2 * (len(self.counts) - 1)

    @cached_property
    def vertices(self) -> tuple[Vertex, ...]:
        """All vertex addresses in preorder (= lexicographic order)."""
        verts: list[Vertex] = [ROOT]
        # stack of [address, children spawned so far, children still owed]
        stack: list[list] = [[ROOT, 0, self.counts[0]]]
        for c in self.counts[1:]:
            while stack[-1][2] == 0:
                stack.pop()
            top = stack[-1]
            top[1] += 1
            top[2] -= 1
            child = top[0] + (top[1],)
            verts.append(child)
            stack.append([child, 0, c])
        return tuple(verts)

    @cached_property
    def index_of(self) -> dict[Vertex, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def parent_index(self) -> tuple[int, ...]:
        idx = self.index_of
        return tuple(
            -1 if v == ROOT else idx[v[:-1]] for v in self.vertices
        )

    @cached_property
    def depth(self) -> tuple[int, ...]:
        return tuple(len(v) for v in self.vertices)

    @cached_property
    def children_index(self) -> tuple[tuple[int, ...], ...]:
        kids: list[list[int]] = [[] for _ in self.counts]
        for i, p in enumerate(self.parent_index):
            if p >= 0:
                kids[p].append(i)
        return tuple(tuple(k) for k in kids)

    @cached_property
    def subtree_sizes(self) -> tuple[int, ...]:
        sizes = [1] * len(self.counts)
        for i in range(len(self.counts) - 1, 0, -1):
            sizes[self.parent_index[i]] += sizes[i]
        return tuple(sizes)

    @cached_property
    def contour_order(self) -> tuple[int, ...]:
        """Vertex index under the particle at each contour time 0..zeta."""
        order = [0]
        stack: list[list[int]] = [[0, 0]]  # vertex index, next child slot
        kids = self.children_index
        while stack:
            top = stack[-1]
            if top[1] < len(kids[top[0]]):
                w = kids[top[0]][top[1]]
                top[1] += 1
                order.append(w)
                stack.append([w, 0])
            else:
                stack.pop()
                if stack:
                    order.append(stack[-1][0])
        return tuple(order)

    @cached_property
    def _visits(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        first = [-1] * self.size
        last = [-1] * self.size
        for t, i in enumerate(self.contour_order):
            if first[i] < 0:
                first[i] = t
            last[i] = t
        return tuple(first), tuple(last)

    def __len__(self) -> int:
        return len(self.counts)

    def __repr__(self) -> str:
        return f"PlaneTree({','.join(map(str, self.counts))})"


@dataclass(frozen=True)
class ContourFunction:
    """Heights of the contour particle at integer times 0..zeta."""

    values: tuple[int, ...]

    @property
    def zeta(self) -> int:
        return len(self.values) - 1

    def __len__(self) -> int:
        return len(self.values)


def build_tree(counts: Sequence[int]) -> PlaneTree:
    """Make a tree from preorder child counts, checking they close properly."""
    return PlaneTree(tuple(int(c) for c in counts))


def contour_of(t: PlaneTree) -> ContourFunction:
    depth = t.depth
    return ContourFunction(tuple(depth[i] for i in t.contour_order))


def tree_of_contour(c: ContourFunction | Sequence[int]) -> PlaneTree:
    """Decode a contour walk back into the tree that produced it."""
    values = tuple(c.values if isinstance(c, ContourFunction) else c)
    if len(values) % 2 != 1:
        raise InvalidContour(f"contour length {len(values)} is even")
    if values[0] != 0 or values[-1] != 0:
        raise InvalidContour("contour must start and end at height 0")
    counts = [0]
    stack = [0]
    for i in range(1, len(values)):
        step = values[i] - values[i - 1]
        if step == 1:
            counts[stack[-1]] += 1
            counts.append(0)
            stack.append(len(counts) - 1)
        elif step == -1:
            if len(stack) == 1:
                raise InvalidContour(f"contour dips below 0 at time {i}")
            stack.pop()
        else:
            raise InvalidContour(f"step {step} at time {i}, only +-1 allowed")
    if len(stack) != 1:
        raise InvalidContour("contour walk does not return to the root")
    return PlaneTree(tuple(counts))


def visit_times(t: PlaneTree, v: Vertex) -> tuple[int, int]:
    """First and last time the contour particle sits at v."""
    i = t.index_of.get(tuple(v))
    if i is None:
        raise VertexNotInTree(f"vertex {v} not in {t!r}")
    first, last = t._visits
    return first[i], last[i]


def leaves(t: PlaneTree) -> frozenset[Vertex]:
    """Childless non-root vertices (for a singleton tree, nothing)."""
    return frozenset(
        v for i, v in enumerate(t.vertices) if t.counts[i] == 0 and v != ROOT
    )


def subtree_from(t: PlaneTree, v: Vertex) -> PlaneTree:
    """The subtree hanging at v, re-addressed so v becomes the root."""
    i = t.index_of.get(tuple(v))
    if i is None:
        raise VertexNotInTree(f"vertex {v} not in {t!r}")
    s = t.subtree_sizes[i]
    return PlaneTree(t.counts[i : i + s])


def truncate_at(t: PlaneTree, v: Vertex) -> PlaneTree:
    """The tree with every strict descendant of v removed (v becomes a leaf)."""
    i = t.index_of.get(tuple(v))
    if i is None:
        raise VertexNotInTree(f"vertex {v} not in {t!r}")
    s = t.subtree_sizes[i]
    return PlaneTree(t.counts[:i] + (0,) + t.counts[i + s :])


def _forests(n: int) -> Iterator[tuple[int, ...]]:
    """Concatenated count sequences of ordered forests with n vertices total."""
    if n == 0:
        yield ()
        return
    for first in range(1, n + 1):
        for head in _tree_counts(first):
            for rest in _forests(n - first):
                yield head + rest


def _tree_counts(n: int) -> Iterator[tuple[int, ...]]:
    if n == 1:
        yield (0,)
        return
    for forest in _forests(n - 1):
        k = 0
        running = 0
        # number of trees in the forest = number of times the running
        # child-count balance returns to zero
        for c in forest:
            running += c - 1
            if running == -k - 1:
                k += 1
        yield (k,) + forest


def enumerate_trees(n_vertices: int, root_single_child: bool = False) -> Iterator[PlaneTree]:
    """All plane trees with the given number of vertices, one by one.

    With root_single_child=True only trees whose root has exactly one child
    are produced (none exist for a single vertex).
    """
    if n_vertices < 1:
        raise ValueError(f"need at least one vertex, got {n_vertices}")
    if root_single_child:
        if n_vertices >= 2:
            for sub in _tree_counts(n_vertices - 1):
                yield PlaneTree((1,) + sub)
        return
    for counts in _tree_counts(n_vertices):
        yield PlaneTree(counts)


def tree_to_line(t: PlaneTree) -> str:
    """One-line serialization: comma-separated preorder child counts."""
    return ",".join(map(str, t.counts))


def tree_from_line(line: str) -> PlaneTree:
    try:
        counts = [int(part) for part in line.strip().split(",")]
    except ValueError as exc:
        raise InvalidPreorder(f"unparseable tree line {line!r}") from exc
    return build_tree(counts)
