"""Plane trees carrying a real label on every vertex.

Labels play the role of spatial positions: a labelled tree is a pair (T, U)
with U defined on the vertices of T.  The label walk V is the label read
along the contour of T, the discrete analogue of the head of a path-valued
process.  The central operation here is re-rooting: given a distinguished
vertex v0, the tree is re-read from v0's first visit, producing a new tree
whose root is v0, whose labels are shifted so the new root sits at 0, and
which drops the strict descendants of v0.  Everything is computed from the
two contour sequences in linear time.

Labels may be ints, Fractions or floats; the transforms only add and
subtract, so exact types stay exact.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Mapping, NamedTuple, Union

from treesnake.plane_tree import (
    ROOT,
    PlaneTree,
    Vertex,
    VertexNotInTree,
    subtree_from,
    tree_of_contour,
    visit_times,
)

Label = Union[int, float, Fraction]


class SingletonTree(ValueError):
    """Operation needs at least one non-root vertex."""


class EmptyVertex(ValueError):
    """The root has no companion address."""


class RootNotAllowed(ValueError):
    """Re-rooting at the current root is a no-op and is rejected."""


class RootAboveLevel(ValueError):
    """Exit decomposition requires the root to sit strictly below the level."""


@dataclass(frozen=True)
class SpatialTree:
    """A plane tree together with one label per vertex, in preorder."""

    tree: PlaneTree
    labels: tuple[Label, ...]

    def __post_init__(self) -> None:
        if len(self.labels) != self.tree.size:
            raise ValueError(
                f"{len(self.labels)} labels for {self.tree.size} vertices"
            )

    @classmethod
    def from_mapping(cls, tree: PlaneTree, labels: Mapping[Vertex, Label]) -> "SpatialTree":
        try:
            seq = tuple(labels[v] for v in tree.vertices)
        except KeyError as exc:
            raise ValueError(f"no label for vertex {exc.args[0]}") from exc
        return cls(tree, seq)

    @property
    def root_label(self) -> Label:
        return self.labels[0]

    @cached_property
    def by_vertex(self) -> dict[Vertex, Label]:
        return dict(zip(self.tree.vertices, self.labels))

    def label_of(self, v: Vertex) -> Label:
        i = self.tree.index_of.get(tuple(v))
        if i is None:
            raise VertexNotInTree(f"vertex {v} not in {self.tree!r}")
        return self.labels[i]

    @property
    def size(self) -> int:
        return self.tree.size


@dataclass(frozen=True)
class SpatialContour:
    """Labels under the contour particle at integer times 0..zeta."""

    values: tuple[Label, ...]

    def __len__(self) -> int:
        return len(self.values)


class MinLabel(NamedTuple):
    value: Label
    argmin: tuple[Vertex, ...]
    first: Vertex


@dataclass(frozen=True)
class ExitSubtree:
    """One component hanging above the exit level, rooted at its exit vertex."""

    vertex: Vertex
    subtree: SpatialTree


@dataclass(frozen=True)
class ExitDecomposition:
    level: Label
    truncated: SpatialTree
    exits: tuple[ExitSubtree, ...]

    @property
    def count(self) -> int:
        return len(self.exits)


def spatial_contour(s: SpatialTree) -> SpatialContour:
    labels = s.labels
    return SpatialContour(tuple(labels[i] for i in s.tree.contour_order))


def min_label(s: SpatialTree, include_root: bool = True) -> MinLabel:
    """Minimum label, the set of vertices attaining it, and the first of them.

    With include_root=False the minimum runs over the non-root vertices only,
    which is undefined on a singleton tree.
    """
    start = 0 if include_root else 1
    if start >= s.size:
        raise SingletonTree("no non-root vertices to minimize over")
    best = min(s.labels[start:])
    arg = tuple(
        s.tree.vertices[i]
        for i in range(start, s.size)
        if s.labels[i] == best
    )
    return MinLabel(best, arg, arg[0])


def companion_vertex(v0: Vertex) -> Vertex:
    """Address of the old root after re-rooting at v0 = (j1, ..., jp)."""
    v0 = tuple(v0)
    if not v0:
        raise EmptyVertex("the root does not move, it has no companion")
    return (1,) + tuple(reversed(v0[1:]))


def reroot_at(s: SpatialTree, v0: Vertex) -> SpatialTree:
    """Re-read (T, U) from the first visit of v0.

    The result has v0 as its root with label 0, keeps every vertex of T that
    is not a strict descendant of v0 (labels shifted by -U(v0)), and reverses
    the ancestral line of v0.  Runs in time linear in the contour length.
    """
    v0 = tuple(v0)
    if v0 == ROOT:
        raise RootNotAllowed("already the root")
    t = s.tree
    if v0 not in t.index_of:
        raise VertexNotInTree(f"vertex {v0} not in {t!r}")
    k, l = visit_times(t, v0)
    zeta = t.zeta
    depth = t.depth
    contour = [depth[i] for i in t.contour_order]
    values = [s.labels[i] for i in t.contour_order]
    zhat = zeta - (l - k)

    new_c: list[int] = []
    new_v: list[Label] = []
    # first leg: contour times u = k, k-1, ..., 0; the walked interval is
    # [u, k] and its running minimum extends one step at a time
    running = contour[k]
    for u in range(k, -1, -1):
        if contour[u] < running:
            running = contour[u]
        new_c.append(contour[k] + contour[u] - 2 * running)
        new_v.append(values[u] - values[k])
    # second leg: u = zeta-1 down to l, interval [k, u], minima precomputed
    if zhat > k:
        minfrom = [0] * (zeta + 1)
        running = contour[k]
        for j in range(k, zeta + 1):
            if contour[j] < running:
                running = contour[j]
            minfrom[j] = running
        for u in range(zeta - 1, l - 1, -1):
            new_c.append(contour[k] + contour[u] - 2 * minfrom[u])
            new_v.append(values[u] - values[k])
    # new_c was built in time order already: index t' runs 0..zhat
    assert len(new_c) == zhat + 1
    that = tree_of_contour(new_c)
    first, _ = that._visits
    labels = tuple(new_v[first[i]] for i in range(that.size))
    # every visit of a vertex must read the same label
    if __debug__:
        for time, i in enumerate(that.contour_order):
            assert new_v[time] == labels[i]
    return SpatialTree(that, labels)


def exit_decompose(s: SpatialTree, a: Label) -> ExitDecomposition:
    """Split (T, U) at the level a.

    An exit vertex has label >= a while all its strict ancestors sit below a.
    The decomposition keeps the tree truncated at the exits (each exit
    becomes a leaf, keeping its label) and the list of subtrees hanging at
    them, in left-to-right order, with their original labels.
    """
    if not s.labels[0] < a:
        raise RootAboveLevel(f"root label {s.labels[0]} is not below {a}")
    t = s.tree
    blocked = [False] * t.size  # some strict ancestor is already at or above a
    exits: list[int] = []
    for i in range(1, t.size):
        p = t.parent_index[i]
        blocked[i] = blocked[p] or s.labels[p] >= a
        if not blocked[i] and s.labels[i] >= a:
            exits.append(i)
    exit_set = set(exits)

    new_counts: list[int] = []
    new_labels: list[Label] = []
    i = 0
    while i < t.size:
        if i in exit_set:
            new_counts.append(0)
            new_labels.append(s.labels[i])
            i += t.subtree_sizes[i]
        else:
            new_counts.append(t.counts[i])
            new_labels.append(s.labels[i])
            i += 1
    truncated = SpatialTree(PlaneTree(tuple(new_counts)), tuple(new_labels))

    parts = []
    for i in exits:
        v = t.vertices[i]
        size = t.subtree_sizes[i]
        sub = SpatialTree(subtree_from(t, v), s.labels[i : i + size])
        parts.append(ExitSubtree(v, sub))
    return ExitDecomposition(a, truncated, tuple(parts))


def reassemble(d: ExitDecomposition) -> SpatialTree:
    """Inverse of exit_decompose, used to check the split loses nothing."""
    t = d.truncated.tree
    by_vertex = {e.vertex: e for e in d.exits}
    counts: list[int] = []
    labels: list[Label] = []
    for i, v in enumerate(t.vertices):
        e = by_vertex.get(v)
        if e is None:
            counts.append(t.counts[i])
            labels.append(d.truncated.labels[i])
        else:
            counts.extend(e.subtree.tree.counts)
            labels.extend(e.subtree.labels)
    return SpatialTree(PlaneTree(tuple(counts)), tuple(labels))


def _label_to_json(x: Label):
    if isinstance(x, Fraction):
        if x.denominator == 1:
            return int(x)
        return f"{x.numerator}/{x.denominator}"
    return x


def _label_from_json(x) -> Label:
    if isinstance(x, str):
        num, _, den = x.partition("/")
        return Fraction(int(num), int(den) if den else 1)
    return x


def spatial_to_json(s: SpatialTree) -> str:
    """Serialize as {"counts": [...], "labels": [...]}, exact rationals as "p/q"."""
    return json.dumps(
        {
            "counts": list(s.tree.counts),
            "labels": [_label_to_json(x) for x in s.labels],
        }
    )


def spatial_from_json(line: str) -> SpatialTree:
    obj = json.loads(line)
    tree = PlaneTree(tuple(int(c) for c in obj["counts"]))
    labels = tuple(_label_from_json(x) for x in obj["labels"])
    return SpatialTree(tree, labels)


def contour_csv(s: SpatialTree) -> str:
    """Two-column text form of the label walk: time, label at that time."""
    rows = ["t,value"]
    for t, x in enumerate(spatial_contour(s).values):
        rows.append(f"{t},{_label_to_json(x)}")
    return "\n".join(rows) + "\n"
