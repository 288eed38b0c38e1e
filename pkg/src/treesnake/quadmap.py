"""Rooted planar quadrangulations and their well-labelled tree encoding.

A rooted map is stored combinatorially: darts 0..4n-1, a rotation sigma
giving the next dart around its vertex, a fixed-point-free involution
alpha pairing the two darts of each edge, and a distinguished root dart.
Faces are the orbits of sigma composed with alpha; a quadrangulation with
n faces has every face of degree four, 2n edges and, by Euler's count,
n + 2 vertices.

The forward construction turns a well-labelled tree (n edges, root label
1, every label at least 1, labels changing by at most 1 along edges) into
a quadrangulation: each of the 2n tree corners, read along the contour,
shoots an arc to the next corner with label one lower, label-1 corners
aiming at one extra vertex.  Those arcs are the edges of the map; the tree
edges are scaffolding only.  The local arc order follows from drawing the
arcs without crossings in the region around the tree: arc ends at a corner
sort by how far away their other endpoint sits along the contour cycle.
The inverse walks the faces of the map: each face contributes exactly one
tree edge, read off its label pattern around the face.  The handedness
conventions below are frozen by the round-trip and distance validation
battery in the tests; flipping any of them breaks face degrees or the
round trip on small cases.

Distances in the map from the extra vertex coincide with the tree labels,
which is what makes the encoding useful for metric questions.
"""

from __future__ import annotations

import itertools
import json
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Optional

import numpy as np

from treesnake.gw_sampler import (
    OffspringDistribution,
    StepDistribution,
    sample_conditioned_batch,
)
from treesnake.plane_tree import PlaneTree, enumerate_trees
from treesnake.spatial_tree import SpatialTree

# Handedness conventions, pinned by the exhaustive validation battery in the
# tests: flipping any one of them breaks face degrees or the round trip on
# trees with up to four edges, and flipping all three builds the mirror image.
_MIRROR = False  # False keeps child order; True would build the mirror image
_SCAN_FORWARD = True  # inverse reads edge fans by ascending angular offset
_SIMPLE_EDGE_AT_MAX = False  # simple faces: tree edge enters the highest corner


class NotWellLabelled(ValueError):
    """Input tree is not well-labelled (root 1, labels >= 1, steps within 1)."""


class NotAQuadrangulation(ValueError):
    """Dart structure is not a rooted planar quadrangulation."""


@dataclass(frozen=True)
class PlanarQuadrangulation:
    """Rooted quadrangulation with n faces as a dart rotation system."""

    n: int
    sigma: tuple[int, ...]
    alpha: tuple[int, ...]
    root_dart: int

    def __post_init__(self) -> None:
        m = 4 * self.n
        if self.n < 1:
            raise NotAQuadrangulation("need at least one face")
        if len(self.sigma) != m or len(self.alpha) != m:
            raise NotAQuadrangulation(f"expected {m} darts")
        if not (0 <= self.root_dart < m):
            raise NotAQuadrangulation("root dart out of range")

    @cached_property
    def vertex_of(self) -> tuple[int, ...]:
        """Vertex id of each dart's origin, ids in discovery order of sigma orbits."""
        out = [-1] * (4 * self.n)
        nxt = 0
        for d in range(4 * self.n):
            if out[d] >= 0:
                continue
            e = d
            while out[e] < 0:
                out[e] = nxt
                e = self.sigma[e]
            nxt += 1
        return tuple(out)

    @property
    def n_vertices(self) -> int:
        return max(self.vertex_of) + 1

    @cached_property
    def faces(self) -> tuple[tuple[int, ...], ...]:
        """Orbits of the face permutation (alpha then sigma)."""
        seen = [False] * (4 * self.n)
        out = []
        for d in range(4 * self.n):
            if seen[d]:
                continue
            cyc = []
            e = d
            while not seen[e]:
                seen[e] = True
                cyc.append(e)
                e = self.sigma[self.alpha[e]]
            out.append(tuple(cyc))
        return tuple(out)

    def validate(self) -> None:
        """Full structural check; raises NotAQuadrangulation on any failure."""
        m = 4 * self.n
        if sorted(self.sigma) != list(range(m)):
            raise NotAQuadrangulation("sigma is not a permutation")
        for d in range(m):
            a = self.alpha[d]
            if not (0 <= a < m) or a == d or self.alpha[a] != d:
                raise NotAQuadrangulation("alpha is not a fixed-point-free involution")
        # connectivity over the dart graph
        seen = {0}
        todo = [0]
        while todo:
            d = todo.pop()
            for e in (self.sigma[d], self.alpha[d]):
                if e not in seen:
                    seen.add(e)
                    todo.append(e)
        if len(seen) != m:
            raise NotAQuadrangulation("dart structure is not connected")
        for f in self.faces:
            if len(f) != 4:
                raise NotAQuadrangulation(f"face of degree {len(f)}, want 4")
        v = self.n_vertices
        if v - 2 * self.n + len(self.faces) != 2:
            raise NotAQuadrangulation("Euler count fails, the map is not planar")


def _well_labelled_or_raise(wt: SpatialTree) -> None:
    labels = wt.labels
    if wt.tree.n_edges < 1:
        raise NotWellLabelled("need at least one edge")
    if labels[0] != 1:
        raise NotWellLabelled(f"root label {labels[0]}, want 1")
    parent = wt.tree.parent_index
    for i in range(wt.tree.size):
        l = labels[i]
        if not isinstance(l, (int, np.integer)) or l < 1:
            raise NotWellLabelled(f"label {l!r} at vertex {wt.tree.vertices[i]}")
        if i and abs(l - labels[parent[i]]) > 1:
            raise NotWellLabelled(
                f"labels jump by {abs(l - labels[parent[i]])} along an edge"
            )


def enumerate_well_labelled(n: int) -> Iterator[SpatialTree]:
    """Every well-labelled tree with n edges, in plane-tree enumeration order."""
    if n < 1:
        raise ValueError("need at least one edge")
    for tree in enumerate_trees(n + 1):
        parent = tree.parent_index
        for incs in itertools.product((-1, 0, 1), repeat=n):
            labels = [1] + [0] * n
            for i in range(1, n + 1):
                l = labels[parent[i]] + incs[i - 1]
                if l < 1:
                    break
                labels[i] = l
            else:
                yield SpatialTree(tree, tuple(labels))


def cvs_build(wt: SpatialTree, n: Optional[int] = None) -> PlanarQuadrangulation:
    """Quadrangulation encoded by a well-labelled tree with n faces... edges.

    Arc j belongs to corner j and carries darts 2j (at the corner) and
    2j+1 (at the successor corner, or at the extra vertex for label-1
    corners).  The root dart is the extra-vertex end of the root corner's
    arc, so the root vertex of the map is the extra vertex.
    """
    _well_labelled_or_raise(wt)
    if n is None:
        n = wt.tree.n_edges
    elif n != wt.tree.n_edges:
        raise ValueError(f"tree has {wt.tree.n_edges} edges, not {n}")
    two_n = 2 * n
    order = wt.tree.contour_order
    cv = [order[t] for t in range(two_n)]  # vertex index per corner
    lab = [wt.labels[i] for i in cv]

    # successor corner: next corner cyclically with label one lower
    succ: list[int] = [-1] * two_n
    next_at: dict[int, int] = {}
    for t in range(2 * two_n - 1, -1, -1):
        tt = t % two_n
        if t < two_n and lab[tt] >= 2:
            succ[tt] = next_at[lab[tt] - 1]
        next_at[lab[tt]] = tt

    # each arc leaves its corner hugging the contour's forward direction and
    # lands at the opening of its successor corner, freshly started arcs
    # sliding in closest to the tree; sweeping a corner in contour direction
    # therefore meets landed arcs from the latest-started inward, then the
    # corner's own outgoing arc on the far flank
    landed: list[list[tuple[int, int]]] = [[] for _ in range(two_n)]
    to_a0: list[int] = []
    for t in range(two_n):
        if lab[t] == 1:
            to_a0.append(2 * t + 1)
        else:
            s = succ[t]
            landed[s].append(((t - s) % two_n, 2 * t + 1))

    # corners of each tree vertex in contour order
    corners: list[list[int]] = [[] for _ in range(wt.tree.size)]
    for t in range(two_n):
        corners[cv[t]].append(t)

    m = 4 * n
    sigma = [-1] * m

    def close_cycle(darts: list[int]) -> None:
        if _MIRROR:
            darts = darts[::-1]
        for i, d in enumerate(darts):
            sigma[d] = darts[(i + 1) % len(darts)]

    # rotations are written in sweep order, the orientation for which the
    # composite of the edge pairing followed by the rotation traces faces;
    # the extra vertex collects its spokes in reverse corner order because
    # later spokes had less far to travel and arrive nearest the tree
    for v in range(wt.tree.size):
        rot: list[int] = []
        for t in corners[v]:
            rot.extend(d for _, d in sorted(landed[t], reverse=True))
            rot.append(2 * t)
        close_cycle(rot)
    close_cycle(to_a0[::-1])

    return PlanarQuadrangulation(n, tuple(sigma), tuple(alpha_of(m)), 1)


def alpha_of(m: int) -> tuple[int, ...]:
    """The pairing 2i <-> 2i+1 used by the builder's dart numbering."""
    out = []
    for i in range(0, m, 2):
        out.extend((i + 1, i))
    return tuple(out)


def _bfs_distances(q: PlanarQuadrangulation, start_vertex: int) -> np.ndarray:
    origin = q.vertex_of
    nv = q.n_vertices
    adj: list[list[int]] = [[] for _ in range(nv)]
    for d in range(4 * q.n):
        adj[origin[d]].append(origin[q.alpha[d]])
    dist = np.full(nv, -1, dtype=np.int64)
    dist[start_vertex] = 0
    todo = deque([start_vertex])
    while todo:
        v = todo.popleft()
        for w in adj[v]:
            if dist[w] < 0:
                dist[w] = dist[v] + 1
                todo.append(w)
    if (dist < 0).any():
        raise NotAQuadrangulation("map is not connected")
    return dist


@dataclass(frozen=True)
class DistanceProfile:
    """Distances from the root vertex: radius and counts per distance."""

    n: int
    radius: int
    counts: dict[int, int]

    def rescaled(self) -> tuple[np.ndarray, np.ndarray]:
        """Support scaled by n^(-1/4), masses over the n+1 non-root vertices."""
        ks = np.array(sorted(k for k in self.counts if k > 0), dtype=np.float64)
        mass = np.array([self.counts[int(k)] for k in ks], dtype=np.float64)
        return ks / self.n**0.25, mass / (self.n + 1)


def distances(q: PlanarQuadrangulation) -> DistanceProfile:
    dist = _bfs_distances(q, q.vertex_of[q.root_dart])
    vals, counts = np.unique(dist, return_counts=True)
    return DistanceProfile(
        q.n,
        int(dist.max()),
        {int(v): int(c) for v, c in zip(vals, counts)},
    )


def profile_csv(profile: DistanceProfile) -> str:
    """Distance profile as CSV rows of distance,count."""
    lines = ["distance,count"]
    for k in sorted(profile.counts):
        lines.append(f"{k},{profile.counts[k]}")
    return "\n".join(lines) + "\n"


def canonical_code(q: PlanarQuadrangulation) -> bytes:
    """Root-preserving isomorphism invariant: rotation-respecting traversal.

    Vertices are numbered in discovery order starting from the root dart;
    each visited vertex emits the numbers of its neighbours in rotation
    order starting from its entry dart.  Two maps get the same code exactly
    when a root-dart-preserving isomorphism matches them.
    """
    origin = q.vertex_of
    num = {origin[q.root_dart]: 0}
    queue = deque([q.root_dart])
    chunks: list[str] = []
    seen_vertex = {origin[q.root_dart]}
    while queue:
        d0 = queue.popleft()
        row = []
        d = d0
        while True:
            w = origin[q.alpha[d]]
            if w not in num:
                num[w] = len(num)
                queue.append(q.alpha[d])
                seen_vertex.add(w)
            row.append(num[w])
            d = q.sigma[d]
            if d == d0:
                break
        chunks.append(",".join(map(str, row)))
    return (f"q{q.n}:" + ";".join(chunks)).encode()


# ---------------------------------------------------------------------------
# inverse construction


def cvs_inverse(q: PlanarQuadrangulation) -> SpatialTree:
    """Well-labelled tree encoding a quadrangulation, inverse of cvs_build.

    Labels are graph distances from the root vertex.  Every face donates
    one tree edge read from its label pattern: a face seen from its lowest
    corner reads (l, l+1, l+2, l+1) (the edge joins the l+2 corner to one
    of its l+1 neighbours) or (l, l+1, l, l+1) (the edge is the diagonal
    between the two l+1 corners).  The embedded tree is reassembled from
    the angular positions of those edge ends around each vertex.
    """
    q.validate()
    origin = q.vertex_of
    a0 = origin[q.root_dart]
    dist = _bfs_distances(q, a0)

    # position of each dart in its rotation cycle
    pos = [0] * (4 * q.n)
    cycle_len = [0] * q.n_vertices
    for d in range(4 * q.n):
        if cycle_len[origin[d]]:
            continue
        e = d
        i = 0
        while True:
            pos[e] = i
            i += 1
            e = q.sigma[e]
            if e == d:
                break
        cycle_len[origin[d]] = i

    # one tree edge per face: ends are (vertex, angular key)
    edges: list[tuple[tuple[int, float], tuple[int, float]]] = []
    for face in q.faces:
        labs = [int(dist[origin[d]]) for d in face]
        imin = min(range(4), key=lambda i: labs[i])
        l = labs[imin]
        rot = [face[(imin + i) % 4] for i in range(4)]
        pattern = [labs[(imin + i) % 4] for i in range(4)]
        if pattern == [l, l + 1, l + 2, l + 1]:
            d = rot[2] if _SIMPLE_EDGE_AT_MAX else rot[1]
            edges.append(
                (
                    (origin[d], float(pos[d])),
                    (origin[q.alpha[d]], float(pos[q.alpha[d]])),
                )
            )
        elif pattern == [l, l + 1, l, l + 1]:
            ends = []
            for i in (1, 3):
                e = q.alpha[rot[i - 1]]  # arriving dart at the corner vertex
                ends.append((origin[rot[i]], pos[e] + 0.5))
            edges.append((ends[0], ends[1]))
        else:
            raise NotAQuadrangulation(f"face label pattern {pattern} is impossible")

    # group edge ends around each vertex
    fan: dict[int, list[tuple[float, int, int]]] = {}
    for eid, (end_a, end_b) in enumerate(edges):
        for (v, key), (w, _) in ((end_a, end_b), (end_b, end_a)):
            fan.setdefault(v, []).append((key, eid, w))
    if a0 in fan or len(edges) != q.n:
        raise NotAQuadrangulation("face edges do not avoid the root vertex")

    root = origin[q.alpha[q.root_dart]]

    def ordered_from(v: int, start: float, skip_eid: int) -> list[tuple[int, int]]:
        """Edges at v in rotation order strictly after the angular start."""
        items = fan.get(v, [])
        period = cycle_len[v]

        def angle(key: float) -> float:
            delta = (key - start) % period
            return delta if _SCAN_FORWARD else period - delta

        out = sorted(
            (angle(key), eid, w) for key, eid, w in items if eid != skip_eid
        )
        return [(eid, w) for _, eid, w in out]

    # rebuild the embedded tree from the root, children in rotation order
    counts: list[int] = []
    labels: list[int] = []
    start_key = float(pos[q.alpha[q.root_dart]])
    stack = [(root, start_key, -1)]
    order_guard = 0
    while stack:
        v, start, skip = stack.pop()
        kids = ordered_from(v, start, skip)
        counts.append(len(kids))
        labels.append(int(dist[v]))
        for eid, w in reversed(kids):
            # the child's own fan starts from this edge's key at the child
            (va, ka), (vb, kb) = edges[eid]
            child_key = ka if (va == w) else kb
            stack.append((w, child_key, eid))
        order_guard += 1
        if order_guard > q.n + 1:
            raise NotAQuadrangulation("face edges do not form a tree")
    if len(counts) != q.n + 1:
        raise NotAQuadrangulation("face edges do not span the map")
    tree = PlaneTree(tuple(counts))
    wt = SpatialTree(tree, tuple(labels))
    _well_labelled_or_raise(wt)
    return wt


# ---------------------------------------------------------------------------
# serialization


def quad_to_json(q: PlanarQuadrangulation) -> str:
    cycles = []
    seen = [False] * (4 * q.n)
    for d in range(4 * q.n):
        if seen[d]:
            continue
        cyc = []
        e = d
        while not seen[e]:
            seen[e] = True
            cyc.append(e)
            e = q.sigma[e]
        cycles.append(cyc)
    pairs = sorted({tuple(sorted((d, q.alpha[d]))) for d in range(4 * q.n)})
    return json.dumps(
        {
            "n": q.n,
            "darts": 4 * q.n,
            "sigma": cycles,
            "alpha": [list(p) for p in pairs],
            "root_dart": q.root_dart,
        }
    )


def quad_from_json(text: str) -> PlanarQuadrangulation:
    obj = json.loads(text)
    n = int(obj["n"])
    m = 4 * n
    if obj.get("darts", m) != m:
        raise NotAQuadrangulation("dart count disagrees with the face count")
    sigma = [-1] * m
    for cyc in obj["sigma"]:
        for i, d in enumerate(cyc):
            if not (0 <= d < m) or sigma[d] != -1:
                raise NotAQuadrangulation("bad rotation cycles")
            sigma[d] = cyc[(i + 1) % len(cyc)]
    if -1 in sigma:
        raise NotAQuadrangulation("rotation misses darts")
    alpha = [-1] * m
    for a, b in obj["alpha"]:
        if not (0 <= a < m and 0 <= b < m) or alpha[a] != -1 or alpha[b] != -1 or a == b:
            raise NotAQuadrangulation("bad edge pairs")
        alpha[a], alpha[b] = b, a
    if -1 in alpha:
        raise NotAQuadrangulation("edge pairs miss darts")
    q = PlanarQuadrangulation(n, tuple(sigma), tuple(alpha), int(obj["root_dart"]))
    q.validate()
    return q


# ---------------------------------------------------------------------------
# sampling

_GEO = OffspringDistribution.geometric_half()
_U3 = StepDistribution.uniform3()


def sample_uniform_quad(
    n: int,
    rng: np.random.Generator,
    max_rejections: int = 50_000_000,
) -> PlanarQuadrangulation:
    """One uniform rooted quadrangulation with n faces.

    The geometric offspring law makes the size-conditioned tree uniform
    over shapes and the label steps uniform, so conditioning labels to
    stay positive is exactly the uniform well-labelled tree, and the
    encoding pushes that to the uniform quadrangulation.
    """
    trees, _ = sample_conditioned_batch(
        _GEO, _U3, n, 1, 1, rng, strict=True, max_attempts=max_rejections
    )
    return cvs_build(trees[0], n)


def sample_radius_and_distance(
    n: int,
    samples: int,
    rng: np.random.Generator,
) -> tuple[np.ndarray, np.ndarray, int]:
    """Radii and root-to-uniform-vertex distances of uniform quadrangulations.

    Returns (radii, distances, attempts): one radius and one distance from
    the root vertex to a uniformly chosen other vertex per sampled map,
    plus the number of rejection attempts behind the accepted sample.
    """
    trees, attempts = sample_conditioned_batch(
        _GEO, _U3, n, 1, samples, rng, strict=True
    )
    radii = np.empty(samples, dtype=np.int64)
    dists = np.empty(samples, dtype=np.int64)
    picks = rng.integers(0, n + 1, size=samples)
    for i, wt in enumerate(trees):
        q = cvs_build(wt, n)
        root = q.vertex_of[q.root_dart]
        dist = _bfs_distances(q, root)
        radii[i] = dist.max()
        k = picks[i]
        dists[i] = dist[k if k < root else k + 1]
    return radii, dists, attempts
