"""Exact distribution computations over exhaustively enumerated labelled trees.

Everything in here works with Fractions: tree masses under the critical
law, the size law through the associated walk, the two re-rooting measure
identities on single-child-root trees, and the census of well-labelled
trees that underlies the quadrangulation counts.  These functions are the
oracles that the samplers are tested against, so they deliberately share
no code with the sampling paths beyond the tree classes themselves.

Measures on labelled trees are represented as dictionaries mapping an atom
(preorder counts, preorder labels) to its exact weight; two measures agree
for every functional exactly when the dictionaries are equal, and reports
additionally spell out a mechanically generated family of functionals so a
failure points at something readable.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Callable, Iterator, Optional, Sequence

from treesnake.gw_sampler import OffspringDistribution, StepDistribution
from treesnake.plane_tree import PlaneTree, enumerate_trees, leaves
from treesnake.spatial_tree import SpatialTree, min_label, reroot_at, spatial_contour

RationalWeight = Fraction

Atom = tuple[tuple[int, ...], tuple]
Functional = tuple[str, Callable[[SpatialTree], Fraction]]


class IrrationalMass(ValueError):
    """Exact enumeration needs exact probabilities."""


def _frac(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def tree_weight(t: PlaneTree, mu: OffspringDistribution) -> Fraction:
    """Mass of one tree under the unconditioned critical law."""
    w = Fraction(1)
    for c in t.counts:
        w *= mu.exact_pmf(c)
    return w


def q_weight(t: PlaneTree, mu: OffspringDistribution) -> Fraction:
    """Relative mass under the single-child-root law: the root factor drops.

    Conditioning on a single-child root divides every mass by mu(1), so the
    weight of a tree is the product of mu over the non-root vertices.  This
    form stays meaningful even when mu(1) = 0.
    """
    if t.counts[0] != 1:
        return Fraction(0)
    w = Fraction(1)
    for c in t.counts[1:]:
        w *= mu.exact_pmf(c)
    return w


def _exact_steps(gamma: StepDistribution) -> list[tuple]:
    if not gamma.exact:
        raise IrrationalMass("the displacement law has no exact finite support")
    return gamma.exact_items()


def labelled_atoms(
    n: int,
    mu: OffspringDistribution,
    gamma: StepDistribution,
    x=0,
    root_single_child: bool = True,
) -> Iterator[tuple[SpatialTree, Fraction]]:
    """All labelled trees with n edges and their exact weights.

    Weights multiply the shape mass (root factor dropped for single-child
    roots) by the displacement probabilities edge by edge; they are
    relative weights of the conditioned laws, summing to the probability
    that the underlying unconditioned size is hit.
    """
    steps = _exact_steps(gamma)
    for t in enumerate_trees(n + 1, root_single_child=root_single_child):
        shape_w = q_weight(t, mu) if root_single_child else tree_weight(t, mu)
        if shape_w == 0:
            continue
        parent = t.parent_index
        if n == 0:
            yield SpatialTree(t, (x,)), shape_w
            continue
        for combo in itertools.product(steps, repeat=n):
            labels = [x] * (n + 1)
            w = shape_w
            for i in range(1, n + 1):
                inc, p = combo[i - 1]
                labels[i] = labels[parent[i]] + inc
                w *= p
            yield SpatialTree(t, tuple(labels)), w


# ---------------------------------------------------------------------------
# size law


def _walk_point_mass(mu: OffspringDistribution, n: int) -> Fraction:
    """P(the associated walk is at -1 after n steps), by exact convolution."""
    dist: dict[int, Fraction] = {0: Fraction(1)}
    top = n  # a step above n - 2 cannot appear on a path ending at -1
    for _ in range(n):
        new: dict[int, Fraction] = {}
        for s, p in dist.items():
            for k in range(-1, top + 1):
                q = mu.step_pmf(k)
                if q:
                    new[s + k] = new.get(s + k, Fraction(0)) + p * q
        dist = {s: p for s, p in new.items() if s <= top}
    return dist.get(-1, Fraction(0))


def verify_size_law(mu: OffspringDistribution, n_max: int) -> dict:
    """Total tree mass at each size against the walk formula mass/n.

    Checks, for sizes 1..n_max, that the summed weights of all trees with n
    vertices equal the point mass of the walk at -1 after n steps, divided
    by n.
    """
    entries = []
    terms = 0
    for n in range(1, n_max + 1):
        lhs = Fraction(0)
        count = 0
        for t in enumerate_trees(n):
            lhs += tree_weight(t, mu)
            count += 1
        rhs = _walk_point_mass(mu, n) / n
        entries.append(
            {
                "n": n,
                "trees": count,
                "lhs": _frac(lhs),
                "rhs": _frac(rhs),
                "equal": lhs == rhs,
            }
        )
        terms += count
    return {
        "identity": "size-law",
        "n": n_max,
        "equal": all(e["equal"] for e in entries),
        "terms": terms,
        "entries": entries,
    }


# ---------------------------------------------------------------------------
# re-rooting identities


def _atom_key(s: SpatialTree) -> Atom:
    return (s.tree.counts, s.labels)


def _atom_tree(key: Atom) -> SpatialTree:
    return SpatialTree(PlaneTree(key[0]), key[1])


def _n_leaves(t: PlaneTree) -> int:
    return len(leaves(t))


def _measure_value(measure: dict[Atom, Fraction], fn) -> Fraction:
    total = Fraction(0)
    for key, w in measure.items():
        total += w * fn(_atom_tree(key))
    return total


def default_functionals(measure: dict[Atom, Fraction]) -> list[Functional]:
    """A mechanical functional family read off a measure's support.

    Includes the constant, indicators of every shape, every leaf count and
    every sorted label multiset present, indicators of the label read at
    contour time 1, and point indicators of the first few atoms.
    """
    fns: list[Functional] = [("total-mass", lambda s: Fraction(1))]
    shapes = sorted({key[0] for key in measure})
    for shape in shapes:
        fns.append(
            (
                "shape=" + ",".join(map(str, shape)),
                lambda s, sh=shape: Fraction(1 if s.tree.counts == sh else 0),
            )
        )
    leafcounts = sorted({_n_leaves(PlaneTree(key[0])) for key in measure})
    for k in leafcounts:
        fns.append(
            ("leaves=" + str(k), lambda s, k=k: Fraction(1 if _n_leaves(s.tree) == k else 0))
        )
    histograms = sorted({tuple(sorted(key[1])) for key in measure})
    for h in histograms[:24]:
        fns.append(
            (
                "labels=" + ",".join(map(str, h)),
                lambda s, h=h: Fraction(1 if tuple(sorted(s.labels)) == h else 0),
            )
        )
    heads = sorted({spatial_contour(_atom_tree(key)).values[1] for key in measure if len(key[0]) > 1})
    for y in heads:
        fns.append(
            (
                "head-label=" + str(y),
                lambda s, y=y: Fraction(
                    1 if s.size > 1 and spatial_contour(s).values[1] == y else 0
                ),
            )
        )
    for key in sorted(measure)[:3]:
        fns.append(
            (
                "atom=" + ",".join(map(str, key[0])) + "|" + ",".join(map(str, key[1])),
                lambda s, k=key: Fraction(1 if _atom_key(s) == k else 0),
            )
        )
    return fns


def _functional_report(
    lhs: dict[Atom, Fraction],
    rhs: dict[Atom, Fraction],
    functionals: Optional[Sequence[Functional]],
) -> list[dict]:
    if functionals is None:
        functionals = default_functionals(rhs if rhs else lhs)
    rows = []
    for name, fn in functionals:
        a = _measure_value(lhs, fn)
        b = _measure_value(rhs, fn)
        rows.append({"name": name, "lhs": _frac(a), "rhs": _frac(b), "equal": a == b})
    return rows


def reroot_measures(
    n: int,
    mu: OffspringDistribution,
    gamma: StepDistribution,
    closed: bool = False,
) -> tuple[dict[Atom, Fraction], dict[Atom, Fraction], int]:
    """The two sides of a re-rooting identity as exact atomic measures.

    Open form (closed=False): push forward by re-rooting at the unique
    overall label argmin when it is a leaf, against the leaf-count-weighted
    restriction to strictly positive non-root labels.

    Closed form (closed=True): sum the push-forwards over every leaf that
    attains the overall minimum, against the leaf-count-weighted
    restriction to nonnegative non-root labels.

    Both run over single-child-root trees with n edges, root label 0, and
    return (lhs, rhs, atom count of the underlying enumeration).
    """
    lhs: dict[Atom, Fraction] = {}
    rhs: dict[Atom, Fraction] = {}
    terms = 0
    for s, w in labelled_atoms(n, mu, gamma, x=0, root_single_child=True):
        terms += 1
        ml = min_label(s, include_root=True)
        leafset = leaves(s.tree)
        if closed:
            for v in ml.argmin:
                if v in leafset:
                    key = _atom_key(reroot_at(s, v))
                    lhs[key] = lhs.get(key, Fraction(0)) + w
        else:
            if len(ml.argmin) == 1 and ml.first in leafset:
                key = _atom_key(reroot_at(s, ml.first))
                lhs[key] = lhs.get(key, Fraction(0)) + w
        nonroot = s.labels[1:]
        ok = all(x >= 0 for x in nonroot) if closed else all(x > 0 for x in nonroot)
        if ok:
            key = _atom_key(s)
            rhs[key] = rhs.get(key, Fraction(0)) + w * _n_leaves(s.tree)
    return lhs, rhs, terms


def _verify_reroot(
    n: int,
    mu: OffspringDistribution,
    gamma: StepDistribution,
    functionals: Optional[Sequence[Functional]],
    closed: bool,
) -> dict:
    lhs, rhs, terms = reroot_measures(n, mu, gamma, closed=closed)
    return {
        "identity": "reroot-closed" if closed else "reroot",
        "n": n,
        "mu": mu.describe(),
        "gamma": gamma.describe(),
        "equal": lhs == rhs,
        "terms": terms,
        "atoms": len(rhs),
        "functionals": _functional_report(lhs, rhs, functionals),
    }


def verify_reroot_identity(
    n: int,
    mu: OffspringDistribution,
    gamma: StepDistribution,
    functionals: Optional[Sequence[Functional]] = None,
) -> dict:
    """Exact check of the open re-rooting identity at n edges."""
    return _verify_reroot(n, mu, gamma, functionals, closed=False)


def verify_reroot_identity_closed(
    n: int,
    mu: OffspringDistribution,
    gamma: StepDistribution,
    functionals: Optional[Sequence[Functional]] = None,
) -> dict:
    """Exact check of the closed (summed over argmin leaves) identity."""
    return _verify_reroot(n, mu, gamma, functionals, closed=True)


# ---------------------------------------------------------------------------
# well-labelled census and leaf statistics


def count_well_labelled(n: int) -> tuple[int, int, Fraction]:
    """Labelled trees with n edges, root label 1, steps in {-1, 0, 1}.

    Returns (all such trees, those with every label at least 1, their
    ratio).  The positive ones are the well-labelled trees, in bijection
    with rooted quadrangulations with n faces.
    """
    if n < 0:
        raise ValueError("edge count must be nonnegative")
    if n == 0:
        return 1, 1, Fraction(1)
    shapes = list(enumerate_trees(n + 1))
    count_all = len(shapes) * 3**n
    count_pos = 0
    for t in shapes:
        parent = t.parent_index
        labels = [0] * (n + 1)
        labels[0] = 1

        def branch(i: int) -> int:
            if i == n + 1:
                return 1
            total = 0
            base = labels[parent[i]]
            for inc in (-1, 0, 1):
                lab = base + inc
                if lab >= 1:
                    labels[i] = lab
                    total += branch(i + 1)
            return total

        count_pos += branch(1)
    return count_all, count_pos, Fraction(count_pos, count_all)


def leaf_count_mean(mu: OffspringDistribution, n: int) -> Fraction:
    """Exact mean leaf count of a size-conditioned tree with n edges."""
    total = Fraction(0)
    weighted = Fraction(0)
    for t in enumerate_trees(n + 1):
        w = tree_weight(t, mu)
        total += w
        weighted += w * _n_leaves(t)
    if total == 0:
        raise UnreachableSizeError(n)
    return weighted / total


class UnreachableSizeError(ValueError):
    def __init__(self, n: int):
        super().__init__(f"size {n + 1} has probability zero")


def conditional_label_law(
    n: int,
    mu: OffspringDistribution,
    gamma: StepDistribution,
    x,
    strict: bool = True,
) -> dict[Atom, Fraction]:
    """Exact law of the labelled tree given n edges and positive labels.

    Atoms are (counts, labels); weights are normalized to total mass one.
    The conditioning keeps non-root labels strictly positive (nonnegative
    with strict=False), the root being pinned at x.
    """
    raw: dict[Atom, Fraction] = {}
    for s, w in labelled_atoms(n, mu, gamma, x=x, root_single_child=False):
        good = (
            all(v > 0 for v in s.labels[1:])
            if strict
            else all(v >= 0 for v in s.labels[1:])
        )
        if good:
            raw[_atom_key(s)] = raw.get(_atom_key(s), Fraction(0)) + w
    total = sum(raw.values(), Fraction(0))
    if total == 0:
        raise UnreachableSizeError(n)
    return {k: w / total for k, w in raw.items()}
