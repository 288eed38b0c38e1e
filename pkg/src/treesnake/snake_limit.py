"""Discretized Brownian snake: excursion lifetime, Gaussian head, re-rooting.

The snake is simulated on a regular grid of [0,1].  The lifetime process is
a normalized Brownian excursion, generated as a Brownian bridge cyclically
rotated at its minimum.  Conditionally on the lifetime e, the head Z is a
centered Gaussian process with cov(Z(s), Z(s')) equal to the minimum of e
between s and s'; it is sampled exactly on the grid by maintaining the
breakpoints of the historical path as a stack of (level, value) anchors.
Dropping to a level strictly between two anchors pins the value there by a
Brownian bridge in the level variable, and rising from a level adds fresh
centered Gaussian displacement.

Re-rooting at the spatial minimum turns the signed head into a nonnegative
one while permuting head values, so path ranges are preserved sample by
sample; the distribution of the re-rooted pair is the positive
(conditioned) snake, which is the continuum reference object for the
scaling comparisons.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from treesnake.plane_tree import ContourFunction
from treesnake.spatial_tree import SpatialContour


class NonUniqueMinimum(ValueError):
    """The grid minimum of the head is attained more than once."""


class LengthMismatch(ValueError):
    """Contour sequences do not have the expected grid length."""


class EmptySample(ValueError):
    """A sample set handed to a statistic is empty."""


def _read_only(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=np.float64)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class SnakePath:
    """Grid snake: lifetime e and head Z on times i/m, started at Z(0) = r."""

    grid_size: int
    excursion: np.ndarray
    head: np.ndarray
    initial: float = 0.0

    def __post_init__(self) -> None:
        e = _read_only(self.excursion)
        z = _read_only(self.head)
        m = self.grid_size
        if m < 1 or len(e) != m + 1 or len(z) != m + 1:
            raise LengthMismatch(f"want {m + 1} grid values, got {len(e)} and {len(z)}")
        if e[0] != 0.0 or e[-1] != 0.0 or (e < 0).any():
            raise ValueError("lifetime must be a nonnegative excursion")
        if z[0] != self.initial:
            raise ValueError("head must start at the initial value")
        object.__setattr__(self, "excursion", e)
        object.__setattr__(self, "head", z)


@dataclass(frozen=True)
class RescaledPath:
    """Rescaled contour pair on the time grid j/(2n), with its constants."""

    times: np.ndarray
    contour: np.ndarray
    head: np.ndarray
    sigma: float
    rho: float
    kappa: float = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "times", _read_only(self.times))
        object.__setattr__(self, "contour", _read_only(self.contour))
        object.__setattr__(self, "head", _read_only(self.head))
        object.__setattr__(
            self, "kappa", (1.0 / self.rho) * math.sqrt(self.sigma / 2.0)
        )

    def contour_at(self, t) -> np.ndarray:
        return np.interp(t, self.times, self.contour)

    def head_at(self, t) -> np.ndarray:
        return np.interp(t, self.times, self.head)


def _excursion_rows(m: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """Rows of grid excursions: bridge, rotate at the argmin, shift to 0."""
    walk = rng.standard_normal((count, m)) / math.sqrt(m)
    np.cumsum(walk, axis=1, out=walk)
    drift = walk[:, -1:] * (np.arange(1, m + 1) / m)
    bridge = np.empty((count, m + 1))
    bridge[:, 0] = 0.0
    bridge[:, 1:] = walk - drift
    bridge[:, m] = 0.0
    k = np.argmin(bridge[:, :m], axis=1)
    idx = (k[:, None] + np.arange(m + 1)) % m
    rows = np.take_along_axis(bridge[:, :m], idx, axis=1)
    rows -= bridge[np.arange(count), k][:, None]
    rows[:, m] = 0.0
    return rows


def sample_excursion(m: int, rng: np.random.Generator) -> np.ndarray:
    """One normalized Brownian excursion on the grid i/m, i = 0..m."""
    if m < 2:
        raise ValueError("need a grid with at least two steps")
    return _excursion_rows(m, 1, rng)[0]


def _snake_head_rows(
    e: np.ndarray,
    r: float,
    rng: np.random.Generator,
    keep_paths: bool = True,
) -> np.ndarray | tuple[np.ndarray, np.ndarray]:
    """Head rows for excursion rows e, all samples advanced in lock step.

    With keep_paths the full (count, m+1) head array comes back; without it
    only the per-sample running (min, max) pair, which keeps memory flat
    for large batches.  Exactly two standard normals per sample per step
    are consumed either way, so output is reproducible for a given rng.
    """
    count, mp1 = e.shape
    m = mp1 - 1
    depth = 32
    levels = np.zeros((count, depth))
    values = np.zeros((count, depth))
    values[:, 0] = r
    top = np.zeros(count, dtype=np.int64)
    rows = np.arange(count)

    z_cur = np.full(count, float(r))
    if keep_paths:
        z = np.empty((count, mp1))
        z[:, 0] = z_cur
    else:
        z_min = z_cur.copy()
        z_max = z_cur.copy()

    for i in range(m):
        e_next = e[:, i + 1]
        level = np.minimum(e[:, i], e_next)

        # drop anchors above the step minimum, keeping the lowest one dropped
        h1 = np.ones(count)
        w1 = np.zeros(count)
        dropped = np.zeros(count, dtype=bool)
        while True:
            above = levels[rows, top] > level
            if not above.any():
                break
            idx = np.nonzero(above)[0]
            h1[idx] = levels[idx, top[idx]]
            w1[idx] = values[idx, top[idx]]
            dropped[idx] = True
            top[idx] -= 1

        h0 = levels[rows, top]
        w0 = values[rows, top]

        # value at the step minimum: a bridge in the level variable between
        # the surviving anchor and the lowest dropped one, else the anchor
        span = np.where(dropped, h1 - h0, 1.0)
        frac = np.where(dropped, (level - h0) / span, 0.0)
        var = np.where(dropped, (level - h0) * (h1 - level) / span, 0.0)
        w_mid = w0 + frac * (w1 - w0)
        w_mid += np.sqrt(var) * rng.standard_normal(count)

        grew = level > h0
        if grew.any():
            idx = np.nonzero(grew)[0]
            top[idx] += 1
            levels[idx, top[idx]] = level[idx]
            values[idx, top[idx]] = w_mid[idx]

        z_cur = w_mid + np.sqrt(e_next - level) * rng.standard_normal(count)

        rose = e_next > level
        if rose.any():
            idx = np.nonzero(rose)[0]
            top[idx] += 1
            levels[idx, top[idx]] = e_next[idx]
            values[idx, top[idx]] = z_cur[idx]

        if top.max() + 2 >= depth:
            pad = np.zeros((count, depth))
            levels = np.concatenate([levels, pad], axis=1)
            values = np.concatenate([values, pad.copy()], axis=1)
            depth *= 2

        if keep_paths:
            z[:, i + 1] = z_cur
        else:
            np.minimum(z_min, z_cur, out=z_min)
            np.maximum(z_max, z_cur, out=z_max)

    if keep_paths:
        return z
    return z_min, z_max


def sample_snake_head(
    e: np.ndarray, r: float, rng: np.random.Generator
) -> SnakePath:
    """Snake path with lifetime e: the head is exact on the grid given e."""
    e = np.asarray(e, dtype=np.float64)
    z = _snake_head_rows(e[None, :], r, rng)[0]
    return SnakePath(len(e) - 1, e, z, r)


def sample_snake(m: int, rng: np.random.Generator, r: float = 0.0) -> SnakePath:
    """Fresh excursion and head in one call."""
    return sample_snake_head(sample_excursion(m, rng), r, rng)


def verwaat_reroot(p: SnakePath) -> SnakePath:
    """Re-root the snake at the spatial minimum of its head.

    The new head reads the old one cyclically from the argmin, shifted to
    start at 0, and the new lifetime at offset j is the tree distance
    between the old positions, computed from minima of e over the plain
    (non-cyclic) index interval between them.  Requires a path started at
    0 and a unique grid argmin.
    """
    if p.initial != 0.0:
        raise ValueError("re-rooting is defined for paths started at 0")
    e = p.excursion
    z = p.head
    m = p.grid_size
    low = z.min()
    hits = np.nonzero(z[:m] == low)[0]
    if len(hits) != 1:
        raise NonUniqueMinimum(f"head minimum attained {len(hits)} times on the grid")
    star = int(hits[0])

    u = (star + np.arange(m + 1)) % m
    z_new = z[u] - z[star]

    forward_min = np.minimum.accumulate(e[star:])
    backward_min = np.minimum.accumulate(e[: star + 1][::-1])[::-1]
    between = np.where(
        u >= star,
        forward_min[np.clip(u - star, 0, len(forward_min) - 1)],
        backward_min[np.minimum(u, star)],
    )
    e_new = e[star] + e[u] - 2.0 * between
    e_new[0] = 0.0
    e_new[m] = 0.0
    return SnakePath(m, e_new, z_new, 0.0)


def sample_positive_snake(
    m: int, rng: np.random.Generator, max_regenerations: int = 8
) -> SnakePath:
    """Nonnegative snake: re-rooted draw, regenerating on grid argmin ties."""
    for _ in range(max_regenerations):
        try:
            return verwaat_reroot(sample_snake(m, rng))
        except NonUniqueMinimum:
            continue
    raise NonUniqueMinimum(
        f"grid minimum still tied after {max_regenerations} regenerations"
    )


def sample_extrema(
    m: int,
    count: int,
    rng: np.random.Generator,
    batch: int = 2048,
) -> tuple[np.ndarray, np.ndarray]:
    """Per-sample (sup, inf) of the head over count independent snakes.

    Works in batches so the paths themselves are never all in memory; the
    sup and inf determine the range and, through the re-rooting identity,
    the sup of the positive snake as well.
    """
    sups = np.empty(count)
    infs = np.empty(count)
    done = 0
    while done < count:
        take = min(batch, count - done)
        e = _excursion_rows(m, take, rng)
        z_min, z_max = _snake_head_rows(e, 0.0, rng, keep_paths=False)
        sups[done : done + take] = z_max
        infs[done : done + take] = z_min
        done += take
    return sups, infs


def rescale_discrete(
    c: ContourFunction,
    v: SpatialContour,
    n: int,
    sigma: float,
    rho: float,
) -> RescaledPath:
    """Rescaled versions of a discrete contour pair on the grid j/(2n).

    The contour is shrunk by (sigma/2) n^(-1/2) and the spatial contour by
    kappa n^(-1/4) with kappa = (1/rho) sqrt(sigma/2); between grid points
    the rescaled path is evaluated by linear interpolation.
    """
    cv = np.asarray(c.values, dtype=np.float64)
    vv = np.asarray(v.values, dtype=np.float64)
    if len(cv) != 2 * n + 1 or len(vv) != 2 * n + 1:
        raise LengthMismatch(
            f"want {2 * n + 1} contour values for n={n}, got {len(cv)} and {len(vv)}"
        )
    kappa = (1.0 / rho) * math.sqrt(sigma / 2.0)
    times = np.arange(2 * n + 1) / (2 * n)
    return RescaledPath(
        times,
        (sigma / 2.0) * cv / math.sqrt(n),
        kappa * vv / n**0.25,
        sigma,
        rho,
    )


def ks_two_sample(a: np.ndarray, b: np.ndarray) -> float:
    """Two-sample Kolmogorov-Smirnov statistic, the sup gap of empirical CDFs."""
    a = np.sort(np.asarray(a, dtype=np.float64))
    b = np.sort(np.asarray(b, dtype=np.float64))
    if len(a) == 0 or len(b) == 0:
        raise EmptySample("both sample sets must be nonempty")
    grid = np.concatenate([a, b])
    cdf_a = np.searchsorted(a, grid, side="right") / len(a)
    cdf_b = np.searchsorted(b, grid, side="right") / len(b)
    return float(np.abs(cdf_a - cdf_b).max())


def ks_report(a: np.ndarray, b: np.ndarray, threshold: float) -> dict:
    """Comparison report in the shape used by the command line tools."""
    stat = ks_two_sample(a, b)
    return {
        "statistic": stat,
        "n_a": int(len(np.asarray(a))),
        "n_b": int(len(np.asarray(b))),
        "threshold": threshold,
        "pass": bool(stat <= threshold),
    }


@dataclass(frozen=True)
class SnakeFunctionals:
    """Path functionals: extremes and the grid occupation measures."""

    sup: float
    inf: float
    range: float
    occupation: tuple[np.ndarray, np.ndarray]
    shifted_occupation: tuple[np.ndarray, np.ndarray]


def functionals(p: SnakePath, bins: int = 64) -> SnakeFunctionals:
    """Sup, inf, range of the head plus its occupation histograms.

    The occupation measure puts mass 1/m on the head value at each grid
    time left of a step; the shifted variant does the same for the head
    minus its infimum.  Both histograms therefore sum to 1.
    """
    z = p.head
    lo = float(z.min())
    hi = float(z.max())
    left = z[:-1]
    weights = np.full(len(left), 1.0 / p.grid_size)
    occ = np.histogram(left, bins=bins, weights=weights)
    shifted = np.histogram(left - lo, bins=bins, weights=weights)
    return SnakeFunctionals(hi, lo, hi - lo, occ, shifted)


def samples_csv(values: np.ndarray) -> str:
    """One-column CSV of sample values."""
    lines = ["value"]
    lines.extend(repr(float(v)) for v in np.asarray(values))
    return "\n".join(lines) + "\n"
