"""Multi-scale box hierarchy, descendant index sets, tree counts and probes.

Level-n boxes are ``B_{n,x} = x + [0, L_n)^d`` with ``L_n = l0^n L0`` and x on
the L_n-grid (multiples of L_n, in lattice coordinates). A node (k, y) of a
cascade tree has one child in ``H1(k, y)``, a sub-box touching the inner
boundary of ``B_{k,y}``, and one in ``H2(k, y)``, a sub-box meeting the
l-inf sphere at distance ``floor(L_k / 2)`` around ``B_{k,y}``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._backend import kernels
from .fri import PaddingPolicy, edgewise_params, padding_radius, reach_bound
from .lattice import Box, EdgeSet, Point, as_point, check_dim, shell_count, tripled_box
from .percolation import box_crossing
from .randomness import SeedSpec, _check_T, survival_probability
from .stats import EstimateCI
from . import _pykernels as pk

INT64_MAX = 2 ** 63 - 1


@dataclass(frozen=True)
class ScaleHierarchy:
    L0: int
    l0: int
    levels: int
    d: int = 3

    def __post_init__(self):
        if self.L0 < 1:
            raise ValueError("L0 must be positive")
        if self.l0 < 2:
            raise ValueError("l0 must be at least 2")
        if self.levels < 0:
            raise ValueError("levels must be non-negative")
        if self.L(self.levels) * 3 > INT64_MAX:
            raise OverflowError("scale L_n exceeds 64-bit lattice coordinates")

    def L(self, n: int) -> int:
        if not 0 <= n <= self.levels + 1:
            raise ValueError(f"level {n} outside 0..{self.levels + 1}")
        return self.l0 ** n * self.L0

    def box(self, n: int, x: Sequence[int]) -> Box:
        Ln = self.L(n)
        x = as_point(x)
        if len(x) != self.d or any(c % Ln for c in x):
            raise ValueError(f"{x} is not a level-{n} grid point")
        return Box(x, Ln)


def _check_level(n: int) -> None:
    if n < 1:
        raise ValueError("descendant sets need n >= 1")


def h1_indices(n: int, x: Sequence[int], h: ScaleHierarchy) -> set[Point]:
    """Level-(n-1) grid points whose boxes lie in B_{n,x} and touch its inner boundary."""
    _check_level(n)
    B = h.box(n, x)
    step = h.L(n - 1)
    out = set()
    for j in itertools.product(range(h.l0), repeat=h.d):
        if any(c == 0 or c == h.l0 - 1 for c in j):
            out.add(tuple(c + step * t for c, t in zip(B.corner, j)))
    return out


def _axis_dist_range(lo: int, hi: int, a: int, b: int) -> tuple[int, int]:
    """Min and max over z in [a, b] of the 1-d distance from z to [lo, hi]."""
    def f(z):
        return max(lo - z, z - hi, 0)
    if b < lo:
        return f(b), f(a)
    if a > hi:
        return f(a), f(b)
    return 0, max(f(a), f(b))


def h2_indices(n: int, x: Sequence[int], h: ScaleHierarchy) -> set[Point]:
    """Level-(n-1) grid points whose boxes meet ``{z : d(z, B_{n,x}) = floor(L_n/2)}``.

    The l-inf distance to a box is the maximum of per-axis distances, so over a
    product box its range is ``[max_k min_k, max_k max_k]``; since it changes
    by at most one between neighbours, every value in the range is attained.
    """
    _check_level(n)
    B = h.box(n, x)
    Ln, step = h.L(n), h.L(n - 1)
    R = Ln // 2
    lo = B.corner
    hi = tuple(c + Ln - 1 for c in lo)
    reach = R + step
    axes = []
    for k in range(h.d):
        first = (lo[k] - reach) // step
        last = (hi[k] + reach) // step
        cand = []
        for g in range(first, last + 1):
            a = g * step
            mn, mx = _axis_dist_range(lo[k], hi[k], a, a + step - 1)
            if mn <= R:
                cand.append((a, mn, mx))
        axes.append(cand)
    out = set()
    for combo in itertools.product(*axes):
        mn = max(c[1] for c in combo)
        mx = max(c[2] for c in combo)
        if mn <= R <= mx:
            out.add(tuple(c[0] for c in combo))
    return out


def h2_indices_bruteforce(n: int, x: Sequence[int], h: ScaleHierarchy) -> set[Point]:
    """Same set, by listing every sphere point and mapping it to its grid box."""
    B = h.box(n, x)
    Ln, step = h.L(n), h.L(n - 1)
    R = Ln // 2
    out = set()
    ranges = [range(c - R, c + Ln + R) for c in B.corner]
    for z in itertools.product(*ranges):
        dist = max(max(c - t, t - (c + Ln - 1), 0) for t, c in zip(z, B.corner))
        if dist == R:
            out.add(tuple((t // step) * step for t in z))
    return out


def level_counts(n: int, h: ScaleHierarchy) -> tuple[int, int]:
    """(|H1|, |H2|) at level n; both are translation invariant on the L_n-grid."""
    origin = (0,) * h.d
    return len(h1_indices(n, origin, h)), len(h2_indices(n, origin, h))


def lambda_count(n: int, h: ScaleHierarchy) -> int:
    """Exact number of cascade trees rooted at a level-n box (arbitrary precision)."""
    if n < 0:
        raise ValueError("level must be non-negative")
    count = 1
    for k in range(1, n + 1):
        a, b = level_counts(k, h)
        count = a * b * count * count
    return count


@dataclass(frozen=True)
class LambdaTree:
    """A cascade tree: its root and its set of (level, grid point) nodes."""

    root: tuple
    nodes: frozenset

    def at_level(self, k: int) -> list[Point]:
        return sorted(p for (j, p) in self.nodes if j == k)


def enumerate_trees(n: int, x: Sequence[int], h: ScaleHierarchy) -> list[LambdaTree]:
    """Every cascade tree rooted at (n, x); for n <= 1 only."""
    x = as_point(x)
    if n == 0:
        return [LambdaTree((0, x), frozenset({(0, x)}))]
    if n > 1:
        raise ValueError("explicit tree listing is limited to n <= 1")
    root = (1, x)
    return [LambdaTree(root, frozenset({root, (0, a), (0, b)}))
            for a in sorted(h1_indices(1, x, h)) for b in sorted(h2_indices(1, x, h))]


def lambda_count_enumerated(n: int, h: ScaleHierarchy) -> int:
    """Count distinct trees without the translation-invariance shortcut (n <= 2).

    For n = 2 each child subtree set is listed explicitly at its own location.
    Distinct child choices give distinct trees because the level-0 nodes
    reachable from H1 children and from H2 children never coincide (checked);
    the count is then the sum over child pairs of the product of subtree counts.
    """
    origin = (0,) * h.d
    if n <= 1:
        return len({t.nodes for t in enumerate_trees(n, origin, h)})
    if n != 2:
        raise ValueError("enumeration is limited to n <= 2")
    ys1 = sorted(h1_indices(2, origin, h))
    ys2 = sorted(h2_indices(2, origin, h))

    def subtrees(y):
        a_set, b_set = h1_indices(1, y, h), h2_indices(1, y, h)
        trees = {(y, a, b) for a in a_set for b in b_set}
        return len(trees), a_set | b_set

    c1, leaves1 = zip(*(subtrees(y) for y in ys1)) if ys1 else ((), ())
    c2, leaves2 = zip(*(subtrees(y) for y in ys2)) if ys2 else ((), ())
    all1 = set().union(*leaves1)
    all2 = set().union(*leaves2)
    if all1 & all2 or set(ys1) & set(ys2):
        raise RuntimeError("child subtrees overlap; trees are not determined by their node sets")
    return sum(c1) * sum(c2)


def lambda_bound_margin(n: int, h: ScaleHierarchy) -> float:
    """Smallest c0 with |Lambda_k| <= (c0 * l0^(2(d-1)))^(2^k) for k = 1..n."""
    if n < 1:
        raise ValueError("margin needs n >= 1")
    scale = h.l0 ** (2 * (h.d - 1))
    best = 0.0
    for k in range(1, n + 1):
        root = math.exp(math.log(lambda_count(k, h)) / 2 ** k)
        best = max(best, root / scale)
    return best


# ---------------------------------------------------------------------------
# Monte Carlo probes


def _check_probe(u: float, T: float, d: int) -> None:
    check_dim(d)
    _check_T(T)
    if u < 0:
        raise ValueError("intensity u must be non-negative")


def probe_crossing(u: float, T: float, n: int, h: ScaleHierarchy, replicas: int,
                   stream: SeedSpec, policy: PaddingPolicy | None = None) -> EstimateCI:
    """Fraction of replicas in which B_{n,0} crosses to the boundary of its tripled box."""
    _check_probe(u, T, h.d)
    policy = policy or PaddingPolicy()
    B = h.box(n, (0,) * h.d)
    W = tripled_box(B)
    if u == 0:
        return EstimateCI.from_counts(0, replicas)
    pad = padding_radius(W, u, T, policy)
    params = edgewise_params(h.d, u, T)
    inner = W.box_mask(B)
    bnd = W.boundary_mask()
    hits = 0
    for r in range(replicas):
        bits = kernels.sample_fri(pk.MODE_EDGEWISE, h.d, W.corner, W.side, pad, params,
                                  stream.child(r).key, False, False)[0]
        hits += bool(kernels.reach(bits, h.d, W.side, inner, bnd))
    return EstimateCI.from_counts(hits, replicas)


def decoupling_regions(n: int, h: ScaleHierarchy) -> tuple[Box, Box]:
    """(tripled box B~, its L_{n+1}-neighbourhood B^) for the level-n box at 0."""
    W = tripled_box(h.box(n, (0,) * h.d))
    return W, W.expand(h.L(n + 1))


def probe_decoupling_defect(u: float, T: float, n: int, h: ScaleHierarchy, replicas: int,
                            stream: SeedSpec, policy: PaddingPolicy | None = None) -> EstimateCI:
    """Fraction of replicas with some fiber born outside B^ reaching B~."""
    _check_probe(u, T, h.d)
    policy = policy or PaddingPolicy()
    if u == 0:
        return EstimateCI.from_counts(0, replicas)
    W, Bhat = decoupling_regions(n, h)
    pad = padding_radius(Bhat, u, T, policy)
    outer = Bhat.expand(pad)
    rate = 2 * h.d * u / (T + 1.0)
    q = survival_probability(T)
    hits = 0
    for r in range(replicas):
        c = kernels.far_fiber_hits(h.d, outer.corner, outer.side, Bhat.corner, Bhat.side,
                                   W.corner, W.side, rate, q, stream.child(r).key)
        hits += c > 0
    return EstimateCI.from_counts(hits, replicas)


def decoupling_envelope(u: float, T: float, n: int, h: ScaleHierarchy) -> float:
    """Union bound on P(defect): expected number of far-born fibers reaching B~."""
    W, _ = decoupling_regions(n, h)
    rate = 2 * h.d * u / (T + 1.0)
    total = 0.0
    r = h.L(n + 1) + 1
    while True:
        term = shell_count(h.d, W.side, r) * rate * reach_bound(T, h.d, r)
        total += term
        if term < 1e-16 * max(total, 1e-300) or term == 0.0:
            return min(total, 1.0)
        r += 1
