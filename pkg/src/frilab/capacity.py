"""Potential theory of the killed walk: hitting fields, escape probabilities, capacity.

The hitting field ``g(y) = P_y(H_K < inf)`` solves ``g = 1`` on K and
``g(y) = q/(2d) * sum_{z ~ y} g(z)`` off K, with ``q = T/(T+1)``. It is computed
on a box around K with ``g = 0`` outside; the truncation only loses walks that
reach the box boundary, whose probability is bounded by
:func:`frilab.fri.reach_bound`.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from ._backend import kernels
from .fri import reach_bound
from .lattice import Box, Point, as_point, neighbors
from .randomness import SeedSpec, _check_T, survival_probability

DEFAULT_TOL = 1e-8
MAX_UNKNOWNS = 4_000_000


@dataclass
class HittingField:
    """``values[domain.index(y)] = P_y(H_K < inf)`` for y in ``domain``; 0 outside."""

    domain: Box
    values: np.ndarray
    K: frozenset
    T: float
    tol: float

    def __getitem__(self, y: Sequence[int]) -> float:
        y = as_point(y)
        if y in self.K:
            return 1.0
        if y not in self.domain:
            return 0.0
        return float(self.values[self.domain.index(y)])


def _prepare(K: Iterable[Sequence[int]]) -> frozenset:
    K = frozenset(as_point(p) for p in K)
    if not K:
        raise ValueError("capacity of an empty set is undefined")
    if len({len(p) for p in K}) != 1:
        raise ValueError("points of K have mixed dimensions")
    return K


def truncation_radius(T: float, d: int, tol: float) -> int:
    """Smallest r with reach_bound(T, d, r + 1) <= tol / 2."""
    r = 0
    while reach_bound(T, d, r + 1) > tol / 2:
        r += 1
    return r


def hitting_field(K: Iterable[Sequence[int]], T: float, tol: float = DEFAULT_TOL) -> HittingField:
    K = _prepare(K)
    T = _check_T(T)
    if not tol > 0:
        raise ValueError("tol must be positive")
    d = len(next(iter(K)))
    q = survival_probability(T)
    karr = np.asarray(sorted(K), dtype=np.int64)
    lo, hi = karr.min(axis=0), karr.max(axis=0)
    r = truncation_radius(T, d, tol)
    side = int((hi - lo).max()) + 1 + 2 * r
    dom = Box(tuple(int(c) - r for c in lo), side)
    V = dom.volume
    if V > MAX_UNKNOWNS:
        raise ValueError(f"hitting-field domain of {V} sites exceeds the solver budget")

    strides = np.asarray(dom.strides)
    in_k = np.zeros(V, dtype=bool)
    in_k[(karr - np.asarray(dom.corner)) @ strides] = True
    coords = dom.local_coords()

    # A = I - (q/2d) * adjacency, restricted to unknowns (sites off K)
    rows, cols = [], []
    rhs = np.zeros(V)
    w = q / (2 * d)
    for k in range(d):
        ok = coords[:, k] < side - 1
        a = np.flatnonzero(ok)
        b = a + strides[k]
        rows.append(a)
        cols.append(b)
    a = np.concatenate(rows)
    b = np.concatenate(cols)
    # contributions of K-neighbours move to the right-hand side
    np.add.at(rhs, a[in_k[b]], w)
    np.add.at(rhs, b[in_k[a]], w)
    free = ~in_k
    both = free[a] & free[b]
    idx = np.full(V, -1, dtype=np.int64)
    idx[free] = np.arange(int(free.sum()))
    ia, ib = idx[a[both]], idx[b[both]]
    n = int(free.sum())
    adj = sp.coo_matrix((np.full(ia.size, w), (ia, ib)), shape=(n, n))
    A = (sp.identity(n, format="csr") - adj - adj.T).tocsr()
    # CG residual r gives error <= |r| / (1 - q), the smallest eigenvalue of A
    sol, info = spla.cg(A, rhs[free], rtol=0.0, atol=(tol / 2) * (1 - q), maxiter=100_000)
    if info != 0:
        raise RuntimeError("hitting-field solver did not converge")
    vals = np.ones(V)
    vals[free] = np.clip(sol, 0.0, 1.0)
    return HittingField(dom, vals, K, T, tol)


def _escape_from_field(g: HittingField, x: Point) -> float:
    q = survival_probability(g.T)
    d = len(x)
    s = sum(1.0 - g[z] for z in neighbors(x))
    return (1.0 - q) + q * s / (2 * d)


def escape_probability(K: Iterable[Sequence[int]], T: float, x: Sequence[int],
                       tol: float = DEFAULT_TOL) -> float:
    """P_x(no return to K at positive times); killing counts as escape."""
    K = _prepare(K)
    x = as_point(x)
    if x not in K:
        raise ValueError(f"{x} is not a point of K")
    return _escape_from_field(hitting_field(K, T, tol), x)


def escape_probabilities(K: Iterable[Sequence[int]], T: float,
                         tol: float = DEFAULT_TOL) -> dict[Point, float]:
    K = _prepare(K)
    g = hitting_field(K, T, tol)
    return {x: _escape_from_field(g, x) for x in sorted(K)}


def capacity(K: Iterable[Sequence[int]], T: float, tol: float = DEFAULT_TOL) -> float:
    """``2d * sum_{x in K} Es_K(x)``; at most ``2d |K|``."""
    K = _prepare(K)
    d = len(next(iter(K)))
    return 2 * d * sum(escape_probabilities(K, T, tol).values())


# ---------------------------------------------------------------------------
# Monte Carlo counterparts, used as independent checks


def hit_probability_mc(K: Iterable[Sequence[int]], T: float, y: Sequence[int], n: int,
                       stream: SeedSpec) -> tuple[float, float]:
    """Fraction of n killed walks from y that visit K, with its standard error."""
    K = _prepare(K)
    y = as_point(y)
    q = survival_probability(_check_T(T))
    h = kernels.hit_batch(len(y), sorted(K), y, q, stream.key, int(n), False)
    p = h / n
    return p, (p * (1 - p) / n) ** 0.5


def escape_probability_mc(K: Iterable[Sequence[int]], T: float, x: Sequence[int], n: int,
                          stream: SeedSpec) -> tuple[float, float]:
    K = _prepare(K)
    x = as_point(x)
    q = survival_probability(_check_T(T))
    h = kernels.hit_batch(len(x), sorted(K), x, q, stream.key, int(n), True)
    p = 1.0 - h / n
    return p, (p * (1 - p) / n) ** 0.5


def capacity_mc(K: Iterable[Sequence[int]], T: float, n_per_point: int,
                stream: SeedSpec) -> tuple[float, float]:
    K = sorted(_prepare(K))
    d = len(K[0])
    est, var = 0.0, 0.0
    for i, x in enumerate(K):
        p, se = escape_probability_mc(K, T, x, n_per_point, stream.child(i))
        est += p
        var += se * se
    return 2 * d * est, 2 * d * var ** 0.5
