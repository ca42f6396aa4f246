"""Clusters of open edges, connectivity queries and box-crossing events.

Regions use free boundary conditions. Cluster labels are canonical: every
vertex carries the smallest row-major index of its cluster, so labelings do not
depend on the order in which edges were merged.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from ._backend import kernels
from .lattice import Box, EdgeSet, Point, as_point, tripled_box


@dataclass
class ClusterLabeling:
    region: Box
    labels: np.ndarray
    sizes: dict

    def label(self, p: Sequence[int]) -> int:
        return int(self.labels[self.region.index(p)])

    @property
    def n_clusters(self) -> int:
        return len(self.sizes)


def _as_edgeset(edges, region: Box) -> EdgeSet:
    if isinstance(edges, EdgeSet):
        if edges.window == region:
            return edges
        return edges.restrict(region)
    return EdgeSet.from_edges(region, edges)


def cluster(edges, region: Box) -> ClusterLabeling:
    """Union-find labeling of ``region`` under the given open edges."""
    es = _as_edgeset(edges, region)
    labels = np.asarray(kernels.label_clusters(es.bits, region.d, region.side))
    roots, counts = np.unique(labels, return_counts=True)
    return ClusterLabeling(region, labels, dict(zip(roots.tolist(), counts.tolist())))


def largest_cluster_fraction(l: ClusterLabeling) -> float:
    return max(l.sizes.values()) / l.region.volume


def _bounding_region(points: Iterable[Point]) -> Box:
    arr = np.asarray(list(points), dtype=np.int64)
    lo = arr.min(axis=0)
    return Box(tuple(int(c) for c in lo), int((arr.max(axis=0) - lo).max()) + 1)


def connected(edges, A: Iterable[Sequence[int]], B: Iterable[Sequence[int]],
              region: Box | None = None) -> bool:
    """True iff some point of A is joined to some point of B by open edges.

    Overlapping A and B count as connected (a path of length zero). When
    ``edges`` is an :class:`EdgeSet` its window is the region searched.
    """
    A = {as_point(a) for a in A}
    B = {as_point(b) for b in B}
    if not A or not B:
        return False
    if A & B:
        return True
    if region is None:
        if isinstance(edges, EdgeSet):
            region = edges.window
        else:
            edges = list(edges)
            pts = list(A | B) + [p for e in edges for p in (e.a, e.b)]
            region = _bounding_region(pts)
    es = _as_edgeset(edges, region)
    return bool(kernels.reach(es.bits, region.d, region.side,
                              region.mask_of(A), region.mask_of(B)))


def box_crossing(edges: EdgeSet, inner: Box, outer: Box) -> bool:
    """``inner`` joined to the inner boundary of ``outer`` using edges inside ``outer``."""
    if not outer.contains_box(inner):
        raise ValueError("inner box must lie inside the outer box")
    if not edges.window.contains_box(outer):
        raise ValueError("crossing event exceeds sample window")
    es = edges if edges.window == outer else edges.restrict(outer)
    return bool(kernels.reach(es.bits, outer.d, outer.side,
                              outer.box_mask(inner), outer.boundary_mask()))


def level_box(n: int, x: Sequence[int], hierarchy) -> Box:
    """``B_{n,x} = x + [0, L_n)^d`` for x on the L_n-grid."""
    Ln = hierarchy.L(n)
    x = as_point(x)
    if any(c % Ln for c in x):
        raise ValueError(f"{x} is not on the level-{n} grid (spacing {Ln})")
    return Box(x, Ln)


def crossing_event(s, n: int, x: Sequence[int], hierarchy) -> bool:
    """Is the level-n box at x connected to the inner boundary of its tripled box?"""
    B = level_box(n, x, hierarchy)
    edges = s.open_edges if hasattr(s, "open_edges") else s
    return box_crossing(edges, B, tripled_box(B))


def central_box(window: Box) -> Box:
    """Centred box of side ``side // 3``; the middle third when 3 divides the side."""
    m = window.side // 3
    if m < 1:
        raise ValueError("window too small for a crossing event")
    off = (window.side - m) // 2
    return Box(tuple(c + off for c in window.corner), m)


def window_crossing(edges: EdgeSet) -> bool:
    """Crossing from the central box to the boundary of the whole window."""
    w = edges.window
    return box_crossing(edges, central_box(w), w)
