"""Integer-lattice geometry: points, edges, half-open boxes and distances.

Points are plain tuples of ints. Boxes are half-open, ``corner + [0, side)^d``,
and points inside a box are linearized row-major (last coordinate fastest).
The undirected edge ``{p, p + e_k}`` of a box is stored at flat index
``k * side**d + index(p)``; this layout is shared by the kernels, the
percolation module and the sample dumps.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

Point = tuple[int, ...]

MIN_DIM = 3


def check_dim(d: int, allow_unsupported: bool = False) -> int:
    """Validate a lattice dimension; ``d = 2`` only behind ``allow_unsupported``."""
    d = int(d)
    if d >= MIN_DIM or (allow_unsupported and d == 2):
        return d
    raise ValueError(f"dimension d={d} unsupported (need d >= {MIN_DIM})")


def as_point(p: Iterable[int]) -> Point:
    return tuple(int(c) for c in p)


def unit(d: int, k: int, sign: int = 1) -> Point:
    return tuple(sign if i == k else 0 for i in range(d))


def neighbors(p: Sequence[int]) -> list[Point]:
    """The 2d nearest neighbours, ordered +e_0, -e_0, +e_1, -e_1, ..."""
    p = as_point(p)
    out = []
    for k in range(len(p)):
        for sign in (1, -1):
            q = list(p)
            q[k] += sign
            out.append(tuple(q))
    return out


def linf(p: Sequence[int], q: Sequence[int]) -> int:
    return max(abs(a - b) for a, b in zip(p, q))


def linf_distance(A: Iterable[Sequence[int]], B: Iterable[Sequence[int]]) -> int:
    """Minimum l-infinity distance between two finite point sets."""
    A = [as_point(a) for a in A]
    B = [as_point(b) for b in B]
    if not A or not B:
        raise ValueError("distance of empty set undefined")
    a = np.asarray(A, dtype=np.int64)
    b = np.asarray(B, dtype=np.int64)
    return int(np.abs(a[:, None, :] - b[None, :, :]).max(axis=2).min())


def inner_boundary(D: Iterable[Sequence[int]]) -> set[Point]:
    """Points of D with at least one nearest neighbour outside D."""
    D = {as_point(p) for p in D}
    return {p for p in D if any(q not in D for q in neighbors(p))}


@dataclass(frozen=True)
class Edge:
    """Nearest-neighbour edge. Undirected edges keep ``a < b``."""

    a: Point
    b: Point
    oriented: bool = False

    def __post_init__(self):
        a, b = as_point(self.a), as_point(self.b)
        if len(a) != len(b) or sum(abs(x - y) for x, y in zip(a, b)) != 1:
            raise ValueError(f"{a} and {b} are not nearest neighbours")
        if not self.oriented and b < a:
            a, b = b, a
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def axis(self) -> int:
        return next(k for k in range(len(self.a)) if self.a[k] != self.b[k])

    def undirected(self) -> "Edge":
        return Edge(self.a, self.b) if self.oriented else self


@dataclass(frozen=True)
class Box:
    """Half-open box ``corner + [0, side)^d``."""

    corner: Point
    side: int

    def __post_init__(self):
        object.__setattr__(self, "corner", as_point(self.corner))
        if self.side < 1:
            raise ValueError("box side must be >= 1")

    @classmethod
    def cube(cls, d: int, side: int, corner: Sequence[int] | None = None) -> "Box":
        return cls(tuple(corner) if corner is not None else (0,) * d, side)

    @property
    def d(self) -> int:
        return len(self.corner)

    @property
    def volume(self) -> int:
        return self.side ** self.d

    @property
    def upper(self) -> Point:
        return tuple(c + self.side for c in self.corner)

    @property
    def strides(self) -> tuple[int, ...]:
        return tuple(self.side ** (self.d - 1 - k) for k in range(self.d))

    def __contains__(self, p) -> bool:
        return all(c <= x < c + self.side for x, c in zip(p, self.corner))

    def contains_box(self, other: "Box") -> bool:
        return all(
            c <= oc and oc + other.side <= c + self.side
            for c, oc in zip(self.corner, other.corner)
        )

    def points(self) -> Iterator[Point]:
        ranges = [range(c, c + self.side) for c in self.corner]
        return itertools.product(*ranges)

    def index(self, p: Sequence[int]) -> int:
        """Row-major flat index of a point of the box."""
        if p not in self:
            raise ValueError(f"{tuple(p)} outside {self}")
        return sum((x - c) * s for x, c, s in zip(p, self.corner, self.strides))

    def point_at(self, i: int) -> Point:
        out = []
        for c, s in zip(self.corner, self.strides):
            q, i = divmod(i, s)
            out.append(c + q)
        return tuple(out)

    def local_coords(self) -> np.ndarray:
        """``(volume, d)`` array of local coordinates in flat-index order."""
        grids = np.indices((self.side,) * self.d).reshape(self.d, -1)
        return grids.T.copy()

    def edge_index(self, e: Edge) -> int:
        e = e.undirected()
        if e.a not in self or e.b not in self:
            raise ValueError(f"{e} not inside {self}")
        return e.axis * self.volume + self.index(e.a)

    def edge_at(self, j: int) -> Edge:
        k, i = divmod(j, self.volume)
        a = self.point_at(i)
        b = tuple(x + (1 if t == k else 0) for t, x in enumerate(a))
        return Edge(a, b)

    def expand(self, r: int) -> "Box":
        return Box(tuple(c - r for c in self.corner), self.side + 2 * r)

    def mask_of(self, points: Iterable[Sequence[int]]) -> np.ndarray:
        """Vertex indicator array (flat index order) of the given points."""
        m = np.zeros(self.volume, dtype=np.uint8)
        for p in points:
            m[self.index(p)] = 1
        return m

    def box_mask(self, inner: "Box") -> np.ndarray:
        """Vertex indicator of ``inner ∩ self``."""
        lo = [max(0, ic - c) for ic, c in zip(inner.corner, self.corner)]
        hi = [min(self.side, ic + inner.side - c) for ic, c in zip(inner.corner, self.corner)]
        m = np.zeros((self.side,) * self.d, dtype=np.uint8)
        if all(l < h for l, h in zip(lo, hi)):
            m[tuple(slice(l, h) for l, h in zip(lo, hi))] = 1
        return m.reshape(-1)

    def boundary_mask(self) -> np.ndarray:
        """Vertex indicator of the inner boundary of the box."""
        m = np.ones((self.side,) * self.d, dtype=np.uint8)
        if self.side > 2:
            m[(slice(1, -1),) * self.d] = 0
        return m.reshape(-1)


def tripled_box(b: Box) -> Box:
    """The box of side 3L centred on a level box of side L (itself and its grid neighbours)."""
    return Box(tuple(c - b.side for c in b.corner), 3 * b.side)


def shell_count(d: int, side: int, r: int) -> int:
    """Number of sites at l-infinity distance exactly r >= 1 from a box of the given side."""
    return (side + 2 * r) ** d - (side + 2 * r - 2) ** d


class EdgeSet:
    """Undirected edges with both endpoints in a window, as a dense bitmap.

    ``bits[k * V + i]`` is set when ``{p_i, p_i + e_k}`` is in the set, where
    ``p_i`` is the i-th point of ``window`` in row-major order. Supports the
    ``set`` protocol for :class:`Edge` membership and iteration.
    """

    __slots__ = ("window", "bits")

    def __init__(self, window: Box, bits: np.ndarray | None = None):
        self.window = window
        n = window.d * window.volume
        if bits is None:
            bits = np.zeros(n, dtype=np.uint8)
        bits = np.asarray(bits, dtype=np.uint8).reshape(-1)
        if bits.size != n:
            raise ValueError("bitmap size does not match window")
        self.bits = bits

    @classmethod
    def from_edges(cls, window: Box, edges: Iterable[Edge]) -> "EdgeSet":
        out = cls(window)
        for e in edges:
            out.bits[window.edge_index(e)] = 1
        return out

    @classmethod
    def full(cls, window: Box) -> "EdgeSet":
        """Every edge of the window."""
        out = cls(window)
        grid = out.bits.reshape((window.d,) + (window.side,) * window.d)
        for k in range(window.d):
            sl = [slice(None)] * window.d
            sl[k] = slice(0, window.side - 1)
            grid[(k,) + tuple(sl)] = 1
        return out

    def __contains__(self, e) -> bool:
        e = e.undirected()
        if e.a not in self.window or e.b not in self.window:
            return False
        return bool(self.bits[self.window.edge_index(e)])

    def __iter__(self) -> Iterator[Edge]:
        for j in np.flatnonzero(self.bits):
            yield self.window.edge_at(int(j))

    def __len__(self) -> int:
        return int(np.count_nonzero(self.bits))

    def __eq__(self, other) -> bool:
        if isinstance(other, EdgeSet):
            return self.window == other.window and np.array_equal(self.bits, other.bits)
        return NotImplemented

    def to_set(self) -> set[Edge]:
        return set(self)

    def issubset(self, other: "EdgeSet") -> bool:
        if self.window != other.window:
            return self.to_set() <= other.to_set()
        return not np.any(self.bits & ~other.bits)

    def union(self, other: "EdgeSet") -> "EdgeSet":
        if self.window != other.window:
            raise ValueError("union of edge sets on different windows")
        return EdgeSet(self.window, self.bits | other.bits)

    def restrict(self, box: Box) -> "EdgeSet":
        """Edges with both endpoints in ``box`` (which must lie in the window)."""
        if not self.window.contains_box(box):
            raise ValueError("restriction box exceeds the window")
        d, side = self.window.d, self.window.side
        grid = self.bits.reshape((d,) + (side,) * d)
        off = [b - w for b, w in zip(box.corner, self.window.corner)]
        sub = grid[(slice(None),) + tuple(slice(o, o + box.side) for o in off)].copy()
        for k in range(d):
            sl = [slice(None)] * d
            sl[k] = box.side - 1
            sub[(k,) + tuple(sl)] = 0
        return EdgeSet(box, sub.reshape(-1))
