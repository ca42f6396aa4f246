"""Simple and geometrically killed random walks, hitting times, diameter tails."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from ._backend import kernels
from .lattice import Point, as_point
from .randomness import SeedSpec, StreamLike, _check_T, _open, survival_probability

INFINITY = math.inf


@dataclass(frozen=True)
class Trajectory:
    """Finite nearest-neighbour path; ``len(vertices) - 1`` edges."""

    vertices: tuple[Point, ...]

    def __post_init__(self):
        verts = tuple(as_point(v) for v in self.vertices)
        if not verts:
            raise ValueError("a trajectory has at least one vertex")
        for a, b in zip(verts, verts[1:]):
            if len(a) != len(b) or sum(abs(x - y) for x, y in zip(a, b)) != 1:
                raise ValueError(f"consecutive vertices {a}, {b} are not neighbours")
        object.__setattr__(self, "vertices", verts)

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "Trajectory":
        return cls(tuple(map(tuple, np.asarray(arr).tolist())))

    @property
    def n_edges(self) -> int:
        return len(self.vertices) - 1

    @property
    def start(self) -> Point:
        return self.vertices[0]

    def edges(self):
        return list(zip(self.vertices, self.vertices[1:]))

    def __len__(self) -> int:
        return len(self.vertices)


def _step(pos: list[int], direction: int) -> None:
    pos[direction >> 1] += -1 if direction & 1 else 1


def sample_killed_walk(start: Sequence[int], T: float, stream: StreamLike) -> Trajectory:
    """Walk killed before each step with probability 1/(T+1); E[edge count] = T."""
    q = survival_probability(_check_T(T))
    s = _open(stream)
    pos = list(as_point(start))
    ndir = 2 * len(pos)
    verts = [tuple(pos)]
    while s.uniform() < q:
        _step(pos, s.direction(ndir))
        verts.append(tuple(pos))
    return Trajectory(tuple(verts))


def sample_srw_steps(start: Sequence[int], n_steps: int, stream: StreamLike) -> Trajectory:
    if n_steps < 0:
        raise ValueError("n_steps must be non-negative")
    s = _open(stream)
    pos = list(as_point(start))
    ndir = 2 * len(pos)
    verts = [tuple(pos)]
    for _ in range(n_steps):
        _step(pos, s.direction(ndir))
        verts.append(tuple(pos))
    return Trajectory(tuple(verts))


def hitting_time(t: Trajectory, A: Iterable[Sequence[int]], strict: bool = False):
    """First index k (k >= 1 if strict) with t[k] in A, else ``INFINITY``."""
    A = {as_point(a) for a in A}
    first = 1 if strict else 0
    for k in range(first, len(t.vertices)):
        if t.vertices[k] in A:
            return k
    return INFINITY


def max_displacement(t: Trajectory) -> int:
    """Largest l-infinity distance of any vertex from the first one."""
    x0 = t.vertices[0]
    return max(max(abs(a - b) for a, b in zip(v, x0)) for v in t.vertices)


def killed_walk_stats(d: int, T: float, n: int, stream: SeedSpec) -> tuple[np.ndarray, np.ndarray]:
    """Edge counts and max displacements of n killed walks from the origin.

    Walk ``i`` uses the stream ``stream.child(i)``, so the batch agrees with
    ``sample_killed_walk(0, T, stream.child(i))``.
    """
    q = survival_probability(_check_T(T))
    return kernels.walk_batch(int(d), q, stream.key, int(n))


def diameter_tail_probe(
    T: float,
    L_values: Sequence[int],
    n_samples: int,
    stream: SeedSpec,
    d: int = 3,
) -> list[tuple[int, float]]:
    """Empirical P(max displacement >= L) of killed walks, for each L."""
    if n_samples < 1000:
        raise ValueError("diameter tail probe needs at least 1000 samples")
    _, disp = killed_walk_stats(d, T, n_samples, stream)
    disp = np.sort(disp)
    out = []
    for L in L_values:
        n_ge = n_samples - np.searchsorted(disp, L, side="left")
        out.append((int(L), float(n_ge) / n_samples))
    return out


def tail_envelope(T: float, L: int) -> float:
    """Rigorous bound on the tail: displacement <= length, length is geometric."""
    return survival_probability(T) ** L


def tail_shape_slope(tail: Sequence[tuple[int, float]], n_samples: int) -> float:
    """Least-squares slope of log(tail) against L^(2/3), over L with tail >= 10/n."""
    pts = [(L, p) for L, p in tail if L > 0 and p >= 10.0 / n_samples]
    if len(pts) < 2:
        raise ValueError("not enough resolved tail points for a slope")
    x = np.array([L ** (2.0 / 3.0) for L, _ in pts])
    y = np.log([p for _, p in pts])
    return float(np.polyfit(x, y, 1)[0])
