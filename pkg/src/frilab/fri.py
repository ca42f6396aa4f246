"""Finitary random interlacements on a finite window.

Two exact samplers are provided:

* site-wise: every site x starts Pois(2du/(T+1)) killed walks;
* edge-wise: every directed edge x->y carries Pois(uT/(T+1)^2) fibers, each
  the edge itself followed by a plain random walk of Y-1 steps, with Y the
  fiber length law of :func:`frilab.randomness.fiber_length`.

Both produce the same law of open edges. Only fibers born within ``pad`` of the
window are simulated; :func:`padding_radius` picks the pad so that the chance
any ignored fiber touches the window is at most ``epsilon``.
"""
from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence, TextIO

import numpy as np

from . import _pykernels as pk
from ._backend import kernels
from .lattice import Box, Edge, EdgeSet, as_point, check_dim, shell_count
from .randomness import SeedSpec, _check_T, survival_probability
from .walk import Trajectory

SAMPLERS = ("sitewise", "edgewise")


@dataclass(frozen=True)
class PaddingPolicy:
    epsilon: float = 1e-6

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError("padding epsilon must lie in (0, 1)")


def reach_bound(T: float, d: int, r: int) -> float:
    """Upper bound on P(killed walk ever reaches l-inf distance r from its start).

    The minimum of two constant-free bounds: the geometric length tail
    ``(T/(T+1))^r`` and the exponential-supermartingale bound
    ``2d exp(-theta r)`` with ``cosh(theta) = 1 + d/T``.
    """
    if r <= 0:
        return 1.0
    q = survival_probability(T)
    theta = math.acosh(1.0 + d / T)
    return min(q ** r, 2 * d * math.exp(-theta * r), 1.0)


def far_birth_mass(side: int, d: int, u: float, T: float, m: int) -> float:
    """Union bound on the expected number of fibers born at distance > m that reach the window."""
    rate = 2 * d * u / (T + 1.0)
    if rate == 0.0:
        return 0.0
    total = 0.0
    r = m + 1
    prev = math.inf
    while True:
        term = shell_count(d, side, r) * rate * reach_bound(T, d, r)
        total += term
        if term < prev and term <= 1e-18 * max(total, 1e-300):
            # geometric remainder with the current (decreasing) ratio
            ratio = term / prev if prev > 0 else 0.0
            return total + term * ratio / max(1.0 - ratio, 1e-12)
        if term == 0.0:
            return total
        prev = term
        r += 1


def padding_radius(window: Box, u: float, T: float, policy: PaddingPolicy) -> int:
    """Smallest pad m with (expected far fibers reaching the window) <= epsilon."""
    T = _check_T(T)
    if u < 0:
        raise ValueError("intensity u must be non-negative")
    d = window.d
    if far_birth_mass(window.side, d, u, T, 0) <= policy.epsilon:
        return 0
    lo, hi = 0, 1
    while far_birth_mass(window.side, d, u, T, hi) > policy.epsilon:
        lo, hi = hi, hi * 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if far_birth_mass(window.side, d, u, T, mid) > policy.epsilon:
            lo = mid
        else:
            hi = mid
    return hi


@dataclass
class FriSample:
    """One realisation of FRI observed on ``window``.

    Fibers are kept as flat arrays (``offsets``, ``vertices``) and expanded to
    :class:`Trajectory` objects on demand; ``offsets`` is ``None`` when the
    sample was drawn without fiber identity.
    """

    u: float
    T: float
    d: int
    window: Box
    pad: int
    open_edges: EdgeSet
    sampler: str
    seed: SeedSpec
    epsilon: float
    offsets: np.ndarray | None = None
    vertices: np.ndarray | None = None

    @property
    def fiber_resolved(self) -> bool:
        return self.offsets is not None

    @property
    def n_fibers(self) -> int:
        if self.offsets is None:
            raise ValueError("sample was drawn without fiber identity")
        return len(self.offsets) - 1

    def fiber_array(self, i: int) -> np.ndarray:
        return self.vertices[self.offsets[i]:self.offsets[i + 1]]

    @property
    def fibers(self) -> list[Trajectory]:
        return [Trajectory.from_array(self.fiber_array(i)) for i in range(self.n_fibers)]

    @property
    def births(self) -> np.ndarray:
        return self.vertices[self.offsets[:-1]]

    @property
    def padded_window(self) -> Box:
        return self.window.expand(self.pad)


# ---------------------------------------------------------------------------
# kernel parameter packs


def sitewise_params(d: int, u: float, T: float) -> tuple[float, float]:
    return (2 * d * u / (T + 1.0), survival_probability(T))


def edgewise_params(d: int, u: float, T: float) -> tuple[float, float]:
    return (2 * d * edge_rate(u, T), math.log(survival_probability(T)))


def edge_rate(u: float, T: float) -> float:
    """Poisson mean of fibers per directed edge."""
    return u * T / (T + 1.0) ** 2


def _validate(window: Box, u: float, T: float, allow_unsupported: bool) -> None:
    check_dim(window.d, allow_unsupported)
    _check_T(T)
    if not (u >= 0.0) or not math.isfinite(u):
        raise ValueError("intensity u must be finite and non-negative")


def _draw(mode, window, pad, params, key, record, first_only=False):
    return kernels.sample_fri(mode, window.d, window.corner, window.side, int(pad),
                              tuple(params), key, bool(record), bool(first_only))


def sample_sitewise(
    window: Box,
    u: float,
    T: float,
    policy: PaddingPolicy,
    stream: SeedSpec,
    *,
    pad: int | None = None,
    record: bool = True,
    allow_unsupported: bool = False,
) -> FriSample:
    """Site-wise sampler: Pois(2du/(T+1)) killed walks from every site."""
    _validate(window, u, T, allow_unsupported)
    if pad is None:
        pad = padding_radius(window, u, T, policy)
    low, _, fib, _ = _draw(pk.MODE_SITEWISE, window, pad, sitewise_params(window.d, u, T),
                           stream.key, record)
    offsets, verts = fib if record else (None, None)
    return FriSample(u, T, window.d, window, pad, EdgeSet(window, low), "sitewise",
                     stream, policy.epsilon, offsets, verts)


def sample_edgewise(
    window: Box,
    u: float,
    T: float,
    policy: PaddingPolicy,
    stream: SeedSpec,
    *,
    pad: int | None = None,
    record: bool = True,
    allow_unsupported: bool = False,
) -> FriSample:
    """Edge-wise sampler: Pois(uT/(T+1)^2) fibers per directed edge."""
    _validate(window, u, T, allow_unsupported)
    if pad is None:
        pad = padding_radius(window, u, T, policy)
    low, _, fib, _ = _draw(pk.MODE_EDGEWISE, window, pad, edgewise_params(window.d, u, T),
                           stream.key, record)
    offsets, verts = fib if record else (None, None)
    return FriSample(u, T, window.d, window, pad, EdgeSet(window, low), "edgewise",
                     stream, policy.epsilon, offsets, verts)


def sample(sampler: str, window: Box, u: float, T: float, policy: PaddingPolicy,
           stream: SeedSpec, **kw) -> FriSample:
    if sampler == "sitewise":
        return sample_sitewise(window, u, T, policy, stream, **kw)
    if sampler == "edgewise":
        return sample_edgewise(window, u, T, policy, stream, **kw)
    raise ValueError(f"unknown sampler {sampler!r}")


def first_step_process(s: FriSample) -> EdgeSet:
    """Edges ``{eta(0), eta(1)}`` over all fibers of length >= 1 (inside the window)."""
    if not s.fiber_resolved:
        raise ValueError("first-step process requires fiber-resolved sample")
    out = EdgeSet(s.window)
    lengths = np.diff(s.offsets)
    starts = s.offsets[:-1][lengths >= 2]
    if starts.size == 0:
        return out
    a = s.vertices[starts]
    b = s.vertices[starts + 1]
    _mark_edges(out, a, b)
    return out


def _mark_edges(out: EdgeSet, a: np.ndarray, b: np.ndarray) -> None:
    w = out.window
    lo = np.minimum(a, b)
    axis = np.argmax(a != b, axis=1)
    local = lo - np.asarray(w.corner)
    hi_local = np.maximum(a, b) - np.asarray(w.corner)
    inside = np.all((local >= 0) & (hi_local < w.side), axis=1)
    idx = axis[inside] * w.volume + local[inside] @ np.asarray(w.strides)
    out.bits[idx] = 1


def _membership(vertices: np.ndarray, K: set) -> np.ndarray:
    """Boolean per vertex: is it in K (finite point set)."""
    if not K:
        return np.zeros(len(vertices), dtype=bool)
    karr = np.asarray(sorted(K), dtype=np.int64)
    lo = karr.min(axis=0)
    box = Box(tuple(lo), int((karr.max(axis=0) - lo).max()) + 1)
    lut = np.zeros(box.volume, dtype=bool)
    lut[(karr - lo) @ np.asarray(box.strides)] = True
    rel = vertices - lo
    ok = np.all((rel >= 0) & (rel < box.side), axis=1)
    out = np.zeros(len(vertices), dtype=bool)
    out[ok] = lut[rel[ok] @ np.asarray(box.strides)]
    return out


def first_hits(s: FriSample, K: Iterable[Sequence[int]]) -> np.ndarray:
    """Per fiber, the first index in K, or -1 when the fiber misses K."""
    if not s.fiber_resolved:
        raise ValueError("restriction requires fiber-resolved sample")
    K = {as_point(p) for p in K}
    inK = _membership(s.vertices, K)
    n = s.n_fibers
    out = np.full(n, -1, dtype=np.int64)
    if n == 0:
        return out
    pos = np.flatnonzero(inK)
    fiber_of = np.searchsorted(s.offsets, pos, side="right") - 1
    first_pos = np.full(n, -1, dtype=np.int64)
    # pos is increasing, so the first occurrence per fiber is the first hit
    uniq, idx = np.unique(fiber_of, return_index=True)
    first_pos[uniq] = pos[idx]
    hit = first_pos >= 0
    out[hit] = first_pos[hit] - s.offsets[:-1][hit]
    return out


def count_hitting(s: FriSample, K: Iterable[Sequence[int]]) -> int:
    return int(np.count_nonzero(first_hits(s, K) >= 0))


def restrict_to_set(s: FriSample, K: Iterable[Sequence[int]]) -> list[Trajectory]:
    """For each fiber that visits K, its suffix from the first visit."""
    hits = first_hits(s, K)
    out = []
    for i in np.flatnonzero(hits >= 0):
        seg = s.vertices[s.offsets[i] + hits[i]:s.offsets[i + 1]]
        out.append(Trajectory.from_array(seg))
    return out


# ---------------------------------------------------------------------------
# sample dumps
#
# One record per line, tab separated, fields in this fixed order:
#   summary  replica  d  u  T  window_corner  window_side  pad  sampler  epsilon  master_seed  stream_path
#   fiber    replica  birth  vertices
# Points are comma-joined coordinates; ``vertices`` joins points with ';';
# ``stream_path`` is comma-joined (empty for the root stream).

SUMMARY_FIELDS = ("replica", "d", "u", "T", "window_corner", "window_side", "pad",
                  "sampler", "epsilon", "master_seed", "stream_path")


def _pt(p) -> str:
    return ",".join(str(int(c)) for c in p)


def write_dump(samples: Iterable[tuple[int, FriSample]], fh: TextIO) -> None:
    for replica, s in samples:
        fh.write("\t".join([
            "summary", str(replica), str(s.d), repr(float(s.u)), repr(float(s.T)),
            _pt(s.window.corner), str(s.window.side), str(s.pad), s.sampler,
            repr(float(s.epsilon)), str(s.seed.master_seed), _pt(s.seed.stream_path),
        ]) + "\n")
        if not s.fiber_resolved:
            continue
        for i in range(s.n_fibers):
            verts = s.fiber_array(i)
            fh.write("\t".join([
                "fiber", str(replica), _pt(verts[0]), ";".join(_pt(v) for v in verts),
            ]) + "\n")


def read_dump(fh: TextIO) -> list[dict]:
    """Parse a dump back into ``{"summary": {...}, "fibers": [Trajectory, ...]}`` per replica."""
    out: list[dict] = []
    for line in fh:
        parts = line.rstrip("\n").split("\t")
        if parts[0] == "summary":
            rec = dict(zip(SUMMARY_FIELDS, parts[1:]))
            parse_pt = lambda t: tuple(int(c) for c in t.split(",")) if t else ()
            summary = {
                "replica": int(rec["replica"]), "d": int(rec["d"]),
                "u": float(rec["u"]), "T": float(rec["T"]),
                "window_corner": parse_pt(rec["window_corner"]),
                "window_side": int(rec["window_side"]), "pad": int(rec["pad"]),
                "sampler": rec["sampler"], "epsilon": float(rec["epsilon"]),
                "master_seed": int(rec["master_seed"]),
                "stream_path": parse_pt(rec["stream_path"]),
            }
            out.append({"summary": summary, "fibers": []})
        elif parts[0] == "fiber":
            verts = [tuple(int(c) for c in v.split(",")) for v in parts[3].split(";")]
            traj = Trajectory(tuple(verts))
            if traj.start != tuple(int(c) for c in parts[2].split(",")):
                raise ValueError("fiber birth point does not match its first vertex")
            out[-1]["fibers"].append(traj)
        elif parts[0]:
            raise ValueError(f"unknown record type {parts[0]!r}")
    return out


def open_edges_from_fibers(window: Box, fibers: Iterable[Trajectory]) -> EdgeSet:
    out = EdgeSet(window)
    for t in fibers:
        for a, b in t.edges():
            if a in window and b in window:
                out.bits[window.edge_index(Edge(a, b))] = 1
    return out
