"""Pure-Python reference kernels.

Every function here has a twin in ``_kernels.pyx`` with the same signature and
the same floating-point operations in the same order, so both backends return
bit-identical results for identical inputs. The compiled twin is selected at
import time by :mod:`frilab._backend`; this module is the fallback.
"""
from __future__ import annotations

import math
from collections import deque

import numpy as np

MASK = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
ROOT_SALT = 0x6A09E667F3BCC909
TWO_M53 = 2.0 ** -53

MODE_SITEWISE = 0
MODE_EDGEWISE = 1
MODE_COUPLED = 2
MODE_BERNOULLI = 3

# stream tags, one per sampler, so sampler streams never alias
TAG_SITEWISE = 1
TAG_EDGEWISE = 2
TAG_COUPLED = 3
TAG_BERNOULLI = 4

DRAW_POISSON = 0
DRAW_FIBER_LENGTH = 1
DRAW_COUPLED_LENGTHS = 2
DRAW_SURVIVES = 3

_LOGGAM_COEF = (
    8.333333333333333e-02, -2.777777777777778e-03,
    7.936507936507937e-04, -5.952380952380952e-04,
    8.417508417508418e-04, -1.917526917526918e-03,
    6.410256410256410e-03, -2.955065359477124e-02,
    1.796443723688307e-01, -1.39243221690590e+00,
)


def mix64(z: int) -> int:
    z &= MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
    return z ^ (z >> 31)


def root_key(master_seed: int) -> int:
    return mix64((master_seed & MASK) ^ ROOT_SALT)


def derive(key: int, element: int) -> int:
    return mix64(key ^ mix64(((element & MASK) + GAMMA) & MASK))


class Stream:
    """Counter-based stream: the i-th output is a hash of (key, i)."""

    __slots__ = ("key", "counter")

    def __init__(self, key: int):
        self.key = key & MASK
        self.counter = 0

    def next_u64(self) -> int:
        self.counter += 1
        return mix64(self.key ^ mix64((self.counter * GAMMA) & MASK))

    def uniform(self) -> float:
        return (self.next_u64() >> 11) * TWO_M53

    def direction(self, ndir: int) -> int:
        return ((self.next_u64() >> 32) * ndir) >> 32


def loggam(x: float) -> float:
    if x == 1.0 or x == 2.0:
        return 0.0
    n = int(7 - x) if x < 7.0 else 0
    x0 = x + n
    x2 = (1.0 / x0) * (1.0 / x0)
    gl0 = _LOGGAM_COEF[9]
    for k in range(8, -1, -1):
        gl0 *= x2
        gl0 += _LOGGAM_COEF[k]
    gl = gl0 / x0 + 0.5 * 1.8378770664093453 + (x0 - 0.5) * math.log(x0) - x0
    if x < 7.0:
        for _ in range(n):
            gl -= math.log(x0 - 1.0)
            x0 -= 1.0
    return gl


def poisson(s: Stream, lam: float) -> int:
    if lam == 0.0:
        return 0
    if lam < 30.0:
        u = s.uniform()
        p = math.exp(-lam)
        f = p
        k = 0
        while u >= f:
            k += 1
            p *= lam / k
            f += p
            if p == 0.0:
                break
        return k
    # PTRS transformed rejection (Hormann 1993)
    slam = math.sqrt(lam)
    loglam = math.log(lam)
    b = 0.931 + 2.53 * slam
    a = -0.059 + 0.02483 * b
    invalpha = 1.1239 + 1.1328 / (b - 3.4)
    vr = 0.9277 - 3.6224 / (b - 2.0)
    while True:
        u = s.uniform() - 0.5
        v = s.uniform()
        us = 0.5 - math.fabs(u)
        k = math.floor((2.0 * a / us + b) * u + lam + 0.43)
        if us >= 0.07 and v <= vr:
            return int(k)
        if k < 0 or (us < 0.013 and v > us):
            continue
        if (math.log(v) + math.log(invalpha) - math.log(a / (us * us) + b)
                <= -lam + k * loglam - loggam(k + 1.0)):
            return int(k)


def fiber_length(s: Stream, logq: float) -> int:
    u = 1.0 - s.uniform()
    return 1 + int(math.floor(math.log(u) / logq))


def coupled_lengths(s: Stream, logq1: float, logq2: float) -> tuple[int, int]:
    u = 1.0 - s.uniform()
    lu = math.log(u)
    return 1 + int(math.floor(lu / logq1)), 1 + int(math.floor(lu / logq2))


# ---------------------------------------------------------------------------
# window bookkeeping


class _Walker:
    """Lattice walker tracking window membership and linear index incrementally."""

    __slots__ = ("pos", "corner", "side", "stride", "V", "lin", "nout")

    def __init__(self, corner, side, stride, V):
        self.corner = corner
        self.side = side
        self.stride = stride
        self.V = V

    def start(self, x):
        self.pos = list(x)
        self.lin = 0
        self.nout = 0
        for k, xk in enumerate(x):
            c = xk - self.corner[k]
            if c < 0 or c >= self.side:
                self.nout += 1
            self.lin += c * self.stride[k]

    def step(self, direction: int) -> int:
        """Move one step; return the window edge index traversed, or -1."""
        k = direction >> 1
        sgn = -1 if direction & 1 else 1
        inside_before = self.nout == 0
        lin_before = self.lin
        c_old = self.pos[k] - self.corner[k]
        self.pos[k] += sgn
        c_new = c_old + sgn
        self.nout += (c_new < 0 or c_new >= self.side) - (c_old < 0 or c_old >= self.side)
        self.lin += sgn * self.stride[k]
        if inside_before and self.nout == 0:
            return k * self.V + (lin_before if sgn > 0 else self.lin)
        return -1


class _FiberBuf:
    def __init__(self):
        self.offsets = [0]
        self.verts: list[int] = []

    def push(self, pos):
        self.verts.extend(pos)

    def close(self, d):
        self.offsets.append(len(self.verts) // d)

    def arrays(self, d):
        verts = np.asarray(self.verts, dtype=np.int64).reshape(-1, d)
        return np.asarray(self.offsets, dtype=np.int64), verts


def _strides(d, side):
    return [side ** (d - 1 - k) for k in range(d)]


def _sites(lo, hi, d):
    """Row-major odometer over [lo, hi)^d in absolute coordinates."""
    x = [lo[k] for k in range(d)]
    if any(lo[k] >= hi[k] for k in range(d)):
        return
    while True:
        yield x
        k = d - 1
        while k >= 0:
            x[k] += 1
            if x[k] < hi[k]:
                break
            x[k] = lo[k]
            k -= 1
        if k < 0:
            return


def _site_key(base, x):
    key = base
    for xk in x:
        key = derive(key, xk)
    return key


def sample_fri(mode, d, corner, side, pad, params, key, record, first_only):
    """Sample one replica on the window ``corner + [0, side)^d``.

    Returns ``(low, high, fibers_low, fibers_high)``: dense edge bitmaps of
    shape ``(d * side**d,)`` (``high`` only for the coupled mode) and, when
    ``record`` is set, ``(offsets, vertices)`` fiber arrays.
    """
    corner = [int(c) for c in corner]
    V = side ** d
    stride = _strides(d, side)
    low = np.zeros(d * V, dtype=np.uint8)
    high = np.zeros(d * V, dtype=np.uint8) if mode == MODE_COUPLED else None
    buf_low = _FiberBuf() if record else None
    buf_high = _FiberBuf() if (record and mode == MODE_COUPLED) else None
    walker = _Walker(corner, side, stride, V)
    ndir = 2 * d

    if mode == MODE_BERNOULLI:
        p = params[0]
        tagged = derive(key, TAG_BERNOULLI)
        hi = [c + side for c in corner]
        for x in _sites(corner, hi, d):
            s = Stream(_site_key(tagged, x))
            lin = 0
            for k in range(d):
                lin += (x[k] - corner[k]) * stride[k]
            for k in range(d):
                if s.uniform() < p and x[k] - corner[k] < side - 1:
                    low[k * V + lin] = 1
        return low, None, None, None

    lo = [c - pad for c in corner]
    hi = [c + side + pad for c in corner]
    tag = {MODE_SITEWISE: TAG_SITEWISE, MODE_EDGEWISE: TAG_EDGEWISE,
           MODE_COUPLED: TAG_COUPLED}[mode]
    tagged = derive(key, tag)

    for x in _sites(lo, hi, d):
        s = Stream(_site_key(tagged, x))
        if mode == MODE_SITEWISE:
            rate, q = params[0], params[1]
            n = poisson(s, rate)
            for _ in range(n):
                walker.start(x)
                if record:
                    buf_low.push(walker.pos)
                j = 0
                while s.uniform() < q:
                    e = walker.step(s.direction(ndir))
                    if e >= 0 and (j == 0 or not first_only):
                        low[e] = 1
                    if record:
                        buf_low.push(walker.pos)
                    j += 1
                if record:
                    buf_low.close(d)
        elif mode == MODE_EDGEWISE:
            rate, logq = params[0], params[1]
            n = poisson(s, rate)
            for _ in range(n):
                dir0 = s.direction(ndir)
                y = fiber_length(s, logq)
                walker.start(x)
                if record:
                    buf_low.push(walker.pos)
                for j in range(y):
                    e = walker.step(dir0 if j == 0 else s.direction(ndir))
                    if e >= 0 and (j == 0 or not first_only):
                        low[e] = 1
                    if record:
                        buf_low.push(walker.pos)
                if record:
                    buf_low.close(d)
        else:
            r1, r2, r3, logq1, logq2 = params
            n1 = poisson(s, r1)
            n2 = poisson(s, r2)
            n3 = poisson(s, r3)
            for _ in range(n1 + n2):
                dir0 = s.direction(ndir)
                y1, y2 = coupled_lengths(s, logq1, logq2)
                walker.start(x)
                if record:
                    buf_low.push(walker.pos)
                    buf_high.push(walker.pos)
                for j in range(y2):
                    e = walker.step(dir0 if j == 0 else s.direction(ndir))
                    if e >= 0:
                        high[e] = 1
                        if j < y1:
                            low[e] = 1
                    if record:
                        buf_high.push(walker.pos)
                        if j < y1:
                            buf_low.push(walker.pos)
                if record:
                    buf_low.close(d)
                    buf_high.close(d)
            for _ in range(n3):
                dir0 = s.direction(ndir)
                y = fiber_length(s, logq2)
                walker.start(x)
                if record:
                    buf_high.push(walker.pos)
                for j in range(y):
                    e = walker.step(dir0 if j == 0 else s.direction(ndir))
                    if e >= 0:
                        high[e] = 1
                    if record:
                        buf_high.push(walker.pos)
                if record:
                    buf_high.close(d)

    fib_low = buf_low.arrays(d) if record else None
    fib_high = buf_high.arrays(d) if buf_high is not None else None
    return low, high, fib_low, fib_high


def far_fiber_hits(d, outer_corner, outer_side, excl_corner, excl_side,
                   tgt_corner, tgt_side, rate, q, key):
    """Count site-wise fibers born in outer \\ excl that visit the target box."""
    tagged = derive(key, TAG_SITEWISE)
    lo = [int(c) for c in outer_corner]
    hi = [c + outer_side for c in lo]
    ndir = 2 * d
    hits = 0
    for x in _sites(lo, hi, d):
        if all(excl_corner[k] <= x[k] < excl_corner[k] + excl_side for k in range(d)):
            continue
        s = Stream(_site_key(tagged, x))
        n = poisson(s, rate)
        for _ in range(n):
            pos = list(x)
            hit = all(tgt_corner[k] <= pos[k] < tgt_corner[k] + tgt_side for k in range(d))
            while s.uniform() < q:
                dr = s.direction(ndir)
                pos[dr >> 1] += -1 if dr & 1 else 1
                if not hit and all(tgt_corner[k] <= pos[k] < tgt_corner[k] + tgt_side
                                   for k in range(d)):
                    hit = True
            hits += hit
    return hits


# ---------------------------------------------------------------------------
# connectivity


def _neighbors_open(edges, d, side, V, stride, i):
    for k in range(d):
        ck = (i // stride[k]) % side
        if ck < side - 1 and edges[k * V + i]:
            yield i + stride[k]
        if ck > 0 and edges[k * V + i - stride[k]]:
            yield i - stride[k]


def reach(edges, d, side, src_mask, dst_mask):
    """True iff some source vertex is joined to some target vertex by open edges."""
    V = side ** d
    stride = _strides(d, side)
    seen = np.zeros(V, dtype=np.uint8)
    queue = deque()
    for i in np.flatnonzero(src_mask):
        i = int(i)
        if dst_mask[i]:
            return True
        seen[i] = 1
        queue.append(i)
    while queue:
        i = queue.popleft()
        for j in _neighbors_open(edges, d, side, V, stride, i):
            if not seen[j]:
                if dst_mask[j]:
                    return True
                seen[j] = 1
                queue.append(j)
    return False


def label_clusters(edges, d, side):
    """Union-find labels; each vertex gets the smallest index of its cluster."""
    V = side ** d
    stride = _strides(d, side)
    parent = list(range(V))
    size = [1] * V

    def find(a):
        root = a
        while parent[root] != root:
            root = parent[root]
        while parent[a] != root:
            parent[a], a = root, parent[a]
        return root

    for e in np.flatnonzero(edges):
        e = int(e)
        k, i = divmod(e, V)
        ra, rb = find(i), find(i + stride[k])
        if ra != rb:
            if size[ra] < size[rb]:
                ra, rb = rb, ra
            parent[rb] = ra
            size[ra] += size[rb]
    labels = np.empty(V, dtype=np.int64)
    smallest = {}
    for i in range(V):
        r = find(i)
        if r not in smallest:
            smallest[r] = i
        labels[i] = smallest[r]
    return labels


# ---------------------------------------------------------------------------
# walk batches


def walk_batch(d, q, key, n):
    """Edge counts and l-infinity max displacements of n killed walks from 0."""
    lengths = np.empty(n, dtype=np.int64)
    maxdisp = np.empty(n, dtype=np.int64)
    ndir = 2 * d
    for i in range(n):
        s = Stream(derive(key, i))
        pos = [0] * d
        m = 0
        steps = 0
        while s.uniform() < q:
            dr = s.direction(ndir)
            k = dr >> 1
            pos[k] += -1 if dr & 1 else 1
            steps += 1
            if abs(pos[k]) > m:
                m = abs(pos[k])
        lengths[i] = steps
        maxdisp[i] = m
    return lengths, maxdisp


def hit_batch(d, K, start, q, key, n, strict):
    """Number of killed walks from ``start`` that visit K (at time >= 1 if strict)."""
    kset = {tuple(int(v) for v in p) for p in K}
    ndir = 2 * d
    hits = 0
    for i in range(n):
        s = Stream(derive(key, i))
        pos = [int(v) for v in start]
        if not strict and tuple(pos) in kset:
            hits += 1
            continue
        while s.uniform() < q:
            dr = s.direction(ndir)
            pos[dr >> 1] += -1 if dr & 1 else 1
            if tuple(pos) in kset:
                hits += 1
                break
    return hits


def draw_batch(kind, params, key, n):
    """n independent draws; draw i uses the stream keyed ``derive(key, i)``."""
    if kind == DRAW_COUPLED_LENGTHS:
        a = np.empty(n, dtype=np.int64)
        b = np.empty(n, dtype=np.int64)
        for i in range(n):
            a[i], b[i] = coupled_lengths(Stream(derive(key, i)), params[0], params[1])
        return a, b
    out = np.empty(n, dtype=np.int64)
    for i in range(n):
        s = Stream(derive(key, i))
        if kind == DRAW_POISSON:
            out[i] = poisson(s, params[0])
        elif kind == DRAW_FIBER_LENGTH:
            out[i] = fiber_length(s, params[0])
        else:
            out[i] = s.uniform() < params[0]
    return out
