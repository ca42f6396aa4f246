# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels. Bit-compatible twin of ``_pykernels``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport log, exp, sqrt, floor, fabs
from libc.stdint cimport uint64_t, int64_t, uint8_t
from libc.stdlib cimport malloc, realloc, free
from libc.string cimport memcpy

cnp.import_array()

cdef enum:
    MAXD = 16

cdef uint64_t GAMMA = <uint64_t>0x9E3779B97F4A7C15ULL
cdef uint64_t MIX1 = <uint64_t>0xBF58476D1CE4E5B9ULL
cdef uint64_t MIX2 = <uint64_t>0x94D049BB133111EBULL
cdef double TWO_M53 = 1.1102230246251565e-16

cdef int MODE_SITEWISE = 0
cdef int MODE_EDGEWISE = 1
cdef int MODE_COUPLED = 2
cdef int MODE_BERNOULLI = 3

cdef int64_t TAG_SITEWISE = 1
cdef int64_t TAG_EDGEWISE = 2
cdef int64_t TAG_COUPLED = 3
cdef int64_t TAG_BERNOULLI = 4

cdef double[10] LOGGAM_COEF
LOGGAM_COEF[:] = [
    8.333333333333333e-02, -2.777777777777778e-03,
    7.936507936507937e-04, -5.952380952380952e-04,
    8.417508417508418e-04, -1.917526917526918e-03,
    6.410256410256410e-03, -2.955065359477124e-02,
    1.796443723688307e-01, -1.39243221690590e+00,
]


cdef inline uint64_t mix64(uint64_t z) noexcept nogil:
    z = (z ^ (z >> 30)) * MIX1
    z = (z ^ (z >> 27)) * MIX2
    return z ^ (z >> 31)


cdef inline uint64_t derive(uint64_t key, int64_t e) noexcept nogil:
    return mix64(key ^ mix64(<uint64_t>e + GAMMA))


cdef struct Stream:
    uint64_t key
    uint64_t ctr


cdef inline void stream_init(Stream* s, uint64_t key) noexcept nogil:
    s.key = key
    s.ctr = 0


cdef inline uint64_t next_u64(Stream* s) noexcept nogil:
    s.ctr += 1
    return mix64(s.key ^ mix64(s.ctr * GAMMA))


cdef inline double uniform(Stream* s) noexcept nogil:
    return <double>(next_u64(s) >> 11) * TWO_M53


cdef inline int direction(Stream* s, int ndir) noexcept nogil:
    return <int>(((next_u64(s) >> 32) * <uint64_t>ndir) >> 32)


cdef double loggam(double x) noexcept nogil:
    cdef double x0, x2, gl, gl0
    cdef int64_t k, n
    if x == 1.0 or x == 2.0:
        return 0.0
    if x < 7.0:
        n = <int64_t>(7 - x)
    else:
        n = 0
    x0 = x + n
    x2 = (1.0 / x0) * (1.0 / x0)
    gl0 = LOGGAM_COEF[9]
    for k in range(8, -1, -1):
        gl0 *= x2
        gl0 += LOGGAM_COEF[k]
    gl = gl0 / x0 + 0.5 * 1.8378770664093453 + (x0 - 0.5) * log(x0) - x0
    if x < 7.0:
        for k in range(n):
            gl -= log(x0 - 1.0)
            x0 -= 1.0
    return gl


cdef int64_t poisson(Stream* s, double lam) noexcept nogil:
    cdef double u, p, f, slam, loglam, b, a, invalpha, vr, v, us, kd
    cdef int64_t k
    if lam == 0.0:
        return 0
    if lam < 30.0:
        u = uniform(s)
        p = exp(-lam)
        f = p
        k = 0
        while u >= f:
            k += 1
            p *= lam / <double>k
            f += p
            if p == 0.0:
                break
        return k
    slam = sqrt(lam)
    loglam = log(lam)
    b = 0.931 + 2.53 * slam
    a = -0.059 + 0.02483 * b
    invalpha = 1.1239 + 1.1328 / (b - 3.4)
    vr = 0.9277 - 3.6224 / (b - 2.0)
    while True:
        u = uniform(s) - 0.5
        v = uniform(s)
        us = 0.5 - fabs(u)
        kd = floor((2.0 * a / us + b) * u + lam + 0.43)
        if us >= 0.07 and v <= vr:
            return <int64_t>kd
        if kd < 0 or (us < 0.013 and v > us):
            continue
        if (log(v) + log(invalpha) - log(a / (us * us) + b)
                <= -lam + kd * loglam - loggam(kd + 1.0)):
            return <int64_t>kd


cdef inline int64_t fiber_length(Stream* s, double logq) noexcept nogil:
    cdef double u = 1.0 - uniform(s)
    return 1 + <int64_t>floor(log(u) / logq)


cdef inline void coupled_lengths(Stream* s, double logq1, double logq2,
                                 int64_t* y1, int64_t* y2) noexcept nogil:
    cdef double u = 1.0 - uniform(s)
    cdef double lu = log(u)
    y1[0] = 1 + <int64_t>floor(lu / logq1)
    y2[0] = 1 + <int64_t>floor(lu / logq2)


# ---------------------------------------------------------------------------
# growable fiber buffers


cdef struct Buf:
    int64_t* verts
    int64_t nv
    int64_t capv
    int64_t* offs
    int64_t nf
    int64_t capf


cdef int buf_init(Buf* b) except -1:
    b.capv = 1024
    b.capf = 256
    b.nv = 0
    b.nf = 1
    b.verts = <int64_t*>malloc(b.capv * sizeof(int64_t))
    b.offs = <int64_t*>malloc(b.capf * sizeof(int64_t))
    if b.verts == NULL or b.offs == NULL:
        raise MemoryError()
    b.offs[0] = 0
    return 0


cdef void buf_free(Buf* b) noexcept:
    free(b.verts)
    free(b.offs)
    b.verts = NULL
    b.offs = NULL


cdef int buf_push(Buf* b, int64_t* pos, int d) except -1:
    cdef int k
    cdef int64_t* nv
    if b.nv + d > b.capv:
        b.capv = 2 * b.capv + d
        nv = <int64_t*>realloc(b.verts, b.capv * sizeof(int64_t))
        if nv == NULL:
            raise MemoryError()
        b.verts = nv
    for k in range(d):
        b.verts[b.nv + k] = pos[k]
    b.nv += d
    return 0


cdef int buf_close(Buf* b, int d) except -1:
    cdef int64_t* no
    if b.nf + 1 > b.capf:
        b.capf = 2 * b.capf
        no = <int64_t*>realloc(b.offs, b.capf * sizeof(int64_t))
        if no == NULL:
            raise MemoryError()
        b.offs = no
    b.offs[b.nf] = b.nv // d
    b.nf += 1
    return 0


cdef object buf_arrays(Buf* b, int d):
    offs = np.empty(b.nf, dtype=np.int64)
    verts = np.empty((b.nv // d, d), dtype=np.int64)
    cdef int64_t[::1] ov = offs
    cdef int64_t[:, ::1] vv = verts
    if b.nf:
        memcpy(&ov[0], b.offs, b.nf * sizeof(int64_t))
    if b.nv:
        memcpy(&vv[0, 0], b.verts, b.nv * sizeof(int64_t))
    return offs, verts


# ---------------------------------------------------------------------------
# walker


cdef struct Walker:
    int d
    int64_t side
    int64_t V
    int64_t corner[MAXD]
    int64_t stride[MAXD]
    int64_t pos[MAXD]
    int64_t lin
    int nout


cdef inline void walker_start(Walker* w, int64_t* x) noexcept nogil:
    cdef int k
    cdef int64_t c
    w.lin = 0
    w.nout = 0
    for k in range(w.d):
        w.pos[k] = x[k]
        c = x[k] - w.corner[k]
        if c < 0 or c >= w.side:
            w.nout += 1
        w.lin += c * w.stride[k]


cdef inline int64_t walker_step(Walker* w, int dr) noexcept nogil:
    cdef int k = dr >> 1
    cdef int64_t sgn = -1 if (dr & 1) else 1
    cdef bint inside_before = w.nout == 0
    cdef int64_t lin_before = w.lin
    cdef int64_t c_old = w.pos[k] - w.corner[k]
    cdef int64_t c_new = c_old + sgn
    w.pos[k] += sgn
    w.nout += (c_new < 0 or c_new >= w.side) - (c_old < 0 or c_old >= w.side)
    w.lin += sgn * w.stride[k]
    if inside_before and w.nout == 0:
        if sgn > 0:
            return k * w.V + lin_before
        return k * w.V + w.lin
    return -1


cdef int setup_walker(Walker* w, int d, object corner, int64_t side) except -1:
    cdef int k
    if d < 1 or d > MAXD:
        raise ValueError("dimension out of kernel range")
    w.d = d
    w.side = side
    w.V = 1
    for k in range(d):
        w.V *= side
    for k in range(d):
        w.corner[k] = int(corner[k])
    w.stride[d - 1] = 1
    for k in range(d - 2, -1, -1):
        w.stride[k] = w.stride[k + 1] * side
    return 0


# ---------------------------------------------------------------------------
# site odometer with cached key prefixes


cdef struct Odo:
    int d
    int64_t lo[MAXD]
    int64_t hi[MAXD]
    int64_t x[MAXD]
    uint64_t prefix[MAXD + 1]


cdef inline void odo_rekey(Odo* o, int start) noexcept nogil:
    cdef int k
    for k in range(start, o.d):
        o.prefix[k + 1] = derive(o.prefix[k], o.x[k])


cdef inline bint odo_init(Odo* o, int d, int64_t* lo, int64_t* hi, uint64_t base) noexcept nogil:
    cdef int k
    o.d = d
    for k in range(d):
        o.lo[k] = lo[k]
        o.hi[k] = hi[k]
        o.x[k] = lo[k]
        if lo[k] >= hi[k]:
            return False
    o.prefix[0] = base
    odo_rekey(o, 0)
    return True


cdef inline bint odo_next(Odo* o) noexcept nogil:
    cdef int k = o.d - 1
    while k >= 0:
        o.x[k] += 1
        if o.x[k] < o.hi[k]:
            odo_rekey(o, k)
            return True
        o.x[k] = o.lo[k]
        k -= 1
    return False


# ---------------------------------------------------------------------------
# samplers


def sample_fri(int mode, int d, object corner, int64_t side, int64_t pad,
               object params, object key, bint record, bint first_only):
    cdef Walker w
    setup_walker(&w, d, corner, side)
    cdef int64_t V = w.V
    low_arr = np.zeros(d * V, dtype=np.uint8)
    cdef uint8_t[::1] low = low_arr
    high_arr = None
    cdef uint8_t[::1] high
    if mode == MODE_COUPLED:
        high_arr = np.zeros(d * V, dtype=np.uint8)
        high = high_arr
    cdef Buf blow, bhigh
    cdef bint rec_high = record and mode == MODE_COUPLED
    cdef uint64_t ukey = <uint64_t>(int(key))
    cdef int ndir = 2 * d
    cdef int64_t lo[MAXD]
    cdef int64_t hi[MAXD]
    cdef int64_t lin, e, n, n1, n2, n3, f, j, y, y1, y2
    cdef int k, dir0
    cdef double p, rate, q, logq, r1, r2, r3, logq1, logq2
    cdef int64_t tag
    cdef Odo o
    cdef Stream s

    if mode == MODE_BERNOULLI:
        p = float(params[0])
        for k in range(d):
            lo[k] = w.corner[k]
            hi[k] = w.corner[k] + side
        if odo_init(&o, d, lo, hi, derive(ukey, TAG_BERNOULLI)):
            while True:
                stream_init(&s, o.prefix[d])
                lin = 0
                for k in range(d):
                    lin += (o.x[k] - w.corner[k]) * w.stride[k]
                for k in range(d):
                    if uniform(&s) < p and o.x[k] - w.corner[k] < side - 1:
                        low[k * V + lin] = 1
                if not odo_next(&o):
                    break
        return low_arr, None, None, None

    if mode == MODE_SITEWISE:
        rate = float(params[0]); q = float(params[1])
        tag = TAG_SITEWISE
    elif mode == MODE_EDGEWISE:
        rate = float(params[0]); logq = float(params[1])
        tag = TAG_EDGEWISE
    elif mode == MODE_COUPLED:
        r1 = float(params[0]); r2 = float(params[1]); r3 = float(params[2])
        logq1 = float(params[3]); logq2 = float(params[4])
        tag = TAG_COUPLED
    else:
        raise ValueError("unknown sampler mode")

    if record:
        buf_init(&blow)
    if rec_high:
        buf_init(&bhigh)
    try:
        for k in range(d):
            lo[k] = w.corner[k] - pad
            hi[k] = w.corner[k] + side + pad
        if odo_init(&o, d, lo, hi, derive(ukey, tag)):
            while True:
                stream_init(&s, o.prefix[d])
                if mode == MODE_SITEWISE:
                    n = poisson(&s, rate)
                    for f in range(n):
                        walker_start(&w, o.x)
                        if record:
                            buf_push(&blow, w.pos, d)
                        j = 0
                        while uniform(&s) < q:
                            e = walker_step(&w, direction(&s, ndir))
                            if e >= 0 and (j == 0 or not first_only):
                                low[e] = 1
                            if record:
                                buf_push(&blow, w.pos, d)
                            j += 1
                        if record:
                            buf_close(&blow, d)
                elif mode == MODE_EDGEWISE:
                    n = poisson(&s, rate)
                    for f in range(n):
                        dir0 = direction(&s, ndir)
                        y = fiber_length(&s, logq)
                        walker_start(&w, o.x)
                        if record:
                            buf_push(&blow, w.pos, d)
                        for j in range(y):
                            e = walker_step(&w, dir0 if j == 0 else direction(&s, ndir))
                            if e >= 0 and (j == 0 or not first_only):
                                low[e] = 1
                            if record:
                                buf_push(&blow, w.pos, d)
                        if record:
                            buf_close(&blow, d)
                else:
                    n1 = poisson(&s, r1)
                    n2 = poisson(&s, r2)
                    n3 = poisson(&s, r3)
                    for f in range(n1 + n2):
                        dir0 = direction(&s, ndir)
                        coupled_lengths(&s, logq1, logq2, &y1, &y2)
                        walker_start(&w, o.x)
                        if record:
                            buf_push(&blow, w.pos, d)
                            buf_push(&bhigh, w.pos, d)
                        for j in range(y2):
                            e = walker_step(&w, dir0 if j == 0 else direction(&s, ndir))
                            if e >= 0:
                                high[e] = 1
                                if j < y1:
                                    low[e] = 1
                            if record:
                                buf_push(&bhigh, w.pos, d)
                                if j < y1:
                                    buf_push(&blow, w.pos, d)
                        if record:
                            buf_close(&blow, d)
                            buf_close(&bhigh, d)
                    for f in range(n3):
                        dir0 = direction(&s, ndir)
                        y = fiber_length(&s, logq2)
                        walker_start(&w, o.x)
                        if record:
                            buf_push(&bhigh, w.pos, d)
                        for j in range(y):
                            e = walker_step(&w, dir0 if j == 0 else direction(&s, ndir))
                            if e >= 0:
                                high[e] = 1
                            if record:
                                buf_push(&bhigh, w.pos, d)
                        if record:
                            buf_close(&bhigh, d)
                if not odo_next(&o):
                    break
        fib_low = buf_arrays(&blow, d) if record else None
        fib_high = buf_arrays(&bhigh, d) if rec_high else None
    finally:
        if record:
            buf_free(&blow)
        if rec_high:
            buf_free(&bhigh)
    return low_arr, high_arr, fib_low, fib_high


cdef inline bint in_box(int64_t* pos, int64_t* corner, int64_t side, int d) noexcept nogil:
    cdef int k
    for k in range(d):
        if pos[k] < corner[k] or pos[k] >= corner[k] + side:
            return False
    return True


def far_fiber_hits(int d, object outer_corner, int64_t outer_side, object excl_corner,
                   int64_t excl_side, object tgt_corner, int64_t tgt_side,
                   double rate, double q, object key):
    if d < 1 or d > MAXD:
        raise ValueError("dimension out of kernel range")
    cdef int64_t lo[MAXD]
    cdef int64_t hi[MAXD]
    cdef int64_t ex[MAXD]
    cdef int64_t tg[MAXD]
    cdef int64_t pos[MAXD]
    cdef int k, dr, ndir = 2 * d
    cdef int64_t n, f, hits = 0
    cdef bint hit
    cdef Odo o
    cdef Stream s
    cdef uint64_t ukey = <uint64_t>(int(key))
    for k in range(d):
        lo[k] = int(outer_corner[k])
        hi[k] = lo[k] + outer_side
        ex[k] = int(excl_corner[k])
        tg[k] = int(tgt_corner[k])
    if not odo_init(&o, d, lo, hi, derive(ukey, TAG_SITEWISE)):
        return 0
    with nogil:
        while True:
            if not in_box(o.x, ex, excl_side, d):
                stream_init(&s, o.prefix[d])
                n = poisson(&s, rate)
                for f in range(n):
                    for k in range(d):
                        pos[k] = o.x[k]
                    hit = in_box(pos, tg, tgt_side, d)
                    while uniform(&s) < q:
                        dr = direction(&s, ndir)
                        if dr & 1:
                            pos[dr >> 1] -= 1
                        else:
                            pos[dr >> 1] += 1
                        if not hit and in_box(pos, tg, tgt_side, d):
                            hit = True
                    hits += hit
            if not odo_next(&o):
                break
    return hits


# ---------------------------------------------------------------------------
# connectivity


def reach(cnp.ndarray edges_arr, int d, int64_t side, cnp.ndarray src_arr, cnp.ndarray dst_arr):
    cdef const uint8_t[::1] edges = np.ascontiguousarray(edges_arr, dtype=np.uint8)
    cdef const uint8_t[::1] src = np.ascontiguousarray(src_arr, dtype=np.uint8)
    cdef const uint8_t[::1] dst = np.ascontiguousarray(dst_arr, dtype=np.uint8)
    cdef int64_t V = 1
    cdef int k
    for k in range(d):
        V *= side
    cdef int64_t stride[MAXD]
    stride[d - 1] = 1
    for k in range(d - 2, -1, -1):
        stride[k] = stride[k + 1] * side
    seen_arr = np.zeros(V, dtype=np.uint8)
    queue_arr = np.empty(V, dtype=np.int64)
    cdef uint8_t[::1] seen = seen_arr
    cdef int64_t[::1] queue = queue_arr
    cdef int64_t head = 0, tail = 0, i, j, ck
    cdef bint found = False
    with nogil:
        for i in range(V):
            if src[i]:
                if dst[i]:
                    found = True
                    break
                seen[i] = 1
                queue[tail] = i
                tail += 1
        while not found and head < tail:
            i = queue[head]
            head += 1
            for k in range(d):
                ck = (i // stride[k]) % side
                if ck < side - 1 and edges[k * V + i]:
                    j = i + stride[k]
                    if not seen[j]:
                        if dst[j]:
                            found = True
                            break
                        seen[j] = 1
                        queue[tail] = j
                        tail += 1
                if ck > 0 and edges[k * V + i - stride[k]]:
                    j = i - stride[k]
                    if not seen[j]:
                        if dst[j]:
                            found = True
                            break
                        seen[j] = 1
                        queue[tail] = j
                        tail += 1
    return bool(found)


cdef inline int64_t uf_find(int64_t* parent, int64_t a) noexcept nogil:
    cdef int64_t root = a, nxt
    while parent[root] != root:
        root = parent[root]
    while parent[a] != root:
        nxt = parent[a]
        parent[a] = root
        a = nxt
    return root


def label_clusters(cnp.ndarray edges_arr, int d, int64_t side):
    cdef const uint8_t[::1] edges = np.ascontiguousarray(edges_arr, dtype=np.uint8)
    cdef int64_t V = 1
    cdef int k
    for k in range(d):
        V *= side
    cdef int64_t stride[MAXD]
    stride[d - 1] = 1
    for k in range(d - 2, -1, -1):
        stride[k] = stride[k + 1] * side
    parent_arr = np.arange(V, dtype=np.int64)
    size_arr = np.ones(V, dtype=np.int64)
    labels_arr = np.empty(V, dtype=np.int64)
    smallest_arr = np.full(V, -1, dtype=np.int64)
    cdef int64_t[::1] parent = parent_arr
    cdef int64_t[::1] size = size_arr
    cdef int64_t[::1] labels = labels_arr
    cdef int64_t[::1] smallest = smallest_arr
    cdef int64_t e, i, ra, rb, tmp
    with nogil:
        for e in range(d * V):
            if edges[e]:
                k = <int>(e // V)
                i = e - k * V
                ra = uf_find(&parent[0], i)
                rb = uf_find(&parent[0], i + stride[k])
                if ra != rb:
                    if size[ra] < size[rb]:
                        tmp = ra; ra = rb; rb = tmp
                    parent[rb] = ra
                    size[ra] += size[rb]
        for i in range(V):
            ra = uf_find(&parent[0], i)
            if smallest[ra] < 0:
                smallest[ra] = i
            labels[i] = smallest[ra]
    return labels_arr


# ---------------------------------------------------------------------------
# walk batches


def walk_batch(int d, double q, object key, int64_t n):
    lengths_arr = np.empty(n, dtype=np.int64)
    maxdisp_arr = np.empty(n, dtype=np.int64)
    cdef int64_t[::1] lengths = lengths_arr
    cdef int64_t[::1] maxdisp = maxdisp_arr
    cdef uint64_t ukey = <uint64_t>(int(key))
    cdef int64_t pos[MAXD]
    cdef int64_t i, m, steps, a
    cdef int k, dr, ndir = 2 * d
    cdef Stream s
    if d < 1 or d > MAXD:
        raise ValueError("dimension out of kernel range")
    with nogil:
        for i in range(n):
            stream_init(&s, derive(ukey, i))
            for k in range(d):
                pos[k] = 0
            m = 0
            steps = 0
            while uniform(&s) < q:
                dr = direction(&s, ndir)
                k = dr >> 1
                if dr & 1:
                    pos[k] -= 1
                else:
                    pos[k] += 1
                steps += 1
                a = pos[k] if pos[k] >= 0 else -pos[k]
                if a > m:
                    m = a
            lengths[i] = steps
            maxdisp[i] = m
    return lengths_arr, maxdisp_arr


cdef inline bint in_set(int64_t* pos, const int64_t* kp, int64_t m, int d) noexcept nogil:
    cdef int64_t i
    cdef int k
    cdef bint same
    for i in range(m):
        same = True
        for k in range(d):
            if kp[i * d + k] != pos[k]:
                same = False
                break
        if same:
            return True
    return False


def hit_batch(int d, object K, object start, double q, object key, int64_t n, bint strict):
    karr = np.ascontiguousarray(np.asarray(K, dtype=np.int64).reshape(-1, d))
    cdef const int64_t[:, ::1] kv = karr
    cdef int64_t m = karr.shape[0]
    cdef int64_t pos[MAXD]
    cdef int64_t st[MAXD]
    cdef int k, dr, ndir = 2 * d
    cdef int64_t i, hits = 0
    cdef uint64_t ukey = <uint64_t>(int(key))
    cdef Stream s
    if d < 1 or d > MAXD:
        raise ValueError("dimension out of kernel range")
    for k in range(d):
        st[k] = int(start[k])
    cdef const int64_t* kp = &kv[0, 0] if m > 0 else NULL
    with nogil:
        for i in range(n):
            stream_init(&s, derive(ukey, i))
            for k in range(d):
                pos[k] = st[k]
            if not strict and in_set(pos, kp, m, d):
                hits += 1
                continue
            while uniform(&s) < q:
                dr = direction(&s, ndir)
                if dr & 1:
                    pos[dr >> 1] -= 1
                else:
                    pos[dr >> 1] += 1
                if in_set(pos, kp, m, d):
                    hits += 1
                    break
    return hits


def draw_batch(int kind, object params, object key, int64_t n):
    cdef uint64_t ukey = <uint64_t>(int(key))
    cdef int64_t i
    cdef double a0 = float(params[0])
    cdef double a1 = float(params[1]) if len(params) > 1 else 0.0
    cdef Stream s
    out_arr = np.empty(n, dtype=np.int64)
    cdef int64_t[::1] out = out_arr
    cdef int64_t[::1] out2
    if kind == 2:
        out2_arr = np.empty(n, dtype=np.int64)
        out2 = out2_arr
        with nogil:
            for i in range(n):
                stream_init(&s, derive(ukey, i))
                coupled_lengths(&s, a0, a1, &out[i], &out2[i])
        return out_arr, out2_arr
    with nogil:
        for i in range(n):
            stream_init(&s, derive(ukey, i))
            if kind == 0:
                out[i] = poisson(&s, a0)
            elif kind == 1:
                out[i] = fiber_length(&s, a0)
            else:
                out[i] = 1 if uniform(&s) < a0 else 0
    return out_arr
