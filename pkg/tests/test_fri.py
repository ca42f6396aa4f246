import io
import math

import numpy as np
import pytest
from scipy import stats

from frilab.capacity import capacity
from frilab.fri import (
    PaddingPolicy, count_hitting, edge_rate, first_step_process, open_edges_from_fibers,
    padding_radius, read_dump, reach_bound, restrict_to_set, sample_edgewise,
    sample_sitewise, write_dump,
)
from frilab.lattice import Box, EdgeSet
from frilab.randomness import SeedSpec
from frilab.walk import Trajectory

W8 = Box((0, 0, 0), 8)
POLICY = PaddingPolicy(1e-6)


def test_policy_validates_epsilon():
    with pytest.raises(ValueError):
        PaddingPolicy(0.0)
    with pytest.raises(ValueError):
        PaddingPolicy(1.0)


def test_reach_bound_is_rigorous_for_sampled_walks(seed):
    from frilab.walk import killed_walk_stats
    n = 100000
    _, disp = killed_walk_stats(3, 2.0, n, seed)
    for r in (1, 3, 6, 10):
        p = (disp >= r).mean()
        assert p <= reach_bound(2.0, 3, r) + 4 * math.sqrt(max(p, 1 / n) / n)


def test_padding_small_T_is_tiny():
    assert padding_radius(W8, 1.0, 1e-9, POLICY) <= 1


def test_padding_monotone_in_epsilon():
    pads = [padding_radius(Box((0, 0, 0), 16), 1.0, T, PaddingPolicy(eps))
            for T in (0.5, 2.0, 8.0) for eps in (1e-3, 5e-4)]
    for i in range(0, len(pads), 2):
        assert pads[i + 1] >= pads[i]


def test_padding_oversampling_oracle(seed):
    # fibers born in the extra 8 layers must never reach the window
    w = Box((0, 0, 0), 16)
    pad = padding_radius(w, 1.0, 1.0, POLICY)
    for r in range(1000):
        a = sample_sitewise(w, 1.0, 1.0, POLICY, seed.child(r), pad=pad, record=False)
        b = sample_sitewise(w, 1.0, 1.0, POLICY, seed.child(r), pad=pad + 8, record=False)
        assert a.open_edges == b.open_edges


def test_zero_intensity_is_empty(seed):
    s = sample_sitewise(W8, 0.0, 1.0, POLICY, seed)
    assert len(s.open_edges) == 0 and s.n_fibers == 0
    assert len(first_step_process(s)) == 0


def test_sitewise_invariants(seed):
    s = sample_sitewise(W8, 0.7, 1.5, POLICY, seed)
    padded = s.padded_window
    assert all(tuple(b) in padded for b in s.births)
    assert open_edges_from_fibers(W8, s.fibers) == s.open_edges
    for t in s.fibers:
        assert isinstance(t, Trajectory)


def test_edgewise_invariants(seed):
    s = sample_edgewise(W8, 0.7, 1.5, POLICY, seed)
    assert open_edges_from_fibers(W8, s.fibers) == s.open_edges
    assert all(len(t) >= 2 for t in s.fibers)


def test_sitewise_per_site_count(seed):
    # 47^3 > 10^5 sites, pad 0 so every birth is a window site
    w = Box((0, 0, 0), 47)
    s = sample_sitewise(w, 1.0, 2.0, POLICY, seed, pad=0)
    counts = np.bincount([w.index(tuple(b)) for b in s.births], minlength=w.volume)
    assert abs(counts.mean() - 2.0) < 3 * math.sqrt(2.0 / w.volume)


def test_sitewise_total_count_on_small_window(seed):
    w = Box((0, 0, 0), 5)
    n = np.array([sample_sitewise(w, 0.5, 1.0, POLICY, seed.child(r), pad=0).n_fibers
                  for r in range(2000)])
    assert abs(n.mean() - 187.5) < 3 * math.sqrt(187.5 / n.size)


def test_edgewise_per_directed_edge_rate(seed):
    assert edge_rate(1.0, 1.0) == 0.25
    w = Box((0, 0, 0), 40)
    s = sample_edgewise(w, 1.0, 1.0, POLICY, seed, pad=0)
    m = 6 * w.volume
    assert abs(s.n_fibers / m - 0.25) < 3 * math.sqrt(0.25 / m)


def test_edge_rate_vanishes_as_T_shrinks():
    assert edge_rate(1.0, 1e-9) < 1e-8


def test_samplers_agree_on_edge_frequencies(seed):
    n = 2000
    a = np.zeros(3 * W8.volume)
    b = np.zeros(3 * W8.volume)
    for r in range(n):
        a += sample_sitewise(W8, 0.5, 1.0, POLICY, seed.child(0, r), record=False).open_edges.bits
        b += sample_edgewise(W8, 0.5, 1.0, POLICY, seed.child(1, r), record=False).open_edges.bits
    valid = EdgeSet.full(W8).bits.astype(bool)
    pa, pb = a[valid] / n, b[valid] / n
    se = np.sqrt((pa * (1 - pa) + pb * (1 - pb)) / n)
    assert np.all(np.abs(pa - pb) <= 4 * se)


def test_first_step_requires_fibers(seed):
    s = sample_sitewise(W8, 1.0, 1.0, POLICY, seed, record=False)
    with pytest.raises(ValueError, match="first-step process requires fiber-resolved sample"):
        first_step_process(s)


def test_first_step_bernoulli_parameter(seed):
    p = 1 - math.exp(-0.5)
    w = Box((0, 0, 0), 30)
    s = sample_sitewise(w, 1.0, 1.0, POLICY, seed)
    fs = first_step_process(s)
    assert fs.issubset(s.open_edges)
    m = len(EdgeSet.full(w))
    assert abs(len(fs) / m - p) < 3 * math.sqrt(p * (1 - p) / m)


def test_restrict_whole_window_returns_all_fibers(seed):
    s = sample_sitewise(Box((0, 0, 0), 4), 0.5, 1.0, POLICY, seed)
    K = list(s.padded_window.points())
    out = restrict_to_set(s, K)
    assert [t.vertices for t in out] == [t.vertices for t in s.fibers]


def test_restrict_disjoint_set_is_empty(seed):
    s = sample_sitewise(Box((0, 0, 0), 4), 0.5, 0.1, POLICY, seed)
    assert restrict_to_set(s, [(10 ** 6, 0, 0)]) == []


def test_restrict_suffix_starts_in_K(seed):
    s = sample_sitewise(Box((0, 0, 0), 4), 0.5, 2.0, POLICY, seed)
    K = {(1, 1, 1), (2, 1, 1)}
    for t in restrict_to_set(s, K):
        assert t.start in K


def test_restriction_count_is_poisson_with_capacity(seed):
    K = [(a, b, c) for a in (0, 1) for b in (0, 1) for c in (0, 1)]
    lam = 1.0 * capacity(K, 1.0)
    w = Box((0, 0, 0), 2)
    n = 2000
    counts = np.array([count_hitting(sample_sitewise(w, 1.0, 1.0, POLICY, seed.child(r)), K)
                       for r in range(n)])
    assert abs(counts.mean() - lam) < 4 * math.sqrt(lam / n)
    assert abs(counts.var() / lam - 1) < 0.15


def test_disjoint_start_independence(seed):
    w = Box((0, 0, 0), 6)
    left, right = Box((0, 0, 0), 3), Box((3, 3, 3), 3)
    a, b = [], []
    for r in range(2000):
        s = sample_sitewise(w, 0.5, 1.0, POLICY, seed.child(r), pad=0)
        births = [tuple(x) for x in s.births]
        a.append(sum(x in left for x in births))
        b.append(sum(x in right for x in births))
    rho = np.corrcoef(a, b)[0, 1]
    assert abs(rho) < 3 / math.sqrt(2000)


def test_doubling_pad_is_invisible(seed):
    # paired: identical per-site streams, extra sites only add far fibers
    diffs = []
    for r in range(300):
        a = sample_edgewise(W8, 1.0, 2.0, POLICY, seed.child(r), record=False)
        b = sample_edgewise(W8, 1.0, 2.0, POLICY, seed.child(r), pad=2 * a.pad, record=False)
        diffs.append(len(b.open_edges) - len(a.open_edges))
    assert max(diffs) == 0


def test_dump_roundtrip(seed):
    samples = [(r, sample_sitewise(Box((0, 0, 0), 3), 0.5, 1.0, POLICY, seed.child(r)))
               for r in range(3)]
    buf = io.StringIO()
    write_dump(samples, buf)
    buf.seek(0)
    back = read_dump(buf)
    assert len(back) == 3
    for (r, s), rec in zip(samples, back):
        assert rec["summary"]["replica"] == r
        assert rec["summary"]["pad"] == s.pad
        assert rec["summary"]["stream_path"] == s.seed.stream_path
        assert [t.vertices for t in rec["fibers"]] == [t.vertices for t in s.fibers]
    first = buf.getvalue().splitlines()[0].split("\t")
    assert first[0] == "summary" and len(first) == 12


def test_stream_keyed_by_absolute_site(seed):
    # moving the window must not change what a shared site emits
    a = sample_sitewise(Box((0, 0, 0), 4), 1.0, 1.0, POLICY, seed, pad=0)
    b = sample_sitewise(Box((2, 0, 0), 4), 1.0, 1.0, POLICY, seed, pad=0)
    fa = {tuple(map(tuple, f.vertices)) for f in a.fibers if f.start[0] >= 2}
    fb = {tuple(map(tuple, f.vertices)) for f in b.fibers if f.start[0] <= 3}
    assert fa == fb
