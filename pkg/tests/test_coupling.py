import itertools
import random

import numpy as np
import pytest

from frilab.coupling import coupling_intensities, raw_intensities, sample_coupled
from frilab.fri import PaddingPolicy, sample_edgewise
from frilab.lattice import Box, EdgeSet
from frilab.percolation import crossing_event
from frilab.renorm import ScaleHierarchy

POLICY = PaddingPolicy(1e-6)


def test_reference_rates():
    lam = coupling_intensities(1.0, 0.5, 1.0)
    assert lam.lambda1 == pytest.approx(1 / 6, rel=1e-14)
    assert lam.lambda2 == pytest.approx(1 / 18, rel=1e-14)
    assert lam.lambda3 == pytest.approx(1 / 36, rel=1e-14)
    assert lam.low_total == pytest.approx(2 / 9, rel=1e-14)
    assert lam.high_total == pytest.approx(1 / 4, rel=1e-14)


def test_errors():
    with pytest.raises(ValueError, match=r"monotone coupling requires T1\*T2 ≤ 1"):
        coupling_intensities(1.0, 1.5, 2.0)
    with pytest.raises(ValueError):
        coupling_intensities(1.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        coupling_intensities(1.0, 0.9, 0.5)


def test_boundary_product_one():
    lam = coupling_intensities(2.0, 0.5, 2.0)
    assert lam.lambda3 == 0.0


def test_rates_vanish_as_T1_approaches_T2():
    lam = coupling_intensities(1.0, 0.7 - 1e-9, 0.7)
    assert lam.lambda2 < 1e-8 and lam.lambda3 < 1e-8


def test_intensity_algebra_on_random_triples():
    rng = random.Random(5)
    for _ in range(1000):
        u = rng.uniform(0.01, 50)
        T2 = rng.uniform(0.01, 5)
        T1 = rng.uniform(0, min(T2, 1 / T2))
        if T1 <= 0:
            continue
        lam = coupling_intensities(u, T1, T2)
        assert lam.low_total == pytest.approx(u * T1 / (T1 + 1) ** 2, rel=1e-12)
        assert lam.high_total == pytest.approx(u * T2 / (T2 + 1) ** 2, rel=1e-12)


def test_third_rate_sign_matches_admissibility():
    grid = [0.05 * k for k in range(1, 80)]
    for T1, T2 in itertools.product(grid, grid):
        if T1 < T2:
            lam3 = raw_intensities(1.0, T1, T2).lambda3
            assert (lam3 < 0) == (T1 * T2 > 1)


def test_domination_every_replica(seed):
    w = Box((0, 0, 0), 8)
    for r in range(500):
        pair = sample_coupled(w, 0.5, 0.5, 1.0, POLICY, seed.child(r), record=r < 20)
        assert pair.dominated
        if r < 20:
            assert pair.low.n_fibers <= pair.high.n_fibers


def test_marginals_match_reference_sampler(seed):
    w = Box((0, 0, 0), 6)
    n = 2000
    lo = np.zeros(3 * w.volume)
    hi = np.zeros_like(lo)
    r1 = np.zeros_like(lo)
    r2 = np.zeros_like(lo)
    for r in range(n):
        pair = sample_coupled(w, 0.5, 0.5, 1.0, POLICY, seed.child(0, r), record=False)
        lo += pair.low.open_edges.bits
        hi += pair.high.open_edges.bits
        r1 += sample_edgewise(w, 0.5, 0.5, POLICY, seed.child(1, r), record=False).open_edges.bits
        r2 += sample_edgewise(w, 0.5, 1.0, POLICY, seed.child(2, r), record=False).open_edges.bits
    valid = EdgeSet.full(w).bits.astype(bool)
    for a, b in ((lo, r1), (hi, r2)):
        pa, pb = a[valid] / n, b[valid] / n
        se = np.sqrt((pa * (1 - pa) + pb * (1 - pb)) / n)
        assert np.all(np.abs(pa - pb) <= 4 * se)


def test_crossing_domination_transfer(seed):
    h = ScaleHierarchy(2, 2, 1)
    w = Box((-2, -2, -2), 6)
    for r in range(300):
        pair = sample_coupled(w, 1.5, 0.5, 1.0, POLICY, seed.child(r), record=False)
        if crossing_event(pair.low, 0, (0, 0, 0), h):
            assert crossing_event(pair.high, 0, (0, 0, 0), h)
