import math

import numpy as np
import pytest
from scipy import stats

from frilab import _pykernels as pk
from frilab.randomness import (
    SeedSpec, coupled_fiber_lengths, fiber_length, fiber_length_pmf, killing_survives,
    mix64, poisson,
)


def test_mix64_known_values():
    # splitmix64 finalizer applied to 0 and to the golden-ratio increment
    assert mix64(0) == 0
    assert mix64(0x9E3779B97F4A7C15) == 0xE220A8397B1DCDAF


def test_streams_are_reproducible_and_distinct():
    a = SeedSpec(7, (1, 2)).stream()
    b = SeedSpec(7, (1, 2)).stream()
    c = SeedSpec(7, (2, 1)).stream()
    xs = [a.next_u64() for _ in range(5)]
    assert xs == [b.next_u64() for _ in range(5)]
    assert xs != [c.next_u64() for _ in range(5)]
    assert SeedSpec(7).child(1, 2) == SeedSpec(7, (1, 2))


def test_uniforms_look_uniform():
    s = SeedSpec(3).stream()
    u = np.array([s.uniform() for _ in range(20000)])
    assert u.min() >= 0.0 and u.max() < 1.0
    assert stats.kstest(u, "uniform").pvalue > 0.01


def test_directions_are_uniform():
    s = SeedSpec(4).stream()
    counts = np.bincount([s.direction(6) for _ in range(30000)], minlength=6)
    assert stats.chisquare(counts).pvalue > 0.01


def test_poisson_zero_and_errors(seed):
    s = seed.stream()
    assert poisson(0.0, s) == 0
    assert s.counter == 0
    with pytest.raises(ValueError):
        poisson(-1.0, seed)
    with pytest.raises(ValueError):
        poisson(math.inf, seed)


@pytest.mark.parametrize("lam", [0.3, 2.0, 12.0, 29.9, 30.0, 75.0, 400.0])
def test_poisson_law_matches_pmf(lam, seed):
    x = poisson(lam, seed.child(int(lam * 10)), size=40000)
    assert abs(x.mean() - lam) < 4 * math.sqrt(lam / x.size)
    ks = np.arange(int(lam + 8 * math.sqrt(lam) + 10))
    expected = stats.poisson.pmf(ks, lam) * x.size
    observed = np.bincount(x, minlength=ks.size)[: ks.size]
    keep = expected > 20
    # pool the tails into the first and last kept bins
    obs = observed[keep].astype(float)
    exp = expected[keep]
    obs[0] += observed[: np.argmax(keep)].sum()
    exp[0] += expected[: np.argmax(keep)].sum()
    last = np.flatnonzero(keep)[-1]
    obs[-1] += x.size - observed[: last + 1].sum()
    exp[-1] += x.size - expected[: last + 1].sum()
    assert stats.chisquare(obs, exp).pvalue > 0.001


def test_fiber_length_law(seed):
    T = 1.5
    y = fiber_length(T, seed, size=50000)
    assert y.min() >= 1
    ks = np.arange(1, 15)
    observed = np.array([(y == k).sum() for k in ks] + [(y >= 15).sum()])
    pmf = fiber_length_pmf(T, ks)
    expected = np.append(pmf, 1 - pmf.sum()) * y.size
    assert stats.chisquare(observed, expected).pvalue > 0.001
    assert abs(y.mean() - (T + 1)) < 4 * y.std() / math.sqrt(y.size)


def test_coupled_lengths_monotone_with_correct_marginals(seed):
    a, b = coupled_fiber_lengths(0.5, 1.0, seed, size=40000)
    assert np.all(a <= b)
    assert abs(a.mean() - 1.5) < 4 * a.std() / math.sqrt(a.size)
    assert abs(b.mean() - 2.0) < 4 * b.std() / math.sqrt(b.size)
    with pytest.raises(ValueError):
        coupled_fiber_lengths(1.0, 1.0, seed)


def test_batch_draw_i_uses_child_stream(seed):
    batch = fiber_length(2.0, seed, size=5)
    single = [fiber_length(2.0, seed.child(i)) for i in range(5)]
    assert list(batch) == single


def test_killing_survival_rate(seed):
    x = killing_survives(3.0, seed, size=40000)
    assert abs(x.mean() - 0.75) < 4 * math.sqrt(0.75 * 0.25 / x.size)


def test_invalid_T():
    for T in (0.0, -1.0, math.nan, math.inf):
        with pytest.raises(ValueError):
            fiber_length(T, SeedSpec(0))
