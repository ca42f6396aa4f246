import math

import numpy as np
import pytest

from frilab.randomness import SeedSpec
from frilab.walk import (
    INFINITY, Trajectory, diameter_tail_probe, hitting_time, killed_walk_stats,
    max_displacement, sample_killed_walk, sample_srw_steps, tail_envelope, tail_shape_slope,
)


def test_trajectory_validates_adjacency():
    Trajectory(((0, 0, 0), (1, 0, 0), (1, 1, 0)))
    with pytest.raises(ValueError):
        Trajectory(((0, 0, 0), (2, 0, 0)))
    with pytest.raises(ValueError):
        Trajectory(())


def test_killed_walk_mean_length(seed):
    T = 2.0
    n = 20000
    lengths = [sample_killed_walk((0, 0, 0), T, seed.child(i)).n_edges for i in range(n)]
    sd = math.sqrt(T * (T + 1))
    assert abs(np.mean(lengths) - T) < 4 * sd / math.sqrt(n)


def test_batch_agrees_with_single_walks(seed):
    lengths, disp = killed_walk_stats(3, 1.5, 50, seed)
    for i in range(50):
        t = sample_killed_walk((0, 0, 0), 1.5, seed.child(i))
        assert t.n_edges == lengths[i]
        assert max_displacement(t) == disp[i]


def test_srw_steps(seed):
    t = sample_srw_steps((0, 0, 0), 7, seed)
    assert t.n_edges == 7


def test_hitting_time():
    t = Trajectory(((0, 0, 0), (1, 0, 0), (1, 1, 0), (1, 0, 0)))
    assert hitting_time(t, [(1, 0, 0)]) == 1
    assert hitting_time(t, [(0, 0, 0)]) == 0
    assert hitting_time(t, [(0, 0, 0)], strict=True) == INFINITY
    assert hitting_time(t, [(5, 5, 5)]) == INFINITY


def test_max_displacement_bounded_by_length(seed):
    for i in range(200):
        t = sample_killed_walk((0, 0, 0), 4.0, seed.child(i))
        assert max_displacement(t) <= t.n_edges


def test_diameter_tail_within_envelope(seed):
    n = 20000
    tail = diameter_tail_probe(1.0, range(0, 12), n, seed)
    for L, p in tail:
        se = math.sqrt(max(p * (1 - p), 1.0 / n) / n)
        assert p <= tail_envelope(1.0, L) + 5 * se
    assert tail[0][1] == 1.0


def test_tail_probe_needs_samples(seed):
    with pytest.raises(ValueError):
        diameter_tail_probe(1.0, [1], 10, seed)


def test_tail_slope_on_exact_stretched_exponential():
    tail = [(L, math.exp(-0.7 * L ** (2 / 3))) for L in range(1, 30)]
    assert tail_shape_slope(tail, 10 ** 9) == pytest.approx(-0.7, rel=1e-9)
