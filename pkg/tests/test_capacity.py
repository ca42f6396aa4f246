import itertools
import math
import random

import numpy as np
import pytest

from frilab.capacity import (
    capacity, capacity_mc, escape_probabilities, escape_probability, escape_probability_mc,
    hit_probability_mc, hitting_field,
)
from frilab.randomness import SeedSpec

ORIGIN = (0, 0, 0)


def _random_sets(n, seed=11):
    rng = random.Random(seed)
    out = []
    for _ in range(n):
        k = rng.randint(1, 8)
        pts = {tuple(rng.randint(-2, 2) for _ in range(3)) for _ in range(k)}
        out.append(sorted(pts))
    return out


def test_empty_set_rejected():
    with pytest.raises(ValueError):
        hitting_field([], 1.0)
    with pytest.raises(ValueError):
        capacity([], 1.0)


def test_point_outside_K_rejected():
    with pytest.raises(ValueError):
        escape_probability([ORIGIN], 1.0, (1, 0, 0))


def test_field_boundary_values_and_range():
    K = [ORIGIN, (1, 0, 0)]
    g = hitting_field(K, 2.0)
    assert g[ORIGIN] == 1.0 and g[(1, 0, 0)] == 1.0
    assert np.all((g.values >= 0) & (g.values <= 1))


def test_field_satisfies_harmonic_relation():
    K = [ORIGIN]
    T = 1.0
    q = T / (T + 1)
    g = hitting_field(K, T, tol=1e-10)
    for y in [(1, 0, 0), (2, 1, 0), (3, -2, 1)]:
        nb = [tuple(c + (s if i == k else 0) for i, c in enumerate(y))
              for k in range(3) for s in (1, -1)]
        assert g[y] == pytest.approx(q / 6 * sum(g[z] for z in nb), abs=1e-9)


def test_small_T_limits():
    g = hitting_field([ORIGIN], 1e-8)
    assert g[(1, 0, 0)] < 1e-8
    assert escape_probability([ORIGIN], 1e-8, ORIGIN) > 1 - 1e-8
    assert capacity([ORIGIN], 1e-8) == pytest.approx(6.0, abs=1e-6)


def test_field_against_monte_carlo(seed):
    n = 10 ** 6
    tol = 1e-8
    p, se = hit_probability_mc([ORIGIN], 1.0, (1, 0, 0), n, seed)
    assert abs(hitting_field([ORIGIN], 1.0, tol)[(1, 0, 0)] - p) <= 3 * se + tol


def test_escape_against_monte_carlo(seed):
    n = 10 ** 6
    p, se = escape_probability_mc([ORIGIN], 1.0, ORIGIN, n, seed)
    assert abs(escape_probability([ORIGIN], 1.0, ORIGIN) - p) <= 3 * se + 1e-8


def test_capacity_against_monte_carlo(seed):
    est, se = capacity_mc([ORIGIN], 1.0, 10 ** 6, seed)
    assert abs(capacity([ORIGIN], 1.0) - est) <= 3 * se + 1e-8


def test_more_targets_less_escape():
    T = 1.0
    single = escape_probability([ORIGIN], T, ORIGIN)
    pair = escape_probability([ORIGIN, (1, 0, 0)], T, ORIGIN)
    assert pair < single


@pytest.mark.parametrize("K", _random_sets(20))
def test_capacity_bound(K):
    tol = 1e-8
    for T in (0.5, 2.0):
        assert capacity(K, T, tol) <= 6 * len(K) + tol


def test_escape_nonincreasing_in_T():
    K = [ORIGIN, (1, 0, 0), (0, 2, 0)]
    Ts = [0.25, 0.5, 1, 2, 4]
    es = [escape_probabilities(K, T) for T in Ts]
    for a, b in zip(es, es[1:]):
        for x in K:
            assert b[x] <= a[x] + 1e-8


def test_escape_monotone_in_K():
    K = [ORIGIN, (1, 1, 0)]
    K2 = K + [(2, 0, 0), (0, -1, 0)]
    a = escape_probabilities(K, 1.5)
    b = escape_probabilities(K2, 1.5)
    for x in K:
        assert b[x] <= a[x] + 1e-8
