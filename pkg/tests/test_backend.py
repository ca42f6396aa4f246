"""The compiled kernels and the pure-Python fallback must agree bit for bit."""
import math

import numpy as np
import pytest

from frilab import _pykernels as pure
from frilab._backend import COMPILED, kernels
from frilab.coupling import coupled_params, coupling_intensities
from frilab.fri import edgewise_params, sitewise_params
from frilab.randomness import SeedSpec

pytestmark = pytest.mark.skipif(not COMPILED, reason="compiled extension not built")

KEY = SeedSpec(99).key


def _same(a, b):
    if a is None or b is None:
        assert a is None and b is None
        return
    if isinstance(a, tuple):
        for x, y in zip(a, b):
            _same(x, y)
        return
    assert np.array_equal(np.asarray(a), np.asarray(b))


CASES = [
    (pure.MODE_SITEWISE, sitewise_params(3, 0.8, 1.5)),
    (pure.MODE_EDGEWISE, edgewise_params(3, 0.8, 1.5)),
    (pure.MODE_COUPLED, coupled_params(3, coupling_intensities(0.8, 0.5, 1.5), 0.5, 1.5)),
    (pure.MODE_BERNOULLI, (0.3,)),
]


@pytest.mark.parametrize("mode,params", CASES)
@pytest.mark.parametrize("record,first_only", [(True, False), (False, False), (True, True)])
def test_sample_fri_identical(mode, params, record, first_only):
    args = (mode, 3, (-1, 2, 0), 5, 3, params, KEY, record, first_only)
    _same(kernels.sample_fri(*args), pure.sample_fri(*args))


def test_sample_fri_large_poisson_branch():
    params = sitewise_params(3, 12.0, 0.2)  # rate 60: rejection sampler
    args = (pure.MODE_SITEWISE, 3, (0, 0, 0), 3, 1, params, KEY, True, False)
    _same(kernels.sample_fri(*args), pure.sample_fri(*args))


def test_far_fiber_hits_identical():
    args = (3, (-6, -6, -6), 14, (-2, -2, -2), 6, (0, 0, 0), 2, 0.9, 0.8, KEY)
    assert kernels.far_fiber_hits(*args) == pure.far_fiber_hits(*args)


def test_connectivity_identical():
    rng = np.random.default_rng(0)
    side, d = 5, 3
    V = side ** d
    for _ in range(20):
        edges = (rng.random(d * V) < 0.35).astype(np.uint8)
        for k in range(d):
            g = edges[k * V:(k + 1) * V].reshape((side,) * d)
            sl = [slice(None)] * d
            sl[k] = side - 1
            g[tuple(sl)] = 0
        src = (rng.random(V) < 0.05).astype(np.uint8)
        dst = (rng.random(V) < 0.05).astype(np.uint8)
        assert bool(kernels.reach(edges, d, side, src, dst)) == pure.reach(edges, d, side, src, dst)
        _same(kernels.label_clusters(edges, d, side), pure.label_clusters(edges, d, side))


def test_walk_and_hit_batches_identical():
    _same(kernels.walk_batch(3, 0.7, KEY, 200), pure.walk_batch(3, 0.7, KEY, 200))
    K = [(0, 0, 0), (1, 0, 0)]
    for strict in (False, True):
        assert (kernels.hit_batch(3, K, (0, 0, 0), 0.6, KEY, 300, strict)
                == pure.hit_batch(3, K, (0, 0, 0), 0.6, KEY, 300, strict))


@pytest.mark.parametrize("kind,params", [
    (pure.DRAW_POISSON, (0.7,)), (pure.DRAW_POISSON, (50.0,)),
    (pure.DRAW_FIBER_LENGTH, (math.log(0.6),)),
    (pure.DRAW_COUPLED_LENGTHS, (math.log(0.3), math.log(0.6))),
    (pure.DRAW_SURVIVES, (0.4,)),
])
def test_draw_batch_identical(kind, params):
    _same(kernels.draw_batch(kind, params, KEY, 500), pure.draw_batch(kind, params, KEY, 500))
