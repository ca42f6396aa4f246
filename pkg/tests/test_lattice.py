import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from frilab.lattice import (
    Box, Edge, EdgeSet, check_dim, inner_boundary, linf_distance, neighbors,
    shell_count, tripled_box,
)


def test_dimension_gate():
    assert check_dim(3) == 3
    with pytest.raises(ValueError):
        check_dim(2)
    assert check_dim(2, allow_unsupported=True) == 2
    with pytest.raises(ValueError):
        check_dim(1, allow_unsupported=True)


def test_neighbor_order():
    assert neighbors((0, 0, 0)) == [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0),
                                    (0, 0, 1), (0, 0, -1)]


def test_edge_canonical_and_rejects_non_neighbors():
    assert Edge((1, 0, 0), (0, 0, 0)) == Edge((0, 0, 0), (1, 0, 0))
    assert Edge((1, 0, 0), (0, 0, 0), oriented=True).a == (1, 0, 0)
    with pytest.raises(ValueError):
        Edge((0, 0, 0), (1, 1, 0))


def test_distance_of_empty_set():
    with pytest.raises(ValueError, match="empty set"):
        linf_distance([], [(0, 0, 0)])
    assert linf_distance([(0, 0, 0)], [(3, -1, 2), (1, 1, 1)]) == 1


def test_inner_boundary_of_box_matches_mask():
    b = Box((1, -2, 0), 4)
    pts = set(b.points())
    ib = inner_boundary(pts)
    mask = b.boundary_mask()
    assert ib == {b.point_at(i) for i in np.flatnonzero(mask)}
    assert len(ib) == 4 ** 3 - 2 ** 3


@given(st.integers(1, 6), st.integers(-3, 3))
def test_index_roundtrip(side, c):
    b = Box((c, 0, -c), side)
    for i, p in enumerate(b.points()):
        assert b.index(p) == i
        assert b.point_at(i) == p


def test_edge_index_roundtrip_and_layout():
    b = Box((0, 0, 0), 3)
    for j in range(3 * b.volume):
        k, i = divmod(j, b.volume)
        p = b.point_at(i)
        if p[k] == 2:
            continue
        e = b.edge_at(j)
        assert b.edge_index(e) == j
        assert e.axis == k


def test_shell_count_by_enumeration():
    for d, side, r in [(3, 2, 1), (3, 4, 3), (2, 5, 2)]:
        inner = Box((0,) * d, side)
        big = inner.expand(r)
        n = sum(1 for p in big.points()
                if max(max(c - x, x - (c + side - 1), 0) for x, c in zip(p, inner.corner)) == r)
        assert shell_count(d, side, r) == n


def test_tripled_box():
    assert tripled_box(Box((4, 8, 0), 4)) == Box((0, 4, -4), 12)


def test_edgeset_full_and_restrict():
    w = Box((0, 0, 0), 4)
    full = EdgeSet.full(w)
    assert len(full) == 3 * 4 * 4 * 3
    sub = full.restrict(Box((1, 1, 1), 2))
    assert len(sub) == 3 * 2 * 2 * 1
    assert sub.to_set() == {e for e in full if e.a in sub.window and e.b in sub.window}


def test_edgeset_set_protocol():
    w = Box((0, 0, 0), 3)
    edges = {Edge((0, 0, 0), (1, 0, 0)), Edge((2, 2, 1), (2, 2, 2))}
    es = EdgeSet.from_edges(w, edges)
    assert es.to_set() == edges
    assert Edge((1, 0, 0), (0, 0, 0)) in es
    assert Edge((5, 0, 0), (6, 0, 0)) not in es
    assert es.issubset(EdgeSet.full(w))
    assert not EdgeSet.full(w).issubset(es)
