from __future__ import annotations

from itertools import combinations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from coxn2.gale import (
    GaleError,
    coxeter_admissible,
    combinatorial_type,
    faces,
    gale_from_multiplicities,
    is_face,
    vertices,
)


def test_valid_and_invalid():
    assert gale_from_multiplicities(2, 0, 2).n == 2
    assert gale_from_multiplicities(3, 1, 2).n == 4
    with pytest.raises(GaleError):
        gale_from_multiplicities(1, 3, 2)
    with pytest.raises(GaleError):
        gale_from_multiplicities(2, 0, 1)


def test_types():
    t = combinatorial_type(gale_from_multiplicities(3, 0, 3))
    assert t.kind == "product" and t.dims == (2, 2)
    t = combinatorial_type(gale_from_multiplicities(2, 1, 2))
    assert t.kind == "pyramid" and t.dims == (1, 1)
    t = combinatorial_type(gale_from_multiplicities(2, 2, 2))
    assert t.kind == "multipyramid" and t.depth == 2


def test_face_examples():
    g = gale_from_multiplicities(2, 0, 2)
    assert is_face(g, [])
    assert is_face(g, [0, 2])
    assert not is_face(g, [0, 1])
    with pytest.raises(GaleError):
        is_face(g, [7])


def test_vertex_examples():
    assert len(vertices(gale_from_multiplicities(2, 0, 2))) == 4
    assert len(vertices(gale_from_multiplicities(3, 0, 3))) == 9
    assert len(vertices(gale_from_multiplicities(2, 1, 2))) == 5
    with pytest.raises(GaleError, match="never Coxeter"):
        vertices(gale_from_multiplicities(2, 2, 2))


def test_admissible():
    assert coxeter_admissible(gale_from_multiplicities(2, 0, 2))
    assert coxeter_admissible(gale_from_multiplicities(2, 1, 2))
    assert not coxeter_admissible(gale_from_multiplicities(2, 2, 2))


def _brute_vertices(g):
    """Minimal nonempty faces from a direct convex-hull test on the real line."""
    pos = [g.position(j) for j in range(g.facet_count)]
    k = g.facet_count
    face_sets = []
    for size in range(k + 1):
        for I in combinations(range(k), size):
            rest = [pos[j] for j in range(k) if j not in I]
            if not rest:
                continue
            lo, hi = min(rest), max(rest)
            inside = lo < 0 < hi if lo != hi else lo == 0
            if inside:
                face_sets.append(frozenset(I))
    fs = set(face_sets)
    return {f for f in fs if not any(f < h for h in fs)}


@pytest.mark.parametrize("p", range(2, 5))
@pytest.mark.parametrize("r", range(2, 5))
@pytest.mark.parametrize("q", [0, 1])
def test_vertex_counts_brute_force(p, q, r):
    g = gale_from_multiplicities(p, q, r)
    vs = vertices(g)
    assert set(vs) == _brute_vertices(g)
    assert len(vs) == p * r + q
    if q == 0:
        for v in vs:
            assert len(set(g.minus) - v) == 1 and len(set(g.plus) - v) == 1
    else:
        apex = [v for v in vs if set(g.zero).isdisjoint(v)]
        assert apex == [frozenset(g.minus + g.plus)]


@given(st.integers(2, 4), st.integers(0, 2), st.integers(2, 4), st.data())
def test_faces_downward_closed(p, q, r, data):
    g = gale_from_multiplicities(p, q, r)
    fs = set(faces(g))
    f = data.draw(st.sampled_from(sorted(fs, key=sorted)))
    sub = data.draw(st.sets(st.sampled_from(sorted(f)))) if f else set()
    assert frozenset(sub) in fs
