import itertools
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cellres.exact_geometry import (
    Polytope,
    convex_hull_vertices,
    coordinate_halfspace,
    intersect,
    is_integral,
    lattice_points,
)
from cellres.polyhedral_complex import (
    ComplexError,
    Monomial,
    PolyComplex,
    build_XP,
    half_open_cube,
    interior_poset,
    restrict_complex,
    vertex_label,
)
from cellres.resolution import lcm_closure

from conftest import COMMON_EDGE, LOWER, SQUARE, UPPER


def cube_grid_cells(P: Polytope) -> set:
    """Oracle for the maximal cells of X_P: intersect P with every unit lattice cube."""
    n = P.ambient_dim
    lo = [int(min(v[i] for v in P.vertices)) for i in range(n)]
    hi = [int(max(v[i] for v in P.vertices)) for i in range(n)]
    out = set()
    for a in itertools.product(*(range(lo[i], max(hi[i], lo[i] + 1)) for i in range(n))):
        cuts = []
        for i in range(n):
            cuts.append(coordinate_halfspace(i, a[i], ">=", n))
            cuts.append(coordinate_halfspace(i, a[i] + 1, "<=", n))
        Q = intersect(P, cuts)
        if Q is not None and Q.affine_dim == P.affine_dim:
            out.add(Q.vertices)
    return out


def test_monomial_basics():
    m = Monomial.parse("x1^2*x3", 3)
    assert m.exponents == (2, 0, 1) and m.degree == 3 and str(m) == "x1^2*x3"
    assert Monomial.parse("x1 x2", 3).lcm(m) == Monomial((2, 1, 1))
    with pytest.raises(ComplexError):
        Monomial.parse("x1 x2").lcm(m)
    assert Monomial((1, 0, 0)).divides(m) and not m.divides(Monomial((1, 0, 0)))
    assert str(Monomial.one(2)) == "1"


def test_vertex_label_examples():
    assert str(vertex_label((2, 0, 0))) == "x1^2"
    assert str(vertex_label((0, 0, 0))) == "1"
    assert str(vertex_label((1, 0, 1, 1))) == "x1*x3*x4"
    with pytest.raises(ComplexError):
        vertex_label((1, -1))


def test_square_xp():
    X = build_XP(SQUARE)
    assert X.f_vector() == (4, 5, 2)
    assert set(X.maximal_cells()) == {UPPER, LOWER}
    assert str(X.label(UPPER)) == "x1*x2*x3" and str(X.label(LOWER)) == "x1^2*x2*x3"
    assert X.label(COMMON_EDGE) == X.label(UPPER)


def test_segment_and_point_xp():
    X = build_XP(Polytope(((2, 0), (0, 2))))
    assert X.f_vector() == (3, 2)
    assert build_XP(Polytope(((1, 1),))).f_vector() == (1,)


def test_nondiced_xp_is_unlabeled():
    X = build_XP(Polytope(((0, 0), (1, 2))))
    assert not X.is_labeled
    assert any(not is_integral(v) for v in X.vertices)


def test_half_open_cube_examples():
    assert half_open_cube(UPPER) == (1, 1, 1)
    assert half_open_cube(LOWER) == (2, 1, 1)
    assert half_open_cube(((1, 1),)) == (1, 1)
    with pytest.raises(ComplexError):
        half_open_cube(((0, 0), (1, 2)))


def test_interior_poset_examples():
    O = interior_poset(SQUARE)
    assert set(O.dims) == {UPPER, LOWER, COMMON_EDGE}
    seg = interior_poset(Polytope(((2, 0), (0, 2))))
    assert len(seg) == 3 and ((1, 1),) in seg
    assert list(interior_poset(Polytope(((1, 1),))).dims) == [((1, 1),)]


def test_restrict_examples():
    X = build_XP(SQUARE)
    R = restrict_complex(X, Monomial((1, 1, 1)))
    assert set(R.dims) == set(X.faces_of(UPPER))
    top = Monomial.lcm_of(X.label(c) for c in X.dims)
    assert set(restrict_complex(X, top).dims) == set(X.dims)
    assert len(restrict_complex(X, Monomial.one(3))) == 0


def test_document_round_trip():
    X = build_XP(SQUARE)
    doc = json.loads(json.dumps(X.to_document()))
    Y = PolyComplex.from_document(doc)
    assert Y.dims == X.dims and Y.labels == X.labels
    with pytest.raises(ComplexError):
        PolyComplex.from_document({"vertices": [[0.5, 1]], "cells": [[0]]})
    with pytest.raises(ComplexError):
        PolyComplex.from_document({"vertices": [[0, 0], [1, 0], [2, 0]], "cells": [[0, 1, 2]]})


def test_rational_document_uses_strings():
    X = build_XP(Polytope(((0, 0), (1, 2))))
    doc = X.to_document()
    assert ["1/2", 1] in doc["vertices"]


# -- properties ---------------------------------------------------------------------

small_points = st.lists(
    st.tuples(st.integers(0, 3), st.integers(0, 3), st.integers(0, 2)), min_size=1, max_size=6
)


def _check_complex(X):
    for c in X.dims:
        assert X.dim(c) == Polytope(c).affine_dim
        for f in X.facets(c):
            assert set(f) < set(c)
        # face closure: every face of the geometric cell is present
        for F in Polytope(c).faces():
            assert F.vertices in X


@settings(max_examples=30, deadline=None)
@given(small_points)
def test_xp_matches_cube_grid_oracle(pts):
    P = convex_hull_vertices(pts)
    X = build_XP(P)
    assert set(X.maximal_cells()) == cube_grid_cells(P)
    _check_complex(X)
    assert set(lattice_points(P)) <= set(X.vertices)


@settings(max_examples=30, deadline=None)
@given(small_points)
def test_labels_and_half_open_cubes(pts):
    P = convex_hull_vertices(pts)
    X = build_XP(P)
    if not X.is_labeled:
        return
    X.check_label_law()
    for c in X.dims:
        assert half_open_cube(c) == X.label(c).exponents
    O = interior_poset(P, X)
    tops = [c for c in O.dims if O.dim(c) == P.affine_dim]
    assert set(tops) == set(O.maximal_cells())
    assert len({half_open_cube(c) for c in tops}) == len(tops)


@settings(max_examples=25, deadline=None)
@given(small_points)
def test_restriction_is_intersection(pts):
    P = convex_hull_vertices(pts)
    X = build_XP(P)
    if not X.is_labeled or any(not is_integral(v) for v in X.vertices):
        return
    n = P.ambient_dim
    for m in lcm_closure(X.label(v) for v in X.dims if X.dim(v) == 0):
        Q = intersect(P, [coordinate_halfspace(i, e, "<=", n) for i, e in enumerate(m.exponents)])
        R = restrict_complex(X, m)
        assert set(R.dims) == set(build_XP(Q).dims)
