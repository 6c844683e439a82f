import itertools
import random
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cellres.exact_geometry import Polytope, convex_hull_vertices
from cellres.minkowski import mixed_complex
from cellres.morse import morse_complex, subdivision_matching
from cellres.polyhedral_complex import FacePoset, Monomial, build_XP
from cellres.resolution import (
    Field,
    MonomialIdeal,
    ResolutionError,
    SimplicialComplex,
    betti_table,
    collapse,
    ideal_of_polytope,
    is_minimal,
    koszul_betti_oracle,
    lcm_closure,
    matrix_rank,
    order_complex,
    poset_homology,
    reduced_homology,
    upper_koszul_complex,
    verify_cellular_resolution,
    vertex_ideal,
)

from conftest import COMMON_EDGE, SQUARE, UPPER, trivial


def ideal(*exps):
    return MonomialIdeal(tuple(Monomial(e) for e in exps))


def test_field_parse():
    assert str(Field.parse("q")) == "Q" and str(Field.parse("gf:2")) == "GF(2)"
    assert Field.parse("GF3").p == 3
    with pytest.raises(ValueError, match="6 is not prime"):
        Field.parse("gf:6")
    with pytest.raises(ValueError, match="unknown field"):
        Field.parse("reals")


def test_matrix_rank_depends_on_field():
    cols = [{0: 1, 1: 1}, {1: 1, 2: 1}, {0: 1, 2: -1}]
    assert matrix_rank(cols) == 2
    assert matrix_rank(cols, Field(2)) == 2
    assert matrix_rank([{0: 2}], Field(2)) == 0 and matrix_rank([{0: 2}]) == 1


def test_reduced_homology_examples():
    assert reduced_homology(SimplicialComplex([{0}])) == [0]
    assert reduced_homology(SimplicialComplex([{0}, {1}])) == [1]
    hollow = SimplicialComplex([{0, 1}, {1, 2}, {0, 2}])
    assert reduced_homology(hollow) == [0, 1]
    assert reduced_homology(SimplicialComplex([{0, 1, 2}])) == [0, 0, 0]


def test_projective_plane_torsion():
    # 6-vertex RP^2: acyclic over Q, H1 = H2 = GF(2) over GF(2)
    tris = [(0, 1, 2), (0, 2, 3), (0, 3, 4), (0, 4, 5), (0, 5, 1),
            (1, 2, 4), (2, 3, 5), (3, 4, 1), (4, 5, 2), (5, 1, 3)]
    K = SimplicialComplex(tris)
    assert reduced_homology(K) == [0, 0, 0]
    assert reduced_homology(K, Field(2)) == [0, 1, 1]
    assert reduced_homology(K, Field(3)) == [0, 0, 0]


def test_order_complex_examples():
    seg = FacePoset({"a": 0, "b": 0, "e": 1}, {"e": ["a", "b"]})
    K = order_complex(seg)
    assert {len(f) for f in K.faces} == {1, 2} and len(K) == 5
    tri = FacePoset(
        {0: 0, 1: 0, 2: 0, "01": 1, "12": 1, "02": 1},
        {"01": [0, 1], "12": [1, 2], "02": [0, 2]},
    )
    K = order_complex(tri)
    assert sum(len(f) == 2 for f in K.faces) == 6  # a hexagon
    assert reduced_homology(K) == [0, 1]


def test_collapse_square():
    X = build_XP(SQUARE)
    assert len(collapse(X, X.dims)) == 1
    # dropping the open upper triangle leaves a loop around it
    cells = set(X.dims) - {UPPER}
    assert len(collapse(X, cells)) > 1
    assert poset_homology(X, cells) == [0, 1]


def test_ideal_of_polytope():
    I = ideal_of_polytope(SQUARE)
    assert str(I) == "<x2*x3, x1*x3, x1*x2, x1^2>"
    with pytest.raises(ResolutionError):
        ideal_of_polytope(Polytope(((0, 0), (1, 2))))


def test_ideal_minimalizes_and_checks_ring():
    I = ideal((1, 0), (1, 1), (0, 2))
    assert I.generators == (Monomial((0, 2)), Monomial((1, 0)))
    with pytest.raises(ResolutionError, match="different polynomial rings"):
        MonomialIdeal((Monomial((1,)), Monomial((1, 0))))


def test_lcm_closure_square():
    ms = lcm_closure(ideal_of_polytope(SQUARE).generators)
    assert Monomial((1, 1, 1)) in ms and Monomial((2, 1, 1)) in ms
    assert [m.degree for m in ms] == sorted(m.degree for m in ms)


def test_oracle_koszul():
    for n in (1, 2, 3, 4):
        I = MonomialIdeal(tuple(Monomial(tuple(int(i == j) for j in range(n))) for i in range(n)))
        assert koszul_betti_oracle(I).totals() == tuple(comb(n, i + 1) for i in range(n))


def test_oracle_square_and_staircase():
    assert koszul_betti_oracle(ideal_of_polytope(SQUARE)).totals() == (4, 4, 1)
    two = ideal(*[e for e in itertools.product(range(3), repeat=3) if sum(e) == 2])
    T = koszul_betti_oracle(two)
    assert T.totals() == (6, 8, 3)
    assert T.euler_characteristic() == 1


def test_oracle_generator_limit():
    I = ideal(*[e for e in itertools.product(range(4), repeat=4) if sum(e) == 3][:13])
    assert len(I.generators) == 13
    with pytest.raises(ResolutionError, match="limited to 12"):
        koszul_betti_oracle(I)


def test_upper_koszul_void_and_cone():
    I = ideal((1, 0), (0, 1))
    assert upper_koszul_complex(I, Monomial((0, 0))).void
    K = upper_koszul_complex(I, Monomial((1, 1)))
    assert reduced_homology(K) == [1]


def test_betti_text_and_json():
    T = koszul_betti_oracle(ideal((1, 0), (0, 1)))
    assert T.to_text() == "0 0 1 1\n0 1 0 1\n1 1 1 1\ntotals 2 1"
    assert T.to_json() == {"rows": [[0, [0, 1], 1], [0, [1, 0], 1], [1, [1, 1], 1]], "totals": [2, 1]}


def test_square_xp_is_resolution_but_not_minimal():
    X = build_XP(SQUARE)
    rep = verify_cellular_resolution(X, ideal_of_polytope(SQUARE))
    assert rep.ok and not rep.failures
    v = is_minimal(X)
    assert not v and v.witness == (COMMON_EDGE, UPPER)
    with pytest.raises(ResolutionError, match="not minimal"):
        betti_table(X)


def test_verify_rejects_wrong_ideal():
    with pytest.raises(ResolutionError, match="vertex labels generate"):
        verify_cellular_resolution(build_XP(SQUARE), ideal((1, 0, 0), (0, 1, 0), (0, 0, 1)))


def test_broken_square_fails(fixtures):
    X = fixtures["broken-square"].value
    rep = verify_cellular_resolution(X)
    assert not rep.ok
    assert [(str(m), h) for m, h in rep.minimal_failures()] == [("x1*x2*x3", [0, 1])]


@pytest.mark.parametrize("name", ["square", "prism", "cube", "staircase"])
def test_field_independence(fixtures, name):
    v = fixtures[name].value
    X = trivial(v) if isinstance(v, Polytope) else mixed_complex(v)
    sm = subdivision_matching(X)
    mc = morse_complex(sm.x_prime, sm.matching)
    I = vertex_ideal(X)
    tables = [betti_table(mc)] + [koszul_betti_oracle(I, f) for f in (Field(), Field(2), Field(3))]
    assert all(t == tables[0] for t in tables)
    for f in (Field(), Field(2), Field(3)):
        assert verify_cellular_resolution(mc, I, f).ok


# -- properties ---------------------------------------------------------------------

def taylor_euler(I, m):
    """Alternating count of generator subsets with lcm m (Taylor complex)."""
    gens = I.generators
    tot = 0
    for k in range(1, len(gens) + 1):
        for S in itertools.combinations(gens, k):
            if Monomial.lcm_of(S) == m:
                tot += (-1) ** (k - 1)
    return tot


monomials = st.tuples(st.integers(0, 2), st.integers(0, 2), st.integers(0, 2)).filter(any)


@settings(max_examples=40, deadline=None)
@given(st.lists(monomials, min_size=1, max_size=6))
def test_oracle_euler_matches_taylor(exps):
    I = ideal(*exps)
    T = koszul_betti_oracle(I)
    for m in lcm_closure(I.generators):
        chi = sum((-1) ** i * k for (i, mm), k in T.entries.items() if mm == m)
        assert chi == taylor_euler(I, m)
    assert T.euler_characteristic() == 1
    assert T.totals()[0] == len(I.generators)


def _trim(h):
    h = list(h)
    while len(h) > 1 and h[-1] == 0:
        h.pop()
    return h


@settings(max_examples=30, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 2), st.integers(0, 2), st.integers(0, 2)),
                min_size=2, max_size=6), st.randoms(use_true_random=False))
def test_collapse_preserves_homology(pts, rnd):
    X = build_XP(convex_hull_vertices(pts))
    # a random face-closed subcomplex
    tops = [c for c in X.dims if rnd.random() < 0.4] or [next(iter(X.dims))]
    cells = set()
    for c in tops:
        cells.update(X.faces_of(c))
    for fld in (Field(), Field(2)):
        a = poset_homology(X, cells, fld)
        b = poset_homology(X, cells, fld, collapse_first=False)
        assert _trim(a) == _trim(b)


def test_random_simplicial_euler():
    rng = random.Random(5)
    for _ in range(30):
        faces = [set(rng.sample(range(7), rng.randint(1, 4))) for _ in range(rng.randint(1, 6))]
        K = SimplicialComplex(faces)
        h = reduced_homology(K)
        chi = sum((-1) ** (len(f) - 1) for f in K.faces) - 1
        assert sum((-1) ** k * b for k, b in enumerate(h)) == chi
