"""Acyclic homogeneous matchings and Morse complexes of subdivided polytopes.

The central routine is :func:`lemma_main_matching`, which matches away
every interior cell of X_P except the sharp cell sigma_P by splitting P
along the coordinate hyperplanes through a facet shared by sigma_P and a
neighbouring maximal cell, recursing on the three pieces and gluing.
"""
from __future__ import annotations

import graphlib
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Hashable, Iterable, Mapping

from .diced_sharp import Verdict, is_diced, sharp_cell
from .exact_geometry import Polytope, coordinate_halfspace, intersect
from .polyhedral_complex import (
    FacePoset,
    PolyComplex,
    build_XP,
    cell_str,
    interior_poset,
    maximal_cells_XP,
)


class MorseError(ValueError):
    pass


@dataclass(frozen=True)
class Matching:
    pairs: frozenset  # of (lower, upper)
    scope: FacePoset | None = field(default=None, compare=False, repr=False)

    @classmethod
    def of(cls, pairs: Iterable, scope: FacePoset | None = None) -> "Matching":
        return cls(frozenset((tuple(l), tuple(u)) for l, u in pairs), scope)

    def __iter__(self):
        return iter(sorted(self.pairs))

    def __len__(self):
        return len(self.pairs)

    def matched_cells(self) -> set:
        return {c for pair in self.pairs for c in pair}

    def up(self) -> dict:
        return {l: u for l, u in self.pairs}

    def critical(self, cells: Iterable | None = None) -> list:
        if cells is None:
            if self.scope is None:
                raise MorseError("matching has no scope; pass the cells explicitly")
            cells = self.scope.cells
        used = self.matched_cells()
        return [c for c in cells if c not in used]

    def to_document(self, vertex_index: Mapping) -> list:
        return [
            [sorted(vertex_index[v] for v in l), sorted(vertex_index[v] for v in u)]
            for l, u in self
        ]


def _check_shape(poset: FacePoset, pairs: Iterable) -> list:
    pairs = list(pairs)
    seen = set()
    for l, u in pairs:
        if l not in poset or u not in poset or l not in poset.facets(u):
            raise MorseError(f"pair {cell_str(l)} < {cell_str(u)} is not a Hasse edge")
        if l in seen or u in seen:
            raise MorseError("matching pairs overlap")
        seen.update((l, u))
    return pairs


def modified_digraph(poset: FacePoset, pairs: Iterable) -> dict:
    """Successor lists of the Hasse diagram with matched edges reversed.

    Unmatched covering edges point down (cell -> facet); matched ones point up.
    """
    matched = set(pairs)
    succ: dict = {c: [] for c in poset.dims}
    for lower, upper in poset.hasse_edges():
        if (lower, upper) in matched:
            succ[lower].append(upper)
        else:
            succ[upper].append(lower)
    return succ


def is_acyclic_matching(poset: FacePoset, pairs: Iterable) -> Verdict:
    pairs = _check_shape(poset, pairs)
    succ = modified_digraph(poset, pairs)
    preds: dict = {c: set() for c in succ}
    for a, bs in succ.items():
        for b in bs:
            preds[b].add(a)
    try:
        tuple(graphlib.TopologicalSorter(preds).static_order())
    except graphlib.CycleError as exc:
        return Verdict(False, list(exc.args[1]))
    return Verdict(True)


def is_homogeneous(poset: FacePoset, pairs: Iterable) -> Verdict:
    for l, u in pairs:
        if poset.label(l) != poset.label(u):
            return Verdict(False, (l, u))
    return Verdict(True)


def _assert_good(poset: FacePoset, pairs, what: str) -> None:
    v = is_acyclic_matching(poset, pairs)
    if not v:
        raise MorseError(f"{what}: matching has a cycle through {len(v.witness) - 1} cells")
    if poset.is_labeled:
        h = is_homogeneous(poset, pairs)
        if not h:
            raise MorseError(f"{what}: matching is not homogeneous")


def glue_matchings(
    poset: FacePoset,
    poset_map: Mapping,
    target_leq: Callable[[Hashable, Hashable], bool],
    fiber_matchings: Mapping,
    reverify: bool = True,
) -> Matching:
    """Union of per-fiber matchings along an order-preserving map to a poset Q."""
    for lower, upper in poset.hasse_edges():
        if not target_leq(poset_map[lower], poset_map[upper]):
            raise MorseError(
                f"poset map is not order preserving on {cell_str(lower)} < {cell_str(upper)}"
            )
    pairs = set()
    for q, M in fiber_matchings.items():
        for l, u in M.pairs:
            if poset_map.get(l) != q or poset_map.get(u) != q:
                raise MorseError("fiber matching leaves its fiber")
            pairs.add((l, u))
    if reverify:
        _assert_good(poset, pairs, "glued matching")
    return Matching.of(pairs, poset)


def _varying_coords(P: Polytope) -> list[int]:
    v0 = P.vertices[0]
    return [i for i in range(P.ambient_dim) if any(v[i] != v0[i] for v in P.vertices)]


def _segment_matching(O: FacePoset, i: int, b: int) -> set:
    pairs = set()
    for c in O.dims:
        if O.dim(c) != 1:
            continue
        hi = max(c, key=lambda v: v[i])
        if hi[i] != b:
            pairs.add(((hi,), c))
    return pairs


@lru_cache(maxsize=2048)
def lemma_main_matching(P: Polytope, reverify: bool = True) -> Matching:
    """Homogeneous acyclic matching of O_P whose only critical cell is sigma_P."""
    rep = sharp_cell(P)
    if not rep.is_sharp:
        raise MorseError(f"{P} is not sharp ({rep.witness})")
    X = build_XP(P)
    O = interior_poset(P, X)
    sigma = rep.sigma_P.vertices
    d = P.affine_dim
    tops = [c for c in O.dims if O.dim(c) == d]
    if len(tops) == 1 or d == 0:
        return Matching.of((), O)

    varying = _varying_coords(P)
    if len(varying) == 1:
        i = varying[0]
        b = rep.label_P.exponents[i]
        pairs = _segment_matching(O, i, b)
        if reverify:
            _assert_good(O, pairs, f"segment matching of {P}")
        return Matching.of(pairs, O)

    neighbours = []
    for c in tops:
        if c == sigma:
            continue
        common = tuple(sorted(set(c) & set(sigma)))
        if common in O and O.dim(common) == d - 1:
            neighbours.append((c, common))
    if not neighbours:
        raise MorseError(f"sigma_P has no neighbouring maximal cell in {P}")
    tau, omega = min(neighbours)

    n = P.ambient_dim
    w0 = omega[0]
    split = [
        (i, w0[i]) for i in varying if all(w[i] == w0[i] for w in omega)
    ]
    e = rep.label_P.exponents
    if not split or any(j != e[i] - 1 for i, j in split):
        raise MorseError("shared facet does not sit on the hyperplanes e_i = l(P)_i - 1")
    P_ge = intersect(P, [coordinate_halfspace(i, j, ">=", n) for i, j in split])
    P_le = intersect(P, [coordinate_halfspace(i, j, "<=", n) for i, j in split])
    P_H = intersect(P, [coordinate_halfspace(i, j, "=", n) for i, j in split])

    for piece, expected in ((P_ge, sigma), (P_le, tau), (P_H, omega)):
        r = sharp_cell(piece)
        if not r.is_sharp or r.sigma_P.vertices != expected:
            raise MorseError(f"split piece {piece} is not sharp with the expected cell")

    M_ge = lemma_main_matching(P_ge, reverify)
    M_le = lemma_main_matching(P_le, reverify)
    M_H = lemma_main_matching(P_H, reverify)

    def smallest_piece(c) -> str:
        if all(v[i] == j for v in c for i, j in split):
            return "H"
        if all(v[i] >= j for v in c for i, j in split):
            return "ge"
        if all(v[i] <= j for v in c for i, j in split):
            return "le"
        raise MorseError(f"cell {cell_str(c)} straddles the split")

    fmap = {c: smallest_piece(c) for c in O.dims}
    for key, M in (("ge", M_ge), ("le", M_le), ("H", M_H)):
        fiber = {c for c, q in fmap.items() if q == key}
        if fiber != set(M.scope.dims):
            raise MorseError("interior poset does not split into the three pieces")

    def leq(a, b):
        return a == b or a == "H"

    glued = glue_matchings(O, fmap, leq, {"ge": M_ge, "le": M_le, "H": M_H}, reverify)
    pairs = set(glued.pairs) | {(omega, tau)}
    if reverify:
        _assert_good(O, pairs, f"matching of {P}")
    result = Matching.of(pairs, O)
    crit = result.critical()
    if crit != [sigma]:
        raise MorseError(f"matching of {P} leaves {len(crit)} critical cells")
    return result


@dataclass
class SubdivisionMatching:
    x_prime: PolyComplex
    matching: Matching
    poset_map: dict  # cell of X' -> smallest cell of X containing it
    critical: dict  # cell of X -> its critical cell in X'

    def critical_map(self) -> dict:
        """Critical cell of X' -> the cell of X it stands for."""
        return {crit: c for c, crit in self.critical.items()}


def refine(X: PolyComplex) -> PolyComplex:
    """X': the subdivision X cut further by every hyperplane e_i = j."""
    pieces = []
    for c in X.maximal_cells():
        pieces.extend(maximal_cells_XP(Polytope(c)))
    return PolyComplex.from_polytopes(pieces)


def subdivision_matching(X: PolyComplex, reverify: bool = True) -> SubdivisionMatching:
    for c in X.cells:
        P = Polytope(c)
        if not is_diced(P):
            raise MorseError(f"cell {cell_str(c)} is not diced")
        if X.dim(c) > 0 and not sharp_cell(P).is_sharp:
            raise MorseError(f"cell {cell_str(c)} is not sharp")
    Xp = refine(X)
    fmap: dict = {}
    fibers: dict = {}
    critical: dict = {}
    for c in X.cells:
        M = lemma_main_matching(Polytope(c), reverify)
        for x in M.scope.dims:
            if x in fmap:
                raise MorseError(f"cell {cell_str(x)} lies in two open cells of X")
            fmap[x] = c
        fibers[c] = M
        (crit,) = M.critical()
        critical[c] = crit
    if set(fmap) != set(Xp.dims):
        raise MorseError("interiors of the cells of X do not partition X'")

    def leq(a, b):
        return set(a) <= set(b)

    # the global check is cheap next to the recursion, so it always runs
    M = glue_matchings(Xp, fmap, leq, fibers, reverify=True)
    for c, crit in critical.items():
        if Xp.dim(crit) != X.dim(c) or Xp.label(crit) != X.label(c):
            raise MorseError(f"critical cell of {cell_str(c)} changes dimension or label")
    return SubdivisionMatching(Xp, M, fmap, critical)


def _walks(poset: FacePoset, up: Mapping, matched: set, tau):
    """All alternating down/up paths from tau ending at a critical cell one dimension down."""
    out = []

    def walk(path, rho):
        if rho not in matched:
            out.append(tuple(path))
            return
        nxt = up.get(rho)
        if nxt is None:
            return
        for f in poset.facets(nxt):
            if f != rho:
                walk(path + [nxt, f], f)

    for f in poset.facets(tau):
        walk([tau, f], f)
    return out


def gradient_paths(poset: FacePoset, M: Matching, sigma, tau) -> list[tuple]:
    """Gradient paths from critical tau down to critical sigma (dim sigma = dim tau - 1).

    Each path is returned as the cell sequence tau, rho_1, up_1, rho_2, ..., sigma.
    """
    matched = M.matched_cells()
    if sigma in matched or tau in matched:
        raise MorseError("gradient paths connect critical cells")
    if poset.dim(sigma) != poset.dim(tau) - 1:
        return []
    return [p for p in _walks(poset, M.up(), matched, tau) if p[-1] == sigma]


def path_counts(poset: FacePoset, M: Matching, source) -> dict:
    """Number of directed paths from `source` to every cell in the modified digraph."""
    succ = modified_digraph(poset, M.pairs)
    preds: dict = {c: set() for c in succ}
    for a, bs in succ.items():
        for b in bs:
            preds[b].add(a)
    counts = {c: 0 for c in succ}
    counts[source] = 1
    # static_order lists every predecessor before its successors
    for c in graphlib.TopologicalSorter(preds).static_order():
        if counts[c]:
            for b in succ[c]:
                counts[b] += counts[c]
    return counts


class MorseComplex(FacePoset):
    """Critical cells with the face relation read off from gradient paths."""

    def __init__(self, dims, facets, labels, multiplicity, to_reference=None):
        super().__init__(dims, facets, labels)
        self.multiplicity = multiplicity  # (sigma, tau) -> number of gradient paths
        self.to_reference = to_reference


def morse_complex(
    x_prime: FacePoset,
    M: Matching,
    reference: FacePoset | None = None,
    poset_map: Mapping | None = None,
) -> MorseComplex:
    _check_shape(x_prime, M.pairs)
    matched = M.matched_cells()
    up = M.up()
    crit = [c for c in x_prime.cells if c not in matched]
    dims = {c: x_prime.dim(c) for c in crit}
    facets: dict = {c: set() for c in crit}
    mult: dict = {}
    for tau in crit:
        if dims[tau] == 0:
            continue
        for path in _walks(x_prime, up, matched, tau):
            sigma = path[-1]
            mult[(sigma, tau)] = mult.get((sigma, tau), 0) + 1
            facets[tau].add(sigma)
    labels = {c: x_prime.label(c) for c in crit} if x_prime.is_labeled else None
    to_ref = None
    if reference is not None:
        if poset_map is None:
            raise MorseError("comparing with a reference complex needs the poset map")
        to_ref = {c: poset_map[c] for c in crit}
        if sorted(to_ref.values()) != sorted(reference.dims):
            raise MorseError("critical cells are not in bijection with the reference cells")
        for tau in crit:
            got = {to_ref[s] for s in facets[tau]}
            want = set(reference.facets(to_ref[tau]))
            if got != want:
                extra = sorted(got ^ want)[0]
                raise MorseError(
                    f"boundary mismatch: {cell_str(extra)} vs {cell_str(to_ref[tau])}"
                )
    return MorseComplex(dims, facets, labels, mult, to_ref)
