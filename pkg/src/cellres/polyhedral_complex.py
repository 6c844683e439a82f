"""Labeled polyhedral complexes and the integer-hyperplane subdivision X_P.

Cells are keyed by their sorted tuple of vertex points, so the same cell
gets the same key in every complex that contains it.  Vertex ids (indices
into the sorted vertex table) only show up in serialization.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from .exact_geometry import (
    GeometryError,
    Polytope,
    as_point,
    convex_hull_vertices,
    coordinate_halfspace,
    fmt_point,
    intersect,
    is_integral,
)

CellKey = tuple  # tuple of sorted points


class ComplexError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class Monomial:
    exponents: tuple[int, ...]

    def __post_init__(self):
        exps = tuple(int(e) for e in self.exponents)
        if any(e < 0 for e in exps):
            raise ComplexError(f"negative exponent in {exps}")
        object.__setattr__(self, "exponents", exps)

    @property
    def nvars(self) -> int:
        return len(self.exponents)

    @property
    def degree(self) -> int:
        return sum(self.exponents)

    def _same_ring(self, other: "Monomial") -> None:
        if len(self.exponents) != len(other.exponents):
            raise ComplexError(f"monomials {self} and {other} live in different rings")

    def divides(self, other: "Monomial") -> bool:
        self._same_ring(other)
        return all(a <= b for a, b in zip(self.exponents, other.exponents))

    def lcm(self, other: "Monomial") -> "Monomial":
        self._same_ring(other)
        return Monomial(tuple(max(a, b) for a, b in zip(self.exponents, other.exponents)))

    @classmethod
    def one(cls, n: int) -> "Monomial":
        return cls((0,) * n)

    @classmethod
    def lcm_of(cls, monomials: Iterable["Monomial"]) -> "Monomial":
        ms = list(monomials)
        out = ms[0]
        for m in ms[1:]:
            out = out.lcm(m)
        return out

    @classmethod
    def parse(cls, text: str, n: int | None = None) -> "Monomial":
        """Parse ``x1^2*x3`` / ``x1^2 x3`` / ``1``."""
        text = text.strip()
        exps: dict[int, int] = {}
        if text not in ("", "1"):
            for tok in text.replace("*", " ").split():
                if not tok.startswith("x"):
                    raise ComplexError(f"bad monomial token {tok!r}")
                var, _, power = tok[1:].partition("^")
                if not var.isdigit() or int(var) < 1:
                    raise ComplexError(f"bad variable in {tok!r}")
                exps[int(var)] = exps.get(int(var), 0) + (int(power) if power else 1)
        size = max(exps, default=0)
        if n is None:
            n = size
        elif size > n:
            raise ComplexError(f"monomial {text!r} uses more than {n} variables")
        return cls(tuple(exps.get(i, 0) for i in range(1, n + 1)))

    def __str__(self):
        parts = []
        for i, e in enumerate(self.exponents, start=1):
            if e == 1:
                parts.append(f"x{i}")
            elif e > 1:
                parts.append(f"x{i}^{e}")
        return "*".join(parts) if parts else "1"


def vertex_label(v: Sequence) -> Monomial:
    p = as_point(v)
    if not is_integral(p):
        raise ComplexError(f"vertex {fmt_point(p)} is not a lattice point")
    if any(c < 0 for c in p):
        raise ComplexError(f"vertex {fmt_point(p)} has a negative coordinate")
    return Monomial(tuple(int(c) for c in p))


def cell_key(points: Iterable) -> CellKey:
    return tuple(sorted(set(as_point(p) for p in points)))


class FacePoset:
    """A finite graded poset given by its covering (facet) relation.

    ``facets[c]`` lists the cells covered by ``c``.  Labels, when present,
    map every cell to a :class:`Monomial`.
    """

    def __init__(self, dims: Mapping, facets: Mapping, labels: Mapping | None = None):
        self.dims = dict(dims)
        self._facets = {c: tuple(sorted(facets.get(c, ()))) for c in self.dims}
        self._cofacets: dict = {c: [] for c in self.dims}
        for c, fs in self._facets.items():
            for f in fs:
                if f not in self.dims:
                    raise ComplexError("facet relation references an unknown cell")
                if self.dims[f] != self.dims[c] - 1:
                    raise ComplexError("covering relation must drop dimension by one")
                self._cofacets[f].append(c)
        for c in self._cofacets:
            self._cofacets[c].sort()
        self.labels = dict(labels) if labels is not None else None

    @property
    def cells(self) -> list:
        return sorted(self.dims, key=lambda c: (self.dims[c], c))

    def __contains__(self, c) -> bool:
        return c in self.dims

    def __len__(self) -> int:
        return len(self.dims)

    def dim(self, c) -> int:
        return self.dims[c]

    def facets(self, c) -> tuple:
        return self._facets[c]

    def cofacets(self, c) -> list:
        return self._cofacets[c]

    @property
    def is_labeled(self) -> bool:
        return self.labels is not None

    def label(self, c) -> Monomial:
        if self.labels is None:
            raise ComplexError("complex carries no labels")
        return self.labels[c]

    def hasse_edges(self):
        for c in self.cells:
            for f in self._facets[c]:
                yield f, c

    def f_vector(self) -> tuple[int, ...]:
        if not self.dims:
            return ()
        top = max(self.dims.values())
        counts = [0] * (top + 1)
        for d in self.dims.values():
            counts[d] += 1
        return tuple(counts)

    def maximal_cells(self) -> list:
        return [c for c in self.cells if not self._cofacets[c]]

    def faces_of(self, c) -> set:
        """All cells below or equal to c."""
        seen = {c}
        todo = [c]
        while todo:
            x = todo.pop()
            for f in self._facets[x]:
                if f not in seen:
                    seen.add(f)
                    todo.append(f)
        return seen

    def subposet(self, cells: Iterable) -> "FacePoset":
        keep = set(cells)
        facets = {c: [f for f in self._facets[c] if f in keep] for c in keep}
        labels = {c: self.labels[c] for c in keep} if self.labels is not None else None
        return FacePoset({c: self.dims[c] for c in keep}, facets, labels)

    def vertices_of(self, c) -> list:
        return [x for x in self.faces_of(c) if self.dims[x] == 0]


class PolyComplex(FacePoset):
    """A polyhedral complex; cell keys are sorted tuples of vertex points."""

    @property
    def vertices(self) -> tuple:
        return tuple(sorted(c[0] for c in self.dims if self.dims[c] == 0))

    @classmethod
    def from_polytopes(cls, polytopes: Iterable[Polytope], label: bool | None = None) -> "PolyComplex":
        dims: dict = {}
        facets: dict = {}
        for P in polytopes:
            verts = P.vertices
            fl = P.face_lattice
            for f, d in fl.items():
                key = tuple(verts[i] for i in sorted(f))
                if key in dims and dims[key] != d:
                    raise ComplexError("inconsistent cell dimensions")
                dims[key] = d
                facets.setdefault(key, set())
            for lower, upper in P.face_covers():
                facets[tuple(verts[i] for i in sorted(upper))].add(
                    tuple(verts[i] for i in sorted(lower))
                )
        cx = cls(dims, facets)
        if label is None:
            label = all(is_integral(v) and min(v) >= 0 for v in cx.vertices)
        if label:
            cx.attach_labels()
        return cx

    def attach_labels(self) -> None:
        vlabels = {v: vertex_label(v) for v in self.vertices}
        self.labels = {c: Monomial.lcm_of(vlabels[v] for v in c) for c in self.dims}

    def geometry(self, c) -> Polytope:
        return Polytope(c)

    def vertex_ids(self, c) -> list[int]:
        index = {v: i for i, v in enumerate(self.vertices)}
        return sorted(index[v] for v in c)

    def check_label_law(self) -> None:
        for c in self.dims:
            expected = Monomial.lcm_of(vertex_label(v) for v in c)
            if self.labels[c] != expected:
                raise ComplexError(f"label law fails on cell {c}")

    def to_document(self, all_cells: bool = False) -> dict:
        index = {v: i for i, v in enumerate(self.vertices)}
        cells = self.cells if all_cells else self.maximal_cells()
        return {
            "vertices": [[_num(x) for x in v] for v in self.vertices],
            "cells": sorted(sorted(index[v] for v in c) for c in cells),
        }

    @classmethod
    def from_document(cls, doc: Mapping) -> "PolyComplex":
        """Rebuild a complex from ``{"vertices": [...], "cells": [[ids], ...]}``."""
        try:
            verts = [as_point(_parse_num(x) for x in v) for v in doc["vertices"]]
            cells = doc.get("cells")
        except (KeyError, TypeError) as exc:
            raise ComplexError(f"malformed complex document: {exc}") from None
        if cells is None:
            cells = [list(range(len(verts)))]
        polys = []
        for ids in cells:
            if not ids or any(not isinstance(i, int) or not 0 <= i < len(verts) for i in ids):
                raise ComplexError(f"bad cell {ids!r}")
            P = Polytope(tuple(verts[i] for i in ids))
            if convex_hull_vertices(P.vertices).vertices != P.vertices:
                raise ComplexError(f"cell {ids!r} lists a non-vertex point")
            polys.append(P)
        return cls.from_polytopes(polys)


def _num(x: Fraction):
    return int(x) if x.denominator == 1 else str(x)


def _parse_num(x):
    if isinstance(x, float):
        raise ComplexError(f"floating point literal {x!r} not allowed")
    if isinstance(x, bool):
        raise ComplexError("boolean is not a coordinate")
    if isinstance(x, (int, str)):
        return Fraction(x)
    raise ComplexError(f"bad coordinate {x!r}")


# -- X_P -----------------------------------------------------------------------

def _slab_split(pieces: list[Polytope], i: int, d: int) -> list[Polytope]:
    n = pieces[0].ambient_dim
    out = []
    for Q in pieces:
        lo = min(v[i] for v in Q.vertices)
        hi = max(v[i] for v in Q.vertices)
        cuts = list(range(math.floor(lo) + 1, math.ceil(hi)))
        if not cuts:
            out.append(Q)
            continue
        bounds = [lo] + cuts + [hi]
        for a, b in zip(bounds, bounds[1:]):
            hs = []
            if a != lo:
                hs.append(coordinate_halfspace(i, a, ">=", n))
            if b != hi:
                hs.append(coordinate_halfspace(i, b, "<=", n))
            R = intersect(Q, hs)
            if R is not None and R.affine_dim == d:
                out.append(R)
    return out


@lru_cache(maxsize=4096)
def maximal_cells_XP(P: Polytope) -> tuple[Polytope, ...]:
    """Full-dimensional pieces of P cut by every integer hyperplane e_i = j."""
    pieces = [P]
    d = P.affine_dim
    for i in range(P.ambient_dim):
        pieces = _slab_split(pieces, i, d)
    return tuple(sorted(pieces, key=lambda Q: Q.vertices))


@lru_cache(maxsize=4096)
def build_XP(P: Polytope) -> PolyComplex:
    """The subdivision X_P; labeled when every vertex is a lattice point."""
    return PolyComplex.from_polytopes(maximal_cells_XP(P))


def half_open_cube(cell) -> tuple[int, ...]:
    """The e with relint(cell) inside (e_1-1, e_1] x ... x (e_n-1, e_n]."""
    pts = list(cell.vertices) if isinstance(cell, Polytope) else list(cell)
    if not all(is_integral(p) for p in pts):
        raise ComplexError("half-open cube needs a lattice cell")
    n = len(pts[0])
    e = tuple(int(max(p[i] for p in pts)) for i in range(n))
    for i in range(n):
        if min(p[i] for p in pts) < e[i] - 1:
            raise ComplexError("cell is not inside a single unit cube")
    return e


def in_boundary(P: Polytope, cell) -> bool:
    """True when the cell lies on the relative boundary of P."""
    return any(all(h.is_tight(v) for v in cell) for h in P.facets)


def interior_poset(P: Polytope, X: PolyComplex | None = None) -> FacePoset:
    """O_P: the cells of X_P not contained in the boundary of P."""
    if X is None:
        X = build_XP(P)
    return X.subposet(c for c in X.dims if not in_boundary(P, c))


def restrict_complex(X: FacePoset, m: Monomial):
    """Subcomplex of cells whose label divides m."""
    keep = [c for c in X.dims if X.label(c).divides(m)]
    sub = X.subposet(keep)
    if isinstance(X, PolyComplex):
        out = PolyComplex(sub.dims, {c: sub.facets(c) for c in sub.dims}, sub.labels)
        return out
    return sub


def cell_str(c) -> str:
    return "{" + ", ".join(fmt_point(p) for p in c) + "}"


__all__ = [
    "CellKey",
    "ComplexError",
    "FacePoset",
    "GeometryError",
    "Monomial",
    "PolyComplex",
    "build_XP",
    "cell_key",
    "cell_str",
    "half_open_cube",
    "in_boundary",
    "interior_poset",
    "maximal_cells_XP",
    "restrict_complex",
    "vertex_label",
]
