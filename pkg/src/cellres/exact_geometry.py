"""Exact rational convex geometry.

Everything here works over :class:`fractions.Fraction` (or plain ``int``);
no floating point is accepted.  Facets are found with a double description
(Motzkin) iteration on integer vectors, which is plenty for the sizes this
package deals with (ambient dimension <= 6, a few dozen vertices).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

Point = tuple  # entries are int when integral, Fraction otherwise


class GeometryError(ValueError):
    pass


def as_point(coords: Iterable) -> Point:
    out = []
    for c in coords:
        if isinstance(c, float):
            raise TypeError("floating point coordinates are not allowed")
        c = Fraction(c)
        out.append(c.numerator if c.denominator == 1 else c)
    if not out:
        raise GeometryError("points need at least one coordinate")
    return tuple(out)


def is_integral(p: Point) -> bool:
    return all(Fraction(c).denominator == 1 for c in p)


def fmt_point(p: Point) -> str:
    return "(" + ", ".join(str(c) for c in p) + ")"


# -- small exact linear algebra ---------------------------------------------

def _dot(a: Sequence, b: Sequence):
    return sum(x * y for x, y in zip(a, b))


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b) if a and b else max(a, b, 1)


def primitive(vec: Sequence) -> tuple[int, ...]:
    """Positive multiple of a rational vector with coprime integer entries."""
    den = 1
    for x in vec:
        den = _lcm(den, Fraction(x).denominator)
    ints = [int(Fraction(x) * den) for x in vec]
    g = 0
    for x in ints:
        g = math.gcd(g, x)
    if g == 0:
        return tuple(ints)
    return tuple(x // g for x in ints)


def rref(rows: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
    m = [[Fraction(x) for x in r] for r in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows: Sequence[Sequence]) -> int:
    return len(rref(rows)[1])


def det(mat: Sequence[Sequence]) -> Fraction:
    m = [[Fraction(x) for x in r] for r in mat]
    n = len(m)
    sign = 1
    result = Fraction(1)
    for c in range(n):
        pr = next((i for i in range(c, n) if m[i][c] != 0), None)
        if pr is None:
            return Fraction(0)
        if pr != c:
            m[c], m[pr] = m[pr], m[c]
            sign = -sign
        piv = m[c][c]
        result *= piv
        for i in range(c + 1, n):
            if m[i][c] != 0:
                f = m[i][c] / piv
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return sign * result


def _lattice_det(gens: list[list[int]], n: int) -> int:
    """|det| of the full-rank lattice in Z^n spanned by integer vectors `gens`."""
    pool = [list(g) for g in gens if any(g)]
    result = 1
    for row in range(n):
        while True:
            nz = [g for g in pool if g[row] != 0]
            if not nz:
                raise GeometryError("generators do not span a full-rank lattice")
            piv = min(nz, key=lambda g: abs(g[row]))
            done = True
            for g in nz:
                if g is piv:
                    continue
                q = g[row] // piv[row]
                for k in range(n):
                    g[k] -= q * piv[k]
                if g[row] != 0:
                    done = False
            pool = [g for g in pool if any(g)]
            if done:
                break
        result *= abs(piv[row])
        pool = [g for g in pool if g is not piv]
    return result


# -- double description ------------------------------------------------------

def _dd_cone(constraints: Sequence[Sequence[int]], dim: int):
    """Generators of the cone {y in R^dim : a.y >= 0 for every a}.

    Returns (lineality basis, extreme rays), both as primitive integer tuples.
    """
    lin = [tuple(int(i == j) for j in range(dim)) for i in range(dim)]
    rays: list[tuple[int, ...]] = []
    zsets: list[int] = []
    for k, a in enumerate(constraints):
        bit = 1 << k
        lvals = [_dot(a, l) for l in lin]
        piv = next((i for i, v in enumerate(lvals) if v != 0), None)
        if piv is not None:
            l0 = lin[piv]
            s = lvals[piv]
            if s < 0:
                l0 = tuple(-x for x in l0)
                s = -s
            lin = [
                primitive([s * x - v * y for x, y in zip(l, l0)])
                for i, (l, v) in enumerate(zip(lin, lvals))
                if i != piv
            ]
            lin = [l for l in lin if any(l)]
            new_rays = []
            for r in rays:
                v = _dot(a, r)
                new_rays.append(primitive([s * x - v * y for x, y in zip(r, l0)]))
            rays = new_rays + [l0]
            zsets = [z | bit for z in zsets] + [bit - 1]
            continue

        vals = [_dot(a, r) for r in rays]
        pos = [i for i, v in enumerate(vals) if v > 0]
        neg = [i for i, v in enumerate(vals) if v < 0]
        keep = [i for i, v in enumerate(vals) if v >= 0]
        new_rays = [rays[i] for i in keep]
        new_z = [zsets[i] | bit if vals[i] == 0 else zsets[i] for i in keep]
        for i in pos:
            for j in neg:
                z = zsets[i] & zsets[j]
                adjacent = True
                for t, zt in enumerate(zsets):
                    if t != i and t != j and z & ~zt == 0:
                        adjacent = False
                        break
                if not adjacent:
                    continue
                vi, vj = vals[i], vals[j]
                ray = primitive([vi * y - vj * x for x, y in zip(rays[i], rays[j])])
                new_rays.append(ray)
                new_z.append(z | bit)
        rays, zsets = new_rays, new_z
    return lin, rays


def _int_row(coeffs: Sequence) -> tuple[int, ...]:
    """Scale a rational row by a positive integer so it becomes integral."""
    den = 1
    for x in coeffs:
        den = _lcm(den, Fraction(x).denominator)
    return tuple(int(Fraction(x) * den) for x in coeffs)


# -- halfspaces ----------------------------------------------------------------

_SENSES = ("<=", ">=", "=")


@dataclass(frozen=True)
class Halfspace:
    """``normal . x  (<=|>=|=)  offset`` with primitive integer data."""

    normal: tuple[int, ...]
    offset: int
    sense: str = "<="

    def __post_init__(self):
        if self.sense not in _SENSES:
            raise GeometryError(f"unknown sense {self.sense!r}")
        if not any(self.normal):
            raise GeometryError("halfspace normal must be nonzero")

    @classmethod
    def make(cls, normal: Sequence, offset, sense: str = "<=") -> "Halfspace":
        data = primitive(list(normal) + [offset])
        return cls(tuple(data[:-1]), data[-1], sense)

    def value(self, p: Point):
        return _dot(self.normal, p)

    def contains(self, p: Point) -> bool:
        v = self.value(p)
        if self.sense == "<=":
            return v <= self.offset
        if self.sense == ">=":
            return v >= self.offset
        return v == self.offset

    def is_tight(self, p: Point) -> bool:
        return self.value(p) == self.offset

    def as_inequalities(self) -> list[tuple[tuple[int, ...], int]]:
        """The constraint as a list of ``(a, b)`` meaning ``a.x <= b``."""
        neg = (tuple(-x for x in self.normal), -self.offset)
        if self.sense == "<=":
            return [(self.normal, self.offset)]
        if self.sense == ">=":
            return [neg]
        return [(self.normal, self.offset), neg]

    def __str__(self):
        terms = " + ".join(f"{c}*e{i + 1}" for i, c in enumerate(self.normal) if c)
        return f"{terms} {self.sense} {self.offset}"


def coordinate_halfspace(i: int, j: int, sense: str, n: int) -> Halfspace:
    """H_{i,j} (sense '='), or its closed sides (sense '>=' / '<='); i is 0-based."""
    normal = tuple(int(k == i) for k in range(n))
    return Halfspace(normal, j, sense)


# -- polytopes -----------------------------------------------------------------

@dataclass(frozen=True)
class _Chart:
    origin: Point
    basis: tuple[tuple[Fraction, ...], ...]  # rref rows spanning the direction space
    pivots: tuple[int, ...]

    def to_chart(self, p: Point) -> tuple[Fraction, ...]:
        return tuple(p[j] - self.origin[j] for j in self.pivots)

    def from_chart(self, y: Sequence) -> Point:
        x = list(self.origin)
        for yt, row in zip(y, self.basis):
            for k in range(len(x)):
                x[k] += yt * row[k]
        return as_point(x)

    def pull_back(self, a: Sequence, b) -> tuple[tuple[Fraction, ...], Fraction]:
        """Express the ambient constraint a.x <= b in chart coordinates."""
        coeffs = tuple(_dot(row, a) for row in self.basis)
        return coeffs, Fraction(b) - _dot(a, self.origin)


@dataclass(frozen=True, eq=True)
class Polytope:
    """A polytope stored by its (sorted, irredundant) vertex tuple.

    Build one from arbitrary points with :func:`convex_hull_vertices`; the
    constructor itself trusts that ``vertices`` are exactly the extreme points.
    """

    vertices: tuple

    def __post_init__(self):
        if not self.vertices:
            raise GeometryError("empty point set")
        verts = tuple(sorted(set(as_point(v) for v in self.vertices)))
        object.__setattr__(self, "vertices", verts)

    @property
    def ambient_dim(self) -> int:
        return len(self.vertices[0])

    @cached_property
    def chart(self) -> _Chart:
        p0 = self.vertices[0]
        diffs = [[a - b for a, b in zip(v, p0)] for v in self.vertices[1:]]
        rows, pivots = rref(diffs)
        return _Chart(p0, tuple(tuple(r) for r in rows), tuple(pivots))

    @property
    def affine_dim(self) -> int:
        return len(self.chart.pivots)

    @property
    def is_lattice(self) -> bool:
        return all(is_integral(v) for v in self.vertices)

    @cached_property
    def _chart_facets(self) -> tuple[tuple[tuple[int, ...], int], ...]:
        d = self.affine_dim
        if d == 0:
            return ()
        ys = [self.chart.to_chart(v) for v in self.vertices]
        constraints = [_int_row([-c for c in y] + [1]) for y in ys]
        lin, rays = _dd_cone(constraints, d + 1)
        if lin:
            raise GeometryError("degenerate chart in facet computation")
        return tuple(sorted((r[:-1], r[-1]) for r in rays))

    @cached_property
    def equalities(self) -> tuple[Halfspace, ...]:
        """Equations cutting out the affine hull."""
        ch = self.chart
        n = self.ambient_dim
        out = []
        for k in range(n):
            if k in ch.pivots:
                continue
            # x_k - sum_t basis[t][k] x_{J_t} = p0_k - sum_t basis[t][k] p0_{J_t}
            normal = [Fraction(0)] * n
            normal[k] = Fraction(1)
            for t, j in enumerate(ch.pivots):
                normal[j] -= ch.basis[t][k]
            out.append(Halfspace.make(normal, _dot(normal, ch.origin), "="))
        return tuple(out)

    @cached_property
    def facets(self) -> tuple[Halfspace, ...]:
        """Facet inequalities ``a.x <= b``, valid on the affine hull."""
        ch = self.chart
        n = self.ambient_dim
        out = []
        for a, b in self._chart_facets:
            normal = [Fraction(0)] * n
            for t, j in enumerate(ch.pivots):
                normal[j] = Fraction(a[t])
            out.append(Halfspace.make(normal, b + _dot(normal, ch.origin), "<="))
        return tuple(out)

    @cached_property
    def facet_incidence(self) -> tuple[frozenset, ...]:
        """For each facet, the indices of the vertices lying on it."""
        return tuple(
            frozenset(i for i, v in enumerate(self.vertices) if h.is_tight(v))
            for h in self.facets
        )

    def contains(self, p: Point) -> bool:
        p = as_point(p)
        return all(h.contains(p) for h in self.equalities) and all(
            h.contains(p) for h in self.facets
        )

    @cached_property
    def face_lattice(self) -> dict[frozenset, int]:
        """All nonempty faces as vertex-index sets, mapped to their dimension."""
        full = frozenset(range(len(self.vertices)))
        seen = {full}
        todo = [full]
        while todo:
            f = todo.pop()
            for inc in self.facet_incidence:
                g = f & inc
                if g and g not in seen:
                    seen.add(g)
                    todo.append(g)
        return {f: affine_dim([self.vertices[i] for i in f]) for f in seen}

    def faces(self) -> list["Polytope"]:
        return [
            Polytope(tuple(self.vertices[i] for i in sorted(f)))
            for f in sorted(self.face_lattice, key=lambda f: (self.face_lattice[f], sorted(f)))
        ]

    def face_covers(self) -> list[tuple[frozenset, frozenset]]:
        """Covering pairs (facet-of relation) in the face lattice as (lower, upper)."""
        fl = self.face_lattice
        out = []
        for upper, du in fl.items():
            for lower, dl in fl.items():
                if dl == du - 1 and lower < upper:
                    out.append((lower, upper))
        return out

    def __str__(self):
        return "conv{" + ", ".join(fmt_point(v) for v in self.vertices) + "}"


def affine_dim(points: Sequence) -> int:
    if not points:
        raise GeometryError("empty point set")
    pts = [as_point(p) for p in points]
    p0 = pts[0]
    return rank([[a - b for a, b in zip(p, p0)] for p in pts[1:]])


def convex_hull_vertices(points: Iterable) -> Polytope:
    pts = sorted(set(as_point(p) for p in points))
    if not pts:
        raise GeometryError("empty point set")
    raw = Polytope.__new__(Polytope)
    object.__setattr__(raw, "vertices", tuple(pts))
    d = raw.affine_dim
    if d == 0:
        return Polytope(tuple(pts[:1]))
    normals = [h.normal for h in raw.facets]
    keep = []
    for i, p in enumerate(pts):
        tight = [normals[k] for k, inc in enumerate(raw.facet_incidence) if i in inc]
        if len(tight) >= d and _rank_on(raw, tight) == d:
            keep.append(p)
    return Polytope(tuple(keep))


def _rank_on(P: Polytope, normals) -> int:
    """Rank of facet normals restricted to the direction space of P."""
    rows = [[_dot(row, a) for row in P.chart.basis] for a in normals]
    return rank(rows)


def facet_description(P: Polytope) -> list[Halfspace]:
    return list(P.equalities) + list(P.facets)


def _vertex_enum(ineqs: Sequence[tuple[Sequence, object]], dim: int):
    """Vertices (as rational tuples) of {y in R^dim : a.y <= b}; None if empty."""
    constraints = [_int_row([-x for x in a] + [b]) for a, b in ineqs]
    constraints.append(tuple([0] * dim + [1]))
    lin, rays = _dd_cone(constraints, dim + 1)
    bounded = not lin and all(r[-1] > 0 for r in rays)
    verts = [tuple(Fraction(x, r[-1]) for x in r[:-1]) for r in rays if r[-1] > 0]
    if not verts:
        return None
    if not bounded:
        raise GeometryError("unbounded feasible region")
    return verts


def intersect(P: Polytope, cuts: Sequence[Halfspace]) -> Polytope | None:
    """Exact V-representation of P intersected with `cuts`; None when empty."""
    ch = P.chart
    ineqs: list = [(a, b) for a, b in P._chart_facets]
    for h in cuts:
        for a, b in h.as_inequalities():
            ineqs.append(ch.pull_back(a, b))
    d = P.affine_dim
    if d == 0:
        v = P.vertices[0]
        return P if all(h.contains(v) for h in cuts) else None
    ys = _vertex_enum(ineqs, d)
    if ys is None:
        return None
    # extreme rays of the homogenized cone are exactly the vertices
    return Polytope(tuple(ch.from_chart(y) for y in ys))


def polytope_from_inequalities(ineqs: Sequence[Halfspace], n: int) -> Polytope | None:
    """Polytope {x in R^n : all constraints}; None if empty, error if unbounded."""
    rows = []
    for h in ineqs:
        rows.extend(h.as_inequalities())
    verts = _vertex_enum(rows, n)
    if verts is None:
        return None
    return Polytope(tuple(verts))


def lattice_points(P: Polytope) -> list[tuple[int, ...]]:
    n = P.ambient_dim
    lo = [math.ceil(min(v[i] for v in P.vertices)) for i in range(n)]
    hi = [math.floor(max(v[i] for v in P.vertices)) for i in range(n)]
    ranges = [range(lo[i], hi[i] + 1) for i in range(n)]
    return [p for p in itertools.product(*ranges) if P.contains(p)]


@lru_cache(maxsize=None)
def _chart_index(P: Polytope) -> int:
    """Index of the chart projection of (aff(P) - origin) cap Z^n inside Z^d."""
    ch = P.chart
    n, d = P.ambient_dim, P.affine_dim
    if d == 0:
        return 1
    q = 1
    for row in ch.basis:
        for x in row:
            q = _lcm(q, x.denominator)
    cols = [[int(ch.basis[t][k] * q) for k in range(n)] for t in range(d)]
    cols += [[q * int(k == i) for k in range(n)] for i in range(n)]
    return q ** n // _lattice_det(cols, n)


def _pulling_triangulation(P: Polytope) -> list[tuple[int, ...]]:
    fl = P.face_lattice
    covers: dict[frozenset, list[frozenset]] = {f: [] for f in fl}
    for lower, upper in P.face_covers():
        covers[upper].append(lower)
    memo: dict[frozenset, list[tuple[int, ...]]] = {}

    def tri(face: frozenset):
        if face in memo:
            return memo[face]
        apex = min(face)
        if fl[face] == 0:
            res = [(apex,)]
        else:
            res = []
            for g in covers[face]:
                if apex in g:
                    continue
                res.extend((apex,) + s for s in tri(g))
        memo[face] = res
        return res

    return tri(frozenset(range(len(P.vertices))))


def normalized_volume(P: Polytope) -> Fraction:
    """d! times the volume of P, measured in the lattice of its affine hull."""
    d = P.affine_dim
    if d == 0:
        return Fraction(1)
    ch = P.chart
    ys = [ch.to_chart(v) for v in P.vertices]
    total = Fraction(0)
    for simplex in _pulling_triangulation(P):
        y0 = ys[simplex[0]]
        total += abs(det([[a - b for a, b in zip(ys[i], y0)] for i in simplex[1:]]))
    return total / _chart_index(P)
