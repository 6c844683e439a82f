"""Cellular resolution checks, Betti tables and an independent Koszul oracle.

Homology of a polyhedral (or Morse) complex is computed on the order complex
of its face poset, after first removing free-face pairs; an elementary
collapse does not change the homotopy type, and it keeps the simplicial
matrices small.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .diced_sharp import Verdict, is_diced
from .exact_geometry import Polytope, lattice_points
from .polyhedral_complex import FacePoset, Monomial, cell_str

ORACLE_MAX_GENERATORS = 12


class ResolutionError(ValueError):
    pass


# -- fields --------------------------------------------------------------------

def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % k for k in range(2, int(p ** 0.5) + 1))


@dataclass(frozen=True)
class Field:
    """The rationals (p=None) or GF(p)."""

    p: int | None = None

    def __post_init__(self):
        if self.p is not None and not _is_prime(self.p):
            raise ResolutionError(f"{self.p} is not prime")

    @classmethod
    def parse(cls, text: str) -> "Field":
        t = text.strip().lower()
        if t in ("q", "qq", "rational", "rationals"):
            return cls()
        for prefix in ("gf:", "gf"):
            if t.startswith(prefix) and t[len(prefix):].isdigit():
                return cls(int(t[len(prefix):]))
        raise ResolutionError(f"unknown field {text!r} (use q or gf:p)")

    def coerce(self, x: int):
        return Fraction(x) if self.p is None else x % self.p

    def inverse(self, x):
        return 1 / x if self.p is None else pow(x, -1, self.p)

    def __str__(self):
        return "Q" if self.p is None else f"GF({self.p})"


QQ = Field()


def matrix_rank(columns: Sequence[Mapping[int, int]], fld: Field = QQ) -> int:
    """Rank of a sparse matrix given as a list of {row: entry} columns."""
    pivots: dict[int, dict] = {}
    r = 0
    for col in columns:
        v = {k: fld.coerce(x) for k, x in col.items()}
        v = {k: x for k, x in v.items() if x}
        while v:
            low = max(v)
            piv = pivots.get(low)
            if piv is None:
                pivots[low] = v
                r += 1
                break
            f = v[low] * fld.inverse(piv[low])
            for k, x in piv.items():
                y = v.get(k, 0) - f * x
                if fld.p is not None:
                    y %= fld.p
                if y:
                    v[k] = y
                else:
                    v.pop(k, None)
    return r


# -- simplicial complexes ------------------------------------------------------

class SimplicialComplex:
    """Faces closed under taking nonempty subsets.

    ``void`` distinguishes the void complex (no faces at all) from {emptyset}
    when there are no nonempty faces.
    """

    def __init__(self, faces: Iterable[Iterable], void: bool = False):
        closed: set[frozenset] = set()
        for f in faces:
            f = frozenset(f)
            if not f or f in closed:
                continue
            items = sorted(f, key=repr)
            for k in range(1, len(items) + 1):
                closed.update(frozenset(s) for s in itertools.combinations(items, k))
        self.faces = closed
        self.void = void and not closed

    @property
    def dim(self) -> int:
        return max((len(f) for f in self.faces), default=0) - 1

    def __len__(self):
        return len(self.faces)


def _reduced_homology_table(K: SimplicialComplex, fld: Field) -> dict[int, int]:
    if K.void:
        return {}
    by_dim: dict[int, list] = {}
    for f in K.faces:
        by_dim.setdefault(len(f) - 1, []).append(tuple(sorted(f, key=repr)))
    top = max(by_dim, default=-1)
    index = {k: {s: i for i, s in enumerate(sorted(by_dim.get(k, []), key=repr))} for k in range(top + 1)}
    ranks = {0: 1 if by_dim else 0}  # augmentation C_0 -> field
    for k in range(1, top + 1):
        cols = []
        lower = index[k - 1]
        for s in index[k]:
            cols.append({lower[s[:i] + s[i + 1:]]: (-1) ** i for i in range(len(s))})
        ranks[k] = matrix_rank(cols, fld)
    out = {-1: 1 - ranks[0]}
    for k in range(top + 1):
        out[k] = len(index[k]) - ranks.get(k, 0) - ranks.get(k + 1, 0)
    return out


def reduced_homology(K: SimplicialComplex, fld: Field = QQ) -> list[int]:
    """Reduced Betti numbers in degrees 0..dim K."""
    table = _reduced_homology_table(K, fld)
    return [table[k] for k in range(K.dim + 1)] if K.faces else []


def order_complex(poset: FacePoset, cells: Iterable | None = None) -> SimplicialComplex:
    """Chains of the (sub)poset, as a simplicial complex on the cells."""
    keep = set(poset.dims if cells is None else cells)
    above: dict = {c: set() for c in keep}
    for c in keep:
        for f in poset.faces_of(c):
            if f != c and f in keep:
                above[f].add(c)
    maximal_chains = []

    def grow(chain):
        nxt = [c for c in above[chain[-1]]]
        extended = False
        for c in nxt:
            if all(c in above[x] for x in chain):
                grow(chain + [c])
                extended = True
        if not extended:
            maximal_chains.append(chain)

    for c in keep:
        if not any(f != c and f in keep for f in poset.faces_of(c)):
            grow([c])
    return SimplicialComplex(maximal_chains)


def collapse(poset: FacePoset, cells: Iterable) -> set:
    """Remove free-face pairs (s, t) until none is left; returns the survivors."""
    alive = set(cells)
    cof = {c: {x for x in poset.cofacets(c) if x in alive} for c in alive}
    queue = sorted(alive, key=lambda c: (poset.dim(c), c))
    while queue:
        s = queue.pop()
        if s not in alive or len(cof[s]) != 1:
            continue
        (t,) = cof[s]
        if cof[t]:
            continue
        alive.discard(s)
        alive.discard(t)
        touched = []
        for x in (s, t):
            for f in poset.facets(x):
                if f in alive:
                    cof[f].discard(x)
                    touched.append(f)
        for f in touched:
            queue.append(f)
            queue.extend(g for g in poset.facets(f) if g in alive)
    return alive


def poset_homology(poset: FacePoset, cells: Iterable | None = None, fld: Field = QQ,
                   collapse_first: bool = True) -> list[int]:
    """Reduced homology of the subcomplex spanned by `cells` (face-closed)."""
    cells = set(poset.dims if cells is None else cells)
    if collapse_first:
        cells = collapse(poset, cells)
        if len(cells) == 1:
            return [0]
    return reduced_homology(order_complex(poset, cells), fld)


def is_acyclic(homology: Sequence[int]) -> bool:
    return not any(homology)


# -- ideals and Betti tables -----------------------------------------------------

@dataclass(frozen=True)
class MonomialIdeal:
    generators: tuple[Monomial, ...]

    def __post_init__(self):
        gens = sorted(set(self.generators))
        if len({g.nvars for g in gens}) > 1:
            raise ResolutionError("generators live in different polynomial rings")
        minimal = [g for g in gens if not any(h != g and h.divides(g) for h in gens)]
        object.__setattr__(self, "generators", tuple(minimal))

    @property
    def nvars(self) -> int:
        return self.generators[0].nvars if self.generators else 0

    def contains(self, m: Monomial) -> bool:
        return any(g.divides(m) for g in self.generators)

    def __str__(self):
        return "<" + ", ".join(str(g) for g in self.generators) + ">"


def ideal_of_polytope(P: Polytope) -> MonomialIdeal:
    if not is_diced(P):
        raise ResolutionError("ideal of a non-diced polytope is not supported")
    return MonomialIdeal(tuple(Monomial(p) for p in lattice_points(P)))


def lcm_closure(monomials: Iterable[Monomial]) -> list[Monomial]:
    closure = set(monomials)
    frontier = set(closure)
    while frontier:
        new = set()
        for a in frontier:
            for b in closure:
                c = a.lcm(b)
                if c not in closure:
                    new.add(c)
        closure |= new
        frontier = new
    return sorted(closure, key=lambda m: (m.degree, m.exponents))


@dataclass
class BettiTable:
    entries: dict = field(default_factory=dict)  # (i, Monomial) -> rank

    def add(self, i: int, m: Monomial, k: int = 1) -> None:
        if k:
            self.entries[(i, m)] = self.entries.get((i, m), 0) + k

    def rows(self) -> list[tuple[int, Monomial, int]]:
        return sorted(((i, m, k) for (i, m), k in self.entries.items()),
                      key=lambda r: (r[0], r[1].exponents))

    def totals(self) -> tuple[int, ...]:
        if not self.entries:
            return ()
        top = max(i for i, _ in self.entries)
        out = [0] * (top + 1)
        for (i, _), k in self.entries.items():
            out[i] += k
        return tuple(out)

    def euler_characteristic(self) -> int:
        return sum((-1) ** i * k for i, k in enumerate(self.totals()))

    def __eq__(self, other):
        return isinstance(other, BettiTable) and self.entries == other.entries

    def to_text(self) -> str:
        lines = [f"{i} {' '.join(map(str, m.exponents))} {k}" for i, m, k in self.rows()]
        lines.append("totals " + " ".join(map(str, self.totals())))
        return "\n".join(lines)

    def to_json(self) -> dict:
        return {
            "rows": [[i, list(m.exponents), k] for i, m, k in self.rows()],
            "totals": list(self.totals()),
        }


@dataclass
class ResolutionReport:
    ok: bool
    field: str
    checked: list  # multidegrees whose restriction was nonempty
    failures: list  # (Monomial, reduced homology list)

    def minimal_failures(self) -> list:
        fs = [m for m, _ in self.failures]
        return [(m, h) for m, h in self.failures
                if not any(o != m and o.divides(m) for o in fs)]


def vertex_ideal(X: FacePoset) -> MonomialIdeal:
    return MonomialIdeal(tuple(X.label(c) for c in X.dims if X.dim(c) == 0))


def verify_cellular_resolution(X: FacePoset, I: MonomialIdeal | None = None,
                               fld: Field = QQ) -> ResolutionReport:
    if not X.is_labeled:
        raise ResolutionError("complex must be labeled")
    J = vertex_ideal(X)
    if I is not None and J.generators != I.generators:
        raise ResolutionError(f"vertex labels generate {J}, not {I}")
    vlabels = sorted({X.label(c) for c in X.dims if X.dim(c) == 0})
    checked, failures = [], []
    for m in lcm_closure(vlabels):
        cells = [c for c in X.dims if X.label(c).divides(m)]
        if not cells:
            continue
        checked.append(m)
        h = poset_homology(X, cells, fld)
        if not is_acyclic(h):
            failures.append((m, h))
    return ResolutionReport(not failures, str(fld), checked, failures)


def minimality_witnesses(X: FacePoset) -> list[tuple]:
    """Hasse edges (lower, upper) with equal labels, interior ones first."""
    out = [(l, u) for l, u in X.hasse_edges() if X.label(l) == X.label(u)]
    return sorted(out, key=lambda p: (-len(X.cofacets(p[0])), p[0], p[1]))


def is_minimal(X: FacePoset) -> Verdict:
    ws = minimality_witnesses(X)
    return Verdict(not ws, ws[0] if ws else None)


def betti_table(X: FacePoset) -> BettiTable:
    v = is_minimal(X)
    if not v:
        l, u = v.witness
        raise ResolutionError(
            f"complex is not minimal: {cell_str(l)} and {cell_str(u)} share a label"
        )
    table = BettiTable()
    for c in X.dims:
        table.add(X.dim(c), X.label(c))
    return table


def upper_koszul_complex(I: MonomialIdeal, m: Monomial) -> SimplicialComplex:
    support = [i for i, e in enumerate(m.exponents) if e > 0]
    faces = []
    for k in range(1, len(support) + 1):
        for S in itertools.combinations(support, k):
            dec = Monomial(tuple(e - (i in S) for i, e in enumerate(m.exponents)))
            if I.contains(dec):
                faces.append(S)
    return SimplicialComplex(faces, void=not I.contains(m))


def koszul_betti_oracle(I: MonomialIdeal, fld: Field = QQ) -> BettiTable:
    """beta_{i,m}(I) = dim reduced H_{i-1} of the upper Koszul complex at m."""
    if len(I.generators) > ORACLE_MAX_GENERATORS:
        raise ResolutionError(
            f"oracle limited to {ORACLE_MAX_GENERATORS} generators, got {len(I.generators)}"
        )
    table = BettiTable()
    for m in lcm_closure(I.generators):
        K = upper_koszul_complex(I, m)
        for k, rk in _reduced_homology_table(K, fld).items():
            table.add(k + 1, m, rk)
    return table
