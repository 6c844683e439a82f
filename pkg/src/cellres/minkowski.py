"""Minkowski sums of standard simplices and their fine mixed subdivisions."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .diced_sharp import is_diced, is_totally_sharp, polytope_label, sharp_cell
from .exact_geometry import Polytope, convex_hull_vertices, intersect, normalized_volume
from .polyhedral_complex import Monomial, PolyComplex, build_XP, cell_str
from .resolution import (
    ORACLE_MAX_GENERATORS,
    QQ,
    BettiTable,
    Field,
    ResolutionReport,
    betti_table,
    ideal_of_polytope,
    is_minimal,
    koszul_betti_oracle,
    verify_cellular_resolution,
)


class MixedCellError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class SimplexSpec:
    """conv{e_i : i in vertex_indices}, indices 1-based."""

    vertex_indices: tuple[int, ...]

    def __post_init__(self):
        idx = tuple(sorted(set(self.vertex_indices)))
        if not idx:
            raise MixedCellError("simplex needs at least one vertex")
        if idx[0] < 1:
            raise MixedCellError("simplex indices start at 1")
        object.__setattr__(self, "vertex_indices", idx)

    @classmethod
    def of(cls, indices: Iterable[int]) -> "SimplexSpec":
        return cls(tuple(indices))

    @property
    def dim(self) -> int:
        return len(self.vertex_indices) - 1

    def vertices(self, n: int) -> list[tuple[int, ...]]:
        if self.vertex_indices[-1] > n:
            raise MixedCellError(f"index {self.vertex_indices[-1]} exceeds n = {n}")
        return [tuple(int(j == i - 1) for j in range(n)) for i in self.vertex_indices]

    def __str__(self):
        return "{" + ",".join(map(str, self.vertex_indices)) + "}"


@dataclass(frozen=True)
class MixedCellSpec:
    summands: tuple[SimplexSpec, ...]  # B_1, ..., B_m

    def __str__(self):
        return " ".join(map(str, self.summands))


@dataclass(frozen=True)
class MixedSubdivision:
    n: int
    summands: tuple[SimplexSpec, ...]  # P_1, ..., P_m
    cells: tuple[MixedCellSpec, ...]

    def polytope(self) -> Polytope:
        return minkowski_sum(self.summands, self.n)

    def without_cell(self, k: int) -> "MixedSubdivision":
        return MixedSubdivision(self.n, self.summands, self.cells[:k] + self.cells[k + 1:])


def _vertex_sums(vertex_lists: Sequence[Sequence[tuple]]) -> set:
    return {tuple(map(sum, zip(*choice))) for choice in itertools.product(*vertex_lists)}


def minkowski_sum(summands: Sequence[SimplexSpec], n: int | None = None) -> Polytope:
    if not summands:
        raise MixedCellError("minkowski_sum needs at least one summand")
    if n is None:
        n = max(s.vertex_indices[-1] for s in summands)
    return convex_hull_vertices(_vertex_sums([s.vertices(n) for s in summands]))


def mixed_cell_polytope(c: MixedCellSpec, n: int,
                        summands: Sequence[SimplexSpec] | None = None) -> tuple[Polytope, Monomial]:
    """The cell B_1+...+B_m and its label; e_i counts the B_j containing i."""
    if summands is not None:
        if len(summands) != len(c.summands):
            raise MixedCellError(f"cell has {len(c.summands)} simplices, expected {len(summands)}")
        for k, (B, Pk) in enumerate(zip(c.summands, summands), 1):
            if not set(B.vertex_indices) <= set(Pk.vertex_indices):
                raise MixedCellError(f"B_{k} = {B} is not a face of P_{k} = {Pk}")
    P = minkowski_sum(c.summands, n)
    if P.affine_dim != sum(B.dim for B in c.summands):
        raise MixedCellError(
            f"not a fine mixed cell: dimensions {'+'.join(str(B.dim) for B in c.summands)}"
            f" but the sum has dimension {P.affine_dim}"
        )
    e = tuple(sum(i + 1 in B.vertex_indices for B in c.summands) for i in range(n))
    return P, Monomial(e)


@dataclass
class MixedReport:
    ok: bool
    violations: list[str] = field(default_factory=list)
    details: dict = field(default_factory=dict)

    def __bool__(self):
        return self.ok


def _face_keys(P: Polytope) -> set:
    return {F.vertices for F in P.faces()}


def validate_mixed_subdivision(S: MixedSubdivision) -> MixedReport:
    bad: list[str] = []
    P = S.polytope()
    cells = []
    for k, c in enumerate(S.cells):
        try:
            cells.append((k, mixed_cell_polytope(c, S.n, S.summands)[0]))
        except MixedCellError as exc:
            bad.append(f"cell {k}: {exc}")
    for k, Q in cells:
        if not all(P.contains(v) for v in Q.vertices):
            bad.append(f"cell {k} is not contained in the Minkowski sum")
        if Q.affine_dim != P.affine_dim:
            bad.append(f"cell {k} has dimension {Q.affine_dim} < {P.affine_dim}")
    total = sum((normalized_volume(Q) for _, Q in cells if Q.affine_dim == P.affine_dim), Fraction(0))
    want = normalized_volume(P)
    if total != want:
        kind = "deficit" if total < want else "excess"
        bad.append(f"volume {kind}: cells sum to {total}, Minkowski sum has {want}")
    for (a, A), (b, B) in itertools.combinations(cells, 2):
        common = intersect(A, list(B.equalities) + list(B.facets))
        if common is None:
            continue
        if common.affine_dim == P.affine_dim:
            bad.append(f"cells {a} and {b} overlap in a full-dimensional region")
        elif common.vertices not in _face_keys(A) or common.vertices not in _face_keys(B):
            bad.append(f"cells {a} and {b} meet in {common}, not a common face")
    return MixedReport(not bad, bad, {"volume": total, "expected_volume": want})


def verify_corollary_hypotheses(S: MixedSubdivision) -> MixedReport:
    """Diced and totally sharp cells; sharp simplex and label degree identities."""
    bad: list[str] = []
    per_cell = []
    for k, c in enumerate(S.cells):
        Q, label = mixed_cell_polytope(c, S.n, S.summands)
        row = {"cell": str(c), "label": str(label)}
        faces = [F for F in Q.faces() if F.affine_dim > 0]
        undiced = [F for F in faces if not is_diced(F)]
        row["diced"] = not undiced
        if undiced:
            bad.append(f"cell {k}: face {undiced[0]} is not diced")
            per_cell.append(row)
            continue
        ts = is_totally_sharp(Q) if Q.affine_dim > 0 else None
        row["totally_sharp"] = ts is None or ts.ok
        if ts is not None and not ts:
            bad.append(f"cell {k}: face {ts.witness} is not sharp")
        if polytope_label(Q) != label:
            bad.append(f"cell {k}: label {polytope_label(Q)} differs from {label}")
        if label.degree != sum(len(B.vertex_indices) for B in c.summands):
            bad.append(f"cell {k}: label degree {label.degree} differs from the vertex count")
        support = [i for i, e in enumerate(label.exponents) if e > 0]
        applicable = len(support) - 1 == Q.affine_dim and Q.affine_dim > 0
        row["sharp_simplex"] = "n/a"
        if applicable:
            base = tuple(e - 1 if e > 0 else 0 for e in label.exponents)
            simplex = Polytope(tuple(
                tuple(b + (j == i) for j, b in enumerate(base)) for i in support
            ))
            sc = sharp_cell(Q)
            row["sharp_simplex"] = sc.is_sharp and sc.sigma_P == simplex
            if not row["sharp_simplex"]:
                bad.append(f"cell {k}: sharp cell is not the simplex {simplex}")
        per_cell.append(row)
    return MixedReport(not bad, bad, {"cells": per_cell})


@dataclass
class MixedResolution:
    ok: bool
    complex: PolyComplex
    report: ResolutionReport
    minimal: bool
    betti: BettiTable | None
    oracle: BettiTable | None
    problems: list[str] = field(default_factory=list)


def mixed_complex(S: MixedSubdivision) -> PolyComplex:
    polys = [mixed_cell_polytope(c, S.n, S.summands)[0] for c in S.cells]
    return PolyComplex.from_polytopes(polys, label=True)


def resolve_mixed_subdivision(S: MixedSubdivision, fld: Field = QQ) -> MixedResolution:
    X = mixed_complex(S)
    I = ideal_of_polytope(S.polytope())
    rep = verify_cellular_resolution(X, I, fld)
    problems = [f"not acyclic at {m}: {h}" for m, h in rep.failures]
    for c in X.cells:
        for f in X.facets(c):
            if X.label(f).degree >= X.label(c).degree:
                problems.append(f"facet {cell_str(f)} of {cell_str(c)} keeps the label degree")
    mv = is_minimal(X)
    betti = oracle = None
    if mv:
        betti = betti_table(X)
    else:
        problems.append("complex is not minimal")
    if len(I.generators) <= ORACLE_MAX_GENERATORS:
        oracle = koszul_betti_oracle(I, fld)
        if betti is not None and betti != oracle:
            problems.append("Betti table disagrees with the Koszul oracle")
    return MixedResolution(not problems, X, rep, bool(mv), betti, oracle, problems)


# -- fixtures --------------------------------------------------------------------

@dataclass(frozen=True)
class Fixture:
    name: str
    kind: str  # "polytope", "mixed" or "complex"
    value: object
    expect: dict


def _broken_square() -> PolyComplex:
    X = build_XP(Polytope(((2, 0, 0), (1, 1, 0), (1, 0, 1), (0, 1, 1))))
    keep = [c for c in X.cells if c != ((0, 1, 1), (1, 0, 1), (1, 1, 0))]
    dims = {c: X.dim(c) for c in keep}
    facets = {c: X.facets(c) for c in keep}
    return PolyComplex(dims, facets, {c: X.label(c) for c in keep})


def _mixed(n, summands, cells) -> MixedSubdivision:
    return MixedSubdivision(
        n,
        tuple(SimplexSpec.of(s) for s in summands),
        tuple(MixedCellSpec(tuple(SimplexSpec.of(b) for b in c)) for c in cells),
    )


def builtin_fixtures() -> dict[str, Fixture]:
    prism = _mixed(4, [(1, 2, 3), (1, 4)], [[(1, 2, 3), (1, 4)]])
    cube = _mixed(4, [(1, 2), (1, 3), (3, 4)], [[(1, 2), (1, 3), (3, 4)]])
    staircase = _mixed(3, [(1, 2, 3), (1, 2, 3)],
                       [[(1, 2, 3), (3,)], [(1, 2), (2, 3)], [(1,), (1, 2, 3)]])
    simplex = _mixed(3, [(1, 2, 3)], [[(1, 2, 3)]])
    fx = [
        Fixture("square", "polytope", Polytope(((2, 0, 0), (1, 1, 0), (1, 0, 1), (0, 1, 1))),
                {"diced": True, "sharp": True, "xp_f_vector": (4, 5, 2), "totals": (4, 4, 1)}),
        Fixture("diced-line", "polytope", Polytope(((2, 0), (0, 2))),
                {"diced": True, "sharp": False, "Q": ((1, 1),)}),
        Fixture("nondiced-line", "polytope", Polytope(((0, 0), (1, 2))),
                {"diced": False, "witness": (Fraction(1, 2), 1)}),
        Fixture("simplex", "mixed", simplex, {"totals": (3, 3, 1)}),
        Fixture("prism", "mixed", prism, {"totals": (6, 9, 5, 1)}),
        Fixture("cube", "mixed", cube, {"totals": (8, 12, 6, 1)}),
        Fixture("staircase", "mixed", staircase, {"totals": (6, 8, 3)}),
        Fixture("broken-square", "complex", _broken_square(),
                {"resolution": False, "first_failure": "x1*x2*x3"}),
    ]
    return {f.name: f for f in fx}
