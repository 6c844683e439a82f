"""Diced, sharp and totally sharp polytopes; totally unimodular systems."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Any, Sequence

from .exact_geometry import (
    Halfspace,
    Polytope,
    coordinate_halfspace,
    det,
    intersect,
    is_integral,
    lattice_points,
    polytope_from_inequalities,
)
from .polyhedral_complex import ComplexError, Monomial, build_XP

TU_SIZE_LIMIT = 14


@dataclass(frozen=True)
class Verdict:
    """A yes/no answer that carries a witness when the answer is no."""

    ok: bool
    witness: Any = None

    def __bool__(self):
        return self.ok


@dataclass(frozen=True)
class SharpnessReport:
    is_sharp: bool
    sigma_P: Polytope | None
    label_P: Monomial
    Q: Polytope | None
    witness: str | None = None


def is_diced(P: Polytope) -> Verdict:
    """P is diced iff every vertex of X_P is a lattice point."""
    if not P.is_lattice:
        bad = next(v for v in P.vertices if not is_integral(v))
        return Verdict(False, bad)
    for v in build_XP(P).vertices:
        if not is_integral(v):
            return Verdict(False, v)
    return Verdict(True)


def polytope_label(P: Polytope) -> Monomial:
    if not is_diced(P):
        raise ComplexError("label undefined for non-diced polytope")
    pts = lattice_points(P)
    if any(c < 0 for p in pts for c in p):
        raise ComplexError("polytope leaves the nonnegative orthant")
    return Monomial(tuple(max(p[i] for p in pts) for i in range(P.ambient_dim)))


def sharp_cell(P: Polytope) -> SharpnessReport:
    """Decide sharpness geometrically: cut P by e_i >= e_i - 1 for the label exponents e."""
    label = polytope_label(P)
    n = P.ambient_dim
    cuts = [coordinate_halfspace(i, e - 1, ">=", n) for i, e in enumerate(label.exponents)]
    Q = intersect(P, cuts)
    if Q is None:
        return SharpnessReport(False, None, label, None, "cut is empty")
    if Q.affine_dim != P.affine_dim:
        return SharpnessReport(
            False, None, label, Q,
            f"cut has dimension {Q.affine_dim} < {P.affine_dim}",
        )
    X = build_XP(P)
    if Q.vertices not in X:
        raise ComplexError("sharp cell is not a cell of X_P")
    if X.label(Q.vertices) != label:
        raise ComplexError("sharp cell label differs from the polytope label")
    return SharpnessReport(True, Q, label, Q)


def is_sharp_bruteforce(P: Polytope) -> bool:
    """Scan the maximal cells of X_P for one with full dimension and label l(P)."""
    label = polytope_label(P)
    X = build_XP(P)
    return any(
        X.dim(c) == P.affine_dim and X.label(c) == label for c in X.maximal_cells()
    )


def is_totally_sharp(P: Polytope) -> Verdict:
    if not is_diced(P):
        raise ComplexError("total sharpness is defined for diced polytopes")
    for F in sorted(P.faces(), key=lambda F: (-F.affine_dim, F.vertices)):
        if not sharp_cell(F).is_sharp:
            return Verdict(False, F)
    return Verdict(True)


def is_totally_unimodular(M: Sequence[Sequence[int]]) -> Verdict:
    """Exhaustive check of every square minor; witness is (rows, cols)."""
    rows = [list(r) for r in M]
    if not rows:
        return Verdict(True)
    m, n = len(rows), len(rows[0])
    if any(len(r) != n for r in rows):
        raise ValueError("ragged matrix")
    if m + n > TU_SIZE_LIMIT:
        raise ValueError("exhaustive TU check too large")
    for i, r in enumerate(rows):
        for j, x in enumerate(r):
            if x not in (-1, 0, 1):
                return Verdict(False, ((i,), (j,)))
    for k in range(2, min(m, n) + 1):
        for ri in itertools.combinations(range(m), k):
            for ci in itertools.combinations(range(n), k):
                d = det([[rows[i][j] for j in ci] for i in ri])
                if d not in (-1, 0, 1):
                    return Verdict(False, (ri, ci))
    return Verdict(True)


def tu_polytope(M: Sequence[Sequence[int]], beta: Sequence[int]) -> Polytope | None:
    """{x >= 0 : M x <= beta} for totally unimodular M; None when infeasible."""
    if not is_totally_unimodular(M):
        raise ValueError("matrix is not totally unimodular")
    n = len(M[0])
    if len(beta) != len(M):
        raise ValueError("beta has the wrong length")
    cons = [Halfspace.make(row, b, "<=") for row, b in zip(M, beta) if any(row)]
    cons += [coordinate_halfspace(i, 0, ">=", n) for i in range(n)]
    for row, b in zip(M, beta):
        if not any(row) and b < 0:
            return None
    P = polytope_from_inequalities(cons, n)
    if P is None:
        return None
    if not is_diced(P):
        raise AssertionError("TU system produced a non-diced polytope")
    return P
