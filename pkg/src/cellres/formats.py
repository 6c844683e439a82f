"""Input parsing (polytopes, complexes, mixed subdivisions, ideals) and figure export."""
from __future__ import annotations

import json
import re
from fractions import Fraction
from functools import cmp_to_key
from pathlib import Path
from typing import Sequence

from .exact_geometry import Polytope, convex_hull_vertices, is_integral
from .minkowski import MixedCellSpec, MixedSubdivision, SimplexSpec
from .polyhedral_complex import ComplexError, Monomial, PolyComplex, build_XP
from .resolution import MonomialIdeal


class InputError(ValueError):
    pass


_FLOAT = re.compile(r"\d*\.\d|\d[eE][-+]?\d")
_INT = re.compile(r"[-+]?\d+$")


def _strip(line: str) -> str:
    return line.split("#", 1)[0].strip()


def _int_tuple(text: str, lineno: int) -> tuple[int, ...]:
    if _FLOAT.search(text):
        raise InputError(f"line {lineno}: floating point literal in {text!r}")
    toks = [t for t in re.split(r"[\s,()\[\]]+", text) if t]
    if not toks:
        raise InputError(f"line {lineno}: empty point")
    for t in toks:
        if "/" in t:
            raise InputError(f"line {lineno}: non-integer coordinate {t!r}")
        if not _INT.match(t):
            raise InputError(f"line {lineno}: cannot parse {t!r}")
    return tuple(int(t) for t in toks)


def _reject_floats(obj, where="document"):
    if isinstance(obj, float):
        raise InputError(f"{where}: floating point literal {obj!r}")
    if isinstance(obj, dict):
        for k, v in obj.items():
            _reject_floats(v, where)
    elif isinstance(obj, list):
        for v in obj:
            _reject_floats(v, where)


def parse_polytope_text(text: str) -> Polytope:
    """One integer point per line (``2 0 0`` or ``(2,0,0)``), or a JSON complex document."""
    if text.lstrip().startswith("{"):
        P = parse_complex_text(text)
        return convex_hull_vertices(P.vertices)
    pts = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip(raw)
        if line:
            pts.append(_int_tuple(line, lineno))
    if not pts:
        raise InputError("no points given")
    if len({len(p) for p in pts}) > 1:
        raise InputError("points have different dimensions")
    return convex_hull_vertices(pts)


def parse_complex_text(text: str) -> PolyComplex:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"line {exc.lineno}: invalid JSON ({exc.msg})") from None
    _reject_floats(doc)
    try:
        X = PolyComplex.from_document(doc)
    except (ComplexError, TypeError, ValueError) as exc:
        raise InputError(str(exc)) from None
    if any(not is_integral(v) for v in X.vertices):
        raise InputError("complex vertices must be integral")
    return X


_SET = re.compile(r"\{([^{}]*)\}")


def _index_sets(text: str, lineno: int) -> list[tuple[int, ...]]:
    rest = _SET.sub("", text).strip()
    if rest:
        raise InputError(f"line {lineno}: unexpected text {rest!r}")
    out = []
    for body in _SET.findall(text):
        toks = [t for t in re.split(r"[\s,]+", body) if t]
        if not toks or not all(t.isdigit() for t in toks):
            raise InputError(f"line {lineno}: bad index set {{{body}}}")
        out.append(tuple(int(t) for t in toks))
    return out


def parse_mixed_text(text: str) -> MixedSubdivision:
    """Format::

        n = 3
        summands: {1,2,3} {1,2,3}
        {1,2,3} {3}        # one line per cell: B_1 ... B_m
    """
    n = None
    summands = None
    cells = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip(raw)
        if not line:
            continue
        if line.startswith("n"):
            m = re.fullmatch(r"n\s*[=:]?\s*(\d+)", line)
            if not m:
                raise InputError(f"line {lineno}: expected 'n = <int>'")
            n = int(m.group(1))
            continue
        if line.startswith("summands"):
            summands = _index_sets(line[len("summands"):].lstrip(" :="), lineno)
            continue
        if summands is None:
            raise InputError(f"line {lineno}: cell before the summands header")
        sets = _index_sets(line, lineno)
        if len(sets) != len(summands):
            raise InputError(f"line {lineno}: expected {len(summands)} index sets, got {len(sets)}")
        cells.append((lineno, sets))
    if summands is None:
        raise InputError("missing 'summands:' header")
    top = max(max(s) for s in summands)
    if n is None:
        n = top
    if top > n:
        raise InputError(f"summand index {top} exceeds n = {n}")
    try:
        specs = tuple(SimplexSpec.of(s) for s in summands)
        mcells = tuple(MixedCellSpec(tuple(SimplexSpec.of(b) for b in sets)) for _, sets in cells)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    return MixedSubdivision(n, specs, mcells)


def parse_ideal_text(text: str, n: int | None = None) -> MonomialIdeal:
    toks = [t for t in re.split(r"[,\n;<>]+", "\n".join(_strip(l) for l in text.splitlines())) if t.strip()]
    if not toks:
        raise InputError("no generators given")
    try:
        ms = [Monomial.parse(t) for t in toks]
        n = max(max(m.nvars for m in ms), n or 0)
        return MonomialIdeal(tuple(Monomial.parse(t, n) for t in toks))
    except ComplexError as exc:
        raise InputError(str(exc)) from None


def _read(path) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def parse_polytope_file(path) -> Polytope:
    return parse_polytope_text(_read(path))


def parse_mixed_file(path) -> MixedSubdivision:
    return parse_mixed_text(_read(path))


def parse_complex_file(path) -> PolyComplex:
    return parse_complex_text(_read(path))


# -- export --------------------------------------------------------------------

def projection_coords(P: Polytope, k: int) -> list[int]:
    """Coordinates used to draw P: non-constant ones, affinely independent first."""
    piv = list(P.chart.pivots)
    v0 = P.vertices[0]
    rest = [i for i in range(P.ambient_dim)
            if i not in piv and any(v[i] != v0[i] for v in P.vertices)]
    rest += [i for i in range(P.ambient_dim) if i not in piv and i not in rest]
    return (piv + rest)[:k]


def _dec(x) -> str:
    """Deterministic decimal with at most 4 places."""
    x = Fraction(x)
    r = round(x * 10000)
    s = f"{'-' if r < 0 else ''}{abs(r) // 10000}.{abs(r) % 10000:04d}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def _cyclic(points: Sequence[tuple]) -> list[int]:
    """Indices of planar points in counter-clockwise order around their centroid."""
    cx = sum(Fraction(p[0]) for p in points) / len(points)
    cy = sum(Fraction(p[1]) for p in points) / len(points)
    rel = [(Fraction(p[0]) - cx, Fraction(p[1]) - cy) for p in points]

    def half(v):
        return 0 if (v[1] > 0 or (v[1] == 0 and v[0] > 0)) else 1

    def cmp(i, j):
        a, b = rel[i], rel[j]
        if half(a) != half(b):
            return half(a) - half(b)
        cross = a[0] * b[1] - a[1] * b[0]
        return -1 if cross > 0 else (1 if cross < 0 else 0)

    return sorted(range(len(points)), key=cmp_to_key(cmp))


def export_svg(P: Polytope, scale: int = 100) -> str:
    """X_P drawn in two coordinates; lattice vertices carry their monomial, others are red."""
    if P.affine_dim > 2:
        raise InputError("SVG export needs a polytope of dimension at most 2")
    X = build_XP(P)
    if P.ambient_dim == 1:
        coords = [0]
        proj = lambda v: (v[0], 0)  # noqa: E731
    else:
        coords = projection_coords(P, 2)
        proj = lambda v: (v[coords[0]], v[coords[1]])  # noqa: E731
    pts = [proj(v) for v in X.vertices]
    xs = [Fraction(p[0]) for p in pts]
    ys = [Fraction(p[1]) for p in pts]
    lo_x, hi_y = min(xs), max(ys)
    pad = Fraction(1, 2)

    def sx(x):
        return _dec((Fraction(x) - lo_x + pad) * scale)

    def sy(y):
        return _dec((hi_y - Fraction(y) + pad) * scale)

    w = _dec((max(xs) - lo_x + 2 * pad) * scale)
    h = _dec((hi_y - min(ys) + 2 * pad) * scale)
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">',
        f"<!-- X_P of {P}; drawn in coordinates {', '.join(f'x{i + 1}' for i in coords)} -->",
    ]
    for c in X.cells:
        if X.dim(c) == 2:
            q = [proj(v) for v in c]
            order = _cyclic(q)
            path = " ".join(f"{sx(q[i][0])},{sy(q[i][1])}" for i in order)
            out.append(f'<polygon points="{path}" fill="#dde8f5" stroke="none"/>')
    for c in X.cells:
        if X.dim(c) == 1:
            (a, b) = (proj(v) for v in c)
            out.append(
                f'<line x1="{sx(a[0])}" y1="{sy(a[1])}" x2="{sx(b[0])}" y2="{sy(b[1])}" '
                'stroke="black" stroke-width="2"/>'
            )
    for v in X.vertices:
        x, y = proj(v)
        colour = "black" if is_integral(v) else "red"
        out.append(f'<circle cx="{sx(x)}" cy="{sy(y)}" r="4" fill="{colour}"/>')
        text = str(Monomial(tuple(int(t) for t in v))) if is_integral(v) else \
            "(" + ",".join(str(t) for t in v) + ")"
        out.append(f'<text x="{sx(x)}" y="{sy(y)}" dx="6" dy="-6" font-size="12" fill="{colour}">{text}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def export_off(P: Polytope) -> str:
    """X_P as an OFF surface: all 2-cells, drawn in three coordinates."""
    if P.affine_dim != 3:
        raise InputError("OFF export needs a 3-dimensional polytope")
    X = build_XP(P)
    coords = projection_coords(P, 3)
    verts = list(X.vertices)
    index = {v: i for i, v in enumerate(verts)}
    faces = []
    for c in X.cells:
        if X.dim(c) != 2:
            continue
        Q = Polytope(c)
        local = [tuple(v[j] for j in projection_coords(Q, 2)) for v in Q.vertices]
        faces.append([index[Q.vertices[i]] for i in _cyclic(local)])
    lines = ["OFF", f"{len(verts)} {len(faces)} 0"]
    lines += [" ".join(_dec(v[j]) for j in coords) for v in verts]
    lines += [f"{len(f)} " + " ".join(map(str, f)) for f in faces]
    return "\n".join(lines) + "\n"
