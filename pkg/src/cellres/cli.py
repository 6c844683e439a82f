"""Command line front end: ``cellres <command> INPUT [options]``.

INPUT is a file (points, a JSON complex, a ``.mixed`` subdivision or an ideal)
or ``fixture:NAME`` for one of the built-in examples.
Exit status: 0 when every check passes, 1 on a verification failure, 2 on bad input.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .diced_sharp import is_diced, is_totally_sharp, sharp_cell
from .exact_geometry import GeometryError, Polytope, fmt_point
from .formats import (
    InputError,
    export_off,
    export_svg,
    parse_complex_text,
    parse_ideal_text,
    parse_mixed_text,
    parse_polytope_text,
)
from .minkowski import (
    MixedCellError,
    MixedSubdivision,
    builtin_fixtures,
    mixed_complex,
    resolve_mixed_subdivision,
    validate_mixed_subdivision,
    verify_corollary_hypotheses,
)
from .morse import MorseError, morse_complex, subdivision_matching
from .polyhedral_complex import ComplexError, PolyComplex, build_XP, cell_str
from .resolution import (
    ORACLE_MAX_GENERATORS,
    Field,
    MonomialIdeal,
    ResolutionError,
    betti_table,
    ideal_of_polytope,
    is_minimal,
    koszul_betti_oracle,
    vertex_ideal,
    verify_cellular_resolution,
)

COMMANDS = ("diced", "sharp", "subdivide", "morse", "resolve", "oracle", "verify-fine-mixed", "export")
FORMATS = ("text", "json", "svg", "off")


@dataclass
class RunConfig:
    command: str
    inputs: list[str]
    field: str = "q"
    strict_reverify: bool = False
    format: str = "text"
    out: str | None = None
    total: bool = False
    via: str = "morse"
    nvars: int | None = None


@dataclass
class _Report:
    lines: list[str] = field(default_factory=list)
    data: dict = field(default_factory=dict)
    ok: bool = True

    def say(self, line: str) -> None:
        self.lines.append(line)

    def fail(self, line: str) -> None:
        self.ok = False
        self.lines.append(line)


# -- input loading ---------------------------------------------------------------

def load_input(spec: str):
    """Returns (kind, value) with kind in polytope / mixed / complex / ideal."""
    if spec.startswith("fixture:"):
        name = spec[len("fixture:"):]
        fx = builtin_fixtures()
        if name not in fx:
            raise InputError(f"unknown fixture {name!r} (known: {', '.join(sorted(fx))})")
        return fx[name].kind, fx[name].value
    path = Path(spec)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(f"cannot read {spec}: {exc.strerror}") from None
    head = text.lstrip()
    if head.startswith("{"):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"{spec}: line {exc.lineno}: invalid JSON ({exc.msg})") from None
        if isinstance(doc, dict) and "cells" in doc:
            return "complex", parse_complex_text(text)
        return "polytope", parse_polytope_text(text)
    if path.suffix == ".mixed" or "summands" in text:
        return "mixed", parse_mixed_text(text)
    if path.suffix == ".ideal" or "x" in text.split("#")[0]:
        return "ideal", parse_ideal_text(text)
    return "polytope", parse_polytope_text(text)


def _as_polytope(kind, value) -> Polytope:
    if kind == "polytope":
        return value
    if kind == "mixed":
        return value.polytope()
    raise InputError(f"this command needs a polytope, not {kind} input")


def _as_complex(kind, value) -> PolyComplex:
    if kind == "polytope":
        return PolyComplex.from_polytopes([value])
    if kind == "mixed":
        return mixed_complex(value)
    if kind == "complex":
        return value
    raise InputError(f"this command needs a complex, not {kind} input")


# -- commands --------------------------------------------------------------------

def _cmd_diced(cfg, kind, value, rep: _Report):
    P = _as_polytope(kind, value)
    v = is_diced(P)
    rep.data.update(polytope=str(P), diced=v.ok)
    if v:
        rep.say(f"diced: yes ({P})")
    else:
        rep.data["witness"] = fmt_point(v.witness)
        rep.fail(f"diced: no ({P}); non-lattice vertex {fmt_point(v.witness)}")


def _cmd_sharp(cfg, kind, value, rep: _Report):
    P = _as_polytope(kind, value)
    d = is_diced(P)
    if not d:
        rep.data.update(diced=False, witness=fmt_point(d.witness))
        rep.fail(f"not diced; non-lattice vertex {fmt_point(d.witness)}")
        return
    r = sharp_cell(P)
    rep.data.update(
        polytope=str(P), label=str(r.label_P), sharp=r.is_sharp,
        Q=None if r.Q is None else [fmt_point(v) for v in r.Q.vertices],
        sigma_P=None if r.sigma_P is None else [fmt_point(v) for v in r.sigma_P.vertices],
    )
    rep.say(f"polytope: {P}")
    rep.say(f"label: {r.label_P}")
    rep.say(f"cut Q: {'empty' if r.Q is None else r.Q}")
    if r.is_sharp:
        rep.say(f"sharp: yes, sigma_P = {r.sigma_P}")
    else:
        rep.fail(f"sharp: no ({r.witness})")
    if cfg.total:
        t = is_totally_sharp(P)
        rep.data["totally_sharp"] = t.ok
        if t:
            rep.say("totally sharp: yes")
        else:
            rep.fail(f"totally sharp: no, face {t.witness} is not sharp")


def _complex_doc(X) -> dict:
    index = {v: i for i, v in enumerate(X.vertices)}
    return {
        "f_vector": list(X.f_vector()),
        "vertices": [[str(x) for x in v] for v in X.vertices],
        "cells": [
            {"dim": X.dim(c), "vertices": sorted(index[v] for v in c),
             "label": str(X.label(c)) if X.is_labeled else None}
            for c in X.cells
        ],
    }


def _cmd_subdivide(cfg, kind, value, rep: _Report):
    P = _as_polytope(kind, value)
    X = build_XP(P)
    rep.data.update(polytope=str(P), complex=_complex_doc(X))
    rep.say(f"X_P of {P}")
    rep.say("f-vector: " + " ".join(map(str, X.f_vector())))
    for c in X.cells:
        lab = f"  label {X.label(c)}" if X.is_labeled else ""
        rep.say(f"  dim {X.dim(c)}  {cell_str(c)}{lab}")


def _morse(cfg, X: PolyComplex):
    sm = subdivision_matching(X, reverify=cfg.strict_reverify)
    return sm, morse_complex(sm.x_prime, sm.matching, reference=X, poset_map=sm.critical_map())


def _cmd_morse(cfg, kind, value, rep: _Report):
    X = _as_complex(kind, value)
    sm, mc = _morse(cfg, X)
    index = {v: i for i, v in enumerate(sm.x_prime.vertices)}
    rep.data.update(
        refined_f_vector=list(sm.x_prime.f_vector()),
        matching=sm.matching.to_document(index),
        morse_f_vector=list(mc.f_vector()),
        critical=[sorted(index[v] for v in c) for c in mc.cells],
    )
    rep.say("refined complex f-vector: " + " ".join(map(str, sm.x_prime.f_vector())))
    rep.say(f"matched pairs: {len(sm.matching)}")
    for lo, up in sm.matching:
        rep.say(f"  {cell_str(lo)} -> {cell_str(up)}")
    rep.say("Morse complex f-vector: " + " ".join(map(str, mc.f_vector())))
    for c in mc.cells:
        rep.say(f"  critical dim {mc.dim(c)}  {cell_str(c)}  label {mc.label(c)}")


def _oracle_check(I: MonomialIdeal, table, fld, rep: _Report):
    if len(I.generators) > ORACLE_MAX_GENERATORS:
        rep.say("oracle: skipped (too many generators)")
        return
    agree = koszul_betti_oracle(I, fld) == table
    rep.data["oracle_agrees"] = agree
    if agree:
        rep.say("oracle: agrees")
    else:
        rep.fail("oracle: DISAGREES")


def _betti_lines(table, rep: _Report):
    rep.data["betti"] = table.to_json()
    rep.say("betti (i, exponents, rank):")
    for line in table.to_text().splitlines():
        rep.say("  " + line)


def _cmd_resolve(cfg, kind, value, rep: _Report):
    fld = Field.parse(cfg.field)
    if kind == "mixed" and cfg.via == "morse":
        X = mixed_complex(value)
        I = ideal_of_polytope(value.polytope())
        rep.say("complex: fine mixed subdivision")
    elif kind in ("polytope", "mixed") and cfg.via == "xp":
        P = _as_polytope(kind, value)
        X = build_XP(P)
        I = ideal_of_polytope(P)
        rep.say("complex: X_P")
    elif kind == "polytope":
        _, X = _morse(cfg, PolyComplex.from_polytopes([value]))
        I = ideal_of_polytope(value)
        rep.say("complex: Morse complex of P")
    else:
        X = _as_complex(kind, value)
        I = vertex_ideal(X)
        rep.say("complex: as given")
    rep.say(f"ideal: {I}")
    rep.data.update(ideal=str(I), field=str(fld), f_vector=list(X.f_vector()))
    r = verify_cellular_resolution(X, I, fld)
    rep.data["resolution"] = r.ok
    rep.data["failures"] = [[str(m), h] for m, h in r.failures]
    if r.ok:
        rep.say(f"cellular resolution over {fld}: yes ({len(r.checked)} multidegrees)")
    else:
        rep.fail(f"cellular resolution over {fld}: NO")
        for m, h in r.failures:
            rep.say(f"  fails at {m}: reduced homology {h}")
        return
    mv = is_minimal(X)
    rep.data["minimal"] = mv.ok
    if not mv:
        lo, up = mv.witness
        rep.fail(f"minimal: no, {cell_str(lo)} lies in {cell_str(up)} with the same label")
        return
    rep.say("minimal: yes")
    table = betti_table(X)
    _betti_lines(table, rep)
    _oracle_check(I, table, fld, rep)


def _cmd_oracle(cfg, kind, value, rep: _Report):
    fld = Field.parse(cfg.field)
    if kind == "ideal":
        I = value
        if cfg.nvars and cfg.nvars > I.nvars:
            I = parse_ideal_text(", ".join(map(str, I.generators)), cfg.nvars)
    else:
        I = ideal_of_polytope(_as_polytope(kind, value))
    rep.data.update(ideal=str(I), field=str(fld))
    rep.say(f"ideal: {I}")
    _betti_lines(koszul_betti_oracle(I, fld), rep)


def _cmd_verify_fine_mixed(cfg, kind, value, rep: _Report):
    if kind != "mixed":
        raise InputError("verify-fine-mixed needs a mixed subdivision")
    S: MixedSubdivision = value
    fld = Field.parse(cfg.field)
    v = validate_mixed_subdivision(S)
    rep.data["valid"] = v.ok
    rep.data["violations"] = v.violations
    if not v:
        rep.fail("subdivision: INVALID")
        for line in v.violations:
            rep.say("  " + line)
        return
    rep.say(f"subdivision: valid ({len(S.cells)} cells, volume {v.details['volume']})")
    h = verify_corollary_hypotheses(S)
    rep.data["hypotheses"] = h.ok
    rep.data["cells"] = h.details["cells"]
    for row in h.details["cells"]:
        rep.say(f"  cell {row['cell']}: label {row['label']}, diced {row['diced']}, "
                f"totally sharp {row.get('totally_sharp')}, sharp simplex {row.get('sharp_simplex')}")
    if not h:
        rep.fail("hypotheses: FAIL")
        for line in h.violations:
            rep.say("  " + line)
        return
    rep.say("hypotheses: pass")
    res = resolve_mixed_subdivision(S, fld)
    rep.data["resolution"] = res.report.ok
    rep.data["minimal"] = res.minimal
    if res.betti is not None:
        _betti_lines(res.betti, rep)
    if res.oracle is not None:
        rep.data["oracle_agrees"] = res.oracle == res.betti
    if res.ok:
        rep.say("minimal cellular resolution: yes" + (", oracle agrees" if res.oracle else ""))
    else:
        rep.fail("minimal cellular resolution: NO")
        for line in res.problems:
            rep.say("  " + line)


def _cmd_export(cfg, kind, value, rep: _Report):
    P = _as_polytope(kind, value)
    fmt = cfg.format
    if fmt not in ("svg", "off"):
        fmt = "svg" if P.affine_dim <= 2 else "off"
    rep.data["export"] = export_svg(P) if fmt == "svg" else export_off(P)
    rep.data["export_format"] = fmt


HANDLERS = {
    "diced": _cmd_diced,
    "sharp": _cmd_sharp,
    "subdivide": _cmd_subdivide,
    "morse": _cmd_morse,
    "resolve": _cmd_resolve,
    "oracle": _cmd_oracle,
    "verify-fine-mixed": _cmd_verify_fine_mixed,
    "export": _cmd_export,
}


def run(cfg: RunConfig, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    if cfg.command not in HANDLERS:
        print(f"error: unknown command {cfg.command!r}", file=stderr)
        return 2
    if cfg.format not in FORMATS:
        print(f"error: unknown format {cfg.format!r}", file=stderr)
        return 2
    if cfg.format in ("svg", "off") and cfg.command != "export":
        print(f"error: --format {cfg.format} is only for the export command", file=stderr)
        return 2
    reports = []
    try:
        Field.parse(cfg.field)
        for spec in cfg.inputs:
            kind, value = load_input(spec)
            rep = _Report()
            rep.data["input"] = spec
            HANDLERS[cfg.command](cfg, kind, value, rep)
            reports.append(rep)
    except (InputError, ResolutionError, MixedCellError, GeometryError, ComplexError,
            json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=stderr)
        return 2
    except MorseError as exc:
        print(f"verification failed: {exc}", file=stderr)
        return 1
    except ValueError as exc:  # scale limits and similar refusals from the library
        print(f"error: {exc}", file=stderr)
        return 2

    if cfg.command == "export":
        text = "".join(r.data["export"] for r in reports)
    elif cfg.format == "json":
        docs = [dict(r.data, ok=r.ok) for r in reports]
        text = json.dumps(docs[0] if len(docs) == 1 else docs, indent=2, sort_keys=True) + "\n"
    else:
        blocks = []
        for r in reports:
            head = [f"== {r.data['input']}"] if len(reports) > 1 else []
            blocks.append("\n".join(head + r.lines + ["result: " + ("PASS" if r.ok else "FAIL")]))
        text = "\n".join(blocks) + "\n"
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        stdout.write(text)
    return 0 if all(r.ok for r in reports) else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="cellres",
        description="Cellular resolutions from diced polytopes and fine mixed subdivisions.",
    )
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("inputs", nargs="+", metavar="INPUT", help="file path or fixture:NAME")
    p.add_argument("--field", default="q", help="q (default) or gf:p")
    p.add_argument("--strict-reverify", action="store_true",
                   help="re-check acyclicity and homogeneity after every gluing step")
    p.add_argument("--format", default="text", choices=FORMATS)
    p.add_argument("--out", metavar="PATH")
    p.add_argument("--total", action="store_true", help="sharp: also check every face")
    p.add_argument("--via", choices=("morse", "xp"), default="morse",
                   help="resolve: Morse complex (default) or X_P itself")
    p.add_argument("--nvars", type=int, help="oracle: number of variables")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    cfg = RunConfig(ns.command, ns.inputs, ns.field, ns.strict_reverify, ns.format, ns.out,
                    ns.total, ns.via, ns.nvars)
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
