import json
import subprocess
import sys
from pathlib import Path

import pytest

import cellres
from cellres.cli import main

FIXTURES = Path(cellres.__file__).parent / "fixtures"


def cli(capsys, *args):
    code = main(list(args))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_diced_outputs(capsys):
    code, out, _ = cli(capsys, "diced", "fixture:nondiced-line")
    assert code == 1 and "(1/2, 1)" in out and out.endswith("result: FAIL\n")
    code, out, _ = cli(capsys, "diced", "fixture:diced-line")
    assert code == 0 and out.startswith("diced: yes")


def test_sharp_outputs(capsys):
    code, out, _ = cli(capsys, "sharp", "fixture:diced-line")
    assert code == 1 and "cut Q: conv{(1, 1)}" in out
    code, out, _ = cli(capsys, "sharp", "--total", "fixture:square")
    assert code == 0 and "totally sharp: yes" in out


def test_subdivide_and_morse(capsys):
    code, out, _ = cli(capsys, "subdivide", "fixture:square")
    assert code == 0 and "f-vector: 4 5 2" in out
    code, out, _ = cli(capsys, "morse", "fixture:square")
    assert code == 0 and "matched pairs: 1" in out and "Morse complex f-vector: 4 4 1" in out


def test_resolve_square(capsys):
    code, out, _ = cli(capsys, "resolve", "fixture:square")
    assert code == 0 and "totals 4 4 1" in out and "oracle: agrees" in out
    code, out, _ = cli(capsys, "resolve", "--via", "xp", "fixture:square")
    assert code == 1 and "minimal: no" in out


def test_resolve_other_fields(capsys):
    for fld in ("gf:2", "gf:3"):
        code, out, _ = cli(capsys, "resolve", "--field", fld, "fixture:cube")
        assert code == 0 and "totals 8 12 6 1" in out


def test_resolve_broken_square(capsys):
    code, out, _ = cli(capsys, "resolve", "fixture:broken-square")
    assert code == 1
    assert "fails at x1*x2*x3: reduced homology [0, 1]" in out
    assert "totals" not in out


def test_resolve_nondiced_is_verification_failure(capsys):
    code, _, err = cli(capsys, "resolve", "fixture:nondiced-line")
    assert code == 1 and "not diced" in err


def test_oracle_ideal_file(capsys):
    code, out, _ = cli(capsys, "oracle", str(FIXTURES / "koszul2.ideal"))
    assert code == 0 and "totals 2 1" in out
    code, out, _ = cli(capsys, "oracle", "--nvars", "3", str(FIXTURES / "koszul2.ideal"))
    assert code == 0 and "0 1 0 0 1" in out


def test_verify_fine_mixed(capsys):
    code, out, _ = cli(capsys, "verify-fine-mixed", str(FIXTURES / "staircase.mixed"))
    assert code == 0 and "valid (3 cells, volume 4)" in out and "totals 6 8 3" in out


def test_verify_fine_mixed_rejects_broken(tmp_path, capsys):
    text = (FIXTURES / "staircase.mixed").read_text().rsplit("\n", 2)[0] + "\n"
    f = tmp_path / "two.mixed"
    f.write_text(text)
    code, out, _ = cli(capsys, "verify-fine-mixed", str(f))
    assert code == 1 and "INVALID" in out and "volume deficit" in out


def test_input_errors_exit_2(tmp_path, capsys):
    f = tmp_path / "half.txt"
    f.write_text("0 0\n0.5 1\n")
    code, _, err = cli(capsys, "diced", str(f))
    assert code == 2 and "line 2" in err and "floating point" in err
    f.write_text("0 0\n1/2 1\n")
    code, _, err = cli(capsys, "diced", str(f))
    assert code == 2 and "non-integer" in err
    code, _, err = cli(capsys, "resolve", "--field", "gf:6", "fixture:square")
    assert code == 2 and "not prime" in err
    code, _, err = cli(capsys, "diced", "fixture:nope")
    assert code == 2 and "unknown fixture" in err
    code, _, err = cli(capsys, "diced", str(tmp_path / "missing.txt"))
    assert code == 2
    code, _, _ = cli(capsys, "frobnicate", "fixture:square")
    assert code == 2
    code, _, err = cli(capsys, "diced", "fixture:broken-square")
    assert code == 2 and "needs a polytope" in err


def test_bad_mixed_file(tmp_path, capsys):
    f = tmp_path / "bad.mixed"
    f.write_text("n = 3\nsummands: {1,2,3} {1,2,3}\n{1,2,3}\n")
    code, _, err = cli(capsys, "verify-fine-mixed", str(f))
    assert code == 2 and "line 3" in err and "expected 2 index sets" in err


def test_json_is_byte_stable(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["resolve", "--format", "json", "--out", str(a), "fixture:prism"]) == 0
    assert main(["resolve", "--format", "json", "--out", str(b), "fixture:prism"]) == 0
    assert a.read_bytes() == b.read_bytes()
    doc = json.loads(a.read_text())
    assert doc["ok"] is True and doc["betti"]["totals"] == [6, 9, 5, 1]


def test_multiple_inputs(capsys):
    code, out, _ = cli(capsys, "diced", "fixture:diced-line", "fixture:nondiced-line")
    assert code == 1 and out.count("== fixture:") == 2


def test_export_svg(capsys):
    code, out, _ = cli(capsys, "export", "fixture:nondiced-line")
    assert code == 0 and out.startswith("<svg") and 'fill="red"' in out
    assert ">(1/2,1)<" in out
    code, out2, _ = cli(capsys, "export", "fixture:square")
    assert out2.count("<polygon") == 2 and out2.count("<line") == 5


def test_export_off(capsys):
    code, out, _ = cli(capsys, "export", "fixture:prism")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "OFF"
    nv, nf, _ = map(int, lines[1].split())
    assert nv == 6 and nf == len(lines) - 2 - nv
    # SVG of a 3-polytope is refused
    code, _, err = cli(capsys, "export", "--format", "svg", "fixture:prism")
    assert code == 2 and "dimension at most 2" in err


def test_format_flag_scope(capsys):
    code, _, err = cli(capsys, "diced", "--format", "svg", "fixture:square")
    assert code == 2 and "only for the export command" in err


def test_console_entry_point():
    r = subprocess.run([sys.executable, "-m", "cellres.cli", "diced", "fixture:square"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and "diced: yes" in r.stdout


@pytest.mark.parametrize("flag", [[], ["--strict-reverify"]])
def test_strict_reverify(capsys, flag):
    code, out, _ = cli(capsys, "morse", *flag, "fixture:cube")
    assert code == 0 and "Morse complex f-vector: 8 12 6 1" in out
