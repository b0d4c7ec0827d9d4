from __future__ import annotations

import json
import random
import subprocess
import sys

import pytest

from morsesum import io
from morsesum.cli import main
from morsesum.fixtures import random_collapse_field
from morsesum.morse import function_from_field


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def s3s3(tmp_path, capsys):
    prefix = tmp_path / "s3s3"
    code, out, _ = run(["fixture", "S3", "--sum", "S3", "--field", "--out", prefix], capsys)
    assert code == 0
    data = json.loads(out)
    assert data["name"] == "S3#S3" and data["betti"] == [1, 0, 0, 1]
    return tmp_path, prefix.with_suffix(".cx"), prefix.with_suffix(".field")


def test_homology_command(s3s3, capsys):
    _, cx, _ = s3s3
    code, out, _ = run(["homology", cx], capsys)
    assert code == 0 and json.loads(out)["betti"] == [1, 0, 0, 1]


def test_validate_and_critical(s3s3, capsys):
    _, cx, fld = s3s3
    code, out, _ = run(["--json", "validate", cx, fld], capsys)
    data = json.loads(out)
    assert code == 0 and data["closed_3_manifold"] and data["acyclic"] and data["critical"] == [1, 0, 0, 1]
    code, out, _ = run(["critical", cx, fld, "--json"], capsys)
    assert code == 0 and json.loads(out)["perfect"] is True
    code, out, _ = run(["critical", cx, fld], capsys)
    assert out.startswith("dim 0: [")


def test_validate_rejects_bad_function(s3s3, capsys):
    tmp, cx, fld = s3s3
    X = io.parse_complex(cx.read_text())
    bad = tmp / "bad.func"
    bad.write_text("".join(f"F {c} 0\n" for c in X.cells()))
    code, out, _ = run(["validate", cx, bad, "--json"], capsys)
    assert code == 3 and json.loads(out)["morse_function"] is False


def test_trace(s3s3, capsys):
    _, cx, fld = s3s3
    code, out, _ = run(["critical", cx, fld, "--json"], capsys)
    top = json.loads(out)["cells"]["3"][0]
    code, out, _ = run(["trace", cx, fld, "--cell", top, "--json", "--limit", 3], capsys)
    data = json.loads(out)
    assert code == 0 and data["count"] >= 1 and len(data["paths"]) <= 3
    X = io.parse_complex(cx.read_text())
    assert all(p[0] in X.facets(top) for p in data["paths"])


def test_pipeline_outputs_are_reproducible(s3s3, capsys):
    tmp, cx, fld = s3s3
    outs = []
    for k in range(2):
        d = tmp / f"run{k}"
        code, out, err = run(["pipeline", cx, fld, "--out", d, "--json"], capsys)
        assert code == 0, err
        outs.append((out, {p.name: p.read_bytes() for p in sorted(d.iterdir())}))
    assert outs[0] == outs[1]
    report = json.loads(outs[0][1]["report.json"])
    assert report["certificate"]["ok"]
    assert report["M1"]["critical"] == [1, 0, 0, 1] == report["M2"]["critical"]
    assert {"M1.cx", "M1.field", "M1.func", "M2.cx", "sphere.cx", "region_A.txt"} <= set(outs[0][1])


def test_separate_then_split(s3s3, capsys):
    tmp, cx, fld = s3s3
    d = tmp / "sep"
    code, out, err = run(["separate", cx, fld, "--out", d, "--log", "--check"], capsys)
    assert code == 0, err
    data = json.loads(out)
    assert data["certificate"]["euler"] == 2 and data["log"][-1]["kind"] == "cut"
    code, out, err = run(["split", d / "complex.cx", d / "field.txt", d / "sphere.cx", "--out", d], capsys)
    assert code == 0, err
    data = json.loads(out)
    assert data["M1"]["perfect"] and data["M2"]["perfect"]
    assert (d / "M2.func").exists()


def test_pipeline_accepts_a_function_file(s3s3, capsys):
    tmp, cx, fld = s3s3
    X = io.parse_complex(cx.read_text())
    f = function_from_field(io.parse_field(fld.read_text()), X)
    func = tmp / "f.func"
    func.write_text(io.emit_function(f))
    code, out, err = run(["pipeline", cx, func, "--out", tmp / "viaf", "--no-check"], capsys)
    assert code == 0, err


def test_non_perfect_field_is_refused(s3s3, capsys):
    tmp, cx, _ = s3s3
    X = io.parse_complex(cx.read_text())
    V = random_collapse_field(X, random.Random(3), stop_prob=0.5)
    nf = tmp / "np.field"
    nf.write_text(io.emit_field(V))
    code, _, err = run(["pipeline", cx, nf, "--out", tmp / "np"], capsys)
    assert code == 3 and "NotPerfect" in err
    assert not (tmp / "np").exists()


def test_prime_manifold_grouping_exit_code(tmp_path, capsys):
    prefix = tmp_path / "t3"
    assert run(["fixture", "T3", "--field", "--out", prefix], capsys)[0] == 0
    code, _, err = run(["group", prefix.with_suffix(".cx"), prefix.with_suffix(".field")], capsys)
    assert code == 4 and "NotSeparable" in err


def test_input_errors(tmp_path, s3s3, capsys):
    _, cx, fld = s3s3
    bad = tmp_path / "bad.cx"
    bad.write_text("C 0 0\nC 1 1 : +7\n")
    code, _, err = run(["homology", bad], capsys)
    assert code == 3 and "DanglingFace" in err
    bad.write_text("C 0 0\nZ\n")
    code, _, err = run(["homology", bad], capsys)
    assert code == 2 and "line 2" in err
    assert run(["homology", tmp_path / "none.cx"], capsys)[0] == 2
    assert run(["group", cx, fld, "--side", "a,b"], capsys)[0] == 2
    assert run(["nosuchcommand"], capsys)[0] == 2


def test_module_entry_point(tmp_path):
    r = subprocess.run([sys.executable, "-m", "morsesum", "fixture", "S3", "--out", str(tmp_path / "s")],
                       capture_output=True, text=True)
    assert r.returncode == 0 and json.loads(r.stdout)["counts"] == [5, 10, 10, 5]
