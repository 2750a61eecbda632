import json
import subprocess
import sys

import pytest

from univcheck import __version__
from univcheck.cli import main, run


@pytest.fixture
def gates(tmp_path):
    def write(names, d=2, arity=None):
        if arity is None:
            arity = 2 if any(n in ("CNOT", "CZ", "SWAP") for n in names) else 1
        p = tmp_path / f"{'_'.join(names)}.json"
        p.write_text(json.dumps({"d": d, "arity": arity, "gates": [{"name": n} for n in names]}))
        return str(p)

    return write


REPORT_KEYS = {"command", "status", "k", "measured", "baseline", "gap_ratio", "bound", "per_N", "seed", "version"}


def test_gl_baseline_prints_24(capsys):
    assert main(["gl-baseline", "--m", "4", "--k", "4"]) == 0
    assert capsys.readouterr().out.strip() == "24"


def test_check_complete(gates, capsys):
    code, rep = run(["check-complete", gates(["H", "T"]), "--format", "json"])
    assert code == 0 and rep["status"] == "Complete"
    assert rep["measured"] == rep["baseline"] == 132
    printed = json.loads(capsys.readouterr().out)
    assert REPORT_KEYS <= set(printed)
    assert printed["version"] == __version__


def test_check_universal_one_qudit(gates, capsys):
    code, rep = run(["check-universal", gates(["H"]), "--max-N", "2"])
    assert code == 0 and rep["status"] == "NotUniversal(one-qudit)"
    out = capsys.readouterr().out
    assert "NotUniversal(one-qudit)" in out and "theoretical bound 1" in out


def test_check_universal_two_qubits(gates):
    code, rep = run(["check-universal", gates(["H", "T", "CNOT"]), "--max-N", "2", "--format", "json"])
    assert code == 0 and rep["status"] == "Universal(2)" and rep["bound"] == 257
    assert [p["N"] for p in rep["per_N"]] == [2]


def test_inconclusive_exit_code(gates):
    code, rep = run(["check-universal", gates(["CNOT"]), "--max-N", "3", "--format", "json"])
    assert code == 2 and rep["status"] == "Inconclusive(3)"


def test_invariant_dim(gates, capsys):
    code, rep = run(["invariant-dim", gates(["H", "T"]), "--k", "2", "--format", "json"])
    assert code == 0 and rep["measured"] == 2
    code, rep = run(["invariant-dim", gates(["H", "T"]), "--k", "2", "--N", "2", "--format", "json"])
    assert code == 0 and rep["method"] == "symmetric-lift" and rep["measured"] > rep["baseline"]


def test_text_output_shows_diagnostics(gates, capsys):
    run(["check-complete", gates(["H", "S"])])
    out = capsys.readouterr().out
    for field in ("measured", "baseline", "gap ratio", "theoretical bound"):
        assert field in out


def test_hilbert_and_correspondence(tmp_path, gates):
    ideal = tmp_path / "ideal.json"
    ideal.write_text(json.dumps({"m": 2, "n": 2, "generators": [
        {"monomial_exponents_to_coeff": [[[2, 0], [1, 0]]]},
        {"monomial_exponents_to_coeff": [[[1, 1], [1, 0]]]},
        {"monomial_exponents_to_coeff": [[[0, 2], [1, 0]]]},
    ]}))
    code, rep = run(["hilbert", "--ideal", str(ideal), "--up-to", "5", "--format", "json"])
    assert code == 0 and rep["values"] == [1, 2, 0, 0, 0, 0] and rep["regularity"] == 2
    code, rep = run(["correspondence", "--group", gates(["Z"]), "--N", "3", "--format", "json"])
    assert code == 0 and rep["lhs"] == rep["rhs"] == 1


def test_reports_are_reproducible(gates):
    for argv in (["check-complete", gates(["H", "T"])], ["check-universal", gates(["CNOT"]), "--max-N", "2"]):
        a = run(argv + ["--seed", "4", "--format", "json"])[1]
        b = run(argv + ["--seed", "4", "--format", "json"])[1]
        a.pop("timings"), b.pop("timings")
        assert a == b
        assert json.loads(json.dumps(a)) == a


def test_bad_input(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"d": 2, "arity": 1, "gates": [{"name": "custom", "matrix": [[[1, 0], [0, 0]], [[0, 0], [2, 0]]]}]}))
    code, rep = run(["check-complete", str(bad)])
    assert code == 1 and rep is None
    err = capsys.readouterr().err
    assert "not unitary" in err and "gate file (JSON)" in err
    assert run(["check-complete", str(tmp_path / "missing.json")])[0] == 1
    assert run(["no-such-command"])[0] == 1


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "univcheck", "gl-baseline", "--m", "2", "--k", "6"],
                         capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "132"
