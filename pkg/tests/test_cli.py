import json
import subprocess
import sys

import pytest

from polyapprox import benson_primal
from polyapprox.cli import EXIT_FAIL, EXIT_NOT_NESTED, EXIT_OK, EXIT_USAGE, main, run_verification
from polyapprox.geometry import Polyhedron
from polyapprox.instances import gen_random_polytope_cpp


def write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


def test_example_then_approx(tmp_path, capsys):
    ex = tmp_path / "ex.json"
    assert main(["example", "--name", "primal-cpp", "--q", "2", "--output", str(ex)]) == EXIT_OK
    payload = json.loads(ex.read_text())
    assert payload["expectations"]["expected_cuts"] == 1
    out = tmp_path / "res.json"
    code = main(["approx", "--algorithm", "primal", "--eps", "0.25", "--input", str(ex),
                 "--output", str(out), "--selection", "lexmin", "--trace"])
    assert code == EXIT_OK
    res = json.loads(out.read_text())
    assert res["kind"] == "outer" and res["cuts"] == 1
    assert res["measured_dh"] == pytest.approx(res["certified_bound"], abs=1e-9)
    assert "trace" in res
    assert "certified_bound" in capsys.readouterr().err


def test_approx_on_random_instance(tmp_path):
    inp = write(tmp_path / "i.json", gen_random_polytope_cpp(2, 3, 6, 9).to_json())
    out = tmp_path / "o.json"
    assert main(["approx", "--algorithm", "dual", "--eps", "0.1", "--input", inp, "--output", str(out)]) == EXIT_OK
    res = json.loads(out.read_text())
    assert res["measured_dh"] <= res["certified_bound"]


def test_hausdorff_command(tmp_path, capsys):
    inner = write(tmp_path / "a.json", Polyhedron.from_vrep([[1 / 3, 1 / 3]]).to_json())
    outer = write(tmp_path / "b.json", Polyhedron.from_vrep([[0, 0], [1, 0], [0, 1]]).to_json())
    assert main(["hausdorff", inner, outer]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["d_h"] == pytest.approx(5**0.5 / 3)
    assert main(["hausdorff", outer, inner]) == EXIT_NOT_NESTED


def test_bad_inputs(tmp_path):
    assert main(["approx", "--algorithm", "primal", "--eps", "0.1", "--input", str(tmp_path / "missing")]) == EXIT_USAGE
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["hausdorff", str(bad), str(bad)]) == EXIT_USAGE
    with pytest.raises(SystemExit) as exc:
        main(["approx", "--algorithm", "primal", "--eps", "-1", "--input", str(bad)])
    assert exc.value.code == EXIT_USAGE
    with pytest.raises(SystemExit) as exc:
        main(["approx", "--algorithm", "primal", "--input", str(bad)])
    assert exc.value.code == EXIT_USAGE


def test_verify_passes(capsys):
    assert main(["verify", "--q", "2"]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.count("PASS") == 4 and "FAIL" not in out


def test_verify_detects_broken_tie_rule(monkeypatch):
    # confirming nothing within tolerance forces extra cuts on the tight examples
    monkeypatch.setattr(benson_primal, "TIE_TOL", -1e-6)
    rows = run_verification((2,))
    assert not all(r.passed for r in rows)
    assert main(["verify", "--q", "2"]) == EXIT_FAIL


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "polyapprox", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "verify" in proc.stdout
