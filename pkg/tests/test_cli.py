import json
import subprocess
import sys

import pytest

from eisenkit.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--format", "json")
    return code, [json.loads(line) for line in out.splitlines()]


def test_expand_lists_both_branches(capsys):
    code, out, _ = run(capsys, "expand", "z*w^2 - w + 1", "-K", "8")
    assert code == 0
    assert "kappa=0" in out and "kappa=-1" in out


def test_expand_ramified(capsys):
    code, (doc,) = run_json(capsys, "expand", "w^2 - z", "-K", "4")
    assert code == 0
    assert [(b["e"], b["kappa"]) for b in doc["branches"]] == [(2, 1)]


def test_parse_error_exit_2(capsys):
    code, _, err = run(capsys, "expand", "w^^2")
    assert code == 2 and "error" in err


def test_bad_field_exit_2(capsys):
    code, _, _ = run(capsys, "expand", "w^2 - 2", "--field", "x^^2")
    assert code == 2


def test_bounds_binomial(capsys):
    code, (doc,) = run_json(capsys, "bounds", "w^2 - z - 1")
    assert code == 0
    (cert,) = doc["certificates"]
    assert cert["theorem_bound"]["holds"] is True
    assert float(cert["heights"]["hA"]["value"]) == pytest.approx(4.969813299576001)
    places = {d["place"]: d for d in cert["divisor"]}
    assert places["2"]["A"] == "4" and places["inf"]["A"] == "36"
    assert "tol" in cert["heights"]["hA"]


def test_bounds_precondition_and_squarefree(capsys):
    assert run(capsys, "bounds", "(w - z)^2")[0] == 3
    code, (doc,) = run_json(capsys, "bounds", "(w - z)^2", "--squarefree")
    assert code == 0 and doc["polynomial"] == "w - z"


def test_bounds_general_ramified(capsys):
    code, (doc,) = run_json(capsys, "bounds", "w^2 - z", "--variant", "general")
    assert code == 0 and doc["certificates"][0]["e"] == 2


def test_verify_zero_failures(capsys):
    code, (doc,) = run_json(capsys, "verify", "w^2 - z - 1", "-K", "200")
    assert code == 0
    assert all(c["verification"]["failures"] == [] for c in doc["certificates"])


def test_exceptional(capsys):
    code, (doc,) = run_json(capsys, "exceptional", "w^2 - z - 1")
    assert code == 0 and doc["observed"] == ["2"]
    assert float(doc["bound"]["value"]) == pytest.approx(10.158883083359672)


def test_disc(capsys):
    code, (doc,) = run_json(capsys, "disc", "w^2 - 2 - 2*z", "--field", "x^2 - 2")
    assert code == 0
    assert float(doc["actual"][0]["value"]) == pytest.approx(1.0397207708399179)
    assert float(doc["bound_per_branch"][0]["value"]) == pytest.approx(70.18070977791825)
    assert doc["lsum"] == [True, True]


def test_lemmas(capsys):
    code, (doc,) = run_json(capsys, "lemmas", "w^2 - z - 1", "--alpha", "3")
    assert code == 0 and doc["violations"] == 0


def test_json_is_deterministic(capsys):
    a = run(capsys, "bounds", "z*w^2 - w + 1", "--variant", "general", "--format", "json")[1]
    b = run(capsys, "bounds", "z*w^2 - w + 1", "--variant", "general", "--format", "json")[1]
    assert a == b


def test_batch_and_input(tmp_path, capsys):
    batch = tmp_path / "jobs.txt"
    batch.write_text("w^2 - z - 1\nw^2 - 2 - 2*z; field: x^2 - 2\n# comment\nw^^2\n")
    code, docs = run_json(capsys, "exceptional", "--batch", str(batch))
    assert code == 2
    assert [d.get("kind") for d in docs] == [None, None, "parse"]
    job = tmp_path / "job.txt"
    job.write_text("poly: w^2 - 2 - 2*z\nfield: x^2 - 2\n")
    code, (doc,) = run_json(capsys, "disc", "--input", str(job))
    assert code == 0


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "eisenkit", "expand", "w - z"], capture_output=True, text=True)
    assert proc.returncode == 0 and "e=1" in proc.stdout
