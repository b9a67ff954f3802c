import io
import subprocess
import sys

import pytest

from padicbij.cli import (EXIT_OK, EXIT_PARSE, EXIT_PRECISION, EXIT_PRECONDITION,
                          EXIT_VERIFY, main)

SCRIPT = """prime 5;
set X = box(l=1, k=1);
set Y = cell(v(1) <= v(x - 1) <= v(25), x - 1 in 1*P_2 level 1);
set F = point(3) | point(1/5);
set E = empty(1);
form b = (e=2, beta=25, mu=[2]);
dim X; dim F; dim E;
classify F;
rectilinearize Y with [b];
verify Y samples=50 seed=1 modulus=3;
verify F modulus=2;
verify E;
classify Y;
"""


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def script(tmp_path):
    path = tmp_path / "s.pb"
    path.write_text(SCRIPT)
    return path


@pytest.fixture
def pipe(tmp_path, script):
    out = tmp_path / "{name}.pipe"
    code, _, _ = run("run", str(script), "--out", str(out))
    assert code == EXIT_OK
    return tmp_path / "Y.pipe"


def test_run_script(script):
    code, out, err = run("run", str(script))
    assert code == EXIT_OK, err
    lines = out.splitlines()
    assert "dim X = 1" in lines and "dim F = 0" in lines and "dim E = -1" in lines
    assert "points 2" in lines
    assert any(l.startswith("rectilinearize Y parts=") for l in lines)
    assert sum(l.startswith("PASS") for l in lines) == 4
    assert not any(l.startswith("FAIL") for l in lines)


def test_run_is_deterministic(script):
    assert run("run", str(script))[1] == run("run", str(script))[1]
    a = run("run", str(script), "--seed", "9", "--samples", "20")[1]
    assert a == run("run", str(script), "--seed", "9", "--samples", "20")[1]
    assert "samples=20 seed=9" in a


def test_out_needs_name_for_several_classifies(tmp_path, script):
    code, _, err = run("run", str(script), "--out", str(tmp_path / "one.pipe"))
    assert code == EXIT_PRECONDITION and "{name}" in err


def test_eval_round_trip(pipe):
    code, out, _ = run("eval", str(pipe), "(26)")
    assert code == EXIT_OK
    y = out.strip()
    code, back, _ = run("eval", str(pipe), y, "--backward")
    assert code == EXIT_OK and back.strip() == "(26)"


def test_eval_outside_domain(pipe):
    code, _, err = run("eval", str(pipe), "(6)")
    assert code == EXIT_PRECONDITION and "no branch" in err


def test_eval_precision(pipe):
    # one known digit cannot place 1 + O(5) relative to the ball around 1
    code, _, err = run("eval", str(pipe), "([1]@0)")
    assert code == EXIT_PRECISION and "precision" in err


def test_verify_pipeline(pipe):
    code, out, _ = run("verify", str(pipe), "--samples", "100")
    assert code == EXIT_OK and out.startswith("PASS pipeline checked=200")


def test_verify_corrupted_pipeline(pipe, tmp_path):
    text = pipe.read_text()
    bad = tmp_path / "bad.pipe"
    bad.write_text(text.replace("target Space(d=1)", "target Cell1D(c=0, lam=1, a1=1, sq1=\"<=\")"))
    code, out, _ = run("verify", str(bad), "--samples", "100")
    assert code == EXIT_VERIFY and out.startswith("FAIL")


def test_eval_prime_mismatch(pipe):
    code, _, _ = run("eval", str(pipe), "(26)", "--prime", "3")
    assert code == EXIT_PRECONDITION


@pytest.mark.parametrize("text", ["prime 5; set X = {x : x^2 = 2};", "prime 5 set X;",
                                  "prime 5; classify Q;"])
def test_parse_errors(tmp_path, text):
    path = tmp_path / "bad.pb"
    path.write_text(text)
    code, _, err = run("run", str(path))
    assert code == EXIT_PARSE and err.startswith("parse error: 1:")


def test_bad_pipeline_file(tmp_path):
    path = tmp_path / "bad.pipe"
    path.write_text("pipeline\nprime 5\nsource none\n")
    assert run("eval", str(path), "(1)")[0] == EXIT_PARSE


def test_missing_file():
    assert run("run", "/nonexistent/script.pb")[0] == EXIT_PRECONDITION


def test_finite_verify_in_script(tmp_path):
    path = tmp_path / "f.pb"
    path.write_text("prime 3; set Z = point(1) | point(2); verify Z modulus=1;")
    code, out, _ = run("run", str(path))
    assert code == EXIT_OK and "PASS Z/points" in out


def test_console_entry_point(script):
    r = subprocess.run([sys.executable, "-m", "padicbij.cli", "run", str(script)],
                       capture_output=True, text=True)
    assert r.returncode == 0 and "dim X = 1" in r.stdout
