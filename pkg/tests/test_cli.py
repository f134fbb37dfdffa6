import json
import subprocess
import sys

import pytest

from fairmso.cli import main


@pytest.fixture
def files(tmp_path):
    def write(name, text):
        p = tmp_path / name
        p.write_text(text)
        return str(p)
    return write


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_solve_p3(files, capsys):
    g = files("p3.graph", "3 2\n0 1\n1 2\n")
    code, out, _ = run(capsys, "solve", "--graph", g, "--problem", "vc")
    assert code == 0
    assert "k*=1 X={1}" in out
    assert "modulator: 1 (computed)" in out
    assert "shapes: enumerated=" in out


def test_solve_uses_file_modulator_and_flag(files, capsys):
    g = files("p3.graph", "3 2\n0 1\n1 2\nmodulator: 1\n")
    assert "(file)" in run(capsys, "solve", "--graph", g, "--problem", "vc")[1]
    out = run(capsys, "solve", "--graph", g, "--problem", "vc", "--modulator", "0")[1]
    assert "modulator: 0 (flag)" in out


def test_solve_decision_absent(files, capsys):
    g = files("k2.graph", "2 1\n0 1\n")
    code, out, _ = run(capsys, "solve", "--graph", g, "--problem", "vc", "--k", "0")
    assert code == 2
    assert "no solution" in out


def test_formula_file_and_dump(files, capsys):
    g = files("k3.graph", "3 3\n0 1\n1 2\n0 2\n")
    f = files("vc.mso", "(forallV x (forallV y (implies (adj x y) (or (in x Free) (in y Free)))))")
    code, out, _ = run(capsys, "solve", "--graph", g, "--formula", f, "--dump-shapes")
    assert code == 0 and "k*=2" in out
    assert "# satisfies" in out


def test_json_roundtrip_into_check(files, capsys):
    g = files("star.graph", "4 3\n0 1\n0 2\n0 3\n")
    code, out, _ = run(capsys, "solve", "--graph", g, "--problem", "ds", "--json")
    data = json.loads(out)
    assert code == 0 and data["k_star"] == 1 and data["X"] == [0]
    X = ",".join(map(str, data["X"]))
    code, out, _ = run(capsys, "check", "--graph", g, "--problem", "ds", "--set", X,
                       "--k", str(data["k_star"]), "--json")
    assert code == 0 and json.loads(out)["ok"]
    code, _, _ = run(capsys, "check", "--graph", g, "--problem", "ds", "--set", "1")
    assert code == 2


def test_oracle_and_cvd(files, capsys):
    g = files("c5.graph", "5 5\n0 1\n1 2\n2 3\n3 4\n0 4\n")
    code, out, _ = run(capsys, "oracle", "--graph", g, "--problem", "vc", "--json")
    assert code == 0 and json.loads(out)["k_star"] == 2
    code, out, _ = run(capsys, "oracle", "--graph", g, "--problem", "vc", "--k", "1")
    assert code == 2
    code, out, _ = run(capsys, "cvd", "--graph", g, "--json")
    assert code == 0 and json.loads(out)["cvd"] == 2


def test_sigma_rho(files, capsys):
    g = files("p3.graph", "3 2\n0 1\n1 2\n")
    code, out, _ = run(capsys, "solve", "--graph", g, "--problem", "sigma-rho",
                       "--sigma", "0,1", "--rho", "coN:0")
    assert code == 0 and "k*=1" in out
    code, _, err = run(capsys, "solve", "--graph", g, "--problem", "sigma-rho", "--sigma", "0")
    assert code == 1 and "rho" in err


def test_byte_identical_runs(files, capsys):
    g = files("g.graph", "6 7\n0 1\n1 2\n0 2\n2 3\n3 4\n4 5\n3 5\n")
    outs = {run(capsys, "solve", "--graph", g, "--problem", "oct", "--json")[1] for _ in range(3)}
    assert len(outs) == 1


def test_gen_hard(tmp_path, files, capsys):
    bp = files("items.txt", "2 4\n2\n2\n2\n")
    prefix = str(tmp_path / "hard")
    code, out, _ = run(capsys, "gen-hard", "--binpack", bp, "--out", prefix)
    assert code == 0 and "n=14" in out
    meta = json.loads(open(prefix + ".meta").read())
    assert meta["expected"] == "YES"
    code, out, _ = run(capsys, "oracle", "--graph", prefix + ".graph", "--formula", prefix + ".mso",
                       "--k", str(meta["k"]))
    assert code == 0


def test_gen_hard_warns_and_pads(tmp_path, files, capsys):
    dt = files("t.txt", "2 1\n1 1\n1 1\n")
    code, _, err = run(capsys, "gen-hard", "--dtuple", dt, "--out", str(tmp_path / "a"))
    assert code == 0 and "warning" in err
    code, _, err = run(capsys, "gen-hard", "--dtuple", dt, "--out", str(tmp_path / "b"), "--pad")
    assert code == 0 and err == ""
    assert json.loads(open(tmp_path / "b.meta").read())["kept_tuples"][-1] == [3, 1]


@pytest.mark.parametrize("argv", [
    [],
    ["solve"],
    ["solve", "--graph", "x.graph"],
    ["frobnicate"],
])
def test_usage_errors(argv, capsys):
    code, _, err = run(capsys, *argv)
    assert code == 1 and "usage error" in err


def test_bad_inputs(files, capsys):
    g = files("bad.graph", "3 2\n0 1\n")
    code, _, err = run(capsys, "cvd", "--graph", g)
    assert code == 1 and "line" in err
    good = files("c5.graph", "5 5\n0 1\n1 2\n2 3\n3 4\n0 4\n")
    code, _, err = run(capsys, "solve", "--graph", good, "--problem", "vc", "--modulator", "0")
    assert code == 1
    f = files("bad.mso", "(forallV x (in y Free))")
    code, _, err = run(capsys, "solve", "--graph", good, "--formula", f)
    assert code == 1 and "unbound" in err
    code, _, err = run(capsys, "solve", "--graph", good, "--problem", "vc", "--alpha", "4")
    assert code == 1
    code, _, err = run(capsys, "cvd", "--graph", "/nonexistent/x.graph")
    assert code == 1


def test_module_entry_point(files):
    g = files("p3.graph", "3 2\n0 1\n1 2\n")
    proc = subprocess.run([sys.executable, "-m", "fairmso.cli", "solve", "--graph", g, "--problem", "vc"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "k*=1 X={1}" in proc.stdout
