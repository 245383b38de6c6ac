import json
import subprocess
import sys

import pytest

from lieforge.cli import RunConfig, main, run
from lieforge.generators import load_generators

from conftest import DIPOLE_TEXT, HEISENBERG_TEXT


@pytest.fixture
def files(tmp_path):
    paths = {
        "tfim2": "qubits 2\ngen zz : 1.0 ZZ\ngen x1 : 1.0 XI\ngen x2 : 1.0 IX\n",
        "dipole": DIPOLE_TEXT,
        "heis": HEISENBERG_TEXT,
        "p": "qubits 2\ngen a : 1.0 XI\ngen b : 1.0 YI\n",
        "q": "qubits 2\ngen c : 1.0 ZI\n",
        "two": "qubits 2\ngen a : 1.0 XI\ngen b : 1.0 YI\ngen c : 1.0 IX\ngen d : 1.0 IY\n",
        "filt": "qubits 2\ngen f : 1.0 ZI\n",
        "bad": "qubits 2\ngen g : 1.0 ZZZ\n",
        "empty": "",
    }
    out = {}
    for k, text in paths.items():
        p = tmp_path / f"{k}.gens"
        p.write_text(text)
        out[k] = str(p)
    return out


def run_json(argv, capsys):
    code = main(argv)
    return code, json.loads(capsys.readouterr().out)


def test_closure(files, capsys):
    code, rep = run_json(["closure", "--in", files["tfim2"], "--cyclic-depth", "4"], capsys)
    assert code == 0
    assert rep["dim"] == 6 and sorted(rep["basis"]) == sorted(["ZZ", "XI", "IX", "YZ", "ZY", "YY"])
    assert "tolerances" in rep and rep["cyclicity"]["verdict"] in ("cyclic", "unknown")


def test_closure_dense_flag(files, capsys):
    code, rep = run_json(["closure", "--in", files["tfim2"], "--dense"], capsys)
    assert code == 0 and rep["dim"] == 6 and rep["flavor"] == "dense"


def test_overlap_inside(files, capsys):
    code, rep = run_json(["overlap", "--p", files["p"], "--q", files["q"]], capsys)
    assert code == 0
    assert rep["overlap"] == pytest.approx(1.0)
    assert rep["d_c"] == 0.0


def test_overlap_example(capsys):
    code, rep = run_json(["overlap", "--example", "central-spin"], capsys)
    assert code == 0
    assert rep["formula_level"]["O_Q2"] == pytest.approx(25 / 34)


def test_compose(files, capsys, tmp_path):
    out_gens = tmp_path / "composed.json"
    code, rep = run_json(["compose", "--blocks", files["dipole"], files["heis"], "--out-gens", str(out_gens)], capsys)
    assert code == 0
    assert rep["composed_dim"] == 5 and rep["total_qubits"] == 3 and rep["verdict"] == "pass"
    g = load_generators(out_gens)
    assert len(g) == 3 and g.dim == 8


def test_compose_powers(files, capsys):
    code, rep = run_json(["compose", "--blocks", files["p"], "--powers", "2"], capsys)
    assert code == 0 and rep["composed_dim"] == 6


def test_invariance(capsys):
    code, rep = run_json(["invariance", "--n-list", "2,3"], capsys)
    assert code == 0
    assert [r["closure_dim"] for r in rep["results"]] == [15, 15, 63, 63]


def test_reduce(files, capsys, tmp_path):
    code, rep = run_json(["reduce", "--in", files["two"], "--filter", files["filt"],
                          "--out-gens", str(tmp_path / "a.json")], capsys)
    assert code == 0
    assert rep["reduction"]["dim_closure_Aprime"] == 3 and rep["reduction"]["verdict"] == "pass"
    code, rep = run_json(["reduce", "--in", files["two"], "--targets", "0,1"], capsys)
    assert code == 0 and rep["reduction"]["dim_closure_Aprime"] == 6


def test_reduce_failing_verdict(tmp_path, capsys):
    p = tmp_path / "sab.gens"
    p.write_text("qubits 2\ngen a : 1.0 ZI\ngen b : 1.0 XI\ngen c : 1.0 IX\ngen d : 1.0 IY\n")
    f = tmp_path / "f.gens"
    f.write_text("qubits 2\ngen f : 1.0 ZI\n")
    code, rep = run_json(["reduce", "--in", str(p), "--filter", str(f)], capsys)
    assert code == 1 and rep["reduction"]["verdict"] == "fail"


def test_trotter_csv(tmp_path, capsys):
    csv_path = tmp_path / "grid.csv"
    code, rep = run_json(["trotter", "--n-list", "2", "--alpha-list", "0.1", "--t-list", "0.1,0.2",
                          "--no-bound", "--csv", str(csv_path)], capsys)
    assert code == 0 and len(rep["points"]) == 2
    assert len(csv_path.read_text().splitlines()) == 3
    assert main(["trotter", "--dims", "--n-list", "2,3", "--format", "csv"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("n,dim_tfim") and lines[1].startswith("2,6,4,False")


def test_input_errors(files, capsys):
    assert main(["closure", "--in", files["bad"]]) == 2
    err = capsys.readouterr().err
    assert ":2:" in err and "length" in err
    assert main(["closure", "--in", files["empty"]]) == 2
    assert "no generators" in capsys.readouterr().err
    assert main(["closure", "--in", files["tfim2"] + ".missing"]) == 2
    assert main(["closure", "--in", files["tfim2"], "--rank-tol", "-1"]) == 2
    assert main(["closure", "--in", files["tfim2"], "--format", "csv"]) == 2


def test_dense_limit_message(files, capsys, monkeypatch):
    monkeypatch.setenv("LIEFORGE_DENSE_LIMIT", "1")
    assert main(["closure", "--in", files["tfim2"], "--dense"]) == 2
    err = capsys.readouterr().err
    assert "2" in err and "1" in err


def test_determinism(files, tmp_path):
    outs = []
    for k in range(2):
        out = tmp_path / f"r{k}.json"
        assert run(RunConfig("reduce", {"inp": files["two"], "targets": [0]}, seed=4, out=str(out))) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_module_entry_point(files):
    res = subprocess.run([sys.executable, "-m", "lieforge", "closure", "--in", files["tfim2"]],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0 and json.loads(res.stdout)["dim"] == 6
