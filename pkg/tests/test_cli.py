import json
from pathlib import Path

import pytest

from ainfty.cli import run

MODELS = Path(__file__).resolve().parents[1] / "models"


def model(name):
    return str(MODELS / name)


def run_json(argv, tmp_path, name="out.json"):
    out = tmp_path / name
    code = run(argv + ["--out", str(out)])
    return code, json.loads(out.read_text()) if out.exists() else None


def test_check_axioms_exit_codes(tmp_path):
    code, rep = run_json(["check-axioms", "--model", model("formal_sphere_2.json")], tmp_path)
    assert code == 0 and rep["ok"]
    code, rep = run_json(["check-axioms", "--model", model("mutation_flip_pairing_e_vol.json")], tmp_path)
    assert code == 1 and rep["violations"][0]["property"] == 8
    code, _ = run_json(["check-axioms", "--extended", "--model", model("real_model_2.json")], tmp_path)
    assert code == 0


def test_solve_mc(tmp_path):
    code, rep = run_json(["solve-mc", "--model", model("obstructed.json"), "--integral", "s"], tmp_path)
    assert code == 1 and rep["status"] == "obstructed" and rep["level"] == 1
    code, rep = run_json(["solve-mc", "--model", model("quantum_sphere_2.json"), "--integral", "s"], tmp_path)
    assert code == 0 and rep["status"] == "ok" and rep["c_text"] == "-s^2*T^[1]"
    code, rep = run_json(["solve-mc", "--model", model("real_model_2.json"), "--integral", "s", "--real",
                          "--unit-pair"], tmp_path)
    assert code == 0 and rep["rho"]["unit_coeff_text"] == "1"


def test_superpotential_from_report(tmp_path):
    run_json(["solve-mc", "--model", model("quantum_sphere_2.json"), "--integral", "2*s"], tmp_path, "b.json")
    code, rep = run_json(["superpotential", "--model", model("quantum_sphere_2.json"),
                          "--b-from", str(tmp_path / "b.json"), "--extract", "beta=[1],k=3,t=[]"], tmp_path)
    assert code == 0 and rep["extract"]["value"] == "16/1"
    code, rep = run_json(["superpotential", "--model", model("formal_sphere_2.json"), "--b", "s*vol"], tmp_path)
    assert code == 0 and rep["omega"]["text"] == "0"
    code, rep = run_json(["superpotential", "--model", model("obstructed.json"), "--b", "s*vol"], tmp_path)
    assert code == 1 and rep["status"] == "not_bounding"


def test_spectral(tmp_path):
    code, rep = run_json(["spectral", "--model", model("formal_sphere_2.json"), "--b", "s*vol", "--pages", "3",
                          "--oracle"], tmp_path)
    assert code == 0 and rep["oracle"]["ok"] and len(rep["pages"]) == 4


def test_extend(tmp_path):
    code, rep = run_json(["extend", "--model", model("quantum_sphere_2.json"), "--arity", "3"], tmp_path)
    assert code == 0 and rep["ok"] and rep["m2_table"]


def test_write_models(tmp_path):
    code, rep = run_json(["write-models", "--dir", str(tmp_path / "m")], tmp_path)
    assert code == 0 and "obstructed.json" in rep["models"]
    assert (tmp_path / "m" / "manifest.json").exists()


@pytest.mark.parametrize("argv", [
    ["check-axioms", "--model", "/nonexistent.json"],
    ["solve-mc", "--model", "MODEL", "--integral", "s", "--pivot", "random"],
    ["solve-mc", "--model", "MODEL", "--integral", "s^"],
    ["solve-mc", "--model", "MODEL", "--integral", "s", "--emax", "0"],
    ["superpotential", "--model", "MODEL", "--b", "s*vol", "--extract", "k=3"],
    ["superpotential", "--model", "MODEL"],
    ["no-such-command"],
])
def test_usage_errors(argv, capsys):
    argv = [model("quantum_sphere_2.json") if a == "MODEL" else a for a in argv]
    assert run(argv) == 2


def test_invalid_model_is_refused(tmp_path):
    code = run(["solve-mc", "--model", model("mutation_flip_unit_right.json"), "--integral", "s",
                "--out", str(tmp_path / "x.json")])
    assert code == 1


def test_outputs_are_byte_identical(tmp_path, monkeypatch):
    argv = ["solve-mc", "--model", model("quantum_sphere_2.json"), "--integral", "s"]
    outs = []
    for i, threads in enumerate(["1", "4", "1"]):
        monkeypatch.setenv("AINFTY_THREADS", threads)
        path = tmp_path / f"r{i}.json"
        assert run(argv + ["--out", str(path)]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1] == outs[2]
    pages = []
    for i in range(2):
        path = tmp_path / f"p{i}.json"
        run(["spectral", "--model", model("formal_sphere_2.json"), "--b", "s*vol", "--out", str(path)])
        pages.append(path.read_bytes())
    assert pages[0] == pages[1]
