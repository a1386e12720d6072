import json
import subprocess
import sys
from pathlib import Path

import pytest

from jetlc.cli import EXIT_FAIL, EXIT_INPUT, EXIT_OK, main

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


def run_json(capsys, argv):
    code = main(argv)
    return code, json.loads(capsys.readouterr().out)


@pytest.fixture(scope="module")
def quick_reports(tmp_path_factory):
    d = tmp_path_factory.mktemp("reports")
    codes = [main(["verify", "--config", str(CONFIGS / "quick.json"), "--out", str(d / f"r{i}.json")])
             for i in range(2)]
    return codes, d


def test_verify_quick_passes_and_is_deterministic(quick_reports):
    codes, d = quick_reports
    assert codes == [EXIT_OK, EXIT_OK]
    a, b = (d / "r0.json").read_bytes(), (d / "r1.json").read_bytes()
    assert a == b
    rep = json.loads(a)
    assert rep["summary"]["failed"] == 0 and rep["summary"]["total"] == len(rep["checks"])
    assert {c["mode"] for c in rep["checks"]} <= {"symbolic", "sampled"}
    assert (d / "r0.md").exists()


def test_verify_seed_override_changes_sampling(tmp_path, quick_reports):
    _, d = quick_reports
    out = tmp_path / "s.json"
    assert main(["verify", "--config", str(CONFIGS / "quick.json"), "--seed", "7", "--out", str(out)]) == EXIT_OK
    assert json.loads(out.read_text())["config"]["seed"] == 7
    assert out.read_bytes() != (d / "r0.json").read_bytes()


def test_verify_corrupted_reports_witness(tmp_path, capsys):
    out = tmp_path / "bad.json"
    code = main(["verify", "--config", str(CONFIGS / "corrupted.json"), "--out", str(out)])
    text = capsys.readouterr().out
    assert code == EXIT_FAIL
    assert "FAIL" in text and "witness" in text
    failed = [c for c in json.loads(out.read_text())["checks"] if c["status"] == "fail"]
    assert failed and all(c["witness"] for c in failed)


@pytest.mark.parametrize("cfg", [None, {"dimensions": [7]}, {"dimensions": [2], "bogus": 1}, {"trials": "x"}, [1, 2]])
def test_verify_bad_config(tmp_path, cfg):
    path = str(tmp_path / "missing.json") if cfg is None else write(tmp_path, "c.json", cfg)
    assert main(["verify", "--config", path, "--out", str(tmp_path / "r.json")]) == EXIT_INPUT


def test_verify_malformed_json(tmp_path):
    p = tmp_path / "c.json"
    p.write_text("{not json")
    assert main(["verify", "--config", str(p)]) == EXIT_INPUT


def test_argparse_errors_map_to_input_code():
    assert main(["verify"]) == EXIT_INPUT
    assert main(["invariants", "--dim", "3", "--group", "U"]) == EXIT_INPUT


def test_eval_omega_normal_point(tmp_path, capsys):
    pt = write(tmp_path, "p.json", {"dimension": 2, "base": "normal", "values": {}})
    vec = write(tmp_path, "v.json", [{"y11": 1}])
    code, out = run_json(capsys, ["eval", "omega", "--point", pt, "--vectors", vec])
    assert code == EXIT_OK
    assert out["value"] == [["1/2", "0/1"], ["0/1", "0/1"]]


def test_eval_p1_witness(tmp_path, capsys):
    pt = write(tmp_path, "p.json", {"dimension": 2, "base": "normal"})
    vec = write(tmp_path, "v.json", [{"x1": 1}, {"x2": 1}, {"y11,2": 1}, {"y12,2": 1}])
    code, out = run_json(capsys, ["eval", "p_1", "--point", pt, "--vectors", vec])
    assert code == EXIT_OK and out["value"] == "-1/2" and out["two_pi_power"] == -2


def test_eval_theta_vanishes_on_section_tangent(tmp_path, capsys):
    # g = diag(1, 1 + x1^2) at x = (1, 0): the section's tangent along d/dx1
    pt = write(tmp_path, "p.json", {"dimension": 2, "base": "normal",
                                    "values": {"x1": 1, "y22": 2, "y22,1": 2}})
    vec = write(tmp_path, "v.json", [{"x1": 1, "y22": 2, "y22,1": 2}])
    code, out = run_json(capsys, ["eval", "theta", "--point", pt, "--vectors", vec])
    assert code == EXIT_OK and out["value"] == [["0/1", "0/1"], ["0/1", "0/1"]]
    # a vertical vector is not killed
    vec = write(tmp_path, "w.json", [{"y22": 1}])
    _, out = run_json(capsys, ["eval", "theta", "--point", pt, "--vectors", vec])
    assert out["value"] == [["0/1", "0/1"], ["0/1", "1/1"]]


def test_eval_euler(tmp_path, capsys):
    pt = write(tmp_path, "p.json", {"dimension": 2, "base": "normal", "values": {"y22": 4}})
    vec = write(tmp_path, "v.json", [{"y11": 1}, {"y12": 1}])
    code, out = run_json(capsys, ["eval", "euler_pf", "--point", pt, "--vectors", vec])
    assert code == EXIT_OK and out["det_g"] == "4/1" and out["det_g_power"] == "-1/2"


@pytest.mark.parametrize("point,vectors,form", [
    ({"dimension": 2, "base": "normal"}, [{"y11": 1}], "bogus"),
    ({"dimension": 2, "base": "normal", "values": {"y11": -1}}, [{"y11": 1}], "omega"),
    ({"dimension": 2, "base": "normal"}, [{"y33": 1}], "omega"),
    ({"dimension": 2, "base": "normal"}, [{"y11": 1}, {"y12": 1}], "omega"),
    ({"dimension": 2}, [{"y11": 1}], "omega"),
    ({"dimension": 3, "base": "normal"}, [{"x1": 1}] * 3, "euler_pf"),
    ({"dimension": 2, "base": "normal"}, [{"x1": 1}] * 8, "p_2"),
])
def test_eval_bad_input(tmp_path, point, vectors, form):
    pt = write(tmp_path, "p.json", point)
    vec = write(tmp_path, "v.json", vectors)
    assert main(["eval", form, "--point", pt, "--vectors", vec]) == EXIT_INPUT


def test_invariants_command(capsys):
    code, out = run_json(capsys, ["invariants", "--dim", "4", "--group", "SO"])
    assert code == EXIT_OK and out["dimension"] == 2
    code, out = run_json(capsys, ["invariants", "--dim", "3", "--group", "O", "--space", "V3"])
    assert code == EXIT_OK and out["dimension"] == 0
    code, out = run_json(capsys, ["invariants", "--dim", "3", "--group", "O"])
    assert out["theta_trace_basis"]["status"] == "pass"
    assert main(["invariants", "--dim", "9", "--group", "O"]) == EXIT_INPUT


def test_module_entry_point(tmp_path):
    pt = write(tmp_path, "p.json", {"dimension": 2, "base": "normal"})
    vec = write(tmp_path, "v.json", [{"y11": 1}])
    r = subprocess.run([sys.executable, "-m", "jetlc", "eval", "vartheta", "--point", pt, "--vectors", vec],
                       capture_output=True, text=True)
    assert r.returncode == 0
    assert json.loads(r.stdout)["value"] == [["1/1", "0/1"], ["0/1", "0/1"]]
