import json
import subprocess
import sys

import numpy as np
import pytest

from sptkit import serialize
from sptkit.cli import main
from sptkit.groups import build_group, cyclic_charge
from sptkit.cohomology import compute_h2
from sptkit.states import ChargedProductSpec, aklt_state, product_state


def run_cli(args, capsys):
    code = main(args)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def write_json(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(serialize.dumps(payload))
    return str(path)


def test_group_show(tmp_path, capsys):
    code, out, err = run_cli(["group", "show", "--group", "Z2xZ2"], capsys)
    assert code == 0
    data = json.loads(out)
    assert data["order"] == 4 and data["abelian"]
    manifest = json.loads(err)
    assert manifest["command"][:2] == ["group", "show"]
    assert "wall_time_s" in manifest


def test_cohomology_h2_cli(tmp_path, capsys):
    gpath = write_json(tmp_path, "g.json",
                       serialize.group_to_json(build_group("Z2xZ2")))
    code, out, _ = run_cli(["cohomology", "h2", "--group", gpath], capsys)
    assert code == 0
    data = json.loads(out)
    assert data["divisors"] == [2]
    assert data["class_count"] == 2


def test_cocycle_check_and_classify(tmp_path, capsys):
    grp = build_group("Z2xZ2")
    gen = compute_h2(grp).generators[0]
    cpath = write_json(tmp_path, "c.json",
                       serialize.cocycle_to_json(gen.representative()))
    code, out, _ = run_cli(["cocycle", "check", "--group", "Z2xZ2",
                            "--cocycle", cpath], capsys)
    assert code == 0
    assert json.loads(out)["ok"]

    code, out, _ = run_cli(["cocycle", "classify", "--group", "Z2xZ2",
                            "--cocycle", cpath], capsys)
    assert code == 0
    data = json.loads(out)
    assert not data["trivial"]
    assert data["divisors"] == [2]


def test_rep_extract_cli(tmp_path, capsys):
    grp = build_group("Z2xZ2")
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    z = np.array([[1, 0], [0, -1]], dtype=complex)
    mats = [np.eye(2, dtype=complex), x, z, x @ z]
    rpath = write_json(tmp_path, "r.json", {
        "group": "Z2xZ2", "dim": 2,
        "matrices": [serialize.matrix_to_json(m) for m in mats]})
    code, out, _ = run_cli(["rep", "extract", "--group", "Z2xZ2",
                            "--rep", rpath], capsys)
    assert code == 0
    assert not json.loads(out)["class"]["trivial"]


def test_state_build_and_index_roundtrip(tmp_path, capsys):
    spath = str(tmp_path / "aklt.json")
    code, _, _ = run_cli(["state", "build", "--kind", "aklt",
                          "--out", spath], capsys)
    assert code == 0
    code, out, _ = run_cli(["index", "compute", "--state", spath], capsys)
    assert code == 0
    data = json.loads(out)
    assert data["trivial"] is False
    assert data["residuals"]["max_edge_residual"] < 1e-8


def test_index_detector_haldane(tmp_path, capsys):
    spath = write_json(tmp_path, "aklt.json",
                       serialize.state_to_json(aklt_state()))
    code, out, _ = run_cli(["index", "compute", "--state", spath,
                            "--detector", "so3"], capsys)
    assert code == 0
    data = json.loads(out)
    assert data["trivial"] is False
    assert data["verdict"] == "haldane"


def test_index_product_trivial(tmp_path, capsys):
    grp = build_group("Z4")
    spath = write_json(tmp_path, "p.json", serialize.state_to_json(
        product_state(grp, cyclic_charge(grp))))
    code, out, _ = run_cli(["index", "compute", "--state", spath], capsys)
    assert code == 0
    assert json.loads(out)["trivial"] is True


def test_index_broken_symmetry_exit_code(tmp_path, capsys):
    grp = build_group("Z2")
    z = np.array([[1, 0], [0, -1]], dtype=complex)
    tensor = np.zeros((2, 1, 1), dtype=complex)
    tensor[0, 0, 0] = tensor[1, 0, 0] = 1 / np.sqrt(2)
    payload = {
        "d": 2, "D": 1,
        "tensor": [serialize.matrix_to_json(tensor[i]) for i in range(2)],
        "group": "Z2",
        "onsite": {"group": "Z2", "dim": 2,
                   "matrices": [serialize.matrix_to_json(np.eye(2)),
                                serialize.matrix_to_json(z)]},
        "label": "broken",
    }
    spath = write_json(tmp_path, "b.json", payload)
    code, _, err = run_cli(["index", "compute", "--state", spath], capsys)
    assert code == 2
    assert "symmetry" in err


def test_circuit_cli(tmp_path, capsys):
    grp = build_group("Z4")
    spec = ChargedProductSpec(group=grp, charges={0: cyclic_charge(grp)})
    cpath = write_json(tmp_path, "q.json", serialize.charged_spec_to_json(spec))
    code, out, _ = run_cli(["circuit", "charge-transfer", "--charges", cpath,
                            "--length", "4"], capsys)
    assert code == 0
    data = json.loads(out)
    assert data["equivariance_residual"] < 1e-12
    assert abs(data["final_overlap"] - 1) < 1e-12
    layers = {g["layer"] for g in data["gates"]}
    assert layers == {"T", "V", "W"}
    # circuit JSON round-trips
    circ = serialize.circuit_from_json(data)
    assert circ.length == 5


def test_locality_ffunction_cli(tmp_path, capsys):
    code, out, _ = run_cli(["locality", "ffunction", "--decay", "exp:1.0",
                            "--rmax", "100"], capsys)
    assert code == 0
    data = json.loads(out)
    assert data["r_max"] == 100
    assert data["c_convolution"] > 0
    assert len(data["values"]) == 101


def test_malformed_json_exit_one(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, err = run_cli(["cohomology", "h2", "--group", str(bad)], capsys)
    assert code == 1
    assert "line" in err and "column" in err


def test_stdout_deterministic(tmp_path, capsys):
    gpath = write_json(tmp_path, "g.json",
                       serialize.group_to_json(build_group("Z2xZ2")))
    _, out1, _ = run_cli(["cohomology", "h2", "--group", gpath], capsys)
    _, out2, _ = run_cli(["cohomology", "h2", "--group", gpath], capsys)
    assert out1 == out2


def test_state_json_roundtrip(tmp_path):
    m = aklt_state()
    payload = serialize.state_to_json(m)
    back = serialize.state_from_json(payload)
    assert np.linalg.norm(back.tensor - m.tensor) < 1e-12
    assert back.group == m.group


def test_tool_threads_env_validated(tmp_path, capsys, monkeypatch):
    spath = write_json(tmp_path, "aklt.json",
                       serialize.state_to_json(aklt_state()))
    monkeypatch.setenv("TOOL_THREADS", "2")
    code, out, _ = run_cli(["index", "compute", "--state", spath], capsys)
    assert code == 0 and json.loads(out)["trivial"] is False
    monkeypatch.setenv("TOOL_THREADS", "zero")
    code, _, err = run_cli(["index", "compute", "--state", spath], capsys)
    assert code == 1
    assert "TOOL_THREADS" in err
