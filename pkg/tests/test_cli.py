import json

import numpy as np
import pytest

from diffrakt.cli import run
from diffrakt.demos import DEMOS

from conftest import Z6_FIRST, Z6_SECOND


@pytest.fixture
def files(tmp_path):
    def write(name, obj):
        path = tmp_path / name
        path.write_text(json.dumps(obj) if not isinstance(obj, str) else obj)
        return str(path)

    return {
        "z6": write("z6.json", {"moduli": [6], "weights": list(Z6_FIRST)}),
        "z6b": write("z6b.json", {"moduli": [6], "weights": list(Z6_SECOND)}),
        "m2": write("m2.json", {"moduli": [2], "weights": [2, 0]}),
        "m2b": write("m2b.json", {"moduli": [2], "weights": [0, 2]}),
        "bad_support": write("s.json", {"moduli": [5], "support": [1, 4]}),
        "circle": write("c.json", {"values": [[1, 0, 1], [-1, 0, -1]]}),
        "broken": write("broken.json", "{not json"),
        "short": write("short.json", {"moduli": [6], "weights": [1, 2]}),
        "flat3": write("flat3.json", {"kind": "diffraction", "moduli": [3], "weights": [1, 1, 1]}),
        "dir": str(tmp_path),
    }


def call(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_diffract(files, capsys):
    code, out, _ = call(capsys, "diffract", "--in", files["z6"])
    assert code == 0
    data = json.loads(out)
    assert data["kind"] == "diffraction"
    assert np.allclose(data["weights"], [784, 247 / 3, 0, 0, 0, 247 / 3], atol=1e-9)
    assert data["weights"][2:5] == [0.0, 0.0, 0.0]
    assert data["spectrum"] == [[0], [1], [5]]


def test_diffract_csv(files, capsys):
    code, out, _ = call(capsys, "diffract", "--in", files["z6"], "--format", "csv")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "k1,omega" and lines[1].startswith("0,784.0")


def test_autocorr(files, capsys):
    code, out, _ = call(capsys, "autocorr", "--in", files["z6"])
    assert code == 0
    assert abs(json.loads(out)["values"][0] - 5692 / 6) < 1e-9


def test_solve_from_density_and_diffraction(files, capsys):
    code, out, _ = call(capsys, "solve", "--in", files["z6"])
    data = json.loads(out)
    assert code == 0 and data["p"] == 1 and data["q"] == 0 and data["class_group"] == "U(1)"
    code, out, _ = call(capsys, "solve", "--in", files["flat3"])
    assert code == 0
    assert json.loads(out)["sample"]["weights"] == pytest.approx([3, 0, 0], abs=1e-12)


def test_extract(files, capsys):
    code, out, _ = call(capsys, "extract", "--in", files["z6b"])
    data = json.loads(out)
    assert code == 0 and not data["negated"]
    assert abs(data["phase_form"]["free_angles"][0] - 0.520310) < 1e-5


def test_homometric_pair(files, capsys):
    code, out, _ = call(capsys, "homometric", "--in", files["z6"], "--in", files["z6b"])
    data = json.loads(out)
    assert code == 0
    assert data["homometric"] and not data["same_phase_form"]
    assert data["translation"] is None and data["first_divergent_moment"] == 6
    code, out, _ = call(capsys, "homometric", "--in", files["m2"], "--in", files["m2b"])
    data = json.loads(out)
    assert data["same_phase_form"] and data["translation"] == [1]


def test_moments(files, capsys):
    code, out, _ = call(capsys, "moments", "--in", files["z6"], "--in", files["z6b"], "--moments", "6")
    data = json.loads(out)
    assert code == 0 and data["first_divergent_moment"] == 6
    assert [e["length"] for e in data["entries"]] == [0, 6, 6]


def test_relators(files, capsys):
    code, out, _ = call(capsys, "relators", "--in", files["m2"])
    assert code == 0
    assert json.loads(out)["summary"] == "Z trivial; unique homometry class"
    code, out, _ = call(capsys, "relators", "--in", files["z6"])
    data = json.loads(out)
    assert data["n0"] == 6 and data["covering_number"] == 3 and data["bound"] == 7
    assert data["lattice_hnf"] == [[6]]


def test_process_verify(files, capsys):
    code, out, _ = call(capsys, "process-verify", "--in", files["z6"])
    data = json.loads(out)
    assert code == 0 and data["passed"]
    assert {c["name"] for c in data["checks"]} >= {"orthogonality", "theta_isometry", "extract_roundtrip"}


def test_gm_check(files, capsys):
    code, out, _ = call(capsys, "gm-check", "--in", files["z6"])
    assert code == 0 and json.loads(out)["closed"]
    code, out, _ = call(capsys, "gm-check", "--in", files["bad_support"])
    data = json.loads(out)
    assert not data["closed"] and data["violations"][0] == [1, 2]


def test_circle_check(files, capsys):
    code, out, _ = call(capsys, "circle-check", "--in", files["circle"])
    assert code == 0 and json.loads(out)["passed"]


@pytest.mark.parametrize("name", sorted(DEMOS))
def test_demos_pass(name, capsys):
    code, out, _ = call(capsys, "demo", name)
    assert code == 0
    data = json.loads(out)
    assert data["passed"], [c for c in data["checks"] if not c["passed"]]


def test_z6_sweep_csv(capsys):
    code, out, _ = call(capsys, "demo", "z6", "--format", "csv", "--samples", "600")
    lines = out.strip().splitlines()
    assert code == 0 and len(lines) == 601
    assert lines[0] == "t,x0,x1,x2,x3,x4,x5"
    rows = np.array([[float(x) for x in line.split(",")] for line in lines[1:]])
    assert np.allclose(rows[:, 1:].sum(axis=1), 168)


def test_output_is_deterministic(files, capsys, tmp_path):
    outs = []
    for i in range(2):
        path = tmp_path / f"out{i}.json"
        assert run(["demo", "z6", "--out", str(path)]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_exit_codes(files, capsys):
    assert call(capsys, "nonsense")[0] == 64
    assert call(capsys, "diffract")[0] == 2
    assert call(capsys, "diffract", "--in", files["broken"])[0] == 2
    assert call(capsys, "diffract", "--in", files["short"])[0] == 2
    assert call(capsys, "diffract", "--in", files["dir"] + "/missing.json")[0] == 2
    assert call(capsys, "diffract", "--in", files["z6"], "--cap", "5")[0] == 4
    assert call(capsys, "moments", "--in", files["z6"], "--moments", "99")[0] == 4
    code, out, err = call(capsys, "homometric", "--in", files["z6"])
    assert code == 2 and out == "" and "exactly 2" in err


def test_contract_violation_exits_3(files, capsys, monkeypatch):
    import diffrakt.cli as cli
    from diffrakt.exceptions import NumericalContractError

    def broken(args):
        raise NumericalContractError("residual too large")

    monkeypatch.setitem(cli.COMMANDS, "diffract", broken)
    code, out, err = call(capsys, "diffract", "--in", files["z6"])
    assert code == 3 and out == "" and "residual" in err
