import json
import subprocess
import sys

import pytest

from tarskikit.cli import run


def invoke(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_certify_freeness_pass(capsys):
    code, out, _ = invoke(capsys, "certify-freeness", "--depth", "6")
    doc = json.loads(out)
    assert code == 0
    assert doc["schema"] == "tarskikit/1"
    assert doc["report"]["pass"] and doc["report"]["words_checked"] == 2 * 3**6 - 2


def test_usage_errors_exit_2(capsys):
    for argv in (["certify-freeness", "--depth", "-1"], ["nonsense"], [], ["double-orbit", "--depth", "2", "--base", "1,1,1,0"]):
        code, _, err = invoke(capsys, *argv)
        assert code == 2, argv
        assert json.loads(err)["error"] == "usage"


def test_resource_cap_exit_2(capsys):
    code, _, err = invoke(capsys, "--max-words", "100", "certify-freeness", "--depth", "8")
    assert code == 2 and json.loads(err)["error"] == "resource"


def test_double_group(capsys):
    code, out, _ = invoke(capsys, "double-group", "--depth", "4")
    assert code == 0 and json.loads(out)["report"]["pass"]
    code, _, err = invoke(capsys, "double-group", "--depth", "1")
    assert code == 2 and json.loads(err)["error"] == "precondition"


def test_double_orbit_stabilized_base_exit_1(capsys):
    code, _, err = invoke(capsys, "double-orbit", "--depth", "2", "--base", "0,2,1,1")
    assert code == 1
    doc = json.loads(err)
    assert doc["error"] == "verification" and doc["witness"]


def test_double_orbit_ply_stdout(capsys):
    code, out, err = invoke(capsys, "double-orbit", "--depth", "7", "--format", "ply")
    assert code == 0
    assert "element vertex 4373" in out
    assert len(out.partition("end_header\n")[2].splitlines()) == 4373
    assert json.loads(err)["report"]["counts"]["points"] == 4373


def test_double_orbit_to_file(capsys, tmp_path):
    path = tmp_path / "cloud.csv"
    code, out, _ = invoke(capsys, "double-orbit", "--depth", "2", "--out", str(path))
    assert code == 0
    assert json.loads(out)["export"]["format"] == "csv"
    assert len(path.read_text().splitlines()) == 1 + 17


def test_bsb_demo_deterministic(capsys):
    first = invoke(capsys, "bsb-demo", "--size", "20", "--seed", "5")
    second = invoke(capsys, "bsb-demo", "--size", "20", "--seed", "5")
    assert first == second and first[0] == 0
    doc = json.loads(first[1])
    p = doc["pieces"]
    assert p["combined"] <= p["g"] + p["f"]


def test_absorb_circle(capsys, tmp_path):
    pts = tmp_path / "pts.json"
    pts.write_text(json.dumps([["1", "0"], ["3/5", "4/5"], ["0", "1"]]))
    code, out, _ = invoke(capsys, "absorb-circle", "--points", str(pts), "--horizon", "500")
    doc = json.loads(out)
    assert code == 0 and doc["report"]["shift_identity"]
    assert doc["rotation"] != ["3/5", "4/5"]
    code, out, _ = invoke(capsys, "absorb-circle", "--points", str(pts), "--horizon", "5", "--pool", "1")
    assert code == 1 and json.loads(out)["report"]["failures"][0]["n"] == 1
    bad = tmp_path / "bad.json"
    bad.write_text('[["1", "1"]]')
    code, _, _ = invoke(capsys, "absorb-circle", "--points", str(bad), "--horizon", "5")
    assert code == 2


def test_absorb_ball(capsys):
    code, out, _ = invoke(capsys, "absorb-ball", "--horizon", "20")
    doc = json.loads(out)
    assert code == 0 and doc["absorber"]["size"] == 21 and doc["report"]["pass"]


def test_plan_strong_form(capsys):
    code, out, _ = invoke(capsys, "plan-strong-form", "--rq", "1", "--RQ", "1", "--rt", "2", "--RT", "2")
    doc = json.loads(out)
    assert code == 0 and doc["report"]["pass"]
    assert len(str(doc["plan"]["bound"])) == 735
    code, _, _ = invoke(capsys, "plan-strong-form", "--rq", "0", "--RQ", "1", "--rt", "1", "--RT", "1")
    assert code == 2


@pytest.mark.parametrize("argv", [
    ["plan-strong-form", "--rq", "1", "--RQ", "1", "--rt", "2", "--RT", "2"],
    ["double-orbit", "--depth", "3", "--format", "csv"],
])
def test_byte_identical_subprocess_runs(argv):
    cmd = [sys.executable, "-m", "tarskikit.cli", *argv]
    a = subprocess.run(cmd, capture_output=True, check=True)
    b = subprocess.run(cmd, capture_output=True, check=True)
    assert a.stdout == b.stdout and a.stdout
