import io
import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from progroups.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, run

ST = str(Path(__file__).resolve().parent / "data" / "scholz-taussky.pres")


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    doc = json.loads(out.getvalue()) if out.getvalue() else None
    return code, doc, err.getvalue()


def numbers_are_strings(node):
    if isinstance(node, dict):
        return all(numbers_are_strings(v) for v in node.values())
    if isinstance(node, list):
        return all(numbers_are_strings(v) for v in node)
    return not isinstance(node, (int, float)) or isinstance(node, bool)


def test_gs_false_exits_one():
    code, doc, _ = call("gs", "--d=5", "--r=5")
    assert code == EXIT_FAIL
    assert doc["payload"]["verdict"] is False
    code, doc, _ = call("gs", "--d=3", "--r=3")
    assert code == EXIT_OK and "caveat" in doc["payload"]


def test_report_sl2():
    code, doc, _ = call("report", "sl2zp:p=3,k=2")
    assert code == EXIT_OK
    p = doc["payload"]
    assert p["order"] == "27" and p["exponent"] == "3"
    assert p["abelian_invariants"] == ["3", "3", "3"]
    assert doc["config"]["table_cap"] == "8192"
    assert numbers_are_strings(doc)


def test_report_nonabelian_tree():
    code, doc, _ = call("report", "tree:p=2,d=3")
    assert code == EXIT_OK
    assert doc["payload"]["order"] == "128"
    assert doc["payload"]["derived_length"] == "3"


def test_report_nottingham_echoes_field():
    code, doc, _ = call("report", "nottingham:q=4,m=4")
    assert code == EXIT_OK
    assert doc["payload"]["order"] == "64"
    assert "field" in doc["config"]


def test_tc_scholz_taussky():
    code, doc, _ = call("tc", ST)
    assert code == EXIT_OK and doc["payload"]["index"] == "243"
    code, doc, _ = call("tc", ST, "--subgroup=x")
    assert doc["payload"]["index"] == "27"


def test_zdepth_relators():
    code, doc, _ = call("zdepth", ST, "--p=3")
    assert code == EXIT_OK
    assert [r["depth"] for r in doc["payload"]["relators"]] == ["3", "3"]


def test_selfsim_verdicts():
    assert call("selfsim", "sl2zp:p=3,k=3")[0] == EXIT_OK
    assert call("selfsim", "sl2lambda:p=3,k=3", "--phi=tmap")[0] == EXIT_OK
    code, doc, _ = call("selfsim", "abelian:3x9", "--filtration=power")
    assert code == EXIT_FAIL


def test_selfsim_from_file(tmp_path):
    f = tmp_path / "phi.txt"
    # C9 with power filtration: level-2 factor generated by 1, sent to 3
    f.write_text("2 0001 0003\n")
    code, doc, err = call("selfsim", "cyclic:n=9", "--filtration=power", f"--phi={f}")
    assert code == EXIT_OK, err


def test_propagation_command():
    code, doc, _ = call("theorem1", "cyclic:n=27", "--sigma=inv", "--filtration=power")
    assert code == EXIT_OK
    assert doc["payload"]["outcome"] == "fixed-point-free"
    # conjugation by [[1, 3], [0, 1]] fixes itself, so the top factor has a fixed point
    code, doc, _ = call("theorem1", "sl2zp:p=3,k=3", "--sigma=conj:01030001")
    assert code == EXIT_OK
    assert doc["payload"]["outcome"] == "fixed-point-in-abelianized-top"
    assert call("theorem1", "sl2zp:p=3,k=3", "--sigma=conj:ffff")[0] == EXIT_USAGE


def test_propagation_with_images_file(tmp_path):
    f = tmp_path / "sigma.txt"
    f.write_text("0002\n")
    code, doc, err = call("theorem1", "cyclic:n=27", f"--sigma=images:{f}", "--filtration=power")
    assert code == EXIT_OK, err
    assert doc["payload"]["outcome"] == "fixed-point-free"


def test_fpf_and_transfer():
    code, doc, _ = call("fpf", "abelian:3x3", "--order=2")
    assert code == EXIT_OK
    code, doc, _ = call("fpf", "tree:p=2,d=2", "--order=2")
    assert code == EXIT_FAIL
    code, doc, _ = call("transfer", "cyclic:n=9")
    assert code == EXIT_OK and doc["payload"]["subgroups"] == "2"
    code, doc, _ = call("transfer", "abelian:3x3")
    assert code == EXIT_FAIL
    code, doc, _ = call("transfer", f"presentation:{ST}", "--metabelian")
    assert code == EXIT_OK


def test_prop4():
    assert call("prop4", "cyclic:n=3", "--sigma=inv")[0] == EXIT_OK
    assert call("prop4", f"presentation:{ST}", "--sigma=search")[0] == EXIT_OK


@pytest.mark.parametrize("argv", [
    [],
    ["report"],
    ["report", "bogus:p=3"],
    ["report", "sl2zp:p=2,k=2"],
    ["report", "sl2zp:p=3"],
    ["theorem1", "tree:p=2,d=2", "--sigma=inv"],
    ["tc", "/nonexistent/file.pres"],
    ["gs", "--d=-1", "--r=2"],
    ["fpf", "cyclic:n=9"],
])
def test_usage_errors_exit_two(argv):
    out, err = io.StringIO(), io.StringIO()
    assert run(argv, out, err) == EXIT_USAGE
    assert out.getvalue() == ""


def test_table_cap_env_is_echoed(monkeypatch):
    monkeypatch.setenv("PROGROUPS_TABLE_CAP", "64")
    code, doc, _ = call("report", "cyclic:n=27")
    assert doc["config"]["table_cap"] == "64"
    assert doc["payload"]["mode"] == "table"
    code, doc, _ = call("report", "cyclic:n=81")
    assert doc["payload"]["mode"] == "oracle"
    assert doc["payload"]["order"] == "81"


def test_repeated_runs_byte_identical():
    argv = ["--seed=7", "report", "sl2zp:p=3,k=3"]
    a, b = io.StringIO(), io.StringIO()
    run(argv, a, io.StringIO())
    run(argv, b, io.StringIO())
    assert a.getvalue() == b.getvalue()
    assert json.loads(a.getvalue())["config"]["seed"] == "7"


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "progroups", "gs", "--d=2", "--r=2"],
                          capture_output=True, text=True, env={**os.environ})
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["payload"]["verdict"] is True
