import hashlib
import json
import subprocess
import sys

import pytest

from mldegen.cli import EXIT_DISAGREE, EXIT_OK, EXIT_USAGE, main


def run_json(capsys, *argv):
    code = main(list(argv) + ["--json"])
    out = capsys.readouterr().out
    return code, json.loads(out) if out.strip() else None


def test_disc_json(capsys):
    code, doc = run_json(capsys, "disc", "--k", "3", "--m", "4")
    assert code == EXIT_OK
    assert doc["schema_version"] == 1
    assert doc["result"]["summary"]["B"]["char_poly"] == [1, -5, 6]
    assert doc["result"]["summary"]["A"]["bounded_regions"] == 6
    assert doc["result"]["arrangement"].startswith("2 5 affine")
    man = doc["manifest"]
    assert man["argv"][:1] == ["disc"] and man["seed"] == 0 and "wall_seconds" in man


def test_disc_degenerate_and_file(capsys, tmp_path):
    out = tmp_path / "b.txt"
    code, doc = run_json(capsys, "disc", "--k", "3", "--m", "6", "--degenerate", "12,34,56", "--out", str(out))
    assert code == EXIT_OK and doc["result"]["summary"]["B"]["bounded_regions"] == 41
    assert out.read_text() == doc["result"]["arrangement"]


def test_rerun_is_identical(capsys):
    _, a = run_json(capsys, "disc", "--k", "3", "--m", "5", "--seed", "9")
    _, b = run_json(capsys, "disc", "--k", "3", "--m", "5", "--seed", "9")
    assert a["result"] == b["result"]


def test_input_digest(capsys, tmp_path):
    f = tmp_path / "tri.txt"
    f.write_text("2 3 affine\n1 0 0\n0 1 0\n1 1 1\n")
    code, doc = run_json(capsys, "tropmle", "--model", str(f), "--w", "0,0,1")
    assert code == EXIT_OK
    assert doc["result"]["points"] == [["0", "0", "1"]]
    assert doc["manifest"]["inputs"][str(f)] == hashlib.sha256(f.read_bytes()).hexdigest()


def test_tropmle_chy(capsys):
    code, doc = run_json(capsys, "tropmle", "--chy", "6", "--w", "12,6,9,12,5,1,10,11,3")
    assert code == EXIT_OK and doc["result"]["count"] == 6
    assert ["0", "0", "8", "4", "2", "0", "2", "0", "0"] in doc["result"]["points"]


def test_ffcount(capsys):
    code, doc = run_json(capsys, "ffcount", "--m", "6", "--q", "7", "--brute")
    assert code == EXIT_OK and doc["result"]["formula"] == doc["result"]["oracle"] == 140
    code, doc = run_json(capsys, "ffcount", "--euler", "--m", "8")
    assert doc["result"]["euler"] == 188112


def test_euler_commands(capsys, tmp_path):
    code, doc = run_json(capsys, "euler", "recursion", "--k", "3", "--m", "9")
    assert code == EXIT_OK and doc["result"]["chi"]["9"] == 74570400
    code, doc = run_json(capsys, "euler", "decomp48")
    assert code == EXIT_OK and doc["result"]["status"] == "documented-discrepancy"
    bad = tmp_path / "c.json"
    bad.write_text(json.dumps({"constants": {"6,3": {"chi": -11}, "7,3": {"chi": -568},
                                             "8,3": {"chi": -81040}, "8,4": {"chi": 18768}}}))
    code, doc = run_json(capsys, "euler", "recursion", "--m", "9", "--constants", str(bad))
    assert code == EXIT_DISAGREE and not doc["ok"]


def test_critpts(capsys):
    code, doc = run_json(capsys, "critpts", "--system", "config", "2", "5", "--budget", "200")
    assert code == EXIT_OK
    assert doc["result"]["count"] == 2 and doc["result"]["saturated"]
    assert len(doc["result"]["points"][0][0]) == 2


def test_valuations_with_starts_file(capsys, tmp_path):
    f = tmp_path / "tri.txt"
    f.write_text("2 3 affine\n1 0 0\n0 1 0\n1 1 1\n")
    code, doc = run_json(capsys, "critpts", "--system", "linear", str(f), "--budget", "100")
    pts = doc["result"]["points"]
    starts = tmp_path / "starts.txt"
    starts.write_text("\n".join(";".join(f"{re!r},{im!r}" for re, im in p) for p in pts) + "\n")
    weights = tmp_path / "w.json"
    from mldegen.critical import random_weights
    weights.write_text(json.dumps({"c": [[z.real, z.imag] for z in random_weights(3, 0)], "w": [0, 0, 1]}))
    code, doc = run_json(capsys, "valuations", "--system", "linear", str(f), "--weights", str(weights),
                         "--starts", str(starts), "--tmin", "1e-5")
    assert code == EXIT_OK
    assert doc["result"]["clusters"][0]["q"] == ["0", "0", "1"]
    assert doc["result"]["failed"] == 0


@pytest.mark.parametrize("argv", [
    ["bogus"],
    ["disc", "--k", "3"],
    ["disc", "--k", "4", "--m", "3"],
    ["ffcount", "--m", "6", "--q", "9"],
    ["ffcount", "--m", "6"],
    ["tropmle", "--chy", "6", "--w", "1,2"],
    ["critpts", "--system", "config", "3"],
    ["critpts", "--system", "linear", "/nonexistent/file"],
    ["crosscheck", "nothing"],
    ["disc", "--k", "3", "--m", "4", "--threads", "0"],
])
def test_usage_errors(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        code = main(argv)
        raise SystemExit(code)
    assert exc.value.code == EXIT_USAGE


def test_quiet(capsys):
    assert main(["crosscheck", "theorem51", "--quiet"]) == EXIT_OK
    assert capsys.readouterr().out == ""


@pytest.mark.parametrize("name", ["table1", "theorem51", "lemma34", "decomp48"])
def test_crosscheck_suites(name, capsys):
    code, doc = run_json(capsys, "crosscheck", name)
    assert code == EXIT_OK and doc["result"]["suite"] == name
    assert all(c["ok"] for c in doc["result"]["checks"])


def test_crosscheck_x36(capsys):
    code, doc = run_json(capsys, "crosscheck", "x36-triple")
    assert code == EXIT_OK
    assert [c["got"] for c in doc["result"]["checks"]] == [26, 26, 26, True]


def test_crosscheck_fforacle_small():
    from mldegen.crosscheck import fforacle
    rep = fforacle(ms=(6,), qs=(5, 7))
    assert rep["ok"] and len(rep["checks"]) == 6


def test_console_script():
    out = subprocess.run([sys.executable, "-m", "mldegen.cli", "ffcount", "--euler", "--m", "6", "--json"],
                         capture_output=True, text=True, check=True)
    assert json.loads(out.stdout)["result"]["euler"] == 26
