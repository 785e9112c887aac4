import csv
import io
import json
import subprocess
import sys

import pytest

from nervess import cli, hh
from nervess.cli import JobConfig, UsageError, main, validate


def run(argv):
    out = io.StringIO()
    code = main(argv, out=out)
    return code, out.getvalue()


def run_json(argv):
    code, text = run(argv + ["--format", "json"])
    return code, json.loads(text)


# freeloop-rp

def test_freeloop_examples():
    code, rep = run_json(["freeloop-rp", "--n", "2", "--p", "3", "--max-degree", "6"])
    assert code == 0 and rep["verdict"] == "PASS"
    assert rep["result"]["series"] == [2, 0, 1, 1, 1, 1, 1]
    code, rep = run_json(["freeloop-rp", "--n", "3", "--p", "5", "--max-degree", "7"])
    assert code == 0
    assert rep["result"]["series"] == [2, 0, 2, 2, 2, 2, 2, 2]


def test_freeloop_char2_is_usage_error(capsys):
    code, _ = run(["freeloop-rp", "--n", "2", "--p", "2"])
    assert code == 2
    assert "odd prime" in capsys.readouterr().err


def test_freeloop_rational_field_names():
    for p in ("0", "Q"):
        code, rep = run_json(["freeloop-rp", "--n", "4", "--p", p, "--max-degree", "7"])
        assert code == 0
        assert rep["result"]["series"] == [2, 0, 0, 0, 0, 0, 1, 1]


def test_freeloop_mismatch_exits_1(monkeypatch):
    monkeypatch.setattr(hh, "closed_form_freeloop_rp", lambda n, F, D: [0] * (D + 1))
    code, text = run(["freeloop-rp", "--n", "2", "--p", "3", "--max-degree", "4"])
    assert code == 1
    assert text.strip().endswith("FAIL")


def test_freeloop_bar_check_text():
    code, text = run(["freeloop-rp", "--n", "2", "--p", "3", "--max-degree", "4", "--bar-check"])
    assert code == 0
    assert "action routes agree = True" in text
    assert text.strip().endswith("PASS")


def test_max_degree_must_be_positive():
    code, _ = run(["freeloop-rp", "--n", "2", "--p", "3", "--max-degree", "0"])
    assert code == 2
    with pytest.raises(UsageError):
        JobConfig(field=3, max_degree=0)


def test_bad_field_is_usage_error():
    code, _ = run(["freeloop-rp", "--n", "2", "--p", "4"])
    assert code == 2


# ss

def _ss_totals(argv):
    code, rep = run_json(["ss"] + argv)
    assert code == 0, rep
    return rep["result"]["e_infinity_totals"]


def test_ss_examples():
    assert _ss_totals(["--group", "Z1", "--space", "point", "--top", "3"])[0] == 1
    assert _ss_totals(["--group", "Z2", "--space", "sphere2", "--p", "3"])[:3] == [1, 0, 0]
    assert _ss_totals(["--group", "Z2", "--space", "sphere1", "--p", "2"])[:4] == [1, 1, 0, 0]


def test_ss_point_single_entry():
    code, rep = run_json(["ss", "--group", "Z1", "--space", "point", "--top", "3"])
    e2 = [p for p in rep["result"]["pages"] if p["r"] == 2][0]
    # entries on the truncation edge come out flagged as uncertified
    nonzero = [(e["p"], e["q"], e["dim"]) for e in e2["entries"] if e["dim"] and e["certified"]]
    assert nonzero == [(0, 0, 1)]


def test_ss_json_input(tmp_path):
    job = {"schema_version": 1, "kind": "groupoid", "group": "Z2", "space": "sphere1",
           "field": 2, "pages": 3}
    path = tmp_path / "job.json"
    path.write_text(json.dumps(job))
    assert _ss_totals(["--input", str(path)])[:4] == [1, 1, 0, 0]


def test_ss_bisimplicial_input(tmp_path):
    # the constant bisimplicial set on a point, written out by hand
    cells = []
    for p in range(3):
        for q in range(3):
            c = {"p": p, "q": q, "size": 1}
            if p:
                c["hfaces"] = [[0]] * (p + 1)
            if q:
                c["vfaces"] = [[0]] * (q + 1)
            c["hdegs"] = [[0]] * (p + 1)
            c["vdegs"] = [[0]] * (q + 1)
            cells.append(c)
    job = {"schema_version": 1, "kind": "bisimplicial", "Nh": 2, "Nv": 2, "cells": cells,
           "field": 3, "pages": 2}
    path = tmp_path / "job.json"
    path.write_text(json.dumps(job))
    totals = _ss_totals(["--input", str(path)])
    assert totals[0] == 1
    assert not any(totals[1:2])


def test_ss_schema_errors(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"schema_version": 1, "kind": "groupoid",\n "group": "Z2" "space": 1}')
    code, _ = run(["ss", "--input", str(bad)])
    assert code == 2
    assert "line 2" in capsys.readouterr().err

    unknown = tmp_path / "unknown.json"
    unknown.write_text(json.dumps({"schema_version": 1, "kind": "groupoid", "group": "Z2",
                                   "space": "sphere1", "colour": "red"}))
    code, _ = run(["ss", "--input", str(unknown)])
    assert code == 2
    assert "colour" in capsys.readouterr().err

    wrong = tmp_path / "wrong.json"
    wrong.write_text(json.dumps({"schema_version": 1, "kind": "groupoid", "group": "Z2",
                                 "space": "sphere1", "pages": 0}))
    code, _ = run(["ss", "--input", str(wrong)])
    assert code == 2
    assert "pages" in capsys.readouterr().err

    missing = tmp_path / "missing.json"
    missing.write_text(json.dumps({"schema_version": 1, "kind": "bisimplicial"}))
    code, _ = run(["ss", "--input", str(missing)])
    assert code == 2


def test_ss_unknown_space_and_missing_args():
    assert run(["ss", "--group", "Z2", "--space", "torus"])[0] == 2
    assert run(["ss", "--group", "Z3", "--space", "sphere1"])[0] == 2
    assert run(["ss"])[0] == 2


def test_ss_csv_is_poincare_series():
    code, text = run(["ss", "--group", "Z2", "--space", "sphere2", "--p", "2", "--format", "csv"])
    assert code == 0
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["degree", "e_inf_total"]
    assert [int(r[1]) for r in rows[1:4]] == [1, 1, 1]


# cotor family

def test_lbg_example():
    code, rep = run_json(["lbg", "--group", "Z2", "--p", "2", "--max-degree", "5"])
    assert code == 0
    code, text = run(["lbg", "--group", "Z2", "--p", "2", "--max-degree", "5", "--format", "csv"])
    rows = list(csv.reader(io.StringIO(text)))
    assert [int(r[1]) for r in rows[1:]] == [2] * 6


def test_cotor_example():
    code, rep = run_json(["cotor", "--group", "S3", "--rep", "adjoint", "--p", "0"])
    assert code == 0 and rep["verdict"] == "PASS"
    deg0 = [r for r in rep["result"]["cotor"] if r["p"] == 0]
    assert sum(r["dim"] for r in deg0) == 3
    assert rep["result"]["group_cohomology_check"]["pass"]


def test_cotor_json_representation(tmp_path):
    obj = {"schema_version": 1, "group": "Z2", "field": 3,
           "degrees": [{"degree": 0, "matrices": [[[1]], [[-1]]]}]}
    path = tmp_path / "sign.json"
    path.write_text(json.dumps(obj))
    code, rep = run_json(["cotor", "--input", str(path), "--max-degree", "3"])
    assert code == 0
    assert all(r["dim"] == 0 for r in rep["result"]["cotor"])


def test_cotor_input_errors(tmp_path):
    obj = {"schema_version": 1, "group": "Z2", "field": 3,
           "degrees": [{"degree": 0, "matrices": [[[1]], [[1, 0]]]}]}
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(obj))
    assert run(["cotor", "--input", str(path)])[0] == 2
    both = tmp_path / "both.json"
    both.write_text(json.dumps({"schema_version": 1, "group": "Z2", "builtin": "sign",
                                "degrees": []}))
    assert run(["cotor", "--input", str(both)])[0] == 2
    assert run(["cotor", "--group", "Q8x"])[0] == 2
    assert run(["cotor", "--group", "Z2", "--rep", "weird"])[0] == 2
    assert run(["cotor"])[0] == 2


def test_group_cohomology_products():
    code, rep = run_json(["group-cohomology", "--group", "Z2", "--p", "2", "--max-degree", "4",
                          "--products"])
    assert code == 0 and rep["verdict"] == "INFO"
    assert rep["result"]["products"]


def test_inertia_example():
    code, rep = run_json(["inertia", "--group", "Z2", "--space", "sphere2", "--p", "3"])
    assert code == 0
    comps = rep["result"]["components"]
    # the antipode has no fixed points: only the identity component survives
    assert comps["e"] == [1, 0, 1, 0, 0]
    assert not any(v for g, d in comps.items() if g != "e" for v in d)
    rows = rep["result"]["e2"]
    assert {(r["p"], r["q"]): r["dim"] for r in rows}.get((0, 0)) == 1


# tor, borel

def test_tor_two_routes():
    code, rep = run_json(["tor", "--n", "2", "--twist", "-1", "--p", "3", "--max-degree", "7"])
    assert code == 0
    assert rep["result"]["small_resolution"] == rep["result"]["bar"] == [1, 0, 1, 1, 1, 1, 1, 1]
    assert rep["result"]["action"]["agree"]
    assert [r["dim"] for r in rep["result"]["report"]] == [1, 0, 1, 1, 1, 1, 1, 1]
    assert run(["tor", "--n", "2", "--p", "2"])[0] == 2
    assert run(["tor", "--n", "1"])[0] == 2


def test_borel_commands():
    code, rep = run_json(["borel", "--group", "Z2", "--space", "sphere2", "--p", "3"])
    assert code == 0
    assert rep["result"]["dims"][:3] == [1, 0, 0]
    assert run(["borel", "--group", "Z2", "--space", "sphere2", "--p", "2"])[0] == 2
    code, rep = run_json(["borel-l0", "--n", "3", "--max-degree", "4"])
    assert code == 0
    assert rep["result"]["column0"] == [1, 0, 1, 1, 1]


def test_check_random_command():
    code, rep = run_json(["check-random", "--seed", "3", "--count", "3", "--p", "3"])
    assert code == 0
    assert rep["result"]["failures"] == 0


# reports

@pytest.mark.parametrize("argv", [
    ["freeloop-rp", "--n", "2", "--p", "3", "--max-degree", "4"],
    ["ss", "--group", "Z2", "--space", "sphere1", "--p", "2"],
    ["lbg", "--group", "Z3", "--p", "3", "--max-degree", "3"],
    ["inertia", "--group", "Z2", "--space", "sphere1", "--p", "3"],
])
def test_reports_validate_and_are_deterministic(argv):
    code, a = run(argv + ["--format", "json"])
    code2, b = run(argv + ["--format", "json"])
    assert code == code2 == 0
    assert a == b
    rep = json.loads(a)
    validate(rep, "report.json")
    assert rep["schema_version"] == 1
    assert rep["args"]["command"] == argv[0]


def test_parallel_output_is_identical(monkeypatch):
    argv = ["ss", "--group", "Z2", "--space", "sphere2", "--p", "3", "--format", "json"]
    monkeypatch.setenv("NERVESS_THREADS", "1")
    _, a = run(argv)
    monkeypatch.setenv("NERVESS_THREADS", "4")
    _, b = run(argv)
    a, b = json.loads(a), json.loads(b)
    assert a["result"] == b["result"]


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "nervess.cli", "freeloop-rp", "--n", "2",
                           "--p", "3", "--max-degree", "3", "--format", "csv"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    rows = list(csv.reader(io.StringIO(proc.stdout)))
    assert rows[0] == ["degree", "dim", "closed_form"]
    assert rows[1] == ["0", "2", "2"]
    proc = subprocess.run([sys.executable, "-m", "nervess.cli", "freeloop-rp", "--n", "2",
                           "--p", "2"], capture_output=True, text=True)
    assert proc.returncode == 2


def test_argparse_errors_exit_2():
    with pytest.raises(SystemExit) as exc:
        main(["no-such-command"])
    assert exc.value.code == 2
    assert cli.SCHEMA_VERSION == 1
