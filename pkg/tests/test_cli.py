import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from pmoreau import cli, verify
from pmoreau.envelope import ProxSolution
from pmoreau.errors import SolverFailure
from pmoreau.flow import FlowTrajectory
from pmoreau.hj import SpaceTimeField
from pmoreau.mosco import MoscoReport
from pmoreau.schemas import SchemaError, validate

PROX = {"space": {"dim": 1}, "fn": {"fn": "one_norm"}, "p": 2.0, "eps": 1.0, "u": [3.0]}


def write(tmp_path, doc, name="spec.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def run(tmp_path, command, doc, fmt="json", seed=42, name="spec.json"):
    args = [command, "--format", fmt, "--seed", str(seed)]
    if doc is not None:
        args += ["--spec", write(tmp_path, doc, name)]
    out = tmp_path / f"out-{name}.{fmt}"
    code = cli.main(args + ["--out", str(out)])
    return code, out.read_text() if out.exists() else None


def test_prox_json(tmp_path):
    code, text = run(tmp_path, "prox", PROX)
    assert code == 0
    doc = json.loads(text)
    assert doc["minimizer"] == [2.0] and doc["envelope_value"] == 2.5
    sol = ProxSolution.from_json(doc)
    assert sol.to_json() == doc


def test_prox_csv(tmp_path):
    code, text = run(tmp_path, "prox", PROX, "csv")
    rows = list(csv.DictReader(io.StringIO(text)))
    assert code == 0 and float(rows[0]["minimizer0"]) == 2.0 and float(rows[0]["envelope_value"]) == 2.5


def test_sweep_eps_csv(tmp_path):
    doc = dict(PROX, eps=[2.0, 1.0, 0.5])
    code, text = run(tmp_path, "sweep-eps", doc, "csv")
    rows = list(csv.DictReader(io.StringIO(text)))
    assert code == 0
    assert [float(r["f_eps"]) for r in rows] == pytest.approx([2.0, 2.5, 2.75], abs=1e-12)
    for r in rows:
        a, fd = float(r["deps_analytic"]), float(r["deps_central_difference"])
        assert abs(a - fd) <= 1e-3 * abs(a)


def test_conjugate(tmp_path):
    doc = {"space": {"dim": 1}, "fn": {"fn": "quadratic", "A": [[1.0]]}, "p": 2.0, "eps": 1.0,
           "xi": [[1.0], [0.0]], "grid": {"lo": [-20], "hi": [20], "points_per_axis": 4001}}
    code, text = run(tmp_path, "conjugate", doc)
    rows = json.loads(text)["rows"]
    assert code == 0 and rows[0]["analytic"] == 1.0 and abs(rows[0]["numeric"] - 1.0) <= 1e-4


def test_hj_and_flow_roundtrip(tmp_path):
    doc = {"fn": "one_norm", "p": 2.0, "grid": {"lo": [-2], "hi": [2], "points_per_axis": 9}, "t": [0.5, 1.0, 1.5]}
    code, text = run(tmp_path, "hj", doc)
    out = json.loads(text)
    field = SpaceTimeField.from_json(out["field"])
    assert code == 0 and field.values.shape == (3, 9) and out["residual"]["interior_count"] >= 0
    doc = {"space": {"dim": 1}, "fn": {"fn": "quadratic", "A": [[1.0]]}, "p": 2.0, "tau": 0.1, "steps": 10,
           "u0": [1.0], "exponential": {"t": 1.0, "n": [4, 16]}}
    code, text = run(tmp_path, "flow", doc, name="flow.json")
    out = json.loads(text)
    traj = FlowTrajectory.from_json(out["trajectory"])
    assert code == 0 and traj.to_json() == out["trajectory"]
    assert traj.states[-1][0] == pytest.approx(1.1**-10, rel=1e-12)
    assert out["exponential_formula"][1]["error"] < out["exponential_formula"][0]["error"]


def test_mosco_roundtrip(tmp_path):
    code, text = run(tmp_path, "mosco", {"fixture": "indicator_point", "n_max": 64})
    reports = [MoscoReport.from_json(r) for r in json.loads(text)["reports"]]
    assert code == 0 and [r.check for r in reports] == ["liminf", "recovery", "envelope_preserves",
                                                        "diagonal_convergence"]
    assert all(r.ok for r in reports)


def test_schema_error_has_field_path(tmp_path, capsys):
    bad = dict(PROX, fn={"fn": "quadratic", "A": [["x"]]})
    code, _ = run(tmp_path, "prox", bad)
    err = json.loads(capsys.readouterr().err)
    assert code == 2 and err["path"] == "$.fn.A[0][0]"
    code, _ = run(tmp_path, "prox", {k: v for k, v in PROX.items() if k != "u"})
    assert code == 2


@pytest.mark.parametrize("doc", [
    dict(PROX, p=0.5),
    dict(PROX, u=[1.0, 2.0]),
    dict(PROX, eps=1e-12),
    {"fixture": "spiral"},
])
def test_invalid_values_exit_two(tmp_path, doc):
    command = "mosco" if "fixture" in doc else "prox"
    assert run(tmp_path, command, doc)[0] == 2


def test_unreadable_spec(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    assert cli.main(["prox", "--spec", str(path)]) == 2
    assert cli.main(["prox", "--spec", str(tmp_path / "missing.json")]) == 2
    assert cli.main(["prox"]) == 2


def test_solver_failure_exits_three(tmp_path, monkeypatch, capsys):
    def failing(*args, **kw):
        raise SolverFailure("no certificate", best=np.zeros(1), gap=1.0)

    monkeypatch.setattr(cli.env, "prox", failing)
    code, _ = run(tmp_path, "prox", PROX)
    err = json.loads(capsys.readouterr().err)
    assert code == 3 and err["subtask"] == "prox"


def test_verify_violation_exits_one(tmp_path, monkeypatch, capsys):
    def broken(seed):
        r = verify.CheckResult("broken")
        r.expect(False, reason="planted")
        return r

    monkeypatch.setitem(verify.CHECKS, "broken", broken)
    code, text = run(tmp_path, "verify", {"checks": ["duality_map", "broken"]})
    err = json.loads(capsys.readouterr().err)
    assert code == 1 and err["failed"][0]["name"] == "broken"
    doc = json.loads(text)
    assert doc["ok"] is False and [i["ok"] for i in doc["invariants"]] == [True, False]


def test_verify_subset_is_deterministic(tmp_path):
    doc = {"checks": ["duality_map", "catalog_convexity", "minimal_section"]}
    a = run(tmp_path, "verify", doc, name="a.json")
    b = run(tmp_path, "verify", doc, name="b.json")
    assert a[0] == b[0] == 0 and a[1] == b[1]
    c = run(tmp_path, "verify", doc, seed=7, name="c.json")
    assert c[0] == 0 and json.loads(c[1])["seed"] == 7
    code, text = run(tmp_path, "verify", doc, "csv", name="d.json")
    assert text.splitlines()[0] == "invariant,criterion,checked,passed,status"


def test_unknown_check(tmp_path):
    assert run(tmp_path, "verify", {"checks": ["nope"]})[0] == 2


def test_outputs_are_byte_identical(tmp_path):
    doc = dict(PROX, eps=[2.0, 1.0, 0.5])
    first = run(tmp_path, "sweep-eps", doc, "csv", name="x.json")[1]
    second = run(tmp_path, "sweep-eps", doc, "csv", name="y.json")[1]
    assert first == second


def test_stdout_and_entry_point(tmp_path):
    spec = write(tmp_path, PROX)
    proc = subprocess.run([sys.executable, "-m", "pmoreau.cli", "prox", "--spec", spec],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and json.loads(proc.stdout)["envelope_value"] == 2.5


def test_schemas_accept_documented_specs():
    validate("prox", PROX)
    validate("prox", dict(PROX, space={"dim": 2, "norm": {"q": 3}}, u=[1, 2]))
    validate("prox", dict(PROX, fn={"fn": "translate", "shift": [1], "base": {"fn": "power_of_norm", "r": 2.5}}))
    with pytest.raises(SchemaError) as info:
        validate("prox", dict(PROX, space={"dim": 1, "norm": {"weights": [-1]}}))
    assert info.value.path.startswith("$.space")
