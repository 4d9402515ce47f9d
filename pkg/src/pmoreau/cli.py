"""Command line: ``pmoreau COMMAND --spec FILE [--out FILE] [--format csv|json] [--seed N]``.

Exit codes: 0 success, 1 violations found by ``verify``, 2 invalid spec,
3 solver failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import envelope as env
from .errors import PMoreauError, SolverFailure
from .flow import exponential_formula_check, minimizing_movement
from .functions import from_spec
from .hj import hj_residual, lax_oleinik
from .mosco import FIXTURES, diagonal_convergence, envelope_preserves, fixture, liminf_check, recovery_check
from .oracle import GridSpec
from .schemas import SchemaError, validate
from .spaces import PowerParams, SpaceSpec
from .verify import CHECKS, run_suite, summary_json

COMMANDS = ("prox", "sweep-eps", "conjugate", "mosco", "hj", "flow", "verify")

EXIT_OK, EXIT_VIOLATION, EXIT_SCHEMA, EXIT_SOLVER = 0, 1, 2, 3


@dataclass(frozen=True)
class RunConfig:
    command: str
    spec_path: Optional[str]
    out_path: Optional[str]
    format: str = "json"
    seed: int = 42


class _SubtaskFailure(Exception):
    def __init__(self, subtask, exc):
        super().__init__(f"{subtask}: {exc}")
        self.subtask = subtask


def _g(x) -> str:
    return format(float(x), ".17g")


def _dumps(doc) -> str:
    return json.dumps(doc, indent=2) + "\n"


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_g(v) if isinstance(v, (float, np.floating)) else v for v in r])
    return buf.getvalue()


def _space(doc, default_dim=None):
    if "space" in doc:
        return SpaceSpec.from_json(doc["space"])
    return SpaceSpec.euclidean(default_dim)


def _task(name, fn, *args, **kw):
    try:
        return fn(*args, **kw)
    except SolverFailure as exc:
        raise _SubtaskFailure(name, exc) from exc


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------


def _cmd_prox(doc, fmt, seed):
    space = _space(doc)
    f = from_spec(doc["fn"], space)
    params = PowerParams(doc["p"], doc["eps"])
    sol = _task("prox", env.prox, f, space, params, doc["u"])
    if fmt == "json":
        return _dumps(sol.to_json()), EXIT_OK
    d = space.dim
    header = [f"minimizer{i}" for i in range(d)] + ["envelope_value"] + \
             [f"derivative{i}" for i in range(d)] + ["optimality_gap", "solver", "iterations"]
    row = list(map(float, sol.minimizer)) + [float(sol.envelope_value)] + list(map(float, sol.derivative)) + \
        [float(sol.optimality_gap), sol.solver, sol.iterations]
    return _csv(header, [row]), EXIT_OK


def _cmd_sweep_eps(doc, fmt, seed):
    space = _space(doc)
    f = from_spec(doc["fn"], space)
    p, u, eps = doc["p"], np.asarray(doc["u"], dtype=float), list(doc["eps"])
    mono = _task("eps_monotonicity_profile", env.eps_monotonicity_profile, f, space, p, u, eps)
    conv = _task("convergence_profile", env.convergence_profile, f, space, p, u, eps)
    rows = []
    for (e, val, dist), (_, gap, _, bound) in zip(mono.rows, conv.rows):
        d = _task("eps_derivative", env.eps_derivative, f, space, p, u, e)
        h = 1e-4 * e
        fd = (env.envelope_value(f, space, PowerParams(p, e + h), u)
              - env.envelope_value(f, space, PowerParams(p, e - h), u)) / (2 * h)
        rows.append({"eps": e, "f_eps": val, "distance": dist, "gap_to_f": gap, "young_bound": bound,
                     "deps_analytic": d, "deps_central_difference": fd})
    violations = mono.violations + conv.violations
    if fmt == "json":
        return _dumps({"rows": rows, "in_domain": conv.in_domain, "violations": violations}), EXIT_OK
    header = list(rows[0])
    return _csv(header, [[r[k] for k in header] for r in rows]), EXIT_OK


def _cmd_conjugate(doc, fmt, seed):
    space = _space(doc)
    f = from_spec(doc["fn"], space)
    params = PowerParams(doc["p"], doc["eps"])
    grid = GridSpec.from_json(doc["grid"])
    rows = []
    for xi in doc["xi"]:
        a, n = _task("envelope_conjugate", env.envelope_conjugate, f, params, xi, grid, space)
        rows.append({"xi": [float(x) for x in xi], "analytic": a, "numeric": n})
    if fmt == "json":
        return _dumps({"rows": rows, "grid": grid.to_json()}), EXIT_OK
    d = space.dim
    header = [f"xi{i}" for i in range(d)] + ["analytic", "numeric"]
    return _csv(header, [r["xi"] + [r["analytic"], r["numeric"]] for r in rows]), EXIT_OK


def _cmd_mosco(doc, fmt, seed):
    name = doc["fixture"]
    if name not in FIXTURES:
        raise SchemaError("$.fixture", f"unknown fixture {name!r}; known: {sorted(FIXTURES)}")
    seq = fixture(name)
    n_max = doc.get("n_max", 64)
    params = PowerParams(doc.get("p", 2.0), doc.get("eps", 1.0))
    space = SpaceSpec.euclidean(seq.grid.dim)
    reports = [
        _task("liminf_check", liminf_check, seq, seq.grid, n_max),
        _task("recovery_check", recovery_check, seq, seq.grid, n_max),
        _task("envelope_preserves", envelope_preserves, seq, space, params, seq.grid, n_max),
        _task("diagonal_convergence", diagonal_convergence, seq, space, params.p, n_max=n_max),
    ]
    if fmt == "json":
        return _dumps({"fixture": name, "reports": [r.to_json() for r in reports]}), EXIT_OK
    parts = []
    for r in reports:
        lines = r.to_csv().splitlines()
        parts.append("check," + lines[0])
        parts.extend(f"{r.check},{line}" for line in lines[1:])
    return "\n".join(parts) + "\n", EXIT_OK


def _cmd_hj(doc, fmt, seed):
    grid = GridSpec.from_json(doc["grid"])
    space = _space(doc, grid.dim)
    f = from_spec(doc["fn"], space)
    field = _task("lax_oleinik", lax_oleinik, f, doc["p"], grid, doc["t"], space)
    summary = None
    if len(field.t_values) >= 3 and grid.points_per_axis >= 3:
        r, count, kinks = hj_residual(field, space, doc["p"])
        summary = {"max_residual": r, "interior_count": count, "kink_count": kinks}
    if fmt == "json":
        return _dumps({"field": field.to_json(), "residual": summary}), EXIT_OK
    if summary is not None:
        print(json.dumps({"residual": summary}), file=sys.stderr)
    return field.to_csv(), EXIT_OK


def _cmd_flow(doc, fmt, seed):
    space = _space(doc)
    E = from_spec(doc["fn"], space)
    traj = _task("minimizing_movement", minimizing_movement, E, space, doc["p"], doc["tau"], doc["steps"],
                 doc["u0"])
    table = None
    if "exponential" in doc:
        ex = doc["exponential"]
        table = _task("exponential_formula_check", exponential_formula_check, E, space, ex["t"], ex["n"],
                      doc["u0"])
    if fmt == "json":
        out = {"trajectory": traj.to_json()}
        if table is not None:
            out["exponential_formula"] = [{"n": n, "error": e} for n, e in table]
        return _dumps(out), EXIT_OK
    text = traj.to_csv()
    if table is not None:
        text += "\n" + _csv(["n", "error"], table)
    return text, EXIT_OK


def _cmd_verify(doc, fmt, seed):
    names = doc.get("checks") if doc else None
    if names is not None:
        unknown = [n for n in names if n not in CHECKS]
        if unknown:
            raise SchemaError("$.checks", f"unknown checks {unknown}; known: {list(CHECKS)}")
    results = run_suite(seed, names)
    code = EXIT_OK if all(r.ok for r in results) else EXIT_VIOLATION
    if code == EXIT_VIOLATION:
        failed = [{"name": r.name, "violations": r.violations[:5]} for r in results if not r.ok]
        print(json.dumps({"error": "violations", "failed": failed}, default=float), file=sys.stderr)
    if fmt == "json":
        return summary_json(results, seed), code
    rows = [[r.name, r.criterion, r.checked, r.passed, "pass" if r.ok else "fail"] for r in results]
    return _csv(["invariant", "criterion", "checked", "passed", "status"], rows), code


_HANDLERS = {
    "prox": _cmd_prox,
    "sweep-eps": _cmd_sweep_eps,
    "conjugate": _cmd_conjugate,
    "mosco": _cmd_mosco,
    "hj": _cmd_hj,
    "flow": _cmd_flow,
    "verify": _cmd_verify,
}


def _load(config: RunConfig):
    if config.spec_path is None:
        if config.command == "verify":
            return {}
        raise SchemaError("$", f"{config.command} needs --spec")
    try:
        with open(config.spec_path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise SchemaError("$", f"cannot read spec: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError("$", f"not valid JSON: {exc}") from exc
    validate(config.command, doc)
    return doc


def run(config: RunConfig) -> int:
    """Execute one command; returns the process exit status."""
    try:
        doc = _load(config)
        text, code = _HANDLERS[config.command](doc, config.format, config.seed)
    except SchemaError as exc:
        print(json.dumps({"error": "schema", "path": exc.path, "message": str(exc)}), file=sys.stderr)
        return EXIT_SCHEMA
    except _SubtaskFailure as exc:
        print(json.dumps({"error": "solver", "subtask": exc.subtask, "message": str(exc)}), file=sys.stderr)
        return EXIT_SOLVER
    except (PMoreauError, ValueError, KeyError) as exc:
        # well-formed JSON whose values the library rejects (dimension mismatch, p <= 1, ...)
        print(json.dumps({"error": "schema", "path": "$", "message": f"{type(exc).__name__}: {exc}"}),
              file=sys.stderr)
        return EXIT_SCHEMA
    if config.out_path:
        with open(config.out_path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pmoreau", description="p-Moreau envelopes, flows and checks")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--spec", dest="spec_path", help="JSON problem spec")
    ap.add_argument("--out", dest="out_path", help="output file (default: stdout)")
    ap.add_argument("--format", choices=("csv", "json"), default="json")
    ap.add_argument("--seed", type=int, default=42)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return run(RunConfig(args.command, args.spec_path, args.out_path, args.format, args.seed))


if __name__ == "__main__":
    sys.exit(main())
