"""Acceptance criteria 1-13.

The full invariant suite runs twice through the command line with seed 42;
criterion 13 compares the two reports byte for byte and criteria 1-12 read
their checks from the first report. Each criterion also recomputes a few
values directly against independent references.
"""
import json
import math

import numpy as np
import pytest

from pmoreau import cli
from pmoreau.envelope import convergence_profile, kernel_conjugate_numeric, prox
from pmoreau.flow import exponential_formula_check
from pmoreau.functions import indicator_box, one_norm, quadratic
from pmoreau.oracle import GridSpec, grid_refine
from pmoreau.spaces import PowerParams, SpaceSpec, dual_norm, duality_map_p, norm, pairing

pytestmark = pytest.mark.acceptance

E1 = SpaceSpec.euclidean(1)


@pytest.fixture(scope="session")
def verify_runs(tmp_path_factory):
    d = tmp_path_factory.mktemp("verify")
    codes, texts = [], []
    for k in range(2):
        out = d / f"run{k}.json"
        codes.append(cli.main(["verify", "--seed", "42", "--out", str(out)]))
        texts.append(out.read_bytes())
    report = json.loads(texts[0])
    return {"codes": codes, "texts": texts, "report": report,
            "checks": {c["name"]: c for c in report["invariants"]}}


def _check(verify_runs, name):
    c = verify_runs["checks"][name]
    return c["ok"] and c["violation_count"] == 0, c


def test_criterion_01_duality_map(verify_runs, record_criterion):
    ok, c = _check(verify_runs, "duality_map")
    ok &= c["checked"] >= 1000 and c["metrics"]["max_rel_error"] <= 1e-10
    # independent spot check at the documented example
    xi = duality_map_p(SpaceSpec.euclidean(2), 3, [2.0, 0.0])
    ok &= abs(pairing(xi, [2.0, 0.0]) - 8.0) <= 8e-10
    ok &= abs(dual_norm(SpaceSpec.euclidean(2), xi) ** 1.5 - 8.0) <= 8e-10
    record_criterion(1, "duality-map characterization", ok, f"max rel error {c['metrics']['max_rel_error']:.2e}")
    assert ok


def test_criterion_02_euler_lagrange(verify_runs, record_criterion):
    ok_sweep, sweep = _check(verify_runs, "euler_lagrange_and_assertion_i")
    ok_cf, cf = _check(verify_runs, "closed_form_vs_oracle")
    ok = ok_sweep and ok_cf and sweep["metrics"]["solves"] >= 200
    ok &= sweep["metrics"]["max_optimality_gap"] <= 1e-6
    # soft threshold against a fresh grid oracle
    sol = prox(one_norm(1), E1, PowerParams(2, 1), [3.0])
    x, _ = grid_refine(lambda v: 0.5 * (3 - v[0]) ** 2 + abs(v[0]), GridSpec((-10,), (10,), 2001), 5)
    ok &= abs(sol.minimizer[0] - x[0]) <= 1e-6
    record_criterion(2, "Euler-Lagrange certification", ok,
                     f"{sweep['metrics']['solves']} solves, max gap {sweep['metrics']['max_optimality_gap']:.2e}")
    assert ok


def test_criterion_03_assertion_i(verify_runs, record_criterion):
    ok, c = _check(verify_runs, "euler_lagrange_and_assertion_i")
    m = c["metrics"]
    bad = [v for v in c["violations"] if v.get("kind") == "assertion_i"]
    ok &= not bad and "max_assertion_i_gap_closed" in m and m["max_assertion_i_gap_iterative"] <= 1e-5
    record_criterion(3, "envelope value identity", ok,
                     f"closed {m.get('max_assertion_i_gap_closed', math.nan):.1e}, "
                     f"iterative {m.get('max_assertion_i_gap_iterative', math.nan):.1e}")
    assert ok


def test_criterion_04_sandwich(verify_runs, record_criterion):
    ok, c = _check(verify_runs, "sandwich_and_eps_monotonicity")
    ok &= c["checked"] > 0
    record_criterion(4, "sandwich and eps-monotonicity", ok, f"{c['checked']} inequalities")
    assert ok


def test_criterion_05_young_bound(verify_runs, record_criterion):
    ok, c = _check(verify_runs, "young_bound_and_divergence")
    ok &= c["metrics"]["one_norm_equality_error"] <= 1e-10
    # gap of |.| at u = 3 is eps/2 for p = 2; f_eps outside a box grows like dist^2 / (2 eps)
    prof = convergence_profile(one_norm(1), E1, 2, [3.0], [0.5])
    ok &= abs(prof.rows[0][1] - 0.25) <= 1e-10
    prof = convergence_profile(indicator_box([-1.0], [1.0]), E1, 2, [25.0], [1.0, 1e-3])
    ok &= prof.ok and prox(indicator_box([-1.0], [1.0]), E1, PowerParams(2, 1e-3), [25.0]).envelope_value > 1e3
    record_criterion(5, "Young bound, equality and divergence", ok,
                     f"equality error {c['metrics']['one_norm_equality_error']:.1e}")
    assert ok


def test_criterion_06_eps_derivative(verify_runs, record_criterion):
    ok, c = _check(verify_runs, "eps_derivative")
    ok &= c["checked"] == 50 and c["metrics"]["max_rel_error"] <= 1e-3
    record_criterion(6, "eps-derivative", ok, f"50 points, max rel error {c['metrics']['max_rel_error']:.1e}")
    assert ok


def test_criterion_07_gateaux(verify_runs, record_criterion):
    ok, c = _check(verify_runs, "gateaux_derivative")
    ok &= c["checked"] == 100 and c["metrics"]["max_rel_error"] <= 1e-4
    record_criterion(7, "Gateaux derivative", ok, f"100 pairs, max rel error {c['metrics']['max_rel_error']:.1e}")
    assert ok


def test_criterion_08_minimal_section(verify_runs, record_criterion):
    ok, c = _check(verify_runs, "minimal_section")
    ok &= c["metrics"]["max_distance_at_1e-4"] <= 1e-6
    ok &= float(prox(one_norm(1), E1, PowerParams(3, 0.01), [0.0]).derivative[0]) == 0.0
    record_criterion(8, "minimal section", ok, f"distance at 1e-4: {c['metrics']['max_distance_at_1e-4']:.1e}")
    assert ok


def test_criterion_09_conjugate(verify_runs, record_criterion):
    ok, c = _check(verify_runs, "envelope_conjugate")
    pairs = c["checked"] - 3 * 2 * 13
    ok &= pairs >= 30 and c["metrics"]["max_gap_over_tol"] <= 1.0
    ok &= c["metrics"]["max_kernel_identity_error"] <= 1e-8
    ok &= abs(kernel_conjugate_numeric(3.0, 0.5, 2.0) - 0.5 / 1.5 * 2.0**1.5) <= 1e-8
    record_criterion(9, "conjugate formula", ok,
                     f"{pairs} pairs, kernel identity error {c['metrics']['max_kernel_identity_error']:.1e}")
    assert ok


def test_criterion_10_mosco(verify_runs, record_criterion):
    ok, c = _check(verify_runs, "mosco")
    gaps = {k: v for k, v in c["metrics"].items() if k.endswith("envelope_preserves.final_gap")}
    ok &= len(gaps) == 7 and max(gaps.values()) <= 2 / 64
    record_criterion(10, "Mosco suite", ok, f"{c['checked']} reports, worst envelope gap {max(gaps.values()):.1e}")
    assert ok


def test_criterion_11_hamilton_jacobi(verify_runs, record_criterion):
    ok, c = _check(verify_runs, "hamilton_jacobi")
    m = c["metrics"]
    for h in (0.05, 0.025):
        ok &= m[f"quadratic_residual_h{h}"] <= 5 * h * h and m[f"one_norm_residual_over_h_{h}"] <= 3.0
    record_criterion(11, "Hamilton-Jacobi residual", ok,
                     f"quadratic {m['quadratic_residual_h0.05']:.1e} / {m['quadratic_residual_h0.025']:.1e}")
    assert ok


def test_criterion_12_flow(verify_runs, record_criterion):
    ok, c = _check(verify_runs, "flow")
    m = c["metrics"]
    ok &= all(1.6 <= m[f"ode_ratio_p{p}"] <= 2.4 for p in ("2", "3"))
    exact = abs((1 + 1 / 1024) ** -1024 - math.exp(-1))
    (_, err), = exponential_formula_check(quadratic([[1.0]]), E1, 1.0, [1024], [1.0])
    ok &= abs(err - exact) <= 1e-12 and err <= 5e-4 and abs(m["exponential_formula_error"] - exact) <= 1e-12
    record_criterion(12, "flow", ok, f"ODE ratios {m['ode_ratio_p2']:.3f}, {m['ode_ratio_p3']:.3f}; "
                                     f"exponential error {err:.6e}")
    assert ok


def test_criterion_13_determinism(verify_runs, record_criterion):
    a, b = verify_runs["texts"]
    ok = verify_runs["codes"] == [0, 0] and a == b and verify_runs["report"]["ok"]
    record_criterion(13, "verify --seed 42 twice is byte-identical", ok, f"{len(a)} bytes, exit codes "
                                                                        f"{verify_runs['codes']}")
    assert ok


def test_duality_identities_direct():
    # criterion 1 on a fresh random draw, independent of the suite's generator
    rng = np.random.default_rng(2024)
    spaces = [SpaceSpec.euclidean(3), SpaceSpec.q_norm(3, 1.5), SpaceSpec.q_norm(3, 3.0)]
    for _ in range(300):
        sp = spaces[rng.integers(3)]
        p = (1.5, 2.0, 3.0)[rng.integers(3)]
        v = rng.normal(size=3) * 10.0 ** rng.uniform(-2, 2)
        xi = duality_map_p(sp, p, v)
        nv = norm(sp, v) ** p
        assert abs(pairing(xi, v) - nv) <= 1e-10 * max(1.0, nv)
        assert abs(dual_norm(sp, xi) ** (p / (p - 1)) - nv) <= 1e-10 * max(1.0, nv)
