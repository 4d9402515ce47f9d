"""Seeded invariant suite behind the ``verify`` command and the acceptance tests.

Every check returns a :class:`CheckResult` that counts the individual
comparisons made and keeps a witness for each failure. The suite is
deterministic for a fixed seed, and its JSON output contains no timings,
so two runs with the same seed produce identical bytes.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import envelope as env
from .envelope import prox
from .errors import PMoreauError, SolverFailure
from .flow import (
    dissipation_violations,
    exponential_formula_check,
    minimizing_movement,
    ode_reference_error,
)
from .functions import (
    ConvexFn,
    indicator_box,
    indicator_point,
    max_affine,
    one_norm,
    power_of_norm,
    quadratic,
    validate_convexity,
    zero,
)
from .hj import hj_residual, lax_oleinik, monotone_in_t_violations, semigroup_gap
from .mosco import (
    FIXTURES,
    conjugate_superlinearity,
    diagonal_convergence,
    envelope_preserves,
    fixture,
    liminf_check,
    recovery_check,
    superlinearity_profile,
)
from .oracle import GridSpec, grid_refine
from .spaces import (
    PowerParams,
    SpaceSpec,
    dual_norm,
    duality_map_p,
    duality_monotonicity_gap,
    norm,
    pairing,
)

__all__ = ["CheckResult", "CHECKS", "run_suite", "sweep_catalog", "summary_json"]

P_VALUES = (1.5, 2.0, 3.0)
EPS_VALUES = (2.0, 1.0, 0.5, 0.1)
MAX_WITNESSES = 20


@dataclass
class CheckResult:
    name: str
    criterion: int = 0  # acceptance criterion number, 0 for supporting invariants
    checked: int = 0
    violations: list = field(default_factory=list)
    metrics: dict = field(default_factory=dict)

    @property
    def passed(self) -> int:
        return self.checked - len(self.violations)

    @property
    def ok(self) -> bool:
        return self.checked > 0 and not self.violations

    def expect(self, cond, **witness):
        self.checked += 1
        if not cond:
            self.violations.append(witness)
        return bool(cond)

    def worst(self, key, value):
        """Track the largest value seen for a metric."""
        value = float(value)
        if key not in self.metrics or value > self.metrics[key]:
            self.metrics[key] = value

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "criterion": self.criterion,
            "checked": self.checked,
            "passed": self.passed,
            "ok": self.ok,
            "metrics": self.metrics,
            "violations": self.violations[:MAX_WITNESSES],
            "violation_count": len(self.violations),
        }


# --------------------------------------------------------------------------
# fixtures
# --------------------------------------------------------------------------

E1 = SpaceSpec.euclidean(1)
E2 = SpaceSpec.euclidean(2)
Q3 = SpaceSpec.q_norm(2, 3.0)
Q15 = SpaceSpec.q_norm(2, 1.5)
W2 = SpaceSpec.weighted([1.0, 4.0])


def sweep_catalog():
    """``(f, space, points)`` triples exercising every catalog member and norm family."""
    return [
        (one_norm(1), E1, [[3.0], [0.4], [-1.2]]),
        (quadratic([[2.0]], [0.5], 0.1), E1, [[1.0], [-2.0]]),
        (indicator_box([-1.0], [1.0]), E1, [[2.5], [0.3], [-4.0]]),
        (indicator_point([0.5]), E1, [[2.0], [-1.0]]),
        (max_affine([(1.5, 0.0), (-1.0, 0.2)]), E1, [[1.0], [0.08], [-2.0]]),
        (power_of_norm(2.5, E1), E1, [[1.5], [-0.7]]),
        (power_of_norm(1.0, E1), E1, [[2.0], [0.3]]),
        (zero(1), E1, [[0.7]]),
        (one_norm(2), Q3, [[1.0, -2.0], [0.2, 0.1]]),
        (quadratic([[2.0, 0.5], [0.5, 1.0]]), Q3, [[1.0, 1.0]]),
        (indicator_box([-1.0, -1.0], [1.0, 0.5]), Q3, [[2.0, 2.0], [0.1, -0.3]]),
        (max_affine([([1.0, 0.0], 0.0), ([-1.0, 0.5], 0.0), ([0.0, -1.0], 0.3)]), Q15,
         [[1.0, 0.5], [-0.5, -2.0]]),
        (power_of_norm(2.0, Q3), Q3, [[1.0, -1.5]]),
        (quadratic([[1.0, 0.0], [0.0, 3.0]], [0.5, -1.0]), W2, [[1.0, 2.0]]),
        (one_norm(2), W2, [[1.5, -0.5]]),
    ]


def _sweep_items():
    for f, space, points in sweep_catalog():
        for u in points:
            yield f, space, np.asarray(u, dtype=float)


def _concave_probe() -> ConvexFn:
    """``v -> -v^2``, deliberately not convex; the convexity audit must flag it."""
    return ConvexFn(
        label="concave_probe",
        evaluate=lambda v: -float(np.dot(v, v)),
        subgradient=lambda v: -2.0 * np.asarray(v, dtype=float),
        domain_contains=lambda v: True,
        anchor=lambda n: np.zeros(n),
        dim=1,
    )


# --------------------------------------------------------------------------
# checks
# --------------------------------------------------------------------------


def check_duality_map(seed: int) -> CheckResult:
    """Characterization, gradient, monotonicity and Hoelder checks of F^p."""
    res = CheckResult("duality_map", 1)
    rng = np.random.default_rng(seed)
    spaces = [SpaceSpec.euclidean(3), SpaceSpec.q_norm(3, 1.5), SpaceSpec.q_norm(3, 3.0)]
    for k in range(1000):
        space = spaces[k % 3]
        p = P_VALUES[(k // 3) % 3]
        v = rng.normal(size=3) * 10.0 ** rng.uniform(-2, 2)
        xi = duality_map_p(space, p, v)
        nv = norm(space, v) ** p
        scale = max(1.0, nv)
        e1 = abs(pairing(xi, v) - nv) / scale
        e2 = abs(dual_norm(space, xi) ** (p / (p - 1.0)) - nv) / scale
        res.worst("max_rel_error", max(e1, e2))
        res.expect(e1 <= 1e-10 and e2 <= 1e-10, space=repr(space), p=p, v=v.tolist(), err=max(e1, e2))
        w = rng.normal(size=3)
        lhs, rhs = duality_monotonicity_gap(space, p, v, w)
        res.expect(lhs >= rhs - 1e-12 * (1 + abs(lhs)) and rhs >= -1e-12, kind="monotonicity",
                   v=v.tolist(), w=w.tolist(), lhs=lhs, rhs=rhs)
        res.expect(abs(pairing(w, v)) <= dual_norm(space, w) * norm(space, v) + 1e-12 * (1 + nv),
                   kind="hoelder", v=v.tolist(), w=w.tolist())
        if k < 200 and np.all(np.abs(v) > 1e-3):
            h = 1e-6 * (1.0 + norm(space, v))
            num = np.array([(norm(space, v + h * e) ** p - norm(space, v - h * e) ** p) / (2 * h * p)
                            for e in np.eye(3)])
            err = np.linalg.norm(num - xi) / max(1.0, np.linalg.norm(xi))
            res.worst("max_gradient_rel_error", err)
            res.expect(err <= 1e-5, kind="gradient", v=v.tolist(), p=p, err=err)
    return res


def check_catalog_convexity(seed: int) -> CheckResult:
    """Randomized convexity audit of every catalog member; the concave probe must fail."""
    res = CheckResult("catalog_convexity")
    seen = set()
    for f, space, _ in sweep_catalog():
        key = (f.label, space.dim)
        if key in seen:
            continue
        seen.add(key)
        rep = validate_convexity(f, samples=100, seed=seed, dim=space.dim)
        res.expect(rep.ok, fn=f.label, violations=rep.violations[:3])
    probe = validate_convexity(_concave_probe(), samples=50, seed=seed)
    res.expect(not probe.ok, fn="concave_probe", reason="non-convex probe was not flagged")
    return res


def check_prox_sweep() -> CheckResult:
    """Euler-Lagrange certification and the assertion (i) identity over the sweep."""
    res = CheckResult("euler_lagrange_and_assertion_i", 2)
    solves = 0
    for f, space, u in _sweep_items():
        for p in P_VALUES:
            for eps in EPS_VALUES:
                params = PowerParams(p, eps)
                try:
                    sol = prox(f, space, params, u)
                except SolverFailure as exc:
                    res.expect(False, fn=f.label, u=u.tolist(), p=p, eps=eps, reason=str(exc))
                    continue
                solves += 1
                res.worst("max_optimality_gap", sol.optimality_gap)
                res.expect(sol.optimality_gap <= 1e-6, fn=f.label, u=u.tolist(), p=p, eps=eps,
                           gap=sol.optimality_gap)
                gap = env.assertion_i_gap(sol, f, space, params)
                closed = sol.solver == "closed_form"
                tol = 1e-8 * (1.0 + abs(sol.envelope_value)) if closed else 1e-5
                res.worst("max_assertion_i_gap_closed" if closed else "max_assertion_i_gap_iterative", gap)
                res.expect(gap <= tol, kind="assertion_i", fn=f.label, u=u.tolist(), p=p, eps=eps,
                           solver=sol.solver, gap=gap)
    res.metrics["solves"] = solves
    return res


def _oracle_prox(f, space, params, u, half_width, points, rounds):
    def objective(V):
        fv = f.values(V)
        kern = np.array([env._kernel(space, params, u - v) for v in V])
        return np.where(np.isfinite(fv), kern + fv, np.inf)

    grid = GridSpec(tuple(u - half_width), tuple(u + half_width), points)
    return grid_refine(objective, grid, rounds, vectorized=True)


def check_closed_forms() -> CheckResult:
    """Closed-form proximal points against grid refinement for dimensions 1 to 3."""
    res = CheckResult("closed_form_vs_oracle", 2)
    cases = []
    for n, pts in ((1, 41), (2, 41), (3, 21)):
        e = SpaceSpec.euclidean(n)
        u = np.linspace(1.7, -0.6, n)
        cases += [
            (one_norm(n), e, PowerParams(2.0, 0.5), u),
            (quadratic(np.diag(np.arange(1.0, n + 1)), np.full(n, 0.3)), e, PowerParams(2.0, 0.7), u),
            (indicator_box(-np.ones(n), 0.5 * np.ones(n)), e, PowerParams(2.0, 1.0), u),
            (indicator_box(-np.ones(n), 0.5 * np.ones(n)), SpaceSpec.q_norm(n, 3.0), PowerParams(3.0, 0.5), u),
            (indicator_box(-np.ones(n), 0.5 * np.ones(n)), SpaceSpec.q_norm(n, 1.5), PowerParams(1.5, 2.0), u),
            (zero(n), e, PowerParams(2.0, 1.0), u),
        ]
    for f, space, params, u in cases:
        sol = prox(f, space, params, u)
        if sol.solver != "closed_form":
            res.expect(False, fn=f.label, reason=f"expected closed form, got {sol.solver}")
            continue
        pts = 41 if space.dim < 3 else 21
        x, val = _oracle_prox(f, space, params, u, 3.0, pts, 14)
        dx = float(np.max(np.abs(x - sol.minimizer)))
        dv = abs(val - sol.envelope_value)
        res.worst("max_minimizer_diff", dx)
        res.worst("max_value_diff", dv)
        # for p > 2 the objective is flatter than quadratic at the minimizer and a
        # 1e-6 offset can sit below rounding; there the closed form must score no
        # worse than the oracle's node instead
        obj_cf = env._kernel(space, params, u - sol.minimizer) + f.evaluate(sol.minimizer)
        located = dx <= 1e-6 if params.p <= 2.0 else obj_cf <= val + 1e-15 * (1 + abs(val))
        res.expect(located and dv <= 1e-6, fn=f.label, space=repr(space), p=params.p,
                   dx=dx, dv=dv)
    return res


def check_eps_monotonicity() -> CheckResult:
    """Sandwich chain and monotonicity of values and displacements in eps."""
    res = CheckResult("sandwich_and_eps_monotonicity", 4)
    for f, space, u in _sweep_items():
        for p in P_VALUES:
            prof = env.eps_monotonicity_profile(f, space, p, u, EPS_VALUES)
            res.checked += len(prof.rows) * 4 - 2
            for v in prof.violations:
                res.violations.append({"fn": f.label, "u": u.tolist(), "p": p, **v})
    return res


def _outside_cases():
    return [
        (indicator_box([-1.0], [1.0]), E1, [25.0]),
        (indicator_box([-1.0], [1.0]), E1, [-30.0]),
        (indicator_point([0.5]), E1, [21.0]),
        (indicator_box([-1.0, -1.0], [1.0, 0.5]), Q3, [25.0, 0.0]),
    ]


def check_young_bound() -> CheckResult:
    """Young-inequality bound inside the domain, equality for |.|, divergence outside."""
    res = CheckResult("young_bound_and_divergence", 5)
    eps_list = (2.0, 1.0, 0.5, 0.1, 1e-2, 1e-3)
    for f, space, u in _sweep_items():
        if not f.domain_contains(u):
            continue
        for p in P_VALUES:
            prof = env.convergence_profile(f, space, p, u, eps_list)
            res.checked += len(prof.rows)
            for v in prof.violations:
                res.violations.append({"fn": f.label, "u": u.tolist(), "p": p, **v})
    f = one_norm(1)
    for p in P_VALUES:
        for eps in EPS_VALUES:
            prof = env.convergence_profile(f, E1, p, [3.0], [eps])
            _, gap, _, bound = prof.rows[0]
            res.worst("one_norm_equality_error", abs(gap - bound))
            res.expect(abs(gap - bound) <= 1e-10, kind="equality", p=p, eps=eps, gap=gap, bound=bound)
    for f, space, u in _outside_cases():
        for p in P_VALUES:
            prof = env.convergence_profile(f, space, p, u, eps_list)
            res.expect(prof.ok, kind="divergence", fn=f.label, u=u, p=p, violations=prof.violations)
    return res


def check_eps_derivative(seed: int) -> CheckResult:
    """Analytic eps-derivative against central differences at 50 points."""
    res = CheckResult("eps_derivative", 6)
    rng = np.random.default_rng(seed)
    cands = [(f, space, u, p, eps) for f, space, u in _sweep_items() for p in P_VALUES for eps in (1.0, 0.5)]
    order = rng.permutation(len(cands))
    for k in order:
        if res.checked >= 50:
            break
        f, space, u, p, eps = cands[k]
        d = env.eps_derivative(f, space, p, u, eps)
        if abs(d) <= 1e-6:
            continue
        h = 1e-4 * eps
        num = (env.envelope_value(f, space, PowerParams(p, eps + h), u)
               - env.envelope_value(f, space, PowerParams(p, eps - h), u)) / (2 * h)
        err = abs(d - num) / abs(d)
        res.worst("max_rel_error", err)
        res.expect(err <= 1e-3, fn=f.label, u=u.tolist(), p=p, eps=eps, analytic=d, numeric=num)
    return res


def check_gateaux(seed: int) -> CheckResult:
    """Directional derivative ``<A_eps(u), w>`` against central differences on 100 pairs."""
    res = CheckResult("gateaux_derivative", 7)
    rng = np.random.default_rng(seed + 1)
    items = list(_sweep_items())
    k = 0
    while res.checked < 100:
        f, space, u = items[k % len(items)]
        p = P_VALUES[k % 3]
        k += 1
        w = rng.normal(size=space.dim)
        w = w / norm(space, w)
        a, n = env.gateaux_directional_check(f, space, PowerParams(p, 0.5), u, w)
        err = abs(a - n) / max(1.0, abs(a))
        res.worst("max_rel_error", err)
        res.expect(err <= 1e-4, fn=f.label, u=u.tolist(), p=p, w=w.tolist(), analytic=a, numeric=n)
    return res


def check_minimal_section() -> CheckResult:
    """``A_eps(u) -> A_0(u)`` and exact zeros of ``A_eps(0)`` for symmetric fixtures."""
    res = CheckResult("minimal_section", 8)
    eps_list = (1e-1, 1e-2, 1e-3, 1e-4)
    cases = [
        (one_norm(1), E1, [0.0]), (one_norm(1), E1, [1.0]), (one_norm(1), E1, [-2.0]),
        (max_affine([(1.5, 0.0), (-1.0, 0.2)]), E1, [0.08]),
        (max_affine([(1.5, 0.0), (-1.0, 0.2)]), E1, [1.0]),
        (max_affine([(2.0, 0.0), (-1.0, 0.0), (0.5, 0.0)]), E1, [0.0]),
        (one_norm(2), E2, [0.0, 1.0]), (one_norm(2), E2, [0.0, 0.0]),
    ]
    for f, space, u in cases:
        for p in P_VALUES:
            _, prof = env.minimal_section(f, space, PowerParams(p, 1.0), u, eps_list)
            last = prof[-1][1]
            res.worst("max_distance_at_1e-4", last)
            res.expect(last <= 1e-6, fn=f.label, u=u, p=p, profile=prof)
    symmetric = [one_norm(1), quadratic([[2.0]]), indicator_box([-1.0], [1.0]), power_of_norm(2.5, E1),
                 power_of_norm(1.0, E1), zero(1)]
    for f in symmetric:
        for space, ff in ((E1, f),):
            for p in P_VALUES:
                for eps in (1.0, 0.1):
                    A = prox(ff, space, PowerParams(p, eps), [0.0]).derivative
                    res.expect(np.all(A == 0.0), kind="symmetric_zero", fn=ff.label, p=p, eps=eps,
                               A=A.tolist())
    for f in (one_norm(2), quadratic(2 * np.eye(2)), indicator_box([-1.0, -1.0], [1.0, 1.0]),
              power_of_norm(2.5, Q3)):
        for p in P_VALUES:
            A = prox(f, Q3, PowerParams(p, 0.5), [0.0, 0.0]).derivative
            res.expect(np.all(A == 0.0), kind="symmetric_zero", fn=f.label, p=p, A=A.tolist())
    return res


def check_conjugate() -> CheckResult:
    """Envelope conjugate formula against brute force, and the scalar kernel identity."""
    res = CheckResult("envelope_conjugate", 9)
    grid = GridSpec((-10.0,), (10.0,), 401)
    pairs = [
        (one_norm(1), (-0.8, -0.3, 0.0, 0.2, 0.5, 0.9)),
        (quadratic([[2.0]], [0.5], 0.1), (-2.0, -1.0, 0.0, 0.5, 1.0, 2.0)),
        (power_of_norm(2.5, E1), (-3.0, -1.0, 0.0, 0.5, 1.0, 2.0)),
        (max_affine([(1.5, 0.0), (-1.0, 0.2)]), (-0.9, -0.5, 0.0, 0.3, 0.7, 1.4)),
        (indicator_box([-1.0], [1.0]), (-3.0, -1.0, 0.0, 0.5, 1.0, 2.0)),
    ]
    k = 0
    for f, xis in pairs:
        for xi in xis:
            p = P_VALUES[k % 3]
            k += 1
            a, n = env.envelope_conjugate(f, PowerParams(p, 0.5), [xi], grid, E1)
            tol = 2 * grid.step * (1 + abs(xi)) + 1e-6
            res.worst("max_gap_over_tol", abs(a - n) / tol)
            res.expect(abs(a - n) <= tol, fn=f.label, xi=xi, p=p, analytic=a, numeric=n)
    for p in P_VALUES:
        for eps in (0.5, 1.0):
            ps = p / (p - 1)
            for xi in np.linspace(-3.0, 3.0, 13):
                num = env.kernel_conjugate_numeric(p, eps, xi)
                exact = eps / ps * abs(xi) ** ps
                res.worst("max_kernel_identity_error", abs(num - exact))
                res.expect(abs(num - exact) <= 1e-8, kind="kernel_identity", p=p, eps=eps, xi=float(xi))
    return res


def check_envelope_properties(seed: int) -> CheckResult:
    """Convexity, Lipschitz bound, strict convexity, subgradient consistency, continuity of A_eps."""
    res = CheckResult("envelope_properties")
    rng = np.random.default_rng(seed + 2)
    fixtures = [
        (one_norm(1), E1), (indicator_box([-1.0], [1.0]), E1), (max_affine([(1.5, 0.0), (-1.0, 0.2)]), E1),
        (one_norm(2), Q3), (quadratic([[2.0, 0.5], [0.5, 1.0]]), Q3),
    ]
    for i in range(200):
        f, space = fixtures[i % len(fixtures)]
        params = PowerParams(P_VALUES[i % 3], 0.5)
        a, b = rng.uniform(-3, 3, size=(2, space.dim))
        sa, sb = prox(f, space, params, a), prox(f, space, params, b)
        mid = prox(f, space, params, 0.5 * (a + b)).envelope_value
        rhs = 0.5 * (sa.envelope_value + sb.envelope_value)
        res.expect(mid <= rhs + 1e-8 * (1 + abs(rhs)), kind="midpoint_convexity", fn=f.label,
                   a=a.tolist(), b=b.tolist())
        L = max(dual_norm(space, sa.derivative), dual_norm(space, sb.derivative))
        diff = abs(sa.envelope_value - sb.envelope_value)
        res.expect(diff <= L * norm(space, a - b) + 1e-8, kind="lipschitz", fn=f.label,
                   a=a.tolist(), b=b.tolist())
    q = quadratic([[2.0, 0.5], [0.5, 1.0]])
    for i in range(30):
        a = rng.uniform(-2, 2, size=2)
        d = rng.normal(size=2)
        b = a + d / np.linalg.norm(d) * rng.uniform(0.1, 2.0)
        params = PowerParams(P_VALUES[i % 3], 0.5)
        fa = env.envelope_value(q, Q3, params, a)
        fb = env.envelope_value(q, Q3, params, b)
        fm = env.envelope_value(q, Q3, params, 0.5 * (a + b))
        res.expect(0.5 * (fa + fb) - fm > 0.0, kind="strict_convexity", a=a.tolist(), b=b.tolist())
    for f, space in fixtures:
        for p in P_VALUES:
            params = PowerParams(p, 0.5)
            u = rng.uniform(-2, 2, size=space.dim)
            sol = prox(f, space, params, u)
            ef = env.envelope_function(f, space, params)
            gap = env.certify(ef, u, sol.derivative)
            res.worst("max_envelope_subgradient_gap", gap)
            res.expect(gap <= 1e-8 * (1 + abs(sol.envelope_value)), kind="subgradient_consistency",
                       fn=f.label, u=u.tolist(), p=p, gap=gap)
    for i in range(20):
        f, space = fixtures[i % len(fixtures)]
        params = PowerParams(P_VALUES[i % 3], 0.5)
        u = rng.uniform(-2, 2, size=space.dim)
        d = rng.normal(size=space.dim)
        d /= norm(space, d)
        A = prox(f, space, params, u).derivative
        dists = [dual_norm(space, prox(f, space, params, u + 2.0**-k * d).derivative - A) for k in (2, 10, 20)]
        # no modulus is claimed; the last distance only has to reach solver noise
        res.expect(dists[-1] <= max(1e-6, dists[0]), kind="derivative_continuity",
                   fn=f.label, u=u.tolist(), distances=dists)
    return res


def check_mosco() -> CheckResult:
    """The four Mosco reports on every shipped fixture, plus superlinearity profiles."""
    res = CheckResult("mosco", 10)
    n_max = 64
    params = PowerParams(2.0, 1.0)
    for name in FIXTURES:
        seq = fixture(name)
        grid = seq.grid
        for rep in (liminf_check(seq, grid, n_max), recovery_check(seq, grid, n_max),
                    envelope_preserves(seq, E1, params, grid, n_max),
                    diagonal_convergence(seq, E1, 2.0, n_max=n_max)):
            key = f"{name}.{rep.check}"
            if "final_gap" in rep.summary:
                res.metrics[key + ".final_gap"] = float(rep.summary["final_gap"])
            res.expect(rep.ok, fixture=name, check=rep.check, violations=rep.violations[:3])
    rows = superlinearity_profile(quadratic([[1.0]]), E1, 2.0, (1.0, 0.5, 0.1), (1.0, 3.0, 12.0, 48.0))
    col = [r[1] for r in rows]
    res.expect(all(b > a for a, b in zip(col, col[1:])) and col[-1] > 10.0, kind="superlinearity", rows=rows)
    for f in (quadratic([[1.0]]), power_of_norm(2.5, E1)):
        crow = conjugate_superlinearity(f, E1, PowerParams(2.0, 0.5))
        ccol = [r[1] for r in crow]
        res.expect(all(b > a for a, b in zip(ccol, ccol[1:])), kind="conjugate_superlinearity",
                   fn=f.label, rows=crow)
    return res


def check_hj() -> CheckResult:
    """Residual of the Lax-Oleinik field, semigroup property, monotonicity in t."""
    res = CheckResult("hamilton_jacobi", 11)
    for h in (0.05, 0.025):
        grid = GridSpec((-2.0,), (2.0,), int(round(4.0 / h)) + 1)
        ts = 0.5 + h * np.arange(int(round(1.0 / h)) + 1)
        quad = lax_oleinik(quadratic([[1.0]]), 2.0, grid, ts)
        r, count, _ = hj_residual(quad, E1, 2.0)
        res.metrics[f"quadratic_residual_h{h}"] = r
        res.expect(r <= 5 * h * h and count > 0, kind="quadratic_residual", h=h, residual=r)
        l1 = lax_oleinik(one_norm(1), 2.0, grid, ts)
        r1, count1, kinks = hj_residual(l1, E1, 2.0)
        res.metrics[f"one_norm_residual_over_h_{h}"] = r1 / h
        res.expect(r1 <= 3.0 * h and count1 > 0, kind="one_norm_residual", h=h, residual=r1, kinks=kinks)
        for fld in (quad, l1):
            res.expect(monotone_in_t_violations(fld) == 0, kind="monotone_in_t", h=h)
        j = len(grid.nodes()) // 3
        direct = env.envelope_value(one_norm(1), E1, PowerParams(2.0, ts[1]), grid.nodes()[j])
        res.expect(direct == l1.values[1].ravel()[j], kind="same_code_path", h=h)
    zero_field = lax_oleinik(zero(1), 2.0, GridSpec((-1.0,), (1.0,), 5), (0.5, 1.0, 1.5))
    res.expect(hj_residual(zero_field, E1, 2.0)[0] == 0.0, kind="zero_residual")
    for f in (one_norm(1), quadratic([[1.0]]), max_affine([(1.5, 0.0), (-1.0, 0.2)])):
        for p in (2.0, 3.0):
            for t in (0.25, 0.5):
                for s in (0.25, 0.5):
                    g = semigroup_gap(f, E1, p, [0.9], t, s)
                    res.worst("max_semigroup_gap", g)
                    res.expect(g <= 1e-6, kind="semigroup", fn=f.label, p=p, t=t, s=s, gap=g)
    return res


def check_flow(seed: int) -> CheckResult:
    """Convergence of minimizing movements, exponential formula, dissipation, contraction."""
    res = CheckResult("flow", 12)
    q = quadratic([[1.0]])
    for p in (2.0, 3.0):
        a = max(e for _, e in ode_reference_error(q, p, 0.1, 10, [1.0]))
        b = max(e for _, e in ode_reference_error(q, p, 0.05, 20, [1.0]))
        res.metrics[f"ode_ratio_p{p:g}"] = a / b
        res.expect(1.6 <= a / b <= 2.4, kind="ode_ratio", p=p, coarse=a, fine=b)
    rows = exponential_formula_check(q, E1, 1.0, (1, 4, 16, 64, 256, 1024), [1.0])
    exact = abs((1 + 1 / 1024) ** -1024 - math.exp(-1))
    err = rows[-1][1]
    res.metrics["exponential_formula_error"] = err
    res.expect(abs(err - exact) <= 1e-12 and err <= 5e-4, kind="exponential_formula", error=err, exact=exact)
    res.expect(all(y[1] < x[1] for x, y in zip(rows, rows[1:])), kind="exponential_decreasing", rows=rows)
    trajectories = [
        (q, E1, 2.0, 0.1, 10, [1.0]), (q, E1, 3.0, 0.1, 10, [1.0]),
        (one_norm(1), E1, 2.0, 0.3, 6, [1.0]), (one_norm(1), E1, 1.5, 0.2, 8, [-1.5]),
        (max_affine([(1.5, 0.0), (-1.0, 0.2)]), E1, 2.0, 0.1, 8, [0.08]),
        (one_norm(2), Q3, 3.0, 0.2, 6, [0.0, 1.0]),
        (indicator_box([-1.0, -1.0], [1.0, 0.5]), Q3, 2.0, 0.5, 3, [1.0, 0.5]),
        (quadratic([[1.0, 0.0], [0.0, 3.0]], [0.5, -1.0]), W2, 2.0, 0.1, 10, [1.0, 2.0]),
    ]
    for E, space, p, tau, steps, u0 in trajectories:
        traj = minimizing_movement(E, space, p, tau, steps, u0)
        bad = dissipation_violations(traj, space)
        res.expect(not bad, kind="dissipation", fn=E.label, p=p, steps=bad)
        res.expect(max(traj.residuals[1:]) <= 1e-6, kind="smoothing", fn=E.label, p=p,
                   residuals=traj.residuals)
    rng = np.random.default_rng(seed + 3)
    for E, space in ((one_norm(1), E1), (q, E1), (indicator_box([-1.0], [1.0]), E1),
                     (max_affine([(1.5, 0.0), (-1.0, 0.2)]), E1), (one_norm(2), E2),
                     (max_affine([([1.0, 0.0], 0.0), ([-1.0, 0.5], 0.0)]), E2)):
        params = PowerParams(2.0, 0.3)
        for _ in range(10):
            a, b = rng.uniform(-3, 3, size=(2, space.dim))
            ja = prox(E, space, params, a).minimizer
            jb = prox(E, space, params, b).minimizer
            res.expect(norm(space, ja - jb) <= norm(space, a - b) + 1e-9, kind="contraction",
                       fn=E.label, a=a.tolist(), b=b.tolist())
    return res


CHECKS = {
    "duality_map": lambda seed: check_duality_map(seed),
    "catalog_convexity": lambda seed: check_catalog_convexity(seed),
    "euler_lagrange_and_assertion_i": lambda seed: check_prox_sweep(),
    "closed_form_vs_oracle": lambda seed: check_closed_forms(),
    "sandwich_and_eps_monotonicity": lambda seed: check_eps_monotonicity(),
    "young_bound_and_divergence": lambda seed: check_young_bound(),
    "eps_derivative": lambda seed: check_eps_derivative(seed),
    "gateaux_derivative": lambda seed: check_gateaux(seed),
    "minimal_section": lambda seed: check_minimal_section(),
    "envelope_conjugate": lambda seed: check_conjugate(),
    "envelope_properties": lambda seed: check_envelope_properties(seed),
    "mosco": lambda seed: check_mosco(),
    "hamilton_jacobi": lambda seed: check_hj(),
    "flow": lambda seed: check_flow(seed),
}


def run_suite(seed: int = 42, only=None) -> list:
    """Run the named checks (all by default) and return their results in a fixed order."""
    names = list(CHECKS) if only is None else list(only)
    out = []
    for name in names:
        try:
            out.append(CHECKS[name](seed))
        except PMoreauError as exc:
            r = CheckResult(name)
            r.expect(False, reason=f"{type(exc).__name__}: {exc}")
            out.append(r)
    return out


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else repr(x)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def summary_json(results, seed: int) -> str:
    """Deterministic JSON text for a list of results (floats keep 17 significant digits)."""
    doc = {
        "seed": seed,
        "ok": all(r.ok for r in results),
        "invariants": [_plain(r.to_json()) for r in results],
    }
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"
