import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pmoreau.envelope import (
    ProxSolution,
    assertion_i_gap,
    convergence_profile,
    envelope_conjugate,
    envelope_function,
    envelope_value,
    eps_derivative,
    eps_monotonicity_profile,
    gateaux_directional_check,
    kernel_conjugate_numeric,
    minimal_section,
    prox,
)
from pmoreau.errors import DomainError, InputError, ParameterError, SolverFailure
from pmoreau.functions import (
    ConvexFn,
    indicator_box,
    indicator_point,
    max_affine,
    one_norm,
    power_of_norm,
    quadratic,
    zero,
)
from pmoreau.oracle import GridSpec, grid_refine
from pmoreau.spaces import PowerParams, SpaceSpec, norm

E1 = SpaceSpec.euclidean(1)
E2 = SpaceSpec.euclidean(2)
HALF_SQ = quadratic([[1.0]])  # v^2 / 2


def oracle_prox(f, space, params, u, half_width=10.0, points=2001, rounds=5):
    """Independent minimizer of the envelope objective by grid refinement."""
    u = np.atleast_1d(np.asarray(u, dtype=float))
    c = 1.0 / (params.p * params.eps ** (params.p - 1))
    obj = lambda v: c * norm(space, u - v) ** params.p + f.evaluate(v)  # noqa: E731
    n = u.size
    grid = GridSpec(tuple(u - half_width), tuple(u + half_width), points if n == 1 else 201)
    return grid_refine(obj, grid, rounds)


# -- prox -------------------------------------------------------------------

def test_prox_one_norm_example():
    sol = prox(one_norm(1), E1, PowerParams(2, 1), [3.0])
    assert sol.minimizer[0] == pytest.approx(2.0, abs=1e-12)
    assert sol.envelope_value == pytest.approx(2.5, abs=1e-12)
    assert sol.derivative[0] == pytest.approx(1.0, abs=1e-12)
    x, val = oracle_prox(one_norm(1), E1, PowerParams(2, 1), [3.0])
    assert abs(x[0] - 2.0) <= 1e-6 and abs(val - 2.5) <= 1e-9


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
def test_prox_zero(p):
    sol = prox(zero(2), E2, PowerParams(p, 0.7), [1.5, -2.0])
    np.testing.assert_array_equal(sol.minimizer, [1.5, -2.0])
    assert sol.envelope_value == 0.0
    np.testing.assert_array_equal(sol.derivative, 0.0)


def test_prox_indicator_point_example():
    sol = prox(indicator_point([0.0]), E1, PowerParams(3, 2), [2.0])
    assert sol.minimizer[0] == 0.0
    assert sol.envelope_value == pytest.approx(2 / 3, rel=1e-14)


@pytest.mark.parametrize("f,u", [
    (one_norm(1), 0.4), (one_norm(1), -5.0), (HALF_SQ, 2.0),
    (indicator_box([-1.0], [0.5]), 3.0), (max_affine([(-1.0, 0.0), (2.0, -1.0)]), 1.7),
    (power_of_norm(2.5, E1), -1.2),
])
@pytest.mark.parametrize("p,eps", [(1.5, 0.5), (2.0, 1.0), (3.0, 2.0)])
def test_prox_1d_against_oracle(f, u, p, eps):
    params = PowerParams(p, eps)
    sol = prox(f, E1, params, [u])
    _, val = oracle_prox(f, E1, params, [u], rounds=6)
    assert sol.envelope_value <= val + 1e-10 * (1 + abs(val))
    assert val - sol.envelope_value <= 1e-8 * (1 + abs(val))
    assert sol.optimality_gap <= 1e-6


@pytest.mark.parametrize("space", [E2, SpaceSpec.q_norm(2, 3.0), SpaceSpec.weighted([1.0, 4.0])],
                         ids=["l2", "l3", "weighted"])
@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
def test_prox_2d_against_oracle(space, p):
    f = max_affine([(np.array([1.0, 0.0]), 0.0), (np.array([-1.0, 2.0]), -0.5), (np.zeros(2), 0.2)])
    params = PowerParams(p, 0.8)
    u = np.array([1.3, -0.4])
    sol = prox(f, space, params, u)
    _, val = oracle_prox(f, space, params, u, half_width=4.0, rounds=7)
    assert sol.envelope_value <= val + 1e-10 * (1 + abs(val))
    assert val - sol.envelope_value <= 1e-7 * (1 + abs(val))
    assert sol.optimality_gap <= 1e-6


def test_solution_invariants():
    rng = np.random.default_rng(5)
    f = one_norm(2)
    for _ in range(10):
        u = rng.normal(scale=3, size=2)
        p, eps = rng.choice([1.5, 2.0, 3.0]), rng.uniform(0.1, 3.0)
        params = PowerParams(p, eps)
        sol = prox(f, E2, params, u)
        d = sol.minimizer - u
        expected = norm(E2, d) ** p / (p * eps ** (p - 1)) + f(sol.minimizer)
        assert abs(sol.envelope_value - expected) <= 1e-10 * (1 + abs(expected))
        w = -d / eps
        np.testing.assert_allclose(sol.derivative, norm(E2, w) ** (p - 2) * w if norm(E2, w) else 0 * w,
                                   rtol=1e-12, atol=1e-15)


def test_nonconvergent_solver_raises():
    # a lying subgradient oracle cannot be certified
    liar = ConvexFn(
        label="liar",
        evaluate=lambda v: float(abs(v[0]) + abs(v[1])),
        subgradient=lambda v: np.array([5.0, -5.0]),
        domain_contains=lambda v: True,
        anchor=lambda n: np.zeros(n),
        dim=2,
    )
    with pytest.raises(SolverFailure) as info:
        prox(liar, E2, PowerParams(2, 1), [3.0, 1.0])
    assert info.value.best is not None


def test_degenerate_eps_rejected():
    with pytest.raises(ParameterError):
        PowerParams(2.0, 1e-11)


def test_prox_solution_roundtrip():
    sol = prox(one_norm(1), E1, PowerParams(2.5, 0.3), [1.7])
    back = ProxSolution.from_json(sol.to_json())
    assert back.to_json() == sol.to_json()
    with pytest.raises(InputError):
        ProxSolution.from_json({**sol.to_json(), "solver": "magic"})


# -- assertions -------------------------------------------------------------

def test_assertion_i_examples():
    params = PowerParams(3, 2)
    f = indicator_point([0.0])
    assert assertion_i_gap(prox(f, E1, params, [2.0]), f, E1, params) <= 1e-12
    z = zero(1)
    assert assertion_i_gap(prox(z, E1, params, [2.0]), z, E1, params) == 0.0
    params = PowerParams(2, 1)
    f = one_norm(1)
    assert assertion_i_gap(prox(f, E1, params, [3.0]), f, E1, params) <= 1e-10


def test_gateaux_examples():
    a, n = gateaux_directional_check(zero(1), E1, PowerParams(2, 1), [0.3], [1.0])
    assert a == 0.0 and abs(n) <= 1e-9
    a, n = gateaux_directional_check(HALF_SQ, E1, PowerParams(2, 1), [2.0], [1.0])
    assert a == pytest.approx(1.0, abs=1e-12) and abs(a - n) <= 1e-4 * (1 + abs(a))
    a, n = gateaux_directional_check(one_norm(1), E1, PowerParams(2, 1), [3.0], [1.0])
    assert a == pytest.approx(1.0, abs=1e-12) and abs(n - 1.0) <= 1e-4
    with pytest.raises(InputError):
        gateaux_directional_check(zero(2), E2, PowerParams(2, 1), [0.0, 0.0], [1.0, 1.0])


def test_eps_derivative_examples():
    assert eps_derivative(indicator_point([0.0]), E1, 2, [3.0], 1.0) == pytest.approx(-4.5, rel=1e-14)
    assert eps_derivative(zero(1), E1, 2, [3.0], 1.0) == 0.0
    assert eps_derivative(one_norm(1), E1, 2, [3.0], 1.0) == pytest.approx(-0.5, rel=1e-12)


@pytest.mark.parametrize("f,u,p,eps", [
    (one_norm(1), 3.0, 2.0, 1.0), (HALF_SQ, 2.0, 3.0, 0.5), (indicator_box([0.0], [1.0]), -2.0, 1.5, 0.8),
])
def test_eps_derivative_matches_finite_difference(f, u, p, eps):
    d = eps_derivative(f, E1, p, [u], eps)
    h = 1e-4 * eps
    fd = (envelope_value(f, E1, PowerParams(p, eps + h), [u])
          - envelope_value(f, E1, PowerParams(p, eps - h), [u])) / (2 * h)
    assert abs(d - fd) <= 1e-3 * abs(d)


def test_eps_monotonicity_examples():
    prof = eps_monotonicity_profile(one_norm(1), E1, 2, [3.0], [2.0, 1.0, 0.5])
    np.testing.assert_allclose([r[1] for r in prof.rows], [2.0, 2.5, 2.75], atol=1e-12)
    np.testing.assert_allclose([r[2] for r in prof.rows], [2.0, 1.0, 0.5], atol=1e-12)
    assert prof.ok
    prof = eps_monotonicity_profile(zero(1), E1, 2, [3.0], [2.0, 1.0])
    assert [r[1] for r in prof.rows] == [0.0, 0.0]
    prof = eps_monotonicity_profile(HALF_SQ, E1, 2, [2.0], [1.0, 0.5])
    np.testing.assert_allclose([r[1] for r in prof.rows], [1.0, 4 / 3], rtol=1e-12)
    with pytest.raises(InputError):
        eps_monotonicity_profile(HALF_SQ, E1, 2, [2.0], [0.5, 1.0])


def test_convergence_examples():
    eps = [1.0, 0.5, 0.25, 0.125]
    prof = convergence_profile(one_norm(1), E1, 2, [3.0], eps)
    for e, gap, _, bound in prof.rows:
        assert abs(gap - e / 2) <= 1e-10 and abs(bound - e / 2) <= 1e-10
    assert prof.ok and prof.in_domain
    prof = convergence_profile(zero(1), E1, 2, [3.0], eps)
    assert all(r[1] == 0 and r[3] == 0 for r in prof.rows)
    prof = convergence_profile(HALF_SQ, E1, 2, [0.0], eps)
    assert all(r[1] == 0 and r[2] == 0 for r in prof.rows)


def test_convergence_outside_domain_diverges():
    prof = convergence_profile(indicator_box([0.0], [1.0]), E1, 2, [30.0], [1.0, 1e-2, 1e-4])
    assert not prof.in_domain and prof.ok
    prof = convergence_profile(indicator_box([0.0], [1.0]), E1, 2, [1.1], [1.0, 0.5])
    assert not prof.ok  # 0.01 / (2 * 0.5) is far below the divergence threshold


def test_minimal_section_examples():
    A0, prof = minimal_section(one_norm(1), E1, PowerParams(2, 1), [0.0], [1.0, 0.1, 0.01])
    assert A0[0] == 0.0 and all(d == 0.0 for _, d in prof)
    A0, prof = minimal_section(one_norm(1), E1, PowerParams(2, 1), [2.0], [1.5, 1.0, 0.1])
    assert A0[0] == 1.0 and all(d <= 1e-12 for _, d in prof)
    A0, prof = minimal_section(max_affine([(1.0, 0.0), (2.0, 0.0)]), E1, PowerParams(2, 1), [0.0],
                               [1.0, 0.1, 0.01, 0.001])
    assert A0[0] == 1.0
    assert prof[-1][1] <= prof[0][1] and prof[-1][1] <= 1e-2
    with pytest.raises(DomainError):
        minimal_section(indicator_box([0.0], [1.0]), E1, PowerParams(2, 1), [3.0], [1.0])


def test_envelope_conjugate_examples():
    grid = GridSpec((-20,), (20,), 4001)
    a, n = envelope_conjugate(HALF_SQ, PowerParams(2, 1), [1.0], grid)
    assert a == pytest.approx(1.0, abs=1e-14) and abs(n - 1.0) <= 1e-4
    a, n = envelope_conjugate(HALF_SQ, PowerParams(2, 1), [0.0], grid)
    assert a == 0.0 and abs(n) <= 1e-12
    a, n = envelope_conjugate(one_norm(1), PowerParams(2, 1), [0.5], grid)
    assert a == pytest.approx(0.125, abs=1e-14)
    assert abs(a - n) <= 2 * grid.step * 1.5 + 1e-6


@pytest.mark.parametrize("p,eps,xi", [(2.0, 1.0, 1.3), (3.0, 0.5, -2.0), (1.5, 2.0, 0.7)])
def test_kernel_conjugate(p, eps, xi):
    p_star = p / (p - 1)
    assert kernel_conjugate_numeric(p, eps, xi) == pytest.approx(eps / p_star * abs(xi) ** p_star, rel=1e-9)


def test_envelope_function_wraps_prox():
    fe = envelope_function(one_norm(1), E1, PowerParams(2, 1))
    assert fe([3.0]) == pytest.approx(2.5) and fe.subgradient(np.array([3.0]))[0] == pytest.approx(1.0)
    assert fe.differentiable and fe.domain_contains(np.array([1e9]))


# -- properties -------------------------------------------------------------

CATALOG_1D = [one_norm(1), HALF_SQ, indicator_box([-1.0], [0.5]), max_affine([(-1.0, 0.0), (2.0, -1.0)]),
              power_of_norm(3.0, E1), indicator_point([0.25])]
coord = st.floats(min_value=-4, max_value=4, allow_nan=False)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, len(CATALOG_1D) - 1), st.sampled_from([1.5, 2.0, 3.0]), coord,
       st.floats(0.05, 3.0), st.floats(0.05, 3.0))
def test_sandwich(k, p, u, e1, e2):
    f = CATALOG_1D[k]
    e1, e2 = max(e1, e2), min(e1, e2)
    s1 = prox(f, E1, PowerParams(p, e1), [u])
    s2 = prox(f, E1, PowerParams(p, e2), [u])
    assert f(s1.minimizer) <= s1.envelope_value + 1e-9
    assert s1.envelope_value <= s2.envelope_value + 1e-9
    if f(u) < math.inf:
        assert s2.envelope_value <= f(u) + 1e-9


@settings(max_examples=40, deadline=None)
@given(st.integers(0, len(CATALOG_1D) - 1), st.sampled_from([1.5, 2.0, 3.0]), coord, coord)
def test_envelope_midpoint_convexity_and_subgradient(k, p, u, v):
    f = CATALOG_1D[k]
    params = PowerParams(p, 0.7)
    su, sv = prox(f, E1, params, [u]), prox(f, E1, params, [v])
    mid = envelope_value(f, E1, params, [(u + v) / 2])
    assert mid <= (su.envelope_value + sv.envelope_value) / 2 + 1e-8
    lin = su.envelope_value + float(su.derivative @ (np.array([v]) - u))
    assert sv.envelope_value >= lin - 1e-8 * (1 + abs(lin))


@settings(max_examples=30, deadline=None)
@given(coord, coord)
def test_strict_convexity_inherited(u, v):
    if abs(u - v) < 0.1:
        return
    params = PowerParams(2.5, 0.5)
    vals = [envelope_value(HALF_SQ, E1, params, [x]) for x in (u, v, (u + v) / 2)]
    assert vals[2] < (vals[0] + vals[1]) / 2
