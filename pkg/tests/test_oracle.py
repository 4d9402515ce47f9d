import math

import numpy as np
import pytest

from pmoreau.errors import InfeasibleGridError, InputError
from pmoreau.oracle import GridSpec, grid_maximize, grid_minimize, grid_refine


def test_minimize_examples():
    x, val = grid_minimize(lambda v: (v[0] - 2) ** 2, GridSpec((0,), (4,), 401))
    assert x[0] == pytest.approx(2.0, abs=1e-12) and val == pytest.approx(0.0, abs=1e-20)
    x, val = grid_minimize(lambda v: abs(v[0]), GridSpec((-1,), (1,), 201))
    assert abs(x[0]) < 1e-12 and val < 1e-12


def test_minimize_envelope_objective():
    obj = lambda v: 0.5 * (3 - v[0]) ** 2 + abs(v[0])  # noqa: E731
    x, val = grid_minimize(obj, GridSpec((-10,), (10,), 20001))
    assert abs(x[0] - 2.0) <= 1e-3 and abs(val - 2.5) <= 1e-3


def test_refine_examples():
    x, _ = grid_refine(lambda v: (v[0] - 2) ** 2, GridSpec((0,), (4,), 41), 4)
    assert abs(x[0] - 2) <= 1e-6
    x, _ = grid_refine(lambda v: abs(v[0] - math.pi), GridSpec((0,), (10,), 101), 5)
    assert abs(x[0] - math.pi) <= 1e-6
    obj = lambda v: 0.5 * (3 - v[0]) ** 2 + abs(v[0])  # noqa: E731
    x, val = grid_refine(obj, GridSpec((-10,), (10,), 20001), 4)
    assert abs(x[0] - 2.0) <= 1e-8 and abs(val - 2.5) <= 1e-12


def test_refine_is_monotone():
    obj = lambda v: abs(v[0] - 0.123456789) + (v[1] + 0.3) ** 2  # noqa: E731
    grid = GridSpec((-1, -1), (1, 1), 21)
    vals = [grid_refine(obj, grid, r)[1] for r in range(1, 7)]
    assert all(b <= a for a, b in zip(vals, vals[1:]))
    assert vals[-1] < 1e-6  # spacing after six rounds is about 1e-6


def test_vectorized_matches_scalar():
    grid = GridSpec((-2, -1), (1, 3), 31)
    c = np.array([0.3, 0.7])
    x1, v1 = grid_minimize(lambda v: float(np.sum((v - c) ** 2)), grid)
    x2, v2 = grid_minimize(lambda V: np.sum((V - c) ** 2, axis=1), grid, vectorized=True)
    np.testing.assert_array_equal(x1, x2)
    assert v1 == v2


def test_ties_pick_smallest_index_and_deterministic():
    grid = GridSpec((-1,), (1,), 5)
    x, _ = grid_minimize(lambda v: 0.0, grid)
    assert x[0] == -1.0
    a = grid_refine(lambda v: abs(v[0] - 0.1), GridSpec((-1,), (1,), 11), 3)
    b = grid_refine(lambda v: abs(v[0] - 0.1), GridSpec((-1,), (1,), 11), 3)
    assert a[0].tobytes() == b[0].tobytes() and a[1] == b[1]


def test_nan_counts_as_infinite():
    x, val = grid_minimize(lambda v: math.nan if v[0] < 0.5 else v[0], GridSpec((0,), (1,), 11))
    assert x[0] == pytest.approx(0.5) and val == pytest.approx(0.5)


def test_infeasible_grid():
    with pytest.raises(InfeasibleGridError):
        grid_minimize(lambda v: math.inf, GridSpec((0,), (1,), 3))
    with pytest.raises(InfeasibleGridError):
        grid_maximize(lambda v: -math.inf, GridSpec((0,), (1,), 3))


def test_maximize_reports_index():
    grid = GridSpec((0,), (1,), 11)
    x, val, k = grid_maximize(lambda v: -(v[0] - 0.3) ** 2, grid)
    assert k == 3 and x[0] == pytest.approx(0.3) and not grid.on_boundary(k)
    assert grid.on_boundary(0) and grid.on_boundary(10)


def test_grid_validation(monkeypatch):
    with pytest.raises(InputError):
        GridSpec((1,), (0,), 3)
    with pytest.raises(InputError):
        GridSpec((0, 0), (1,), 3)
    with pytest.raises(InputError):
        GridSpec((0,), (1,), 1)
    monkeypatch.setenv("PMOREAU_ORACLE_BUDGET", "100")
    GridSpec((0, 0), (1, 1), 10)
    with pytest.raises(InputError):
        GridSpec((0, 0), (1, 1), 11)
    monkeypatch.setenv("PMOREAU_ORACLE_BUDGET", "lots")
    with pytest.raises(InputError):
        GridSpec((0,), (1,), 3)


def test_default_budget():
    with pytest.raises(InputError):
        GridSpec((0, 0, 0, 0), (1, 1, 1, 1), 60)  # 1.3e7 nodes


def test_grid_json_roundtrip_and_nodes():
    g = GridSpec((0.0, -1.0), (1.0, 1.0), 3)
    assert GridSpec.from_json(g.to_json()) == g
    nodes = g.nodes()
    assert nodes.shape == (9, 2)
    np.testing.assert_array_equal(nodes[1], [0.0, 0.0])  # C order: last axis fastest
    assert g.size == 9 and g.step == 1.0
