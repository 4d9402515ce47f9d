"""Exhaustive grid search, the independent ground truth for low-dimensional checks.

Nothing here knows about envelopes or duality maps; the oracle only scans
tensor grids, which keeps it independent of the solvers it is used to check.
"""
from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleGridError, InputError

__all__ = ["GridSpec", "grid_minimize", "grid_maximize", "grid_refine", "oracle_budget"]

DEFAULT_BUDGET = 10**7


def oracle_budget() -> int:
    """Node budget, overridable through ``PMOREAU_ORACLE_BUDGET``."""
    raw = os.environ.get("PMOREAU_ORACLE_BUDGET")
    if raw is None:
        return DEFAULT_BUDGET
    try:
        budget = int(float(raw))
    except ValueError as exc:
        raise InputError(f"PMOREAU_ORACLE_BUDGET is not a number: {raw!r}") from exc
    if budget < 1:
        raise InputError("PMOREAU_ORACLE_BUDGET must be positive")
    return budget


@dataclass(frozen=True)
class GridSpec:
    """Tensor grid ``prod_i linspace(lo_i, hi_i, points_per_axis)``."""

    lo: tuple
    hi: tuple
    points_per_axis: int

    def __post_init__(self):
        lo = tuple(float(x) for x in np.atleast_1d(self.lo))
        hi = tuple(float(x) for x in np.atleast_1d(self.hi))
        if len(lo) != len(hi) or not lo:
            raise InputError("lo and hi must be non-empty and of equal length")
        if not all(a < b for a, b in zip(lo, hi)):
            raise InputError("grid needs lo_i < hi_i on every axis")
        if int(self.points_per_axis) != self.points_per_axis or self.points_per_axis < 2:
            raise InputError("points_per_axis must be an integer >= 2")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "points_per_axis", int(self.points_per_axis))
        budget = oracle_budget()
        if self.size > budget:
            raise InputError(f"grid has {self.size} nodes, budget is {budget}")

    @property
    def dim(self) -> int:
        return len(self.lo)

    @property
    def size(self) -> int:
        return self.points_per_axis ** self.dim

    @property
    def steps(self) -> np.ndarray:
        return (np.array(self.hi) - np.array(self.lo)) / (self.points_per_axis - 1)

    @property
    def step(self) -> float:
        """Largest axis spacing."""
        return float(self.steps.max())

    def axes(self):
        return [np.linspace(a, b, self.points_per_axis) for a, b in zip(self.lo, self.hi)]

    def nodes(self) -> np.ndarray:
        """All nodes as an ``(size, dim)`` array in C (lexicographic) order."""
        mesh = np.meshgrid(*self.axes(), indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def index(self, flat: int) -> tuple:
        return np.unravel_index(flat, (self.points_per_axis,) * self.dim)

    def on_boundary(self, flat: int) -> bool:
        idx = self.index(flat)
        return any(i == 0 or i == self.points_per_axis - 1 for i in idx)

    def to_json(self) -> dict:
        return {"lo": list(self.lo), "hi": list(self.hi), "points_per_axis": self.points_per_axis}

    @classmethod
    def from_json(cls, obj) -> "GridSpec":
        return cls(tuple(obj["lo"]), tuple(obj["hi"]), obj["points_per_axis"])


def _evaluate(objective, nodes, vectorized):
    if vectorized:
        vals = np.asarray(objective(nodes), dtype=float).reshape(len(nodes))
    else:
        vals = np.fromiter((objective(x) for x in nodes), dtype=float, count=len(nodes))
    return np.where(np.isnan(vals), np.inf, vals)


def _scan(objective, grid, vectorized):
    nodes = grid.nodes()
    vals = _evaluate(objective, nodes, vectorized)
    if not np.isfinite(vals).any():
        raise InfeasibleGridError("objective is +inf on every grid node")
    k = int(np.argmin(vals))  # first occurrence = smallest node index
    return k, nodes[k].copy(), float(vals[k])


def grid_minimize(objective, grid: GridSpec, vectorized: bool = False):
    """Exhaustive minimization over the nodes of ``grid``.

    Parameters
    ----------
    objective : callable
        Maps a node (1-D array) to an extended real. With ``vectorized=True``
        it receives the whole ``(N, dim)`` node array instead.
    grid : GridSpec

    Returns
    -------
    argmin : ndarray
    minimum : float

    Ties are broken by the smallest global node index, so the result does not
    depend on evaluation order.
    """
    _, x, val = _scan(objective, grid, vectorized)
    return x, val


def grid_maximize(objective, grid: GridSpec, vectorized: bool = False):
    """Like :func:`grid_minimize` for a maximum; also returns the flat node index."""
    if vectorized:
        neg = lambda X: -np.asarray(objective(X), dtype=float)  # noqa: E731
    else:
        neg = lambda x: -objective(x)  # noqa: E731
    nodes = grid.nodes()
    vals = _evaluate(neg, nodes, vectorized)
    # -(-inf) objectives show up as +inf here
    if not np.isfinite(vals).any():
        raise InfeasibleGridError("objective is -inf on every grid node")
    k = int(np.argmin(vals))
    return nodes[k].copy(), -float(vals[k]), k


def grid_refine(objective, grid: GridSpec, rounds: int, vectorized: bool = False):
    """Zoom the grid around the incumbent ``rounds`` times.

    Each new window spans one old grid spacing on either side of the
    incumbent (clipped to the original box), which brackets the true
    minimizer of a convex objective. The incumbent value never increases.
    """
    if rounds < 1:
        raise InputError("rounds must be positive")
    x, val = grid_minimize(objective, grid, vectorized)
    lo0, hi0 = np.array(grid.lo), np.array(grid.hi)
    current = grid
    for _ in range(rounds - 1):
        steps = current.steps
        lo = np.maximum(x - steps, lo0)
        hi = np.minimum(x + steps, hi0)
        if not np.all(hi > lo) or np.any((hi - lo) <= 1e-15 * (1 + np.abs(x))):
            break
        current = GridSpec(tuple(lo), tuple(hi), grid.points_per_axis)
        x_new, val_new = grid_minimize(objective, current, vectorized)
        if val_new < val:
            x, val = x_new, val_new
    return x, val
