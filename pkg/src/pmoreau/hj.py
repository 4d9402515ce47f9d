"""Lax-Oleinik solutions of the Hamilton-Jacobi equation and their residuals.

The envelope with parameter ``eps = t`` solves::

    du/dt + (1/p*) ||d_x u||_*^(p*) = 0,    u(0+, x) = f(x)

and this module evaluates it on space-time grids and measures how well
finite differences of the result satisfy the equation.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .envelope import envelope_function, prox
from .errors import InputError
from .functions import ConvexFn
from .oracle import GridSpec
from .spaces import PowerParams, SpaceSpec, dual_norm

__all__ = [
    "SpaceTimeField",
    "lax_oleinik",
    "hj_residual",
    "semigroup_gap",
    "monotone_in_t_violations",
    "KINK_FACTOR",
]

KINK_FACTOR = 10.0


@dataclass
class SpaceTimeField:
    """Values ``u(t, x)`` on ``t_values x x_grid``.

    ``values`` has shape ``(len(t_values), points_per_axis, ...)`` with one
    trailing axis per space dimension.
    """

    x_grid: GridSpec
    t_values: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self.t_values = np.asarray(self.t_values, dtype=float)
        if self.x_grid.dim not in (1, 2):
            raise InputError("space-time fields support dimension 1 or 2")
        if self.t_values.ndim != 1 or not np.all(self.t_values > 0):
            raise InputError("t_values must be positive")
        if np.any(np.diff(self.t_values) <= 0):
            raise InputError("t_values must be strictly increasing")
        shape = (len(self.t_values),) + (self.x_grid.points_per_axis,) * self.x_grid.dim
        self.values = np.asarray(self.values, dtype=float).reshape(shape)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t"] + [f"x{i}" for i in range(self.x_grid.dim)] + ["u"])
        nodes = self.x_grid.nodes()
        for t, row in zip(self.t_values, self.values.reshape(len(self.t_values), -1)):
            for x, u in zip(nodes, row):
                w.writerow([format(t, ".17g")] + [format(c, ".17g") for c in x] + [format(u, ".17g")])
        return buf.getvalue()

    def to_json(self) -> dict:
        return {
            "x_grid": self.x_grid.to_json(),
            "t_values": [float(t) for t in self.t_values],
            "values": self.values.reshape(len(self.t_values), -1).tolist(),
        }

    @classmethod
    def from_json(cls, obj) -> "SpaceTimeField":
        return cls(GridSpec.from_json(obj["x_grid"]), obj["t_values"], obj["values"])


def lax_oleinik(f: ConvexFn, p: float, x_grid: GridSpec, t_values, space: SpaceSpec = None) -> SpaceTimeField:
    """``u(t, x) = f_t(x)``, the envelope of ``f`` with ``eps = t``, on a grid."""
    if space is None:
        space = SpaceSpec.euclidean(x_grid.dim)
    if space.dim != x_grid.dim:
        raise InputError("space and grid dimensions differ")
    t_values = np.asarray(t_values, dtype=float)
    nodes = x_grid.nodes()
    vals = np.empty((len(t_values), len(nodes)))
    for i, t in enumerate(t_values):
        params = PowerParams(p, t)
        for j, x in enumerate(nodes):
            vals[i, j] = prox(f, space, params, x).envelope_value
    return SpaceTimeField(x_grid, t_values, vals)


def hj_residual(field: SpaceTimeField, space: SpaceSpec, p: float, kink_factor: float = KINK_FACTOR):
    """Finite-difference residual of the Hamilton-Jacobi equation.

    Central differences in ``t`` and along each space axis at interior
    nodes give ``r = u_t + (1/p*) ||d_x u||_*^(p*)``. Nodes where a raw
    second difference exceeds ``kink_factor * h`` (``h`` the largest step)
    are treated as kinks and skipped.

    Returns
    -------
    max_residual : float
    interior_count : int
        Number of interior nodes that entered the maximum.
    kink_count : int
        Number of interior nodes excluded as kinks.
    """
    nt = len(field.t_values)
    m = field.x_grid.points_per_axis
    if nt < 3 or m < 3:
        raise InputError("need at least 3 time values and 3 nodes per axis")
    dts = np.diff(field.t_values)
    if not np.allclose(dts, dts[0], rtol=1e-9, atol=0.0):
        raise InputError("t_values must be equally spaced")
    dt = dts[0]
    dxs = field.x_grid.steps
    h = max(dt, float(dxs.max()))
    p_star = p / (p - 1.0)
    U = field.values
    dim = field.x_grid.dim
    inner = (slice(1, -1),) * (1 + dim)

    def shifted(axis, k):
        sl = [slice(1, -1)] * (1 + dim)
        sl[axis] = slice(1 + k, U.shape[axis] - 1 + k)
        return U[tuple(sl)]

    ut = (shifted(0, 1) - shifted(0, -1)) / (2 * dt)
    grads = [(shifted(a + 1, 1) - shifted(a + 1, -1)) / (2 * dxs[a]) for a in range(dim)]
    second = [np.abs(shifted(a, 1) - 2 * U[inner] + shifted(a, -1)) for a in range(1 + dim)]
    kink = np.zeros(ut.shape, dtype=bool)
    for s2 in second:
        kink |= s2 > kink_factor * h
    G = np.stack([g.ravel() for g in grads], axis=1)
    dn = np.array([dual_norm(space, g) for g in G]).reshape(ut.shape)
    r = np.abs(ut + dn ** p_star / p_star)
    smooth = ~kink & np.isfinite(r)
    max_r = float(r[smooth].max()) if smooth.any() else 0.0
    return max_r, int(smooth.sum()), int(kink.sum())


def semigroup_gap(f: ConvexFn, space: SpaceSpec, p: float, x, t: float, s: float) -> float:
    """``|f_{t+s}(x) - (f_t)_s(x)|``; nested envelopes share the same ``p``."""
    direct = prox(f, space, PowerParams(p, t + s), x).envelope_value
    inner = envelope_function(f, space, PowerParams(p, t))
    nested = prox(inner, space, PowerParams(p, s), x).envelope_value
    return abs(direct - nested)


def monotone_in_t_violations(field: SpaceTimeField, slack: float = 1e-9) -> int:
    """Count of ``(t, x)`` where ``u`` increases from one time level to the next."""
    d = np.diff(field.values, axis=0)
    return int(np.sum(d > slack))
