"""Finite-dimensional harness for Mosco convergence of convex sequences.

In R^n weak and strong convergence coincide, so Mosco convergence of
``f_n -> f`` is certified through strong-topology surrogates on a grid:

* liminf: along a forcing sequence ``u_n = argmin_v f_n(v) + n ||v - u||^2``
  the penalized values must not fall below ``f(u)`` in the limit;
* recovery: some ``u_hat_n -> u`` has ``limsup f_n(u_hat_n) <= f(u)``;
* for envelopes, which are locally Lipschitz, uniform convergence on compacta.

Limits along ``n`` are estimated by fitting ``m_n ~ a + b/n`` on the second
half of ``1..n_max`` and reading off ``a``.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .envelope import prox
from .functions import (
    ConvexFn,
    indicator_box,
    indicator_point,
    max_affine,
    one_norm,
    quadratic,
    translate,
    validate_convexity,
)
from .errors import InfeasibleGridError
from .oracle import GridSpec, grid_refine
from .spaces import PowerParams, SpaceSpec, norm, norm_rows

__all__ = [
    "FunctionSequence",
    "MoscoReport",
    "liminf_check",
    "recovery_check",
    "envelope_preserves",
    "diagonal_convergence",
    "superlinearity_profile",
    "conjugate_superlinearity",
    "FIXTURES",
    "fixture",
    "tail_limit",
]

INF = math.inf

SURROGATE_NOTE = (
    "finite-dimensional surrogate: weak and strong convergence coincide in R^n; "
    "liminf/recovery are checked pointwise on grid nodes and envelope convergence "
    "is checked uniformly on the grid"
)


@dataclass
class FunctionSequence:
    """Indexed family ``member(n)``, ``n >= 1``, with declared limit ``limit``."""

    member: Callable[[int], ConvexFn]
    limit: ConvexFn
    label: str
    burn_in: int = 1
    grid: Optional[GridSpec] = None
    # default eps_n for diagonal_convergence; indicator limits need it to
    # shrink fast enough for out-of-domain nodes to pass the threshold
    eps_schedule: Callable[[int], float] = field(default=lambda n: 1.0 / n)

    def validate(self, n_values=(1, 2, 8, 64), samples=50, seed=0):
        """Convexity reports for a few members and the limit."""
        reports = [validate_convexity(self.member(n), samples, seed, dim=1) for n in n_values]
        reports.append(validate_convexity(self.limit, samples, seed, dim=1))
        return reports


@dataclass
class MoscoReport:
    check: str
    fixture: str
    rows: list  # dicts with keys n / node / margin (or gap)
    violations: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    note: str = SURROGATE_NOTE

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "check": self.check,
            "fixture": self.fixture,
            "note": self.note,
            "summary": self.summary,
            "violations": self.violations,
            "rows": self.rows,
        }

    @classmethod
    def from_json(cls, obj) -> "MoscoReport":
        return cls(obj["check"], obj["fixture"], obj["rows"], obj.get("violations", []),
                   obj.get("summary", {}), obj.get("note", SURROGATE_NOTE))

    def to_csv(self) -> str:
        buf = io.StringIO()
        keys = []
        for r in self.rows:
            for k in r:
                if k not in keys:
                    keys.append(k)
        w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
        w.writeheader()
        for r in self.rows:
            w.writerow({k: _fmt(v) for k, v in r.items()})
        return buf.getvalue()


def _fmt(v):
    if isinstance(v, float):
        return format(v, ".17g")
    if isinstance(v, (list, tuple)):
        return json.dumps([float(x) for x in v])
    return v


def tail_limit(ns, values):
    """Intercept ``a`` of the least-squares fit ``values ~ a + b / n``."""
    ns = np.asarray(ns, dtype=float)
    y = np.asarray(values, dtype=float)
    if len(ns) == 1:
        return float(y[0])
    X = np.stack([np.ones_like(ns), 1.0 / ns], axis=1)
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    return float(coef[0])


def _tail(n_max):
    return list(range(max(1, n_max // 2), n_max + 1))


def _space_for(grid, space):
    return space if space is not None else SpaceSpec.euclidean(grid.dim)


def liminf_check(seq: FunctionSequence, grid: GridSpec, n_max: int, tol: float = 1e-6,
                 space: Optional[SpaceSpec] = None) -> MoscoReport:
    """Liminf inequality along forcing sequences, node by node.

    For a node ``u`` with ``f(u) < oo`` the margin is
    ``f_n(u_n) + n ||u_n - u||^2 - f(u)``; its tail limit must be ``>= -tol``.
    For ``f(u) = oo`` the forcing sequence must be unable to settle on ``u``
    at finite cost in the tail.
    """
    space = _space_for(grid, space)
    nodes = grid.nodes()
    tail = _tail(n_max)
    member_vals = {n: seq.member(n).values(nodes) for n in tail}
    # pairwise distances between nodes, reused for every n
    dist2 = norm_rows(space, (nodes[:, None, :] - nodes[None, :, :]).reshape(-1, grid.dim))
    dist2 = dist2.reshape(len(nodes), len(nodes)) ** 2
    flim = seq.limit.values(nodes)
    rows, viol = [], []
    for i, u in enumerate(nodes):
        fu = flim[i]
        margins = []
        settles = False
        for n in tail:
            fv = member_vals[n]
            pen = np.where(np.isnan(fv), INF, fv + n * dist2[i])
            if not np.isfinite(pen).any():
                margins.append(INF)
                continue
            k = int(np.argmin(pen))
            margins.append(float(pen[k] - fu) if fu < INF else float(pen[k]))
            if k == i and fv[k] < INF:
                settles = True
        if fu < INF:
            finite = [m for m in margins if m < INF]
            if len(finite) == len(margins):
                est = tail_limit(tail, margins)
            else:
                est = min(finite) if finite else INF
            rows.append({"node": u.tolist(), "margin": est, "worst_tail_margin": min(margins)})
            if est < -tol:
                viol.append({"node": u.tolist(), "margin": est})
        else:
            rows.append({"node": u.tolist(), "margin": INF, "worst_tail_margin": INF})
            if settles:
                viol.append({"node": u.tolist(), "margin": -INF, "reason": "finite values at an out-of-domain node"})
    return MoscoReport("liminf", seq.label, rows, viol,
                       {"nodes": len(nodes), "n_max": n_max, "tol": tol, "violations": len(viol)})


def recovery_check(seq: FunctionSequence, grid: GridSpec, n_max: int, tol: float = 1e-6,
                   space: Optional[SpaceSpec] = None, radius0: float = 1.0,
                   points: int = 41, rounds: int = 6) -> MoscoReport:
    """Recovery sequences ``u_hat_n`` in the shrinking boxes ``|v - u|_oo <= radius0 / sqrt(n)``.

    ``u_hat_n`` minimizes ``n |f_n(v) - f(u)| + ||v - u||`` over the box, with
    ``u`` itself always a candidate. The weight ``n`` makes matching the value
    take priority over staying close, which the shrinking box already
    enforces. The tail limit of ``f_n(u_hat_n) - f(u)`` must be ``<= tol``.
    """
    space = _space_for(grid, space)
    nodes = grid.nodes()
    tail = _tail(n_max)
    members = {n: seq.member(n) for n in tail}
    flim = seq.limit.values(nodes)
    rows, viol = [], []
    for u, fu in zip(nodes, flim):
        if fu == INF:
            rows.append({"node": u.tolist(), "margin": -INF})
            continue
        margins = []
        for n in tail:
            fn = members[n]
            r = radius0 / math.sqrt(n)

            def obj(V, fn=fn, n=n, u=u, fu=fu):
                fv = fn.values(V)
                with np.errstate(invalid="ignore"):
                    out = n * np.abs(fv - fu) + norm_rows(space, V - u)
                return np.where(np.isfinite(fv), out, INF)

            best_v, best = u, float(obj(u[None, :])[0])
            local = GridSpec(tuple(u - r), tuple(u + r), points)
            try:
                v, val = grid_refine(obj, local, rounds, vectorized=True)
                if val < best:
                    best_v = v
            except InfeasibleGridError:
                pass
            fv = fn.evaluate(best_v)
            margins.append(fv - fu if fv < INF else INF)
        if all(m < INF for m in margins):
            est = tail_limit(tail, margins)
        else:
            est = INF
        rows.append({"node": u.tolist(), "margin": est, "worst_tail_margin": max(margins)})
        if est > tol:
            viol.append({"node": u.tolist(), "margin": est})
    return MoscoReport("recovery", seq.label, rows, viol,
                       {"nodes": len(nodes), "n_max": n_max, "tol": tol, "violations": len(viol)})


def _envelope_on_grid(f, space, params, nodes):
    return np.array([prox(f, space, params, u).envelope_value for u in nodes])


def envelope_preserves(seq: FunctionSequence, space: SpaceSpec, params: PowerParams, grid: GridSpec,
                       n_max: int, tol: Optional[float] = None) -> MoscoReport:
    """``sup_grid |f_n^eps - f^eps|`` for ``n = 1..n_max``.

    Passes when the gap is non-increasing after ``seq.burn_in`` (slack 1e-12)
    and ends below ``tol`` (default ``2 / n_max``).
    """
    tol = 2.0 / n_max if tol is None else tol
    nodes = grid.nodes()
    ref = _envelope_on_grid(seq.limit, space, params, nodes)
    rows, viol = [], []
    gaps = []
    for n in range(1, n_max + 1):
        vals = _envelope_on_grid(seq.member(n), space, params, nodes)
        diff = np.abs(vals - ref)
        k = int(np.argmax(diff))
        gaps.append(float(diff[k]))
        rows.append({"n": n, "node": nodes[k].tolist(), "gap": float(diff[k])})
    for n in range(max(seq.burn_in, 1) + 1, n_max + 1):
        if gaps[n - 1] > gaps[n - 2] + 1e-12:
            viol.append({"n": n, "reason": "gap increased", "gap": gaps[n - 1], "previous": gaps[n - 2]})
    if gaps[-1] > tol:
        viol.append({"n": n_max, "reason": "final gap above tolerance", "gap": gaps[-1], "tol": tol})
    return MoscoReport("envelope_preserves", seq.label, rows, viol,
                       {"final_gap": gaps[-1], "tol": tol, "p": params.p, "eps": params.eps})


def diagonal_convergence(seq: FunctionSequence, space: SpaceSpec, p: float, eps_schedule=None,
                         grid: Optional[GridSpec] = None, n_max: int = 64, tol: Optional[float] = None,
                         threshold: float = 1e3) -> MoscoReport:
    """``f_n^{eps_n} -> f`` along a schedule ``eps_n -> 0``.

    If ``f`` is finite on the whole grid the sup gap at ``n_max`` must be
    below ``tol`` (default ``1/n_max + eps_{n_max}``). Otherwise the values at
    nodes with ``f = oo`` must exceed ``threshold`` at ``n_max``, and the gap
    is enforced only at nodes whose grid neighbours all lie in ``dom f``: at
    the edge of the domain the convergence is variational, not pointwise.
    ``eps_schedule`` and ``grid`` default to the fixture's own.
    """
    eps_schedule = seq.eps_schedule if eps_schedule is None else eps_schedule
    grid = seq.grid if grid is None else grid
    tol = 1.0 / n_max + eps_schedule(n_max) if tol is None else tol
    nodes = grid.nodes()
    flim = seq.limit.values(nodes)
    inside = flim < INF
    continuous = bool(inside.all())
    checked = inside & _interior_mask(grid, inside)
    rows, viol = [], []
    last_gap, last_min_out = 0.0, INF
    for n in range(1, n_max + 1):
        eps_n = float(eps_schedule(n))
        if not 0.0 < eps_n <= 1.0:
            raise ValueError(f"eps_schedule({n}) = {eps_n} is outside (0, 1]")
        vals = _envelope_on_grid(seq.member(n), space, PowerParams(p, eps_n), nodes)
        gap = float(np.max(np.abs(vals[checked] - flim[checked]))) if checked.any() else 0.0
        min_out = float(np.min(vals[~inside])) if not continuous else INF
        rows.append({"n": n, "eps": eps_n, "gap": gap, "min_outside": min_out})
        last_gap, last_min_out = gap, min_out
    if last_gap > tol:
        viol.append({"n": n_max, "reason": "gap above tolerance", "gap": last_gap, "tol": tol})
    if not continuous and not last_min_out > threshold:
        viol.append({"n": n_max, "reason": "no divergence outside the domain", "value": last_min_out})
    return MoscoReport("diagonal_convergence", seq.label, rows, viol,
                       {"final_gap": last_gap, "tol": tol, "min_outside": last_min_out,
                        "threshold": threshold, "p": p, "continuous_limit": continuous,
                        "gap_nodes": int(checked.sum())})


def _interior_mask(grid, inside):
    """Nodes whose axis neighbours on the grid all satisfy ``inside``."""
    shape = (grid.points_per_axis,) * grid.dim
    ok = inside.reshape(shape).copy()
    padded = np.pad(inside.reshape(shape), 1, constant_values=True)
    for ax in range(grid.dim):
        for shift in (-1, 1):
            ok &= np.roll(padded, shift, axis=ax)[(slice(1, -1),) * grid.dim]
    return ok.ravel()


def _sphere_directions(space, count=16):
    n = space.dim
    if n == 1:
        base = [np.array([1.0]), np.array([-1.0])]
    elif n == 2:
        ang = 2 * np.pi * np.arange(count) / count
        base = [np.array([math.cos(a), math.sin(a)]) for a in ang]
    else:
        rng = np.random.default_rng(7)
        base = [d / np.linalg.norm(d) for d in rng.normal(size=(count, n))]
    return [d / norm(space, d) for d in base]


def superlinearity_profile(f: ConvexFn, space: SpaceSpec, p: float, eps_set, radii):
    """Rows ``(R, min over eps and ||v|| = R of f^eps(v) / R)``.

    16 probe directions per radius (both directions only, in dimension 1).
    """
    radii = [float(r) for r in radii]
    if any(b <= a for a, b in zip(radii, radii[1:])):
        raise ValueError("radii must be increasing")
    dirs = _sphere_directions(space)
    rows = []
    for R in radii:
        worst = INF
        for e in eps_set:
            params = PowerParams(p, e)
            for d in dirs:
                worst = min(worst, prox(f, space, params, R * d).envelope_value / R)
        rows.append((R, worst))
    return rows


def conjugate_superlinearity(f: ConvexFn, space: SpaceSpec, params: PowerParams, radii=(10.0, 100.0, 1000.0)):
    """Rows ``(r, min over directions of f^{eps,*}(xi) / ||xi||_*)`` with ``||xi||_* = r``."""
    from .envelope import envelope_conjugate_analytic
    from .spaces import dual_norm

    dirs = _sphere_directions(space)
    rows = []
    for r in radii:
        worst = INF
        for d in dirs:
            xi = d / dual_norm(space, d) * r
            worst = min(worst, envelope_conjugate_analytic(f, space, params, xi) / r)
        rows.append((float(r), worst))
    return rows


# --------------------------------------------------------------------------
# shipped fixtures (one-dimensional)
# --------------------------------------------------------------------------

def _shifted_one_norm():
    return FunctionSequence(lambda n: translate(one_norm(1), [1.0 / n]), one_norm(1), "shifted_one_norm",
                            grid=GridSpec((-2.0,), (2.0,), 81))


def _scaled_quadratic():
    return FunctionSequence(lambda n: quadratic([[1.0 + 1.0 / n]]), quadratic([[1.0]]), "scaled_quadratic",
                            grid=GridSpec((-2.0,), (2.0,), 81))


def _shrinking_box():
    return FunctionSequence(lambda n: indicator_box([-1.0 - 1.0 / n], [1.0 + 1.0 / n]),
                            indicator_box([-1.0], [1.0]), "shrinking_box", grid=GridSpec((-2.0,), (2.0,), 81),
                            eps_schedule=lambda n: float(n) ** -4)


def _growing_box():
    return FunctionSequence(lambda n: indicator_box([-1.0 + 1.0 / (n + 1)], [1.0 - 1.0 / (n + 1)]),
                            indicator_box([-1.0], [1.0]), "growing_box", grid=GridSpec((-2.0,), (2.0,), 81),
                            eps_schedule=lambda n: float(n) ** -4)


def _indicator_point():
    return FunctionSequence(lambda n: indicator_point([0.0]), indicator_point([0.0]), "indicator_point",
                            grid=GridSpec((-2.0,), (2.0,), 5), eps_schedule=lambda n: 1.0 / n**2)


def _converging_max_affine():
    return FunctionSequence(lambda n: max_affine([(1.0 + 1.0 / n, 0.0), (-1.0, 0.0)]),
                            max_affine([(1.0, 0.0), (-1.0, 0.0)]), "converging_max_affine",
                            grid=GridSpec((-2.0,), (2.0,), 81))


def _constant_one_norm():
    return FunctionSequence(lambda n: one_norm(1), one_norm(1), "constant_one_norm",
                            grid=GridSpec((-2.0,), (2.0,), 81))


FIXTURES = {
    "shifted_one_norm": _shifted_one_norm,
    "scaled_quadratic": _scaled_quadratic,
    "shrinking_box": _shrinking_box,
    "growing_box": _growing_box,
    "indicator_point": _indicator_point,
    "converging_max_affine": _converging_max_affine,
    "constant_one_norm": _constant_one_norm,
}


def fixture(name: str) -> FunctionSequence:
    try:
        return FIXTURES[name]()
    except KeyError:
        raise KeyError(f"unknown Mosco fixture {name!r}; known: {sorted(FIXTURES)}") from None
