"""The p-Moreau-Yosida envelope and its proximal point.

For a proper convex ``f``, ``p > 1`` and ``eps > 0``::

    f_eps(u) = min_v  (eps/p) ||(u - v)/eps||^p + f(v)
    u_eps    = J_eps(u) = the minimizer
    A_eps(u) = -F^p((u_eps - u)/eps)          (derivative of f_eps at u)

where ``F^p`` is the p-duality map of the ambient norm. Each proximal point
is certified through the Euler-Lagrange inclusion ``A_eps(u) in df(u_eps)``,
tested as a sampled subgradient inequality around ``u_eps``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DomainError, InputError, SolverFailure
from .functions import ConvexFn, conjugate_numeric, minimal_element, subgradient_select
from .oracle import GridSpec
from .spaces import (
    PowerParams,
    SpaceSpec,
    as_vector,
    dual_norm,
    duality_map_p,
    euclidean_bound_factor,
    norm,
    pairing,
)

__all__ = [
    "ProxSolution",
    "prox",
    "envelope_value",
    "envelope_function",
    "assertion_i_gap",
    "gateaux_directional_check",
    "eps_derivative",
    "eps_monotonicity_profile",
    "convergence_profile",
    "minimal_section",
    "envelope_conjugate",
    "kernel_conjugate_numeric",
    "certify",
    "EpsProfile",
    "ConvergenceProfile",
]

INF = math.inf
CERT_TOL = 1e-6
PROBE_RADII = (1e-3, 1e-2, 0.1, 1.0)
SOLVERS = ("closed_form", "ternary_1d", "subgradient_nd", "oracle_grid")


@dataclass
class ProxSolution:
    minimizer: np.ndarray
    envelope_value: float
    derivative: np.ndarray
    optimality_gap: float
    solver: str
    iterations: int = 0

    def to_json(self) -> dict:
        return {
            "minimizer": [float(x) for x in self.minimizer],
            "envelope_value": float(self.envelope_value),
            "derivative": [float(x) for x in self.derivative],
            "optimality_gap": float(self.optimality_gap),
            "solver": self.solver,
            "iterations": int(self.iterations),
        }

    @classmethod
    def from_json(cls, obj) -> "ProxSolution":
        if obj.get("solver") not in SOLVERS:
            raise InputError(f"unknown solver label {obj.get('solver')!r}")
        return cls(
            minimizer=np.asarray(obj["minimizer"], dtype=float),
            envelope_value=float(obj["envelope_value"]),
            derivative=np.asarray(obj["derivative"], dtype=float),
            optimality_gap=float(obj["optimality_gap"]),
            solver=obj["solver"],
            iterations=int(obj["iterations"]),
        )


def _kernel(space, params, d):
    """(eps/p) ||d/eps||^p, the regularizing kernel at displacement d."""
    return params.eps / params.p * norm(space, d / params.eps) ** params.p


def _probe_directions(n):
    dirs = [np.eye(n)[i] for i in range(min(n, 8))]
    rng = np.random.default_rng(20240601)
    while len(dirs) < 8:
        d = rng.normal(size=n)
        dirs.append(d / np.linalg.norm(d))
    return dirs


_DIRECTION_CACHE: dict = {}


def certify(f: ConvexFn, x, A) -> float:
    """Largest violation of ``f(w) >= f(x) + <A, w - x>`` over 64 probes.

    Probes are ``x +- r d`` for 8 unit directions ``d`` and radii
    ``r in {1e-3, 1e-2, 0.1, 1} * (1 + ||x||_2)``.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    dirs = _DIRECTION_CACHE.get(n)
    if dirs is None:
        dirs = _DIRECTION_CACHE.setdefault(n, _probe_directions(n))
    fx = f.evaluate(x)
    if not fx < INF:
        return INF
    scale = 1.0 + float(np.linalg.norm(x))
    key = ("steps", n)
    unit = _DIRECTION_CACHE.get(key)
    if unit is None:
        unit = np.array([sgn * r * d for r in PROBE_RADII for d in dirs for sgn in (1.0, -1.0)])
        _DIRECTION_CACHE[key] = unit
    steps = scale * unit
    fw = f.values(x + steps)
    viol = fx + steps @ A - fw
    viol = viol[np.isfinite(fw)]
    worst = max(0.0, float(viol.max())) if viol.size else 0.0
    return worst


# --------------------------------------------------------------------------
# inner solvers
# --------------------------------------------------------------------------


def _radius_bound(f, space, params, u, center):
    """Radius R with ||u_eps - u|| <= R, from a subgradient at a domain point.

    With phi(v) = kernel(u - v) + f(v), a domain point ``a`` and xi in df(a):
    kernel(u - x) <= kernel(u - a) + ||xi||_* (||x - u|| + ||u - a||),
    and the left side grows like ||x - u||^p.
    """
    p, eps = params.p, params.eps
    xi = f.subgradient(center)
    L = dual_norm(space, xi)
    off = norm(space, u - center)
    K = _kernel(space, params, u - center) + L * off
    if K == 0.0 and L == 0.0:
        return 0.0
    c = 1.0 / (p * eps ** (p - 1.0))
    r = max(off, 1e-12, (K / c) ** (1.0 / p) if K > 0 else 0.0, (L / c) ** (1.0 / (p - 1.0)))
    while c * r**p <= K + L * r:
        r *= 2.0
    return r


def _start_point(f, u):
    if f.domain_contains(u):
        return u.copy()
    return np.asarray(f.anchor(u.size), dtype=float)


def _ternary_1d(f, space, params, u, max_iter=200, width_tol=1e-12):
    """Golden-section search on the convex objective over a certified bracket."""
    c = _start_point(f, u)
    R = _radius_bound(f, space, params, u, c)
    if R == 0.0:
        return u.copy(), 0
    R = R * euclidean_bound_factor(space) * (1.0 + 1e-9) + 1e-14 * (1.0 + abs(u[0]))

    def phi(t):
        v = np.array([t])
        fv = f.evaluate(v)
        return INF if fv == INF else _kernel(space, params, u - v) + fv

    a, b = u[0] - R, u[0] + R
    best_t, best_val = c[0], phi(c[0])
    gr = (math.sqrt(5.0) - 1.0) / 2.0
    m1 = b - gr * (b - a)
    m2 = a + gr * (b - a)
    f1, f2 = phi(m1), phi(m2)
    it = 0
    tol = width_tol * max(1.0, abs(u[0]), R)
    while it < max_iter and (b - a) > tol:
        it += 1
        for t, val in ((m1, f1), (m2, f2)):
            if val < best_val:
                best_t, best_val = t, val
        if f1 == INF and f2 == INF:
            # the domain is an interval containing best_t
            if best_t < m1:
                b = m1
            elif best_t > m2:
                a = m2
            else:
                a, b = m1, m2
            m1 = b - gr * (b - a)
            m2 = a + gr * (b - a)
            f1, f2 = phi(m1), phi(m2)
        elif f1 < f2:
            b, m2, f2 = m2, m1, f1
            m1 = b - gr * (b - a)
            f1 = phi(m1)
        else:
            a, m1, f1 = m1, m2, f2
            m2 = a + gr * (b - a)
            f2 = phi(m2)
    for t in (m1, m2, 0.5 * (a + b)):
        val = phi(t)
        if val < best_val:
            best_t, best_val = t, val
    t, extra = _polish_1d(f, space, params, u, best_t, best_val, phi, R)
    return np.array([t]), it + extra


def _polish_1d(f, space, params, u, t0, val0, phi, R):
    """Bisection on the sign of a subgradient of the objective near ``t0``.

    Golden section stalls where objective differences drop below rounding;
    the subgradient selection is monotone, so its sign change pins the
    minimizer to machine precision. Falls back to ``t0`` if the sign change
    is not bracketed.
    """

    def slope(t):
        v = np.array([t])
        if not f.domain_contains(v):
            return -INF if t < t0 else INF
        g = duality_map_p(space, params.p, (v - u) / params.eps) + f.subgradient(v)
        return float(g[0])

    half = 1e-6 * max(1.0, abs(t0), R)
    lo, hi = t0 - half, t0 + half
    s_lo, s_hi = slope(lo), slope(hi)
    if not (s_lo <= 0.0 <= s_hi):
        return t0, 0
    n = 0
    while n < 100 and hi - lo > 0.0:
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        n += 1
        s = slope(mid)
        if s == 0.0:
            lo = hi = mid
            break
        if s < 0.0:
            lo = mid
        else:
            hi = mid
    mid = 0.5 * (lo + hi)
    # objective values near the minimum agree to rounding; trust the sign change
    if phi(mid) <= val0 + 1e-13 * (1.0 + abs(val0)):
        return mid, n
    return t0, n


def _subgradient_nd(f, space, params, u, max_iter=5000):
    """Central-cut ellipsoid method on phi(v) = kernel(u - v) + f(v).

    Only subgradients of phi are used. The initial ball comes from
    :func:`_radius_bound`; the iteration stops once the ellipsoid has shrunk
    to rounding level around the minimizer. A stop on the value bound
    ``sqrt(g.P.g)`` would come too early: near a smooth minimum the value
    settles long before the point does.
    """
    n = u.size
    c = _start_point(f, u)
    R = _radius_bound(f, space, params, u, c)
    if R == 0.0:
        return u.copy(), 0
    R = R * euclidean_bound_factor(space) * 1.01 + 1e-12
    x = u.copy()
    P = (R * R) * np.eye(n)
    best_x = c.copy()
    fc = f.evaluate(c)
    best_val = _kernel(space, params, u - c) + fc
    k1 = 1.0 / (n + 1.0)
    k2 = n * n / (n * n - 1.0)
    it = 0
    for it in range(1, max_iter + 1):
        fx = f.evaluate(x)
        if fx == INF:
            # steer back toward the best finite point
            g = x - best_x
        else:
            val = _kernel(space, params, u - x) + fx
            if val < best_val:
                best_x, best_val = x.copy(), val
            g = duality_map_p(space, params.p, (x - u) / params.eps) + f.subgradient(x)
        Pg = P @ g
        gPg = float(g @ Pg)
        if not gPg > 0.0:
            break
        gt = Pg / math.sqrt(gPg)
        x = x - k1 * gt
        P = k2 * (P - 2.0 * k1 * np.outer(gt, gt))
        P = 0.5 * (P + P.T)
        diag = np.diag(P)
        if not diag.min() > 0.0 or math.sqrt(diag.max()) <= 1e-15 * (1.0 + np.linalg.norm(x)):
            break
    # values of points within ~1e-8 of the minimizer tie to rounding, so the
    # best-value iterate is a poor point estimate; prefer the final center
    fx = f.evaluate(x)
    if fx < INF and _kernel(space, params, u - x) + fx <= best_val + 1e-13 * (1.0 + abs(best_val)):
        best_x = x.copy()
    return best_x, it


def prox(f: ConvexFn, space: SpaceSpec, params: PowerParams, u, tol: float = CERT_TOL) -> ProxSolution:
    """Proximal point, envelope value and derivative of ``f`` at ``u``.

    Dispatch: the closed form registered on ``f`` when it applies, golden
    section search in dimension 1, the ellipsoid subgradient solver otherwise.

    Raises
    ------
    SolverFailure
        If the result does not pass the probe certificate at tolerance
        ``tol * (1 + |f(u_eps)|)``.
    """
    u = as_vector(space, u)
    f.check_dim(space.dim)
    x = None
    solver, iters = "closed_form", 0
    if f.prox_closed_form is not None:
        x = f.prox_closed_form(space, params, u)
    if x is None:
        if space.dim == 1:
            solver = "ternary_1d"
            x, iters = _ternary_1d(f, space, params, u)
        else:
            solver = "subgradient_nd"
            x, iters = _subgradient_nd(f, space, params, u)
    x = np.asarray(x, dtype=float)
    fx = f.evaluate(x)
    A = -duality_map_p(space, params.p, (x - u) / params.eps)
    if not fx < INF:
        raise SolverFailure(f"{solver} returned a point outside the domain of {f.label}", best=x, gap=INF)
    value = _kernel(space, params, u - x) + fx
    gap = certify(f, x, A)
    if gap > tol * (1.0 + abs(fx)):
        raise SolverFailure(
            f"{solver} could not certify the proximal point of {f.label} at u={u} (gap {gap:.3e})",
            best=x, gap=gap,
        )
    return ProxSolution(x, value, A, gap, solver, iters)


def envelope_value(f, space, params, u) -> float:
    return prox(f, space, params, u).envelope_value


def envelope_function(f: ConvexFn, space: SpaceSpec, params: PowerParams) -> ConvexFn:
    """``f_eps`` packaged as a :class:`ConvexFn` (finite everywhere)."""

    def value(v):
        return prox(f, space, params, v).envelope_value

    def grad(v):
        return prox(f, space, params, v).derivative

    conj = None
    if f.conjugate_analytic is not None:
        conj = lambda xi: envelope_conjugate_analytic(f, space, params, xi)  # noqa: E731

    return ConvexFn(
        label=f"{f.label} envelope(p={params.p:g}, eps={params.eps:g})",
        evaluate=value,
        subgradient=grad,
        domain_contains=lambda v: True,
        anchor=f.anchor,
        dim=space.dim,
        conjugate_analytic=conj,
        strictly_convex=f.strictly_convex,
        differentiable=True,
        extras={"base": f, "space": space, "params": params},
    )


# --------------------------------------------------------------------------
# assertions about the envelope
# --------------------------------------------------------------------------


def assertion_i_gap(sol: ProxSolution, f: ConvexFn, space: SpaceSpec, params: PowerParams) -> float:
    """``|f_eps(u) - (eps/p) ||A_eps(u)||_*^{p*} - f(u_eps)|``."""
    rhs = params.eps / params.p * dual_norm(space, sol.derivative) ** params.p_star
    return abs(sol.envelope_value - rhs - f.evaluate(sol.minimizer))


def gateaux_directional_check(f, space, params, u, w):
    """Directional derivative of ``f_eps`` at ``u`` along unit ``w``, two ways.

    Returns ``(analytic, numeric)``: ``<A_eps(u), w>`` and the central
    difference with step ``1e-5 (1 + ||u||)``.
    """
    u = as_vector(space, u)
    w = as_vector(space, w)
    nw = norm(space, w)
    if not abs(nw - 1.0) <= 1e-9:
        raise InputError(f"direction must have unit norm, got {nw}")
    t = 1e-5 * (1.0 + norm(space, u))
    analytic = pairing(prox(f, space, params, u).derivative, w)
    numeric = (envelope_value(f, space, params, u + t * w)
               - envelope_value(f, space, params, u - t * w)) / (2.0 * t)
    return analytic, numeric


def eps_derivative(f, space, p, u, eps) -> float:
    """``d/d eps f_eps(u) = -||u_eps - u||^p / (p* eps^p)``."""
    params = PowerParams(p, eps)
    u = as_vector(space, u)
    sol = prox(f, space, params, u)
    return -norm(space, sol.minimizer - u) ** p / (params.p_star * eps**p)


@dataclass
class EpsProfile:
    rows: list  # (eps, f_eps(u), ||u_eps - u||)
    violations: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations


def _check_descending(eps_list):
    eps = [float(e) for e in eps_list]
    if not eps or any(e <= 0 for e in eps) or any(b >= a for a, b in zip(eps, eps[1:])):
        raise InputError("eps_list must be strictly decreasing and positive")
    return eps


def eps_monotonicity_profile(f, space, p, u, eps_list, slack=1e-9) -> EpsProfile:
    """Envelope values and displacements along a decreasing eps list.

    Checks, as ``eps`` decreases: ``f_eps(u)`` does not decrease, it stays
    between ``f(u_eps)`` and ``f(u)``, and ``||u_eps - u||`` does not increase.
    """
    u = as_vector(space, u)
    eps = _check_descending(eps_list)
    fu = f.evaluate(u)
    rows, viol = [], []
    prev = None
    for e in eps:
        sol = prox(f, space, PowerParams(p, e), u)
        val = sol.envelope_value
        dist = norm(space, sol.minimizer - u)
        rows.append((e, val, dist))
        tol = slack * (1.0 + abs(val))
        if f.evaluate(sol.minimizer) > val + tol:
            viol.append({"eps": e, "kind": "lower_sandwich"})
        if fu < INF and val > fu + tol:
            viol.append({"eps": e, "kind": "upper_sandwich"})
        if prev is not None:
            if val < prev[1] - tol:
                viol.append({"eps": e, "kind": "value_monotonicity"})
            if dist > prev[2] + slack * (1.0 + prev[2]):
                viol.append({"eps": e, "kind": "distance_monotonicity"})
        prev = (e, val, dist)
    return EpsProfile(rows, viol)


@dataclass
class ConvergenceProfile:
    rows: list  # (eps, |f_eps(u) - f(u)|, ||u_eps - u||, bound)
    in_domain: bool
    violations: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations


def convergence_profile(f, space, p, u, eps_list, slack=1e-9, divergence_threshold=1e3):
    """Convergence of ``f_eps(u) -> f(u)`` and ``u_eps -> u`` as eps decreases.

    Inside the domain the gap obeys ``f(u) - f_eps(u) <= (eps/p*) ||xi||_*^{p*}``
    with ``xi`` the selected subgradient at ``u``. Outside the domain the
    profile instead requires ``f_eps(u)`` to exceed ``divergence_threshold``
    at the smallest eps; its bound column is +inf.
    """
    u = as_vector(space, u)
    eps = _check_descending(eps_list)
    fu = f.evaluate(u)
    inside = fu < INF
    p_star = PowerParams(p, 1.0).p_star
    xi_norm = dual_norm(space, subgradient_select(f, u)) if inside else INF
    rows, viol = [], []
    for e in eps:
        sol = prox(f, space, PowerParams(p, e), u)
        dist = norm(space, sol.minimizer - u)
        if inside:
            gap = abs(sol.envelope_value - fu)
            bound = e / p_star * xi_norm**p_star
            if fu - sol.envelope_value > bound + slack:
                viol.append({"eps": e, "kind": "young_bound", "excess": fu - sol.envelope_value - bound})
        else:
            gap, bound = INF, INF
        rows.append((e, gap, dist, bound, sol.envelope_value))
    if inside:
        gaps = [r[1] for r in rows]
        dists = [r[2] for r in rows]
        if gaps[-1] > gaps[0] + slack or dists[-1] > dists[0] + slack:
            viol.append({"kind": "not_converging"})
    elif not rows[-1][4] > divergence_threshold:
        viol.append({"kind": "no_divergence", "value": rows[-1][4]})
    rows = [r[:4] for r in rows]
    return ConvergenceProfile(rows, inside, viol)


def minimal_section(f, space, params, u, eps_list):
    """Least-norm subgradient ``A0`` at ``u`` and ``||A_eps(u) - A0||_*`` along ``eps_list``.

    ``params`` supplies the power ``p``; its own eps is not used.
    """
    u = as_vector(space, u)
    if not f.domain_contains(u) or f.subdifferential is None:
        raise DomainError(f"no known subdifferential of {f.label} at {u}")
    A0 = minimal_element(f.subdifferential(u), space)
    profile = []
    for e in eps_list:
        sol = prox(f, space, params.with_eps(e), u)
        profile.append((float(e), dual_norm(space, sol.derivative - A0)))
    return A0, profile


# --------------------------------------------------------------------------
# conjugates
# --------------------------------------------------------------------------


def envelope_conjugate_analytic(f, space, params, xi) -> float:
    """``(eps/p*) ||xi||_*^{p*} + f*(xi)``."""
    xi = as_vector(space, xi)
    fs = f.conjugate(xi)
    if fs == INF:
        return INF
    return params.eps / params.p_star * dual_norm(space, xi) ** params.p_star + fs


def envelope_conjugate(f: ConvexFn, params: PowerParams, xi, grid: GridSpec,
                       space: Optional[SpaceSpec] = None):
    """Conjugate of ``f_eps`` at ``xi``: closed form and brute force on ``grid``.

    Returns ``(analytic, numeric)``.
    """
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    if space is None:
        space = SpaceSpec.euclidean(xi.size)
    analytic = envelope_conjugate_analytic(f, space, params, xi) if f.conjugate_analytic else math.nan
    numeric = conjugate_numeric(envelope_function(f, space, params), xi, grid)
    return analytic, numeric


def kernel_conjugate_numeric(p, eps, xi, half_width=None, points=2001, rounds=6):
    """``sup_v xi v - |v|^p / (p eps^{p-1})`` on the real line by grid refinement.

    Independent check of ``(|.|^p/(p eps^{p-1}))^* = (eps/p*) |.|^{p*}``.
    """
    from .oracle import grid_refine

    xi = float(xi)
    if half_width is None:
        # the maximizer is eps |xi|^{1/(p-1)} sgn(xi); cover it generously
        half_width = 2.0 * (1.0 + eps * abs(xi) ** (1.0 / (p - 1.0)))
    c = 1.0 / (p * eps ** (p - 1.0))
    grid = GridSpec((-half_width,), (half_width,), points)
    _, val = grid_refine(lambda v: -(xi * v[0] - c * abs(v[0]) ** p), grid, rounds)
    return -val
