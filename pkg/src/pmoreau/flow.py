"""Minimizing movements for doubly nonlinear gradient flows.

The implicit Euler scheme for ``-|u'|^(p-2) u' in dE(u)`` reads::

    U^n = argmin_v (tau/p) ||(v - U^(n-1))/tau||^p + E(v) = J_tau(U^(n-1))

so every step is one proximal solve with ``eps = tau``.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import expm

from .envelope import prox
from .errors import DomainError, UnsupportedFixture
from .functions import ConvexFn
from .spaces import PowerParams, SpaceSpec, as_vector, norm

__all__ = [
    "FlowTrajectory",
    "minimizing_movement",
    "exponential_formula_check",
    "ode_reference_error",
    "dissipation_violations",
]


@dataclass
class FlowTrajectory:
    tau: float
    states: list
    energies: list
    residuals: list = field(default_factory=list)
    p: float = 2.0

    @property
    def times(self) -> np.ndarray:
        return self.tau * np.arange(len(self.states))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        dim = len(self.states[0])
        w.writerow(["n", "t"] + [f"u{i}" for i in range(dim)] + ["energy", "residual"])
        for n, (x, e) in enumerate(zip(self.states, self.energies)):
            res = self.residuals[n] if n < len(self.residuals) else 0.0
            w.writerow([n, format(n * self.tau, ".17g")] + [format(c, ".17g") for c in x]
                       + [format(e, ".17g"), format(res, ".17g")])
        return buf.getvalue()

    def to_json(self) -> dict:
        return {
            "tau": self.tau,
            "p": self.p,
            "states": [[float(c) for c in x] for x in self.states],
            "energies": [float(e) for e in self.energies],
            "residuals": [float(r) for r in self.residuals],
        }

    @classmethod
    def from_json(cls, obj) -> "FlowTrajectory":
        return cls(obj["tau"], [np.asarray(x, dtype=float) for x in obj["states"]],
                   list(obj["energies"]), list(obj.get("residuals", [])), obj.get("p", 2.0))


def minimizing_movement(E: ConvexFn, space: SpaceSpec, p: float, tau: float, steps: int, u0) -> FlowTrajectory:
    """``steps`` implicit Euler steps from ``u0``.

    Each state after the first is a certified proximal point; its
    certificate gap is stored in ``residuals`` (0 for the initial state).
    """
    u = as_vector(space, u0).copy()
    if not E.domain_contains(u) or not E.evaluate(u) < np.inf:
        raise DomainError(f"initial state {u} is outside the domain of {E.label}")
    if int(steps) != steps or steps < 1:
        raise ValueError("steps must be a positive integer")
    params = PowerParams(p, tau)
    states, energies, residuals = [u], [E.evaluate(u)], [0.0]
    for _ in range(int(steps)):
        sol = prox(E, space, params, u)
        u = sol.minimizer
        states.append(u)
        energies.append(E.evaluate(u))
        residuals.append(sol.optimality_gap)
    return FlowTrajectory(float(tau), states, energies, residuals, float(p))


def dissipation_violations(traj: FlowTrajectory, space: SpaceSpec, slack: float = 1e-9) -> list:
    """Steps where ``E(U^n) + ||U^n - U^(n-1)||^p / (p tau^(p-1)) > E(U^(n-1)) + slack``."""
    p, tau = traj.p, traj.tau
    out = []
    for n in range(1, len(traj.states)):
        move = norm(space, traj.states[n] - traj.states[n - 1]) ** p / (p * tau ** (p - 1))
        excess = traj.energies[n] + move - traj.energies[n - 1]
        if excess > slack:
            out.append((n, excess))
    return out


def _linear_reference(E: ConvexFn, space: SpaceSpec, t: float, u0):
    """Exact p=2 flow for quadratic or zero energies, else ``None``."""
    spec = E.spec or {}
    name = spec.get("fn")
    if name == "zero":
        return u0.copy()
    if name != "quadratic":
        return None
    A = np.asarray(E.extras["A"], dtype=float)
    b = np.asarray(E.extras["b"], dtype=float)
    if space.norm_kind == "euclidean":
        M, c = A, b
    elif space.norm_kind == "weighted_euclidean":
        # Riesz map of the weighted inner product: W u' = -(A u + b)
        M, c = A / space.w[:, None], b / space.w
    else:
        return None
    n = len(u0)
    # affine flow u' = -(M u + c) as one matrix exponential
    big = np.zeros((n + 1, n + 1))
    big[:n, :n] = -M
    big[:n, n] = -c
    return (expm(t * big) @ np.append(u0, 1.0))[:n]


def exponential_formula_check(E: ConvexFn, space: SpaceSpec, t: float, n_list, u0):
    """Rows ``(n, ||J_{t/n}^n(u0) - S(t) u0||)`` for the quadratic flow with p = 2.

    Raises
    ------
    UnsupportedFixture
        When no closed-form reference exists (non-quadratic energy, or a
        q-norm, whose p=2 flow is nonlinear).
    """
    u0 = as_vector(space, u0)
    ref = _linear_reference(E, space, t, u0)
    if ref is None:
        raise UnsupportedFixture(f"no analytic flow reference for {E.label} in {space!r}")
    n_list = [int(n) for n in n_list]
    if any(b <= a for a, b in zip(n_list, n_list[1:])) or n_list[0] < 1:
        raise ValueError("n_list must be increasing positive integers")
    rows = []
    for n in n_list:
        traj = minimizing_movement(E, space, 2.0, t / n, n, u0)
        rows.append((n, norm(space, traj.states[-1] - ref)))
    return rows


def ode_reference_error(E: ConvexFn, p: float, tau: float, steps: int, u0):
    """Rows ``(t_n, |U^n - u_ref(t_n)|)`` against a fine explicit integrator.

    The reference solves ``u' = -sign(E'(u)) |E'(u)|^(1/(p-1))`` with DOP853
    at maximal step ``tau/100``.
    """
    if not E.differentiable:
        raise UnsupportedFixture(f"{E.label} is not differentiable")
    if E.dim not in (None, 1):
        raise UnsupportedFixture("the ODE reference is one-dimensional")
    space = SpaceSpec.euclidean(1)
    u0 = as_vector(space, u0)
    traj = minimizing_movement(E, space, p, tau, steps, u0)
    times = traj.times

    def rhs(_, y):
        g = float(E.subgradient(y)[0])
        return [-np.sign(g) * abs(g) ** (1.0 / (p - 1.0))]

    sol = solve_ivp(rhs, (0.0, times[-1]), u0, method="DOP853", t_eval=times,
                    max_step=tau / 100.0, rtol=1e-12, atol=1e-14)
    if not sol.success:
        raise RuntimeError(f"reference integrator failed: {sol.message}")
    return [(float(t), abs(float(x[0]) - float(r))) for t, x, r in zip(times, traj.states, sol.y[0])]
