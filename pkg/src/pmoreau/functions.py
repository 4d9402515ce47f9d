"""Catalog of proper, lower semicontinuous, convex test functions.

Every catalog member is a :class:`ConvexFn`: a bundle of pure callables
(value, a subgradient selection, the analytic conjugate when known, an
optional closed-form proximal point) together with a JSON description that
names the member in problem files.

Values are extended reals: ``math.inf`` stands for +oo and follows the usual
convex-analysis conventions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.optimize import linprog, minimize

from .errors import DomainError, GridCoverageError, InputError, ParameterError
from .oracle import GridSpec, grid_maximize
from .spaces import SpaceSpec, conjugate_exponent, dual_norm, norm

__all__ = [
    "ConvexFn",
    "Subdifferential",
    "quadratic",
    "one_norm",
    "indicator_box",
    "indicator_point",
    "max_affine",
    "power_of_norm",
    "zero",
    "translate",
    "from_spec",
    "subgradient_select",
    "minimal_element",
    "conjugate_numeric",
    "validate_convexity",
    "ConvexityReport",
]

INF = math.inf


@dataclass(frozen=True)
class Subdifferential:
    """Closed convex description of a subdifferential.

    kind ``"box"``: product of intervals ``[lo_i, hi_i]`` (infinite ends allowed);
    kind ``"hull"``: convex hull of the rows of ``generators``;
    kind ``"dual_ball"``: ``{xi : ||xi||_* <= radius}``.
    """

    kind: str
    lo: Optional[np.ndarray] = None
    hi: Optional[np.ndarray] = None
    generators: Optional[np.ndarray] = None
    radius: float = 0.0

    @classmethod
    def point(cls, xi):
        xi = np.asarray(xi, dtype=float)
        return cls("box", lo=xi.copy(), hi=xi.copy())

    def contains(self, xi, space: SpaceSpec, tol=1e-9) -> bool:
        xi = np.asarray(xi, dtype=float)
        if self.kind == "box":
            return bool(np.all(xi >= self.lo - tol) and np.all(xi <= self.hi + tol))
        if self.kind == "dual_ball":
            return dual_norm(space, xi) <= self.radius + tol
        # hull: distance from xi to the hull must vanish
        nearest = _nearest_in_hull(self.generators, xi, lambda z: float(np.dot(z, z)))
        return float(np.linalg.norm(nearest - xi)) <= tol


@dataclass(frozen=True)
class ConvexFn:
    """A proper convex function on R^dim.

    ``dim`` is ``None`` for members defined in every dimension. ``anchor`` is
    a point of the effective domain; it witnesses properness and seeds solvers.
    """

    label: str
    evaluate: Callable[[np.ndarray], float]
    subgradient: Callable[[np.ndarray], np.ndarray]
    domain_contains: Callable[[np.ndarray], bool]
    anchor: Callable[[int], np.ndarray]
    dim: Optional[int] = None
    conjugate_analytic: Optional[Callable[[np.ndarray], float]] = None
    prox_closed_form: Optional[Callable] = None
    subdifferential: Optional[Callable[[np.ndarray], Subdifferential]] = None
    spec: Optional[dict] = None
    strictly_convex: bool = False
    differentiable: bool = False
    evaluate_batch: Optional[Callable[[np.ndarray], np.ndarray]] = None
    extras: dict = field(default_factory=dict, compare=False)

    def __call__(self, v) -> float:
        v = np.atleast_1d(np.asarray(v, dtype=float))
        self.check_dim(v.size)
        return self.evaluate(v)

    def values(self, X) -> np.ndarray:
        """Values at the rows of ``X`` (shape ``(N, dim)``)."""
        X = np.asarray(X, dtype=float)
        if self.evaluate_batch is not None:
            return np.asarray(self.evaluate_batch(X), dtype=float)
        return np.fromiter((self.evaluate(x) for x in X), dtype=float, count=len(X))

    def conjugate(self, xi) -> float:
        if self.conjugate_analytic is None:
            raise InputError(f"{self.label} has no analytic conjugate")
        return self.conjugate_analytic(np.atleast_1d(np.asarray(xi, dtype=float)))

    def check_dim(self, n: int):
        if self.dim is not None and self.dim != n:
            raise InputError(f"{self.label} lives in dimension {self.dim}, got {n}")

    def __repr__(self):
        return f"ConvexFn({self.label})"


def _vec(v):
    return np.atleast_1d(np.asarray(v, dtype=float))


def _zeros_anchor(n):
    return np.zeros(n)


def _is_euclidean(space):
    return space.norm_kind == "euclidean"


# --------------------------------------------------------------------------
# catalog constructors
# --------------------------------------------------------------------------


def zero(dim: Optional[int] = None) -> ConvexFn:
    """The function identically equal to 0."""

    def conj(xi):
        return 0.0 if np.all(xi == 0.0) else INF

    return ConvexFn(
        label="zero",
        evaluate=lambda v: 0.0,
        subgradient=lambda v: np.zeros_like(_vec(v)),
        domain_contains=lambda v: True,
        anchor=_zeros_anchor,
        dim=dim,
        conjugate_analytic=conj,
        prox_closed_form=lambda space, params, u: np.array(u, dtype=float),
        subdifferential=lambda v: Subdifferential.point(np.zeros_like(_vec(v))),
        spec={"fn": "zero"},
        differentiable=True,
        evaluate_batch=lambda X: np.zeros(len(X)),
    )


def quadratic(A, b=None, c: float = 0.0) -> ConvexFn:
    """``v -> v.A.v / 2 + b.v + c`` with ``A`` symmetric positive semidefinite."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    n = A.shape[0]
    if A.shape != (n, n):
        raise InputError("A must be square")
    if not np.allclose(A, A.T, atol=1e-12):
        raise InputError("A must be symmetric")
    eig = np.linalg.eigvalsh(A)
    if eig.min() < -1e-12 * max(1.0, abs(eig).max()):
        raise ParameterError("A must be positive semidefinite")
    b = np.zeros(n) if b is None else _vec(b)
    if b.shape != (n,):
        raise InputError("b must have the dimension of A")
    c = float(c)
    A_pinv = np.linalg.pinv(A)
    pd = bool(eig.min() > 1e-12 * max(1.0, abs(eig).max()))

    def value(v):
        v = _vec(v)
        return float(0.5 * v @ A @ v + b @ v + c)

    def grad(v):
        return A @ _vec(v) + b

    def conj(xi):
        r = _vec(xi) - b
        y = A_pinv @ r
        if np.linalg.norm(A @ y - r) > 1e-9 * (1.0 + np.linalg.norm(r)):
            return INF
        return float(0.5 * r @ y - c)

    def prox(space, params, u):
        if params.p != 2.0 or not _is_euclidean(space):
            return None
        return np.linalg.solve(np.eye(n) + params.eps * A, _vec(u) - params.eps * b)

    return ConvexFn(
        label="quadratic",
        evaluate=value,
        subgradient=grad,
        domain_contains=lambda v: True,
        anchor=_zeros_anchor,
        dim=n,
        conjugate_analytic=conj,
        prox_closed_form=prox,
        subdifferential=lambda v: Subdifferential.point(grad(v)),
        spec={"fn": "quadratic", "A": A.tolist(), "b": b.tolist(), "c": c},
        strictly_convex=pd,
        differentiable=True,
        evaluate_batch=lambda X: 0.5 * np.einsum("ij,jk,ik->i", X, A, X) + X @ b + c,
        extras={"A": A, "b": b, "c": c},
    )


def one_norm(dim: Optional[int] = None) -> ConvexFn:
    """``v -> sum |v_i|``."""

    def conj(xi):
        return 0.0 if np.max(np.abs(xi)) <= 1.0 + 1e-12 else INF

    def prox(space, params, u):
        if params.p != 2.0 or not _is_euclidean(space):
            return None
        u = _vec(u)
        return np.sign(u) * np.maximum(np.abs(u) - params.eps, 0.0)

    def subdiff(v):
        v = _vec(v)
        s = np.sign(v)
        lo = np.where(v == 0.0, -1.0, s)
        hi = np.where(v == 0.0, 1.0, s)
        return Subdifferential("box", lo=lo, hi=hi)

    return ConvexFn(
        label="one_norm",
        evaluate=lambda v: float(np.sum(np.abs(_vec(v)))),
        subgradient=lambda v: np.sign(_vec(v)),
        domain_contains=lambda v: True,
        anchor=_zeros_anchor,
        dim=dim,
        conjugate_analytic=conj,
        prox_closed_form=prox,
        subdifferential=subdiff,
        spec={"fn": "one_norm"},
        evaluate_batch=lambda X: np.abs(X).sum(axis=1),
    )


def indicator_box(lo, hi) -> ConvexFn:
    """0 on the box ``[lo, hi]``, +oo elsewhere."""
    lo = _vec(lo)
    hi = _vec(hi)
    if lo.shape != hi.shape or not np.all(lo <= hi):
        raise InputError("indicator_box needs lo <= hi of equal length")
    n = lo.size

    def inside(v):
        v = _vec(v)
        return bool(np.all(v >= lo) and np.all(v <= hi))

    def subdiff(v):
        # normal cone of the box
        v = _vec(v)
        at_lo = v <= lo
        at_hi = v >= hi
        c_lo = np.where(at_lo, -INF, 0.0)
        c_hi = np.where(at_hi, INF, 0.0)
        return Subdifferential("box", lo=c_lo, hi=c_hi)

    # Every supported norm is a symmetric gauge of |v_i|, so the nearest
    # point of a box is the coordinatewise clamp for any norm and any p.
    return ConvexFn(
        label="indicator_box",
        evaluate=lambda v: 0.0 if inside(v) else INF,
        subgradient=lambda v: np.zeros(n),
        domain_contains=inside,
        anchor=lambda _n: np.clip(np.zeros(n), lo, hi),
        dim=n,
        conjugate_analytic=lambda xi: float(np.sum(np.maximum(_vec(xi) * lo, _vec(xi) * hi))),
        prox_closed_form=lambda space, params, u: np.clip(_vec(u), lo, hi),
        subdifferential=subdiff,
        spec={"fn": "indicator_box", "lo": lo.tolist(), "hi": hi.tolist()},
        evaluate_batch=lambda X: np.where(np.all((X >= lo) & (X <= hi), axis=1), 0.0, INF),
    )


def indicator_point(z) -> ConvexFn:
    """0 at ``z``, +oo elsewhere."""
    z = _vec(z)
    n = z.size

    def inside(v):
        return bool(np.array_equal(_vec(v), z))

    return ConvexFn(
        label="indicator_point",
        evaluate=lambda v: 0.0 if inside(v) else INF,
        subgradient=lambda v: np.zeros(n),
        domain_contains=inside,
        anchor=lambda _n: z.copy(),
        dim=n,
        conjugate_analytic=lambda xi: float(_vec(xi) @ z),
        prox_closed_form=lambda space, params, u: z.copy(),
        subdifferential=lambda v: Subdifferential("box", lo=np.full(n, -INF), hi=np.full(n, INF)),
        spec={"fn": "indicator_point", "z": z.tolist()},
        evaluate_batch=lambda X: np.where(np.all(X == z, axis=1), 0.0, INF),
    )


def max_affine(pieces) -> ConvexFn:
    """``v -> max_k (<a_k, v> + b_k)`` for pieces ``[(a_k, b_k), ...]``."""
    if len(pieces) == 0:
        raise InputError("max_affine needs at least one piece")
    slopes = np.array([np.atleast_1d(np.asarray(a, dtype=float)) for a, _ in pieces])
    icpts = np.array([float(b) for _, b in pieces])
    n = slopes.shape[1]

    def value(v):
        return float(np.max(slopes @ _vec(v) + icpts))

    def active(v):
        vals = slopes @ _vec(v) + icpts
        top = vals.max()
        return slopes[vals >= top - 1e-12 * (1.0 + abs(top))]

    def subgrad(v):
        return _nearest_in_hull(active(v), np.zeros(n), lambda z: float(np.dot(z, z)))

    def conj(xi):
        xi = _vec(xi)
        k = len(icpts)
        if n == 1:
            return _conj_max_affine_1d(slopes[:, 0], icpts, float(xi[0]))
        res = linprog(
            -icpts,
            A_eq=np.vstack([slopes.T, np.ones((1, k))]),
            b_eq=np.concatenate([xi, [1.0]]),
            bounds=[(0, None)] * k,
            method="highs",
        )
        if res.status == 2:
            return INF
        if not res.success:
            raise RuntimeError(f"conjugate LP failed: {res.message}")
        return float(res.fun)

    def subdiff(v):
        return Subdifferential("hull", generators=active(v))

    spec_pieces = [[a.tolist() if n > 1 else float(a[0]), float(b)] for a, b in zip(slopes, icpts)]
    return ConvexFn(
        label="max_affine",
        evaluate=value,
        subgradient=subgrad,
        domain_contains=lambda v: True,
        anchor=_zeros_anchor,
        dim=n,
        conjugate_analytic=conj,
        subdifferential=subdiff,
        spec={"fn": "max_affine", "pieces": spec_pieces},
        evaluate_batch=lambda X: np.max(X @ slopes.T + icpts, axis=1),
        extras={"slopes": slopes, "intercepts": icpts},
    )


def _conj_max_affine_1d(a, b, xi):
    # f*(xi) = min { -sum l_k b_k : sum l_k a_k = xi, l in simplex }; the
    # optimum mixes at most two slopes bracketing xi
    if xi < a.min() - 1e-12 or xi > a.max() + 1e-12:
        return INF
    best = INF
    for i in range(len(a)):
        if abs(a[i] - xi) <= 1e-12:
            best = min(best, -b[i])
        for j in range(len(a)):
            if a[i] < xi < a[j]:
                t = (xi - a[i]) / (a[j] - a[i])
                best = min(best, -((1 - t) * b[i] + t * b[j]))
    return float(best)


def power_of_norm(r: float, space: SpaceSpec) -> ConvexFn:
    """``v -> ||v||^r / r`` for ``r >= 1`` in the norm of ``space``."""
    r = float(r)
    if r < 1.0:
        raise ParameterError("power_of_norm needs r >= 1")
    n = space.dim

    def value(v):
        return norm(space, v) ** r / r

    def grad(v):
        v = _vec(v)
        nv = norm(space, v)
        if nv == 0.0:
            return np.zeros(n)
        # gradient of ||v||^r / r; same coordinate formula as the r-duality map
        if space.norm_kind == "euclidean":
            return nv ** (r - 2.0) * v
        if space.norm_kind == "q_norm":
            q = space.q
            return nv ** (r - q) * np.abs(v) ** (q - 1.0) * np.sign(v)
        return nv ** (r - 2.0) * space.w * v

    if r > 1.0:
        rs = conjugate_exponent(r)
        conj = lambda xi: dual_norm(space, xi) ** rs / rs  # noqa: E731
    else:
        conj = lambda xi: 0.0 if dual_norm(space, xi) <= 1.0 + 1e-12 else INF  # noqa: E731

    def subdiff(v):
        if r == 1.0 and norm(space, v) == 0.0:
            return Subdifferential("dual_ball", radius=1.0)
        return Subdifferential.point(grad(v))

    return ConvexFn(
        label=f"power_of_norm(r={r:g})",
        evaluate=value,
        subgradient=grad,
        domain_contains=lambda v: True,
        anchor=_zeros_anchor,
        dim=n,
        conjugate_analytic=conj,
        subdifferential=subdiff,
        spec={"fn": "power_of_norm", "r": r},
        strictly_convex=r > 1.0,
        differentiable=r > 1.0,
        extras={"space": space},
    )


def translate(f: ConvexFn, shift) -> ConvexFn:
    """``v -> f(v - shift)``."""
    s = _vec(shift)

    conj = None
    if f.conjugate_analytic is not None:
        conj = lambda xi: f.conjugate_analytic(_vec(xi)) + float(_vec(xi) @ s)  # noqa: E731
    prox = None
    if f.prox_closed_form is not None:

        def prox(space, params, u):
            x = f.prox_closed_form(space, params, _vec(u) - s)
            return None if x is None else x + s

    subdiff = None
    if f.subdifferential is not None:
        subdiff = lambda v: f.subdifferential(_vec(v) - s)  # noqa: E731

    return ConvexFn(
        label=f"{f.label} shifted",
        evaluate=lambda v: f.evaluate(_vec(v) - s),
        subgradient=lambda v: f.subgradient(_vec(v) - s),
        domain_contains=lambda v: f.domain_contains(_vec(v) - s),
        anchor=lambda n: f.anchor(n) + s,
        dim=s.size if f.dim is None else f.dim,
        conjugate_analytic=conj,
        prox_closed_form=prox,
        subdifferential=subdiff,
        spec=None if f.spec is None else {"fn": "translate", "shift": s.tolist(), "base": f.spec},
        strictly_convex=f.strictly_convex,
        differentiable=f.differentiable,
        evaluate_batch=None if f.evaluate_batch is None else (lambda X: f.evaluate_batch(np.asarray(X) - s)),
    )


def from_spec(obj, space: Optional[SpaceSpec] = None) -> ConvexFn:
    """Build a catalog member from its JSON description.

    ``{"fn": "one_norm"}``, ``{"fn": "quadratic", "A": [[..]], "b": [..], "c": 0}``,
    ``{"fn": "indicator_box", "lo": [..], "hi": [..]}``, ``{"fn": "indicator_point", "z": [..]}``,
    ``{"fn": "max_affine", "pieces": [[slope, intercept], ..]}``, ``{"fn": "power_of_norm", "r": 2.5}``,
    ``{"fn": "zero"}`` and ``{"fn": "translate", "shift": [..], "base": {..}}``.
    A bare string is accepted for members without parameters.
    """
    if isinstance(obj, str):
        obj = {"fn": obj}
    if not isinstance(obj, dict) or "fn" not in obj:
        raise InputError("function spec must be an object with an 'fn' field")
    name = obj["fn"]
    dim = None if space is None else space.dim
    if name == "zero":
        return zero(dim)
    if name == "one_norm":
        return one_norm(dim)
    if name == "quadratic":
        return quadratic(obj["A"], obj.get("b"), obj.get("c", 0.0))
    if name == "indicator_box":
        return indicator_box(obj["lo"], obj["hi"])
    if name == "indicator_point":
        return indicator_point(obj["z"])
    if name == "max_affine":
        return max_affine([(a, b) for a, b in obj["pieces"]])
    if name == "power_of_norm":
        if space is None:
            raise InputError("power_of_norm needs the ambient space")
        return power_of_norm(obj["r"], space)
    if name == "translate":
        return translate(from_spec(obj["base"], space), obj["shift"])
    raise InputError(f"unknown catalog member {name!r}")


# --------------------------------------------------------------------------
# subgradients
# --------------------------------------------------------------------------


def _nearest_in_hull(G, target, sqnorm):
    """Point of conv(rows of G) minimizing ``sqnorm(x - target)``."""
    G = np.atleast_2d(G)
    k, n = G.shape
    if k == 1:
        return G[0].copy()
    if n == 1:
        return np.array([np.clip(target[0], G[:, 0].min(), G[:, 0].max())])
    lam0 = np.full(k, 1.0 / k)
    res = minimize(
        lambda lam: sqnorm(lam @ G - target),
        lam0,
        method="SLSQP",
        bounds=[(0.0, 1.0)] * k,
        constraints=[{"type": "eq", "fun": lambda lam: lam.sum() - 1.0}],
        options={"ftol": 1e-16, "maxiter": 500},
    )
    lam = np.clip(res.x, 0.0, None)
    return (lam / lam.sum()) @ G


def subgradient_select(f: ConvexFn, v) -> np.ndarray:
    """One element of the subdifferential of ``f`` at ``v``.

    At kinks the minimal Euclidean-norm element is returned, so downstream
    minimal-section checks are deterministic.
    """
    v = _vec(v)
    f.check_dim(v.size)
    if not f.domain_contains(v):
        raise DomainError(f"{v} is outside the domain of the subdifferential of {f.label}")
    return np.asarray(f.subgradient(v), dtype=float)


def minimal_element(sub: Subdifferential, space: SpaceSpec) -> np.ndarray:
    """Least dual-norm element of a subdifferential.

    All supported dual norms are increasing in each ``|xi_i|`` separately,
    so on a box the answer is the coordinatewise clamp of 0.
    """
    if sub.kind == "box":
        return np.clip(np.zeros_like(sub.lo), sub.lo, sub.hi)
    if sub.kind == "dual_ball":
        return np.zeros(space.dim)
    return _nearest_in_hull(sub.generators, np.zeros(space.dim), lambda z: dual_norm(space, z) ** 2)


# --------------------------------------------------------------------------
# numeric conjugate and convexity audit
# --------------------------------------------------------------------------


def conjugate_numeric(f: ConvexFn, xi, grid: GridSpec) -> float:
    """Brute-force Legendre-Fenchel transform ``max_v <xi, v> - f(v)`` over grid nodes.

    Raises
    ------
    GridCoverageError
        If the maximizing node lies on the grid boundary.
    """
    xi = _vec(xi)
    if xi.size != grid.dim:
        raise InputError("xi and grid dimensions differ")

    def objective(v):
        fv = f.evaluate(v)
        return -INF if fv == INF else float(xi @ v) - fv

    node, val, k = grid_maximize(objective, grid)
    if grid.on_boundary(k) and not _interior_attains(objective, grid, val):
        raise GridCoverageError(
            f"conjugate argmax {node} lies on the grid boundary; enlarge the grid", node=node
        )
    return val


def _interior_attains(objective, grid, val) -> bool:
    # ties broken toward the first node can land on the boundary (f = 0, xi = 0)
    if grid.points_per_axis < 4:
        return False
    h = grid.step
    inner = GridSpec(tuple(a + h for a in grid.lo), tuple(b - h for b in grid.hi), grid.points_per_axis - 2)
    _, inner_val, _ = grid_maximize(objective, inner)
    return inner_val >= val


@dataclass
class ConvexityReport:
    label: str
    checked: dict
    violations: list

    @property
    def ok(self) -> bool:
        return not self.violations


def _sample_domain(f, n, rng, count, half_width=3.0):
    center = f.anchor(n)
    pts = []
    for _ in range(50):
        cand = center + rng.uniform(-half_width, half_width, size=(4 * count, n))
        pts.extend(x for x in cand if f.domain_contains(x))
        if len(pts) >= count:
            break
    if len(pts) < count:
        pts.extend([center] * (count - len(pts)))
    return np.array(pts[:count])


def validate_convexity(f: ConvexFn, samples: int = 200, seed: int = 0,
                       dim: Optional[int] = None) -> ConvexityReport:
    """Randomized audit of convexity, subgradient inequality and Fenchel-Young.

    Violations are returned as data (with witnesses); nothing is raised.
    """
    n = f.dim if f.dim is not None else (dim or 1)
    rng = np.random.default_rng(seed)
    V = _sample_domain(f, n, rng, samples)
    W = _sample_domain(f, n, rng, samples)
    viol = []
    checked = {"properness": 1, "convexity": 0, "subgradient": 0, "fenchel_young": 0,
               "fenchel_young_equality": 0}

    a = f.anchor(n)
    if not f.evaluate(a) < INF:
        viol.append({"kind": "properness", "v": a.tolist()})

    for v, w in zip(V, W):
        fv, fw = f.evaluate(v), f.evaluate(w)
        for t in (0.25, 0.5, 0.75):
            m = t * v + (1 - t) * w
            fm = f.evaluate(m)
            rhs = t * fv + (1 - t) * fw
            checked["convexity"] += 1
            if fm > rhs + 1e-9 * (1.0 + abs(rhs) if rhs < INF else 1.0):
                viol.append({"kind": "convexity", "v": v.tolist(), "w": w.tolist(), "t": t,
                             "excess": fm - rhs})
        if f.domain_contains(v) and fw < INF:
            g = f.subgradient(v)
            excess = fv + float(g @ (w - v)) - fw
            checked["subgradient"] += 1
            if excess > 1e-9 * (1.0 + abs(fw)):
                viol.append({"kind": "subgradient", "v": v.tolist(), "w": w.tolist(), "excess": excess})

    if f.conjugate_analytic is not None:
        for v in V[: max(1, samples // 4)]:
            xi = rng.normal(size=n) * rng.uniform(0.1, 3.0)
            fv = f.evaluate(v)
            fs = f.conjugate_analytic(xi)
            checked["fenchel_young"] += 1
            if fv < INF and fs < INF and fv + fs < float(xi @ v) - 1e-9 * (1 + abs(fv) + abs(fs)):
                viol.append({"kind": "fenchel_young", "v": v.tolist(), "xi": xi.tolist()})
            if f.domain_contains(v):
                g = f.subgradient(v)
                lhs = fv + f.conjugate_analytic(g)
                checked["fenchel_young_equality"] += 1
                if not abs(lhs - float(g @ v)) <= 1e-8 * (1.0 + abs(fv)):
                    viol.append({"kind": "fenchel_young_equality", "v": v.tolist(),
                                 "gap": lhs - float(g @ v)})
    return ConvexityReport(f.label, checked, viol)
