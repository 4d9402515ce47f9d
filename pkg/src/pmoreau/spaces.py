"""Finite-dimensional normed spaces, their duals and p-duality maps.

Three norm families are supported on R^n, all strictly convex and smooth:

* ``euclidean``            ||v|| = (sum v_i^2)^(1/2)
* ``q_norm`` (1 < q < oo)  ||v|| = (sum |v_i|^q)^(1/q), dual exponent q/(q-1)
* ``weighted_euclidean``   ||v|| = (sum w_i v_i^2)^(1/2), dual uses 1/w_i

The power ``p`` of the duality map is independent of the norm exponent ``q``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import InputError, ParameterError

__all__ = [
    "SpaceSpec",
    "PowerParams",
    "conjugate_exponent",
    "norm",
    "dual_norm",
    "pairing",
    "duality_map_p",
    "duality_monotonicity_gap",
    "euclidean_bound_factor",
    "as_vector",
    "norm_rows",
]

MIN_EPS = 1e-10


def conjugate_exponent(p: float) -> float:
    """Return p* = p / (p - 1)."""
    if not p > 1.0:
        raise ParameterError(f"exponent must exceed 1, got {p!r}")
    return p / (p - 1.0)


@dataclass(frozen=True)
class SpaceSpec:
    """The space (R^dim, ||.||) for one of the supported norm families.

    Use the constructors :meth:`euclidean`, :meth:`q_norm` and
    :meth:`weighted` rather than filling the fields by hand.
    """

    dim: int
    norm_kind: str = "euclidean"
    q: Optional[float] = None
    weights: Optional[tuple] = None
    q_star: Optional[float] = field(default=None, init=False, compare=False)

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 1:
            raise InputError(f"dim must be a positive integer, got {self.dim!r}")
        object.__setattr__(self, "dim", int(self.dim))
        if self.norm_kind == "euclidean":
            pass
        elif self.norm_kind == "q_norm":
            if self.q is None or not (1.0 < float(self.q) < np.inf):
                raise ParameterError(f"q must lie in (1, inf), got {self.q!r}")
            object.__setattr__(self, "q", float(self.q))
            object.__setattr__(self, "q_star", conjugate_exponent(self.q))
        elif self.norm_kind == "weighted_euclidean":
            if self.weights is None or len(self.weights) != self.dim:
                raise InputError("weighted_euclidean needs one weight per coordinate")
            w = tuple(float(x) for x in self.weights)
            if not all(x > 0 and np.isfinite(x) for x in w):
                raise ParameterError("all weights must be positive and finite")
            object.__setattr__(self, "weights", w)
        else:
            raise InputError(f"unknown norm family {self.norm_kind!r}")

    @classmethod
    def euclidean(cls, dim):
        return cls(dim)

    @classmethod
    def q_norm(cls, dim, q):
        return cls(dim, "q_norm", q=q)

    @classmethod
    def weighted(cls, weights):
        weights = tuple(weights)
        return cls(len(weights), "weighted_euclidean", weights=weights)

    @property
    def w(self) -> np.ndarray:
        return np.asarray(self.weights, dtype=float)

    # JSON form: {"dim": n, "norm": "euclidean" | {"q": 3.0} | {"weights": [..]}}
    def to_json(self) -> dict:
        if self.norm_kind == "euclidean":
            norm_field = "euclidean"
        elif self.norm_kind == "q_norm":
            norm_field = {"q": self.q}
        else:
            norm_field = {"weights": list(self.weights)}
        return {"dim": self.dim, "norm": norm_field}

    @classmethod
    def from_json(cls, obj) -> "SpaceSpec":
        if not isinstance(obj, dict) or "dim" not in obj:
            raise InputError("space spec must be an object with a 'dim' field")
        dim = obj["dim"]
        norm_field = obj.get("norm", "euclidean")
        if norm_field == "euclidean":
            return cls(dim)
        if isinstance(norm_field, dict) and "q" in norm_field:
            return cls(dim, "q_norm", q=norm_field["q"])
        if isinstance(norm_field, dict) and "weights" in norm_field:
            space = cls(dim, "weighted_euclidean", weights=tuple(norm_field["weights"]))
            return space
        raise InputError(f"unrecognised norm field {norm_field!r}")

    def __repr__(self):
        if self.norm_kind == "euclidean":
            return f"SpaceSpec(dim={self.dim}, euclidean)"
        if self.norm_kind == "q_norm":
            return f"SpaceSpec(dim={self.dim}, q={self.q:g})"
        return f"SpaceSpec(weights={list(self.weights)})"


@dataclass(frozen=True)
class PowerParams:
    """Power ``p`` of the regularizing kernel and regularization parameter ``eps``."""

    p: float
    eps: float
    p_star: float = field(init=False)

    def __post_init__(self):
        p = float(self.p)
        eps = float(self.eps)
        if not p > 1.0 or not np.isfinite(p):
            raise ParameterError(f"p must be a finite real > 1, got {self.p!r}")
        if not (eps >= MIN_EPS and np.isfinite(eps)):
            raise ParameterError(f"eps must be a finite real >= {MIN_EPS:g}, got {self.eps!r}")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "eps", eps)
        object.__setattr__(self, "p_star", conjugate_exponent(p))

    def with_eps(self, eps) -> "PowerParams":
        return PowerParams(self.p, eps)


def as_vector(space: SpaceSpec, v) -> np.ndarray:
    """Coerce ``v`` to a float vector of length ``space.dim``."""
    arr = np.asarray(v, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1 or arr.shape[0] != space.dim:
        raise InputError(f"expected a vector of length {space.dim}, got shape {np.shape(v)}")
    return arr


def norm(space: SpaceSpec, v) -> float:
    v = as_vector(space, v)
    kind = space.norm_kind
    if kind == "euclidean":
        return float(np.linalg.norm(v))
    if kind == "q_norm":
        return _lq(v, space.q)
    return float(np.sqrt(np.dot(space.w, v * v)))


def norm_rows(space: SpaceSpec, V) -> np.ndarray:
    """Norm of every row of an ``(N, dim)`` array."""
    V = np.asarray(V, dtype=float).reshape(-1, space.dim)
    kind = space.norm_kind
    if kind == "euclidean":
        return np.linalg.norm(V, axis=1)
    if kind == "q_norm":
        return np.sum(np.abs(V) ** space.q, axis=1) ** (1.0 / space.q)
    return np.sqrt((V * V) @ space.w)


def dual_norm(space: SpaceSpec, xi) -> float:
    xi = as_vector(space, xi)
    kind = space.norm_kind
    if kind == "euclidean":
        return float(np.linalg.norm(xi))
    if kind == "q_norm":
        return _lq(xi, space.q_star)
    return float(np.sqrt(np.dot(1.0 / space.w, xi * xi)))


def pairing(xi, v) -> float:
    """Duality pairing <xi, v>; the dual is identified with R^n coordinatewise."""
    return float(np.dot(np.asarray(xi, dtype=float).ravel(), np.asarray(v, dtype=float).ravel()))


def _lq(v, q):
    a = np.abs(v)
    m = a.max(initial=0.0)
    if m == 0.0:
        return 0.0
    # scale first so large q cannot overflow
    return float(m * np.sum((a / m) ** q) ** (1.0 / q))


def duality_map_p(space: SpaceSpec, p: float, v) -> np.ndarray:
    """Gradient of v -> ||v||^p / p, i.e. the single-valued p-duality map.

    The returned xi satisfies <xi, v> = ||v||^p = ||xi||_*^(p*). At the
    origin the map is 0 for every p > 1.
    """
    if not p > 1.0:
        raise ParameterError(f"p must exceed 1, got {p!r}")
    v = as_vector(space, v)
    nv = norm(space, v)
    if nv == 0.0:
        return np.zeros_like(v)
    # work on the unit vector so tiny or huge norms cannot overflow
    w = v / nv
    kind = space.norm_kind
    if kind == "euclidean":
        j = w
    elif kind == "q_norm":
        # |w_i|^(q-1) sgn(w_i) vanishes at w_i = 0 even for q < 2
        j = np.abs(w) ** (space.q - 1.0) * np.sign(w)
    else:
        j = space.w * w
    return nv ** (p - 1.0) * j


def duality_monotonicity_gap(space: SpaceSpec, p: float, u, v):
    """Both sides of the monotonicity inequality of the p-duality map.

    Returns ``(lhs, rhs)`` with lhs = <F(u) - F(v), u - v> and
    rhs = (||u||^(p-1) - ||v||^(p-1)) (||u|| - ||v||); lhs >= rhs >= 0.
    """
    u = as_vector(space, u)
    v = as_vector(space, v)
    lhs = pairing(duality_map_p(space, p, u) - duality_map_p(space, p, v), u - v)
    nu, nv = norm(space, u), norm(space, v)
    rhs = (nu ** (p - 1.0) - nv ** (p - 1.0)) * (nu - nv)
    return lhs, rhs


def euclidean_bound_factor(space: SpaceSpec) -> float:
    """Smallest c with ||v||_2 <= c ||v|| for every v."""
    kind = space.norm_kind
    if kind == "euclidean":
        return 1.0
    if kind == "q_norm":
        if space.q <= 2.0:
            return 1.0
        return float(space.dim ** (0.5 - 1.0 / space.q))
    return float(1.0 / np.sqrt(space.w.min()))
