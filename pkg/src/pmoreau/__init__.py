"""p-Moreau-Yosida envelopes on finite-dimensional normed spaces.

Submodules: :mod:`spaces` (norms and p-duality maps), :mod:`functions`
(convex test functions), :mod:`oracle` (grid search), :mod:`envelope`
(proximal points and envelopes), :mod:`mosco` (convergence of sequences),
:mod:`hj` (Hamilton-Jacobi), :mod:`flow` (minimizing movements),
:mod:`verify` (invariant suite) and :mod:`cli`.
"""
from .envelope import ProxSolution, envelope_function, envelope_value, prox
from .errors import (
    DomainError,
    GridCoverageError,
    InfeasibleGridError,
    InputError,
    ParameterError,
    PMoreauError,
    SolverFailure,
    UnsupportedFixture,
)
from .functions import ConvexFn, from_spec
from .oracle import GridSpec
from .spaces import PowerParams, SpaceSpec

__all__ = [
    "ConvexFn",
    "DomainError",
    "GridCoverageError",
    "GridSpec",
    "InfeasibleGridError",
    "InputError",
    "ParameterError",
    "PMoreauError",
    "PowerParams",
    "ProxSolution",
    "SolverFailure",
    "SpaceSpec",
    "UnsupportedFixture",
    "envelope_function",
    "envelope_value",
    "from_spec",
    "prox",
]

__version__ = "0.1.0"
