"""Exception hierarchy shared by all modules."""


class PMoreauError(Exception):
    """Base class for every error raised by pmoreau."""


class InputError(PMoreauError, ValueError):
    """Malformed input: wrong dimension, bad shape, unparsable spec."""


class ParameterError(PMoreauError, ValueError):
    """Out-of-range numerical parameter (p <= 1, eps <= 0, ...)."""


class DomainError(PMoreauError, ValueError):
    """Point outside the effective domain of a function or of its subdifferential."""


class InfeasibleGridError(PMoreauError):
    """Every node of an oracle grid carries an infinite objective value."""


class GridCoverageError(PMoreauError):
    """A grid search landed on the grid boundary; the grid must be enlarged."""

    def __init__(self, message, node=None):
        super().__init__(message)
        self.node = node


class SolverFailure(PMoreauError, RuntimeError):
    """An inner proximal solver could not certify its iterate.

    Attributes
    ----------
    best : ndarray
        Best iterate found.
    gap : float
        Optimality gap of ``best`` measured by the probe certificate.
    """

    def __init__(self, message, best=None, gap=float("nan")):
        super().__init__(message)
        self.best = best
        self.gap = gap


class UnsupportedFixture(PMoreauError, ValueError):
    """The requested check needs a fixture with a known analytic reference."""
