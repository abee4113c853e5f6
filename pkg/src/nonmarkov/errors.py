"""Exception types raised by the solvers and model layer."""


class DomainError(ValueError):
    """An input lies outside the mathematical domain of an operation."""


class UnsupportedError(ValueError):
    """A combination of inputs is declared out of scope for this operation."""


class NonConvergenceError(RuntimeError):
    """The implicit per-step linear solve of the Volterra scheme is singular."""

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t


class SingularWError(RuntimeError):
    """The system propagator is too ill-conditioned to extract decay matrices."""

    def __init__(self, t, condition, threshold):
        super().__init__(
            f"propagator W(t={t:g}) has condition number {condition:.3e} "
            f"above threshold {threshold:.3e}; sample flagged as invalid"
        )
        self.t = t
        self.condition = condition
        self.threshold = threshold


class SingularParamsError(RuntimeError):
    """Fermion propagating-function parameters are singular (an occupation eigenvalue hit 1)."""


class CutoffOverflowError(RuntimeError):
    """Population leaked into the top Fock level beyond the accepted bound."""

    def __init__(self, t, population, bound):
        super().__init__(
            f"top Fock level population {population:.3e} exceeds {bound:.1e} at t={t:g}; "
            f"increase the Fock cutoff"
        )
        self.t = t
        self.population = population


class RateGapError(RuntimeError):
    """More than one consecutive rate sample was flagged singular; cannot interpolate."""


class ConfigError(ValueError):
    """A scenario configuration file failed validation."""
