"""System + bath model: Hamiltonian data, statistics, occupations, bath discretization.

A model is a set of system modes with Hermitian frequency matrix ``M``
(angular-frequency units, hbar = 1), linearly coupled to a bath of
non-interacting modes described by a :class:`BathSpec`.  The bath enters all
dynamics only through its interaction spectrum, so continuum baths are
specified by a spectral density and discrete baths by explicit frequencies
and couplings.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, UnsupportedError

__all__ = [
    "Statistics",
    "DiscreteBath",
    "OhmicBath",
    "TabulatedBath",
    "BathSpec",
    "TimeGrid",
    "UniverseModel",
    "ModelReport",
    "occupation",
    "bath_occupations",
    "discretize_bath",
    "validate_model",
]


class Statistics(enum.Enum):
    """Particle statistics of both the system and its bath."""

    BOSE = "bose"
    FERMI = "fermi"


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class DiscreteBath:
    """Finite collection of bath modes with explicit couplings.

    ``omega`` holds the ``N_b`` mode frequencies and ``couplings`` is the
    ``n_sys x N_b`` complex matrix of system-bath coupling amplitudes.
    """

    omega: np.ndarray
    couplings: np.ndarray

    def __post_init__(self):
        omega = _readonly(np.asarray(self.omega, dtype=float))
        couplings = _readonly(np.asarray(self.couplings, dtype=complex))
        if omega.ndim != 1:
            raise DomainError("bath frequencies must be a 1-D array")
        if couplings.ndim != 2 or couplings.shape[1] != omega.size:
            raise DomainError(
                f"couplings must have shape (n_sys, {omega.size}), got {couplings.shape}"
            )
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "couplings", couplings)

    @property
    def n_modes(self) -> int:
        return self.omega.size

    @property
    def n_sys(self) -> int:
        return self.couplings.shape[0]


@dataclass(frozen=True)
class OhmicBath:
    """Ohmic continuum with exponential cutoff: J(w) = coupling * w * exp(-w / cutoff).

    Scalar systems only; ``coupling`` is dimensionless.
    """

    coupling: float
    cutoff: float

    def __post_init__(self):
        if self.coupling < 0:
            raise DomainError("Ohmic coupling must be nonnegative")
        if self.cutoff <= 0:
            raise DomainError("Ohmic cutoff must be positive")

    def spectral_density(self, omega):
        omega = np.asarray(omega, dtype=float)
        return self.coupling * omega * np.exp(-omega / self.cutoff)


@dataclass(frozen=True, eq=False)
class TabulatedBath:
    """Continuum bath given by spectral-density samples on an increasing grid."""

    omega: np.ndarray
    j_samples: np.ndarray

    def __post_init__(self):
        omega = _readonly(np.asarray(self.omega, dtype=float))
        j = _readonly(np.asarray(self.j_samples, dtype=float))
        if omega.ndim != 1 or omega.size < 2:
            raise DomainError("tabulated bath needs at least two grid points")
        if j.shape != omega.shape:
            raise DomainError("spectral-density samples must match the frequency grid")
        if np.any(np.diff(omega) <= 0):
            raise DomainError("tabulated frequency grid must be strictly increasing")
        if np.any(j < 0):
            raise DomainError("spectral-density samples must be nonnegative")
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "j_samples", j)

    def spectral_density(self, omega):
        return np.interp(np.asarray(omega, dtype=float), self.omega, self.j_samples,
                         left=0.0, right=0.0)


BathSpec = DiscreteBath | OhmicBath | TabulatedBath


@dataclass(frozen=True)
class TimeGrid:
    """Uniform time grid t_k = k * h for k = 0..n_steps."""

    t_max: float
    n_steps: int

    def __post_init__(self):
        if self.t_max <= 0:
            raise DomainError("t_max must be positive")
        if self.n_steps < 1:
            raise DomainError("n_steps must be at least 1")

    @property
    def h(self) -> float:
        return self.t_max / self.n_steps

    def times(self) -> np.ndarray:
        return np.arange(self.n_steps + 1) * self.h

    def __len__(self) -> int:
        return self.n_steps + 1


@dataclass(frozen=True, eq=False)
class UniverseModel:
    """Closed system+bath model: system matrix, statistics, bath, temperature.

    ``beta`` is the inverse temperature; ``math.inf`` denotes zero temperature
    (all bath occupations vanish).
    """

    M: np.ndarray
    statistics: Statistics
    bath: BathSpec
    beta: float

    def __post_init__(self):
        M = _readonly(np.asarray(self.M, dtype=complex))
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise DomainError("system matrix must be square")
        if not np.all(np.isfinite(M.view(float))):
            raise DomainError("system matrix must be finite")
        if not (self.beta > 0):
            raise DomainError("beta must be positive (use math.inf for zero temperature)")
        if isinstance(self.bath, DiscreteBath) and self.bath.n_sys != M.shape[0]:
            raise DomainError(
                f"bath couplings are for {self.bath.n_sys} system modes, "
                f"but M is {M.shape[0]}x{M.shape[0]}"
            )
        object.__setattr__(self, "M", M)

    @property
    def n_sys(self) -> int:
        return self.M.shape[0]


def occupation(omega, beta: float, statistics: Statistics):
    """Mean thermal occupation of a mode of frequency ``omega``.

    Bose: 1/(exp(beta*omega) - 1), defined only for beta*omega > 0.
    Fermi: 1/(exp(beta*omega) + 1).
    Zero temperature (beta = inf) gives 0 for positive frequencies.
    """
    omega = np.asarray(omega, dtype=float)
    scalar = omega.ndim == 0
    omega = np.atleast_1d(omega)
    if statistics is Statistics.BOSE:
        if np.isinf(beta):
            if np.any(omega <= 0):
                raise DomainError("Bose occupation diverges for omega <= 0")
            out = np.zeros_like(omega)
        else:
            x = beta * omega
            if np.any(x <= 0):
                raise DomainError("Bose occupation requires beta*omega > 0")
            out = 1.0 / np.expm1(x)
    else:
        if np.isinf(beta):
            out = np.where(omega > 0, 0.0, np.where(omega < 0, 1.0, 0.5))
        else:
            out = 1.0 / (np.exp(beta * omega) + 1.0)
    return float(out[0]) if scalar else out


def bath_occupations(bath: DiscreteBath, beta: float, statistics: Statistics) -> np.ndarray:
    """Occupation of every mode of a discrete bath."""
    return np.atleast_1d(occupation(bath.omega, beta, statistics))


def discretize_bath(spec, n_modes: int, omega_max: float | None = None) -> DiscreteBath:
    """Sample a continuum bath onto ``n_modes`` discrete modes (midpoint rule).

    The modes sit at midpoints of a uniform grid on (0, omega_max] and carry
    real nonnegative couplings with |eta_l|^2 = J(omega_l) * d_omega, so the
    total coupling weight approximates the integral of the spectral density.
    Used to feed continuum scenarios to the exact-diagonalization oracle.
    """
    if n_modes < 1:
        raise DomainError("n_modes must be at least 1")
    if omega_max is None:
        if isinstance(spec, OhmicBath):
            omega_max = 10.0 * spec.cutoff
        elif isinstance(spec, TabulatedBath):
            omega_max = float(spec.omega[-1])
        else:
            raise UnsupportedError("discretize_bath expects a continuum bath spec")
    if omega_max <= 0:
        raise DomainError("omega_max must be positive")
    if isinstance(spec, DiscreteBath):
        raise UnsupportedError("bath is already discrete")
    d_omega = omega_max / n_modes
    omega = (np.arange(n_modes) + 0.5) * d_omega
    weights = spec.spectral_density(omega) * d_omega
    couplings = np.sqrt(weights)[None, :].astype(complex)
    return DiscreteBath(omega=omega, couplings=couplings)


@dataclass
class ModelReport:
    """Diagnostics from :func:`validate_model`.

    ``violations`` are broken invariants (an empty list means the model is
    valid); ``notes`` are informational observations that do not invalidate
    the model.
    """

    violations: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_model(model: UniverseModel) -> ModelReport:
    """Check every model invariant and report violations without raising."""
    report = ModelReport()
    M = model.M
    herm = float(np.abs(M - M.conj().T).max())
    if herm > 1e-12:
        report.violations.append(
            f"system matrix is not Hermitian: max|M - M^dag| = {herm:.3e} > 1e-12"
        )
    eigs = np.linalg.eigvals(M)
    im = float(np.abs(eigs.imag).max()) if eigs.size else 0.0
    if im > 1e-10:
        report.violations.append(
            f"system matrix has complex eigenvalues: max|Im| = {im:.3e} > 1e-10"
        )
    elif np.min(eigs.real) <= 0:
        # positive definiteness is assumed upstream but not required by the
        # solvers; reported as a note, never as a violation
        report.notes.append(
            f"system matrix is not positive definite (min eigenvalue {np.min(eigs.real):.3e})"
        )
    bath = model.bath
    if isinstance(bath, DiscreteBath):
        if not np.all(np.isfinite(bath.omega)):
            report.violations.append("discrete bath has non-finite frequencies")
        if not np.all(np.isfinite(bath.couplings.view(float))):
            report.violations.append("discrete bath has non-finite couplings")
    else:
        if model.n_sys != 1:
            report.violations.append(
                "continuum baths support a single system mode only; "
                f"got n_sys = {model.n_sys}"
            )
    if model.statistics is Statistics.BOSE and not np.isinf(model.beta):
        omegas = bath.omega if isinstance(bath, (DiscreteBath, TabulatedBath)) else None
        if omegas is not None and np.any(model.beta * np.asarray(omegas) <= 0):
            report.violations.append(
                "finite-temperature Bose bath contains modes with beta*omega <= 0"
            )
    return report
