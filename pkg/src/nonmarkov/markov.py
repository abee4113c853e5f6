"""Single-pole (Wigner-Weisskopf) solution and Born-Markov constant rates.

Replacing the memory integral by its resonant pole turns the propagator into
a single damped exponential with decay rate pi*J(Omega0) and a principal-value
frequency shift; the master-equation coefficients then freeze at constant
values.  These provide the Markov baselines the exact dynamics is compared
against.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .errors import DomainError, UnsupportedError
from .model import (
    DiscreteBath,
    OhmicBath,
    Statistics,
    TabulatedBath,
    TimeGrid,
    occupation,
)
from .volterra import CoefficientTrajectory

__all__ = [
    "MarkovParams",
    "ww_params",
    "ww_solution",
    "born_markov_coeffs",
    "constant_coefficient_trajectory",
]


@dataclass(frozen=True)
class MarkovParams:
    """Constant parameters of the single-pole approximation."""

    Omega0: float       # bare frequency
    Gamma0: float       # decay rate pi * J(Omega0)
    delta_omega: float  # principal-value frequency shift
    f0: float           # occupation at the bare frequency


def _spectral_density_fn(bath):
    if isinstance(bath, OhmicBath):
        return bath.spectral_density, 10.0 * bath.cutoff
    if isinstance(bath, TabulatedBath):
        return bath.spectral_density, float(bath.omega[-1])
    raise UnsupportedError("Markov parameters need a continuum spectral density")


def _principal_value_shift(j_fn, omega_max: float, Omega0: float) -> float:
    """-PV int_0^wmax J(w)/(w - Omega0) dw by the subtraction method.

    Subtracting J(Omega0) makes the integrand smooth; the subtracted pole
    integrates to the exact logarithm.
    """
    J0 = float(j_fn(Omega0))
    eps = 1e-6 * max(Omega0, 1.0)
    Jp = (float(j_fn(Omega0 + eps)) - float(j_fn(Omega0 - eps))) / (2 * eps)

    def smooth(w):
        d = w - Omega0
        if abs(d) < 1e-9:
            return Jp
        return (float(j_fn(w)) - J0) / d

    val, _ = quad(smooth, 0.0, omega_max, points=[Omega0], limit=400)
    if Omega0 >= omega_max:
        raise DomainError("Omega0 must lie inside the spectral support")
    return -(val + J0 * np.log((omega_max - Omega0) / Omega0))


def ww_params(bath, Omega0: float, beta: float,
              statistics: Statistics = Statistics.BOSE) -> MarkovParams:
    """Single-pole parameters of a scalar continuum bath at frequency ``Omega0``."""
    if Omega0 <= 0:
        raise DomainError("Omega0 must be positive")
    if isinstance(bath, DiscreteBath):
        raise UnsupportedError("Markov parameters need a continuum spectral density")
    j_fn, omega_max = _spectral_density_fn(bath)
    gamma0 = float(np.pi * j_fn(Omega0))
    if gamma0 == 0.0 and float(j_fn(Omega0)) == 0.0 and _is_zero_spectrum(bath):
        shift = 0.0
    else:
        shift = _principal_value_shift(j_fn, omega_max, Omega0)
    f0 = occupation(Omega0, beta, statistics)
    return MarkovParams(Omega0=float(Omega0), Gamma0=gamma0,
                        delta_omega=float(shift), f0=float(f0))


def _is_zero_spectrum(bath) -> bool:
    if isinstance(bath, OhmicBath):
        return bath.coupling == 0.0
    return bool(np.all(bath.j_samples == 0.0))


def ww_solution(params: MarkovParams, grid: TimeGrid) -> np.ndarray:
    """Damped exponential exp[-Gamma0 t - i (Omega0 + delta_omega) t] on the grid."""
    ts = grid.times()
    return np.exp(-params.Gamma0 * ts - 1j * (params.Omega0 + params.delta_omega) * ts)


def born_markov_coeffs(params: MarkovParams) -> tuple[float, float, float]:
    """Constant master-equation coefficients (Gamma, Gamma_tilde, Omega_tilde)."""
    return params.Gamma0, 2.0 * params.f0 * params.Gamma0, params.Omega0 + params.delta_omega


def constant_coefficient_trajectory(params: MarkovParams, grid: TimeGrid) -> CoefficientTrajectory:
    """Trajectory with frozen rates, ready for the Lindblad integrators.

    W is the single-pole exponential and V the matching stationary-form
    covariance solution, so Heisenberg-moment predictions stay available.
    """
    gamma, gamma_tilde, omega = born_markov_coeffs(params)
    n1 = len(grid)
    ts = grid.times()
    W = ww_solution(params, grid).reshape(-1, 1, 1)
    W_dot = (-params.Gamma0 - 1j * (params.Omega0 + params.delta_omega)) * W
    ones = np.ones((n1, 1, 1))
    # dV/dt = -2 Gamma V + Gamma_tilde with V(0) = 0
    if gamma > 0:
        v = (gamma_tilde / (2 * gamma)) * (1.0 - np.exp(-2 * gamma * ts))
    else:
        v = gamma_tilde * ts
    V = v.reshape(-1, 1, 1).astype(complex)
    V_dot = (gamma_tilde - 2 * gamma * V.real).astype(complex)
    traj = CoefficientTrajectory(grid=grid, W=W, W_dot=W_dot, V=V, V_dot=V_dot,
                                 Gamma=gamma * ones.astype(complex),
                                 Gamma_tilde=gamma_tilde * ones.astype(complex),
                                 Omega_tilde=omega * ones.astype(complex),
                                 valid=np.ones(n1, bool))
    return traj
