"""Memory and noise kernels of the bath, tabulated on uniform time grids.

The memory kernel G(t) is the Fourier transform of the interaction spectrum
and drives the dissipative part of the dynamics; the noise kernel carries the
thermal occupation of the bath and vanishes identically at zero temperature.
Both are Hermitian under time reversal, G(-t) = G(t)^dag, which is how
negative arguments are evaluated throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, UnsupportedError
from .model import (
    DiscreteBath,
    OhmicBath,
    Statistics,
    TabulatedBath,
    TimeGrid,
    UniverseModel,
    bath_occupations,
)

__all__ = ["KernelTable", "memory_kernel", "noise_kernel", "build_kernel_table"]

# time-chunk size for discrete-bath tables; bounds the exp() workspace
_CHUNK = 256


@dataclass(frozen=True, eq=False)
class KernelTable:
    """Kernel samples on a uniform grid, shared by the Volterra machinery.

    On a uniform grid the kernels only ever enter through differences of
    sample times, so a 1-D table of length ``n_steps + 1`` suffices.
    """

    grid: TimeGrid
    G: np.ndarray        # (n+1, n_sys, n_sys)
    G_tilde: np.ndarray  # (n+1, n_sys, n_sys)

    @property
    def n_sys(self) -> int:
        return self.G.shape[1]


def _discrete_table(bath: DiscreteBath, ts: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """sum_l R_il w_l conj(R_jl) exp(-i omega_l t) for every t, chunked over t."""
    R = bath.couplings
    Rw = R * weights[None, :]
    out = np.empty((ts.size, R.shape[0], R.shape[0]), complex)
    for lo in range(0, ts.size, _CHUNK):
        ph = np.exp(-1j * np.outer(ts[lo:lo + _CHUNK], bath.omega))
        out[lo:lo + _CHUNK] = np.einsum("il,kl,jl->kij", Rw, ph, R.conj())
    return out


def _quadrature_grid(bath, t_max: float) -> tuple[np.ndarray, np.ndarray]:
    """Frequency grid and trapezoid weights resolving both J and exp(-i w t)."""
    if isinstance(bath, OhmicBath):
        omega_max = 10.0 * bath.cutoff
        d_target = min(np.pi / (4.0 * t_max), bath.cutoff / 400.0) if t_max > 0 else bath.cutoff / 400.0
        n = int(np.ceil(omega_max / d_target)) + 1
        n = min(max(n, 512), 400_000)
        omega = np.linspace(0.0, omega_max, n)
    else:
        omega = bath.omega
        if t_max > 0 and np.max(np.diff(omega)) > np.pi / (4.0 * t_max) + 1e-15:
            raise DomainError(
                "tabulated frequency grid too coarse for the requested times: "
                f"need spacing <= pi/(4*t_max) = {np.pi / (4 * t_max):.3e}"
            )
    w = np.empty_like(omega)
    w[1:-1] = (omega[2:] - omega[:-2]) / 2.0
    w[0] = (omega[1] - omega[0]) / 2.0
    w[-1] = (omega[-1] - omega[-2]) / 2.0
    return omega, w


def _thermal_weight(bath, omega: np.ndarray, beta: float, statistics: Statistics) -> np.ndarray:
    """J(omega) * f(omega) with the infrared limit handled for Bose statistics."""
    j = bath.spectral_density(omega)
    if statistics is Statistics.FERMI:
        return j / (np.exp(beta * omega) + 1.0)
    out = np.empty_like(j)
    pos = omega > 0
    out[pos] = j[pos] / np.expm1(beta * omega[pos])
    if np.any(~pos):
        if np.any(omega < 0):
            raise DomainError("Bose noise kernel requires nonnegative frequencies")
        if isinstance(bath, OhmicBath):
            out[~pos] = bath.coupling / beta
        else:
            slope = (j[1] - j[0]) / (omega[1] - omega[0]) if j[0] == 0 else None
            if slope is None:
                raise DomainError("Bose occupation diverges at omega = 0 with J(0) > 0")
            out[~pos] = slope / beta
    return out


def _continuum_fourier(values: np.ndarray, omega: np.ndarray, weights: np.ndarray,
                       ts: np.ndarray) -> np.ndarray:
    out = np.empty(ts.size, complex)
    vw = values * weights
    for lo in range(0, ts.size, _CHUNK):
        ph = np.exp(-1j * np.outer(ts[lo:lo + _CHUNK], omega))
        out[lo:lo + _CHUNK] = ph @ vw
    return out


def _memory_samples(bath, ts: np.ndarray) -> np.ndarray:
    if isinstance(bath, DiscreteBath):
        return _discrete_table(bath, ts, np.ones(bath.n_modes))
    if isinstance(bath, OhmicBath):
        lam, wc = bath.coupling, bath.cutoff
        vals = lam * wc**2 / (1.0 + 1j * wc * ts) ** 2
        return vals.reshape(-1, 1, 1)
    omega, w = _quadrature_grid(bath, float(ts.max()))
    return _continuum_fourier(bath.spectral_density(omega), omega, w, ts).reshape(-1, 1, 1)


def _noise_samples(bath, beta: float, statistics: Statistics, ts: np.ndarray) -> np.ndarray:
    if np.isinf(beta):
        n_sys = bath.n_sys if isinstance(bath, DiscreteBath) else 1
        return np.zeros((ts.size, n_sys, n_sys), complex)
    if isinstance(bath, DiscreteBath):
        return _discrete_table(bath, ts, bath_occupations(bath, beta, statistics))
    omega, w = _quadrature_grid(bath, float(ts.max()))
    vals = _thermal_weight(bath, omega, beta, statistics)
    return _continuum_fourier(vals, omega, w, ts).reshape(-1, 1, 1)


def memory_kernel(bath, t: float) -> np.ndarray:
    """Memory kernel G(t) as an n_sys x n_sys complex matrix.

    Discrete baths give the exact finite mode sum; the Ohmic bath uses its
    closed form; tabulated spectra are integrated by composite trapezoid.
    """
    if t < 0:
        raise DomainError("memory kernel is tabulated for t >= 0; use G(-t) = G(t)^dag")
    return _memory_samples(bath, np.array([float(t)]))[0]


def noise_kernel(bath, beta: float, statistics: Statistics, t: float) -> np.ndarray:
    """Noise kernel carrying the bath occupations; zero at beta = inf."""
    if t < 0:
        raise DomainError("noise kernel is tabulated for t >= 0; use the Hermitian conjugate")
    return _noise_samples(bath, beta, statistics, np.array([float(t)]))[0]


def build_kernel_table(model: UniverseModel, grid: TimeGrid) -> KernelTable:
    """Tabulate both kernels for every sample of ``grid``."""
    if not isinstance(model.bath, DiscreteBath) and model.n_sys != 1:
        raise UnsupportedError("continuum baths support a single system mode only")
    ts = grid.times()
    G = _memory_samples(model.bath, ts)
    Gt = _noise_samples(model.bath, model.beta, model.statistics, ts)
    return KernelTable(grid=grid, G=G, G_tilde=Gt)
