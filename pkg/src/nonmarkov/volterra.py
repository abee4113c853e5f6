"""Solver for the matrix Volterra integro-differential equation of the propagator.

The system block W(t) of the full propagator obeys

    dW/dt + i M W(t) + int_0^t G(t - tau) W(tau) dtau = 0,    W(0) = I,

and every other quantity of the theory (bath block T, covariance V and its
derivative) follows from W by convolutions against tabulated kernels.  All
quadrature is trapezoidal on the uniform grid; the time stepping combines an
exact one-step factor exp(-i M h) with an implicit trapezoid treatment of the
memory term, which keeps the scheme second order with the bare phase exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _accel
from .errors import NonConvergenceError, UnsupportedError
from .kernels import KernelTable, build_kernel_table
from .model import DiscreteBath, TimeGrid, UniverseModel

__all__ = [
    "CoefficientTrajectory",
    "solve_W",
    "compute_T",
    "compute_V",
    "compute_V_dot",
    "solve_trajectory",
]


@dataclass(eq=False)
class CoefficientTrajectory:
    """Propagator and master-equation data sampled on a uniform grid.

    ``W``/``W_dot`` are always present; ``T`` exists for discrete baths only;
    ``V``/``V_dot`` are the thermal covariance and its derivative; the decay
    matrices are attached by :func:`nonmarkov.coefficients.attach_coefficients`,
    which also fills ``valid`` (False where W was too ill-conditioned).
    """

    grid: TimeGrid
    W: np.ndarray
    W_dot: np.ndarray
    T: np.ndarray | None = None
    V: np.ndarray | None = None
    V_dot: np.ndarray | None = None
    Gamma: np.ndarray | None = None
    Gamma_tilde: np.ndarray | None = None
    Omega_tilde: np.ndarray | None = None
    valid: np.ndarray | None = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def n_sys(self) -> int:
        return self.W.shape[1]

    def times(self) -> np.ndarray:
        return self.grid.times()

    def has_coefficients(self) -> bool:
        return self.Gamma is not None


def _check_table(model: UniverseModel, kernels: KernelTable, grid: TimeGrid):
    if kernels.grid != grid:
        raise ValueError("kernel table was built for a different time grid")
    if kernels.n_sys != model.n_sys:
        raise ValueError("kernel table dimension does not match the model")


def solve_W(model: UniverseModel, kernels: KernelTable, grid: TimeGrid,
            force_numpy: bool = False) -> CoefficientTrajectory:
    """Integrate the memory equation for W on ``grid``.

    Returns a trajectory holding ``W`` and ``W_dot``; the derivative is
    evaluated from the equation itself (never by finite differences), so it
    satisfies the integro-differential identity at every sample.
    """
    _check_table(model, kernels, grid)
    s = model.n_sys
    h = grid.h
    lam, X = np.linalg.eigh(model.M)
    F = (X * np.exp(-1j * lam * h)) @ X.conj().T
    step_matrix = np.eye(s) + (h * h / 4.0) * kernels.G[0]
    try:
        Ninv = np.linalg.inv(step_matrix)
    except np.linalg.LinAlgError as exc:
        raise NonConvergenceError(
            f"implicit step matrix is singular at t={h:g}", t=h) from exc
    cond = np.linalg.cond(step_matrix)
    if not np.isfinite(cond) or cond > 1e12:
        raise NonConvergenceError(
            f"implicit step matrix is ill-conditioned (cond={cond:.2e}) at t={h:g}", t=h)
    W, W_dot = _accel.volterra_loop(kernels.G, F, Ninv, model.M, h,
                                    force_numpy=force_numpy)
    return CoefficientTrajectory(grid=grid, W=W, W_dot=W_dot)


def compute_T(model: UniverseModel, grid: TimeGrid, W: np.ndarray) -> np.ndarray:
    """Bath block T(t) = -i int_0^t W(t - tau) R exp(-i E tau) dtau.

    Discrete baths only; continuum scenarios use :func:`compute_V` directly.
    """
    bath = model.bath
    if not isinstance(bath, DiscreteBath):
        raise UnsupportedError("T is defined for discrete baths; use compute_V for continuum")
    ts = grid.times()
    h = grid.h
    B = bath.couplings[None, :, :] * np.exp(-1j * np.outer(ts, bath.omega))[:, None, :]
    full = _accel.conv_table(W, B)
    T = -1j * (h * full - (h / 2.0) * (W @ B[0] + B))
    T[0] = 0.0
    return T


def _lower_convolution(W: np.ndarray, Gt: np.ndarray, h: float) -> np.ndarray:
    """X_j = sum_{i<j} wbar_i W_i Gt_{j-i} with trapezoid interior weights."""
    full = _accel.conv_table(W, Gt)
    X = h * full - h * (W @ Gt[0]) - (h / 2.0) * Gt
    X[0] = 0.0
    return X


def _weighted_running_sum(x: np.ndarray, h: float) -> np.ndarray:
    """sum_{j<=k} w_j^{(k)} x_j for every k (trapezoid weights on [0, t_k])."""
    s = np.cumsum(x, axis=0)
    out = h * s - (h / 2.0) * (x[0] + x)
    out[0] = 0.0
    return out


def compute_V(model: UniverseModel, kernels: KernelTable, grid: TimeGrid,
              W: np.ndarray) -> np.ndarray:
    """Thermal covariance V(t), the double memory integral of W against the noise kernel.

    Evaluated incrementally in O(n^2) as V = Z + Z^dag with a running outer
    integral; the discretization reproduces the naive double-trapezoid sum
    exactly, so for discrete baths V equals T f T^dag to roundoff.
    """
    _check_table(model, kernels, grid)
    h = grid.h
    Gt = kernels.G_tilde
    X = _lower_convolution(W, Gt, h)
    P = X @ np.swapaxes(W.conj(), 1, 2)
    D = (W @ Gt[0]) @ np.swapaxes(W.conj(), 1, 2)
    sd = np.cumsum(D, axis=0)
    diag = h * h * sd - (3.0 * h * h / 4.0) * (D[0] + D)
    diag[0] = 0.0
    Z = _weighted_running_sum(P, h) + 0.5 * diag
    V = Z + np.swapaxes(Z.conj(), 1, 2)
    V[0] = 0.0
    return V


def compute_V_dot(model: UniverseModel, kernels: KernelTable, grid: TimeGrid,
                  W: np.ndarray, V: np.ndarray | None = None) -> np.ndarray:
    """Time derivative of V, Hermitian by construction.

    dV/dt = W(t) Y(t)^dag + Y(t) W(t)^dag with the running inner integral
    Y(t) = int_0^t W(tau) Gt(t - tau) dtau.  ``V`` is accepted for interface
    symmetry with :func:`compute_V` and is not consumed.
    """
    _check_table(model, kernels, grid)
    h = grid.h
    Gt = kernels.G_tilde
    Y = _lower_convolution(W, Gt, h) + (h / 2.0) * (W @ Gt[0])
    Y[0] = 0.0
    Wc = np.swapaxes(W.conj(), 1, 2)
    Yc = np.swapaxes(Y.conj(), 1, 2)
    return W @ Yc + Y @ Wc


def solve_trajectory(model: UniverseModel, grid: TimeGrid, *,
                     kernels: KernelTable | None = None,
                     include_T: bool = False,
                     force_numpy: bool = False) -> CoefficientTrajectory:
    """Solve for W and fill V and V_dot (and T for discrete baths on request)."""
    if kernels is None:
        kernels = build_kernel_table(model, grid)
    traj = solve_W(model, kernels, grid, force_numpy=force_numpy)
    traj.V = compute_V(model, kernels, grid, traj.W)
    traj.V_dot = compute_V_dot(model, kernels, grid, traj.W)
    herm = float(np.abs(traj.V - np.swapaxes(traj.V.conj(), 1, 2)).max())
    traj.diagnostics["v_hermiticity_residual"] = herm
    if include_T and isinstance(model.bath, DiscreteBath):
        traj.T = compute_T(model, grid, traj.W)
    return traj
