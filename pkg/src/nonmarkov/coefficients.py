"""Time-dependent master-equation coefficients extracted from the trajectory.

With L(t) = W_dot(t) W(t)^-1 the three Hermitian coefficient matrices are

    Gamma       = -(L + L^dag) / 2            (dissipation)
    Omega_tilde =  i (L - L^dag) / 2          (renormalized frequencies)
    Gamma_tilde =  V_dot - L V - V L^dag      (thermal fluctuation)

Divergences where W(t) passes through zero are physical for strong coupling;
such samples are flagged, never smoothed over.
"""

from __future__ import annotations

import numpy as np

from .errors import RateGapError, SingularWError
from .volterra import CoefficientTrajectory

__all__ = [
    "DEFAULT_COND_THRESHOLD",
    "decay_matrices",
    "attach_coefficients",
    "effective_hamiltonian",
    "interpolate_flagged_rates",
]

DEFAULT_COND_THRESHOLD = 1e8


def _hermitize(A: np.ndarray) -> tuple[np.ndarray, float]:
    H = (A + A.conj().T) / 2.0
    return H, float(np.abs(A - H).max())


def decay_matrices(W: np.ndarray, W_dot: np.ndarray, V: np.ndarray,
                   V_dot: np.ndarray, cond_threshold: float = DEFAULT_COND_THRESHOLD,
                   t: float = np.nan):
    """Decay matrices (Gamma, Gamma_tilde, Omega_tilde) at a single sample.

    Raises :class:`SingularWError` when the condition number of W exceeds
    ``cond_threshold``.  All outputs are symmetrized; the residual removed by
    symmetrization is returned as the fourth element.
    """
    W = np.atleast_2d(np.asarray(W, dtype=complex))
    W_dot = np.atleast_2d(np.asarray(W_dot, dtype=complex))
    V = np.atleast_2d(np.asarray(V, dtype=complex))
    V_dot = np.atleast_2d(np.asarray(V_dot, dtype=complex))
    cond = np.linalg.cond(W)
    if not np.isfinite(cond) or cond > cond_threshold:
        raise SingularWError(t=t, condition=float(cond), threshold=cond_threshold)
    L = np.linalg.solve(W.T, W_dot.T).T  # W_dot W^-1
    Ld = L.conj().T
    gamma, r1 = _hermitize(-(L + Ld) / 2.0)
    omega, r2 = _hermitize(0.5j * (L - Ld))
    gamma_tilde, r3 = _hermitize(V_dot - L @ V - V @ Ld)
    return gamma, gamma_tilde, omega, max(r1, r2, r3)


def attach_coefficients(traj: CoefficientTrajectory,
                        cond_threshold: float = DEFAULT_COND_THRESHOLD) -> CoefficientTrajectory:
    """Fill Gamma, Gamma_tilde, Omega_tilde and the validity mask of a trajectory.

    Samples where W is beyond ``cond_threshold`` are marked invalid and left
    as NaN; downstream consumers decide whether a single-sample gap may be
    bridged (see :func:`interpolate_flagged_rates`).
    """
    if traj.V is None or traj.V_dot is None:
        raise ValueError("trajectory must carry V and V_dot; run solve_trajectory first")
    n1, s, _ = traj.W.shape
    ts = traj.times()
    gamma = np.full((n1, s, s), np.nan, complex)
    gamma_tilde = np.full((n1, s, s), np.nan, complex)
    omega = np.full((n1, s, s), np.nan, complex)
    valid = np.zeros(n1, bool)
    worst = 0.0
    flagged = []
    for k in range(n1):
        try:
            g, gt, om, res = decay_matrices(traj.W[k], traj.W_dot[k], traj.V[k],
                                            traj.V_dot[k], cond_threshold, t=ts[k])
        except SingularWError:
            flagged.append(k)
            continue
        gamma[k], gamma_tilde[k], omega[k] = g, gt, om
        valid[k] = True
        worst = max(worst, res)
    traj.Gamma = gamma
    traj.Gamma_tilde = gamma_tilde
    traj.Omega_tilde = omega
    traj.valid = valid
    traj.diagnostics["coefficient_hermitize_residual"] = worst
    traj.diagnostics["flagged_samples"] = flagged
    return traj


def effective_hamiltonian(omega_tilde: np.ndarray) -> np.ndarray:
    """Coefficient matrix of the effective system Hamiltonian a^dag . a.

    The diagonal holds the renormalized mode frequencies and the off-diagonal
    entries the bath-induced couplings between system modes; the matrix is the
    frequency block Omega_tilde itself.
    """
    omega_tilde = np.atleast_2d(np.asarray(omega_tilde))
    if np.abs(omega_tilde - omega_tilde.conj().T).max() > 1e-8:
        raise ValueError("effective Hamiltonian coefficients must be Hermitian")
    return omega_tilde


def interpolate_flagged_rates(traj: CoefficientTrajectory) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Rate arrays with isolated invalid samples bridged by linear interpolation.

    A single flagged sample between two valid neighbours is replaced by their
    mean; two or more consecutive flagged samples (or a flagged endpoint)
    raise :class:`RateGapError`.
    """
    if not traj.has_coefficients():
        raise ValueError("trajectory has no coefficients attached")
    valid = traj.valid
    gamma = traj.Gamma.copy()
    gamma_tilde = traj.Gamma_tilde.copy()
    omega = traj.Omega_tilde.copy()
    if valid.all():
        return gamma, gamma_tilde, omega
    bad = np.flatnonzero(~valid)
    ts = traj.times()
    for k in bad:
        if k == 0 or k == len(valid) - 1 or not (valid[k - 1] and valid[k + 1]):
            raise RateGapError(
                f"coefficients invalid over more than one consecutive sample near t={ts[k]:g}"
            )
        for arr in (gamma, gamma_tilde, omega):
            arr[k] = (arr[k - 1] + arr[k + 1]) / 2.0
    return gamma, gamma_tilde, omega
