"""Gaussian propagating-function parameters in the coherent-state representation.

The reduced dynamics maps coherent-state labels through a Gaussian kernel
with a scalar normalization ``A`` and three matrices ``J1``, ``J2``, ``J3``
determined by the propagator W(t) and covariance V(t).  Bose and Fermi
statistics share the structure but differ in the sign with which V enters.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SingularParamsError, UnsupportedError
from .model import Statistics

__all__ = ["PropagatorParams", "boson_params", "fermion_params", "evaluate_K"]


@dataclass(frozen=True, eq=False)
class PropagatorParams:
    """Parameters (A, J1, J2, J3) of the Gaussian propagating function at one time."""

    A: complex
    J1: np.ndarray
    J2: np.ndarray
    J3: np.ndarray
    statistics: Statistics


def boson_params(W: np.ndarray, V: np.ndarray) -> PropagatorParams:
    """Bose parameters: A = det(I+V)^-1, J1 = (I+V)^-1 W, J2 = V(I+V)^-1,
    J3 = I - W^dag (I+V)^-1 W.

    ``I + V`` is always invertible since V is positive semidefinite.
    """
    W = np.atleast_2d(np.asarray(W, dtype=complex))
    V = np.atleast_2d(np.asarray(V, dtype=complex))
    s = W.shape[0]
    ipv = np.eye(s) + V
    A = 1.0 / np.linalg.det(ipv)
    J1 = np.linalg.solve(ipv, W)
    J2 = V @ np.linalg.inv(ipv)
    J3 = np.eye(s) - W.conj().T @ np.linalg.solve(ipv, W)
    return PropagatorParams(A=complex(A), J1=J1, J2=J2, J3=J3, statistics=Statistics.BOSE)


def fermion_params(W: np.ndarray, V: np.ndarray) -> PropagatorParams:
    """Fermi parameters: A = det(I-V)^-1, J1 = (I-V)^-1 W, J2 = (I-V)^-1 - I,
    J3 = W^dag (I-V)^-1 W - I.

    Raises :class:`SingularParamsError` when an eigenvalue of V reaches 1
    (a fully occupied direction makes I - V singular).
    """
    W = np.atleast_2d(np.asarray(W, dtype=complex))
    V = np.atleast_2d(np.asarray(V, dtype=complex))
    s = W.shape[0]
    evs = np.linalg.eigvalsh((V + V.conj().T) / 2.0)
    if np.any(np.abs(evs - 1.0) < 1e-12):
        raise SingularParamsError(
            f"occupation matrix has an eigenvalue at 1 (eigenvalues {evs}); "
            "propagating-function parameters are singular"
        )
    imv = np.eye(s) - V
    A = 1.0 / np.linalg.det(imv)
    J1 = np.linalg.solve(imv, W)
    J2 = np.linalg.inv(imv) - np.eye(s)
    J3 = W.conj().T @ np.linalg.solve(imv, W) - np.eye(s)
    return PropagatorParams(A=complex(A), J1=J1, J2=J2, J3=J3, statistics=Statistics.FERMI)


def evaluate_K(params: PropagatorParams, alpha_bar, alpha_prime, xi, xi_bar_prime) -> complex:
    """Evaluate the Bose propagating function on coherent-state label vectors.

    K = A exp[ alpha_bar J1 xi + xi_bar' J1^dag alpha' + alpha_bar J2 alpha'
               + xi_bar' J3 xi ].

    Fermi parameters label Grassmann-valued arguments and cannot be evaluated
    numerically; all Fermi observables flow through the parameter matrices.
    """
    if params.statistics is not Statistics.BOSE:
        raise UnsupportedError("K is numerically evaluable for Bose statistics only")
    ab = np.atleast_1d(np.asarray(alpha_bar, dtype=complex))
    ap = np.atleast_1d(np.asarray(alpha_prime, dtype=complex))
    xi = np.atleast_1d(np.asarray(xi, dtype=complex))
    xbp = np.atleast_1d(np.asarray(xi_bar_prime, dtype=complex))
    expo = (ab @ params.J1 @ xi + xbp @ params.J1.conj().T @ ap
            + ab @ params.J2 @ ap + xbp @ params.J3 @ xi)
    return complex(params.A * np.exp(expo))
