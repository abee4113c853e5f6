"""Exact-diagonalization oracle for discrete baths.

The full quadratic system+bath Hamiltonian is a finite Hermitian matrix, so
its one-particle propagator exp(-i H t) is computable exactly by
eigendecomposition.  Splitting it into system/bath blocks gives independent
reference values for everything the Volterra machinery produces, plus the
unitarity constraints the blocks must satisfy at any time.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import UnsupportedError
from .model import DiscreteBath, Statistics, UniverseModel, bath_occupations
from .propagator import PropagatorParams
from .volterra import CoefficientTrajectory

__all__ = [
    "MAX_ORACLE_MODES",
    "FullPropagatorBlocks",
    "build_full_hamiltonian",
    "ExactPropagator",
    "exact_blocks",
    "UnitarityResiduals",
    "unitarity_check",
    "TrajectoryErrors",
    "compare_trajectory",
    "params_from_blocks",
]

# dense eigendecomposition stays seconds-scale below this
MAX_ORACLE_MODES = 5000


@dataclass(frozen=True, eq=False)
class FullPropagatorBlocks:
    """Blocks of exp(-i H t): system (W), system-bath (T, P) and bath (Q)."""

    t: float
    W: np.ndarray
    T: np.ndarray
    P: np.ndarray
    Q: np.ndarray


def build_full_hamiltonian(model: UniverseModel) -> np.ndarray:
    """Assemble the (n_sys + N_b) Hermitian one-particle Hamiltonian."""
    if not isinstance(model.bath, DiscreteBath):
        raise UnsupportedError("the exact oracle requires a discrete bath; "
                               "discretize continuum baths first")
    bath = model.bath
    if bath.n_modes > MAX_ORACLE_MODES:
        raise UnsupportedError(f"oracle bath capped at {MAX_ORACLE_MODES} modes")
    ns, nb = model.n_sys, bath.n_modes
    H = np.zeros((ns + nb, ns + nb), complex)
    H[:ns, :ns] = model.M
    H[:ns, ns:] = bath.couplings
    H[ns:, :ns] = bath.couplings.conj().T
    H[ns:, ns:] = np.diag(bath.omega)
    return H


class ExactPropagator:
    """Eigendecomposition of the full Hamiltonian, reused across all times."""

    def __init__(self, model: UniverseModel):
        self.n_sys = model.n_sys
        self._H = build_full_hamiltonian(model)
        self._evals, self._evecs = np.linalg.eigh(self._H)

    def full(self, t: float) -> np.ndarray:
        X = self._evecs
        return (X * np.exp(-1j * self._evals * t)) @ X.conj().T

    def blocks(self, t: float) -> FullPropagatorBlocks:
        ns = self.n_sys
        U = self.full(t)
        return FullPropagatorBlocks(t=float(t), W=U[:ns, :ns], T=U[:ns, ns:],
                                    P=U[ns:, :ns], Q=U[ns:, ns:])

    def W_samples(self, ts: np.ndarray) -> np.ndarray:
        """System block at many times without forming the full matrix."""
        ns = self.n_sys
        Xs = self._evecs[:ns, :]
        ph = np.exp(-1j * np.outer(np.asarray(ts, float), self._evals))
        return np.einsum("il,kl,jl->kij", Xs, ph, Xs.conj())

    def T_samples(self, ts: np.ndarray) -> np.ndarray:
        ns = self.n_sys
        Xs = self._evecs[:ns, :]
        Xb = self._evecs[ns:, :]
        ph = np.exp(-1j * np.outer(np.asarray(ts, float), self._evals))
        return np.einsum("il,kl,jl->kij", Xs, ph, Xb.conj())


def exact_blocks(H_full: np.ndarray, n_sys: int, t: float) -> FullPropagatorBlocks:
    """One-shot block evaluation of exp(-i H t) for a prebuilt Hamiltonian."""
    evals, X = np.linalg.eigh(H_full)
    U = (X * np.exp(-1j * evals * t)) @ X.conj().T
    return FullPropagatorBlocks(t=float(t), W=U[:n_sys, :n_sys], T=U[:n_sys, n_sys:],
                                P=U[n_sys:, :n_sys], Q=U[n_sys:, n_sys:])


@dataclass(frozen=True)
class UnitarityResiduals:
    """Max-norm residuals of the four block constraints of a unitary propagator."""

    ww_tt: float       # W W^dag + T T^dag - I
    pp_qq: float       # P P^dag + Q Q^dag - I
    wp_tq: float       # W P^dag + T Q^dag
    p_reconstruction: float  # P + Q T^dag (W^dag)^-1

    def max(self) -> float:
        return max(self.ww_tt, self.pp_qq, self.wp_tq, self.p_reconstruction)


def unitarity_check(blocks: FullPropagatorBlocks) -> UnitarityResiduals:
    """Residuals of the unitarity constraints; all vanish for exact blocks."""
    W, T, P, Q = blocks.W, blocks.T, blocks.P, blocks.Q
    ns, nb = W.shape[0], Q.shape[0]
    r1 = np.abs(W @ W.conj().T + T @ T.conj().T - np.eye(ns)).max()
    r2 = np.abs(P @ P.conj().T + Q @ Q.conj().T - np.eye(nb)).max()
    r3 = np.abs(W @ P.conj().T + T @ Q.conj().T).max()
    if np.linalg.cond(W) < 1e8:
        P_rec = -Q @ np.linalg.solve(W, T).conj().T
        r4 = np.abs(P - P_rec).max()
    else:
        r4 = np.nan
    return UnitarityResiduals(float(r1), float(r2), float(r3), float(r4))


@dataclass(frozen=True)
class TrajectoryErrors:
    """Max-over-time deviations between a Volterra trajectory and the oracle."""

    w_error: float
    t_error: float | None = None
    v_error: float | None = None


def compare_trajectory(traj: CoefficientTrajectory, model: UniverseModel,
                       sample_stride: int = 1,
                       include_T: bool = True,
                       include_V: bool = True) -> TrajectoryErrors:
    """Cross-validate W (and optionally T, V) of a trajectory against the oracle.

    ``sample_stride`` thins the comparison grid; V is compared against
    T_oracle f T_oracle^dag, the independent closed form of the covariance.
    """
    prop = ExactPropagator(model)
    ts = traj.times()[::sample_stride]
    Wo = prop.W_samples(ts)
    w_err = float(np.abs(traj.W[::sample_stride] - Wo).max())
    t_err = v_err = None
    need_T = (include_T and traj.T is not None) or include_V
    if need_T:
        To = prop.T_samples(ts)
        if include_T and traj.T is not None:
            t_err = float(np.abs(traj.T[::sample_stride] - To).max())
        if include_V and traj.V is not None:
            f = bath_occupations(model.bath, model.beta, model.statistics)
            Vo = np.einsum("kil,l,kjl->kij", To, f, To.conj())
            v_err = float(np.abs(traj.V[::sample_stride] - Vo).max())
    return TrajectoryErrors(w_error=w_err, t_error=t_err, v_error=v_err)


def params_from_blocks(blocks: FullPropagatorBlocks, occupations: np.ndarray,
                       statistics: Statistics = Statistics.BOSE) -> PropagatorParams:
    """Propagating-function parameters assembled from the full-propagator blocks.

    This is the independent bath-space route to (A, J1, J2, J3): everything is
    expressed through P and Q and the bath occupation matrix instead of the
    covariance V.  Bose statistics only; it exists as a cross-check target for
    :func:`nonmarkov.propagator.boson_params`.
    """
    if statistics is not Statistics.BOSE:
        raise UnsupportedError("block-form parameters are implemented for Bose statistics")
    W, T, P, Q = blocks.W, blocks.T, blocks.P, blocks.Q
    f = np.asarray(occupations, dtype=float)
    nb = f.size
    g = np.diag(f / (1.0 + f))
    core = np.eye(nb) - Q @ g @ Q.conj().T
    core_inv = np.linalg.inv(core)
    prefactor = 1.0 / np.prod(1.0 + f)
    A = prefactor / np.linalg.det(core)
    Tg = T @ g
    J1 = W + Tg @ Q.conj().T @ core_inv @ P
    J2 = Tg @ T.conj().T + Tg @ Q.conj().T @ core_inv @ Q @ g @ T.conj().T
    J3 = P.conj().T @ core_inv @ P
    return PropagatorParams(A=complex(A), J1=J1, J2=J2, J3=J3, statistics=Statistics.BOSE)
