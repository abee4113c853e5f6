"""Hot numerical kernels: numba-jitted loops with pure-numpy fallbacks.

The Volterra recursion is inherently sequential (each step consumes the full
history), so it is the one place where a compiled loop pays off.  Set
``NONMARKOV_NO_NUMBA=1`` to force the numpy implementations; the jitted and
numpy paths are equivalent to roundoff and are compared by the test suite and
by ``benchmarks/bench_accel.py``.
"""

from __future__ import annotations

import os

import numpy as np
import scipy.fft

_flag = os.environ.get("NONMARKOV_NO_NUMBA", "").strip().lower()
NUMBA_DISABLED = _flag in ("1", "true", "yes", "on")

HAVE_NUMBA = False
if not NUMBA_DISABLED:
    try:
        from numba import njit

        HAVE_NUMBA = True
    except ImportError:  # pragma: no cover - numba is a hard dependency
        HAVE_NUMBA = False

if not HAVE_NUMBA:
    def njit(*args, **kwargs):  # no-op decorator
        if args and callable(args[0]):
            return args[0]

        def wrap(fn):
            return fn

        return wrap


def use_numba() -> bool:
    """True when the jitted kernels are active."""
    return HAVE_NUMBA


# ---------------------------------------------------------------------------
# Volterra time stepping
#
# Scheme: trapezoidal product integration of the memory convolution combined
# with an exact one-step factor exp(-i M h) for the bare rotation, which keeps
# the phase of the uncoupled motion exact.  Per step:
#
#   W_k = N [ F (W_{k-1} - (h/2) C_{k-1}) - (h^2/2) S_k ]
#   S_k = (1/2) G_k W_0 + sum_{j=1}^{k-1} G_{k-j} W_j
#   C_k = h (S_k + (1/2) G_0 W_k)          (trapezoid convolution at t_k)
#   Wd_k = -i M W_k - C_k                  (derivative from the equation)
#
# with constant matrices F = exp(-i M h) and N = (I + (h^2/4) G_0)^{-1}.
# ---------------------------------------------------------------------------


def _volterra_scalar_numpy(G, f_step, n_inv, m, h):
    n = G.shape[0] - 1
    W = np.empty(n + 1, np.complex128)
    Wd = np.empty(n + 1, np.complex128)
    C = np.empty(n + 1, np.complex128)
    W[0] = 1.0
    C[0] = 0.0
    Wd[0] = -1j * m
    g0 = G[0]
    Grev = G[::-1].copy()  # contiguous reversed kernel for fast dot products
    for k in range(1, n + 1):
        S = 0.5 * G[k]
        if k > 1:
            S += np.dot(Grev[n - k + 1:n], W[1:k])
        rhs = f_step * (W[k - 1] - 0.5 * h * C[k - 1]) - 0.5 * h * h * S
        Wk = n_inv * rhs
        W[k] = Wk
        C[k] = h * (S + 0.5 * g0 * Wk)
        Wd[k] = -1j * m * Wk - C[k]
    return W, Wd


@njit(cache=True)
def _volterra_scalar_numba(G, f_step, n_inv, m, h):  # pragma: no cover - jitted
    n = G.shape[0] - 1
    W = np.empty(n + 1, np.complex128)
    Wd = np.empty(n + 1, np.complex128)
    C = np.empty(n + 1, np.complex128)
    W[0] = 1.0
    C[0] = 0.0
    Wd[0] = -1j * m
    g0 = G[0]
    for k in range(1, n + 1):
        S = 0.5 * G[k]
        for j in range(1, k):
            S += G[k - j] * W[j]
        rhs = f_step * (W[k - 1] - 0.5 * h * C[k - 1]) - 0.5 * h * h * S
        Wk = n_inv * rhs
        W[k] = Wk
        C[k] = h * (S + 0.5 * g0 * Wk)
        Wd[k] = -1j * m * Wk - C[k]
    return W, Wd


def _volterra_matrix_numpy(G, F, Ninv, M, h):
    n = G.shape[0] - 1
    s = G.shape[1]
    W = np.empty((n + 1, s, s), np.complex128)
    Wd = np.empty((n + 1, s, s), np.complex128)
    C = np.empty((n + 1, s, s), np.complex128)
    W[0] = np.eye(s)
    C[0] = 0.0
    Wd[0] = -1j * M
    for k in range(1, n + 1):
        S = 0.5 * G[k].copy()
        if k > 1:
            S += np.einsum("mij,mjk->ik", G[k - 1:0:-1], W[1:k])
        rhs = F @ (W[k - 1] - 0.5 * h * C[k - 1]) - 0.5 * h * h * S
        Wk = Ninv @ rhs
        W[k] = Wk
        C[k] = h * (S + 0.5 * (G[0] @ Wk))
        Wd[k] = -1j * (M @ Wk) - C[k]
    return W, Wd


@njit(cache=True)
def _volterra_matrix_numba(G, F, Ninv, M, h):  # pragma: no cover - jitted
    n = G.shape[0] - 1
    s = G.shape[1]
    W = np.empty((n + 1, s, s), np.complex128)
    Wd = np.empty((n + 1, s, s), np.complex128)
    C = np.empty((n + 1, s, s), np.complex128)
    S = np.empty((s, s), np.complex128)
    for a in range(s):
        for b in range(s):
            W[0, a, b] = 1.0 if a == b else 0.0
            C[0, a, b] = 0.0
            Wd[0, a, b] = -1j * M[a, b]
    for k in range(1, n + 1):
        for a in range(s):
            for b in range(s):
                S[a, b] = 0.5 * G[k, a, b]
        for j in range(1, k):
            for a in range(s):
                for b in range(s):
                    acc = 0.0 + 0.0j
                    for c in range(s):
                        acc += G[k - j, a, c] * W[j, c, b]
                    S[a, b] += acc
        for a in range(s):
            for b in range(s):
                acc = 0.0 + 0.0j
                for c in range(s):
                    acc += F[a, c] * (W[k - 1, c, b] - 0.5 * h * C[k - 1, c, b])
                acc -= 0.5 * h * h * S[a, b]
                Wd[k, a, b] = acc  # reuse as rhs scratch
        for a in range(s):
            for b in range(s):
                acc = 0.0 + 0.0j
                for c in range(s):
                    acc += Ninv[a, c] * Wd[k, c, b]
                W[k, a, b] = acc
        for a in range(s):
            for b in range(s):
                acc = 0.0 + 0.0j
                for c in range(s):
                    acc += G[0, a, c] * W[k, c, b]
                C[k, a, b] = h * (S[a, b] + 0.5 * acc)
        for a in range(s):
            for b in range(s):
                acc = 0.0 + 0.0j
                for c in range(s):
                    acc += M[a, c] * W[k, c, b]
                Wd[k, a, b] = -1j * acc - C[k, a, b]
    return W, Wd


def volterra_loop(G, F, Ninv, M, h, force_numpy: bool = False):
    """Run the Volterra recursion over a tabulated kernel.

    Parameters
    ----------
    G : (n+1, s, s) complex array
        Memory kernel samples G(k h).
    F : (s, s) complex array
        One-step bare propagator exp(-i M h).
    Ninv : (s, s) complex array
        Inverse of the implicit step matrix I + (h^2/4) G(0).
    M : (s, s) complex array
        System matrix.
    h : float
        Step size.

    Returns ``(W, W_dot)`` with shape (n+1, s, s).
    """
    s = G.shape[1]
    numba_ok = HAVE_NUMBA and not force_numpy
    if s == 1:
        g = np.ascontiguousarray(G[:, 0, 0])
        fn = _volterra_scalar_numba if numba_ok else _volterra_scalar_numpy
        W, Wd = fn(g, complex(F[0, 0]), complex(Ninv[0, 0]), complex(M[0, 0]), float(h))
        return W.reshape(-1, 1, 1), Wd.reshape(-1, 1, 1)
    fn = _volterra_matrix_numba if numba_ok else _volterra_matrix_numpy
    return fn(np.ascontiguousarray(G), np.ascontiguousarray(F),
              np.ascontiguousarray(Ninv), np.ascontiguousarray(M), float(h))


def warmup():
    """Trigger JIT compilation on a tiny problem (no-op for the numpy path)."""
    if not HAVE_NUMBA:
        return
    g1 = np.zeros((3, 1, 1), np.complex128)
    e1 = np.eye(1, dtype=np.complex128)
    volterra_loop(g1, e1, e1, e1, 0.1)
    g2 = np.zeros((3, 2, 2), np.complex128)
    e2 = np.eye(2, dtype=np.complex128)
    volterra_loop(g2, e2, e2, e2, 0.1)


# ---------------------------------------------------------------------------
# Discrete convolution tables (FFT based; not a sequential loop, so there is
# no separate jitted variant)
# ---------------------------------------------------------------------------


def conv_table(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """All partial convolution sums F_k = sum_{j=0}^{k} x_{k-j} @ y_j.

    ``x`` has shape (n+1, p, q) and ``y`` (n+1, q, r); the result has shape
    (n+1, p, r).  1-D inputs are treated as scalar sequences.
    """
    if x.ndim == 1 and y.ndim == 1:
        n1 = x.shape[0]
        L = scipy.fft.next_fast_len(2 * n1 - 1)
        X = scipy.fft.fft(x, L)
        Y = scipy.fft.fft(y, L)
        return scipy.fft.ifft(X * Y)[:n1]
    n1 = x.shape[0]
    L = scipy.fft.next_fast_len(2 * n1 - 1)
    out = np.empty((n1, x.shape[1], y.shape[2]), np.complex128)
    X = scipy.fft.fft(x, L, axis=0)
    # chunk the right factor to bound FFT workspace for wide tables
    chunk = max(1, 2_000_000 // max(1, L * y.shape[1]))
    for lo in range(0, y.shape[2], chunk):
        Y = scipy.fft.fft(y[:, :, lo:lo + chunk], L, axis=0)
        out[:, :, lo:lo + chunk] = scipy.fft.ifft(np.matmul(X, Y), axis=0)[:n1]
    return out
