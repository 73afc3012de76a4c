"""Hot numeric kernels with a numba path and a pure-numpy fallback.

The backend is chosen once at import time. Set ``QMLAB_DISABLE_NUMBA=1`` to
force the numpy path (numba is also skipped if it cannot be imported). Both
implementations of every kernel stay importable under ``*_numba`` /
``*_numpy`` names so tests and ``benchmarks/bench_kernels.py`` can compare
them directly.
"""

from __future__ import annotations

import os

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

try:
    import numba
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None

HAVE_NUMBA = numba is not None
USE_NUMBA = HAVE_NUMBA and os.environ.get("QMLAB_DISABLE_NUMBA", "").strip().lower() not in {
    "1",
    "true",
    "yes",
    "on",
}


def _njit(fn):
    if HAVE_NUMBA:
        return numba.njit(cache=True)(fn)
    return fn


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"


# 4th-order one-sided stencils for the first two and last two samples.
_EDGE0 = np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / 12.0
_EDGE1 = np.array([-3.0, -10.0, 18.0, -6.0, 1.0]) / 12.0


# ---------------------------------------------------------------------------
# first derivative on a uniform grid

def first_derivative_numpy(f: np.ndarray, h: float) -> np.ndarray:
    f = np.asarray(f)
    if f.size < 5:
        raise ValueError("need at least 5 samples for the 4th-order stencil")
    g = np.empty_like(f, dtype=np.result_type(f, np.float64))
    g[2:-2] = (f[:-4] - 8.0 * f[1:-3] + 8.0 * f[3:-1] - f[4:]) / 12.0
    g[0] = _EDGE0 @ f[:5]
    g[1] = _EDGE1 @ f[:5]
    r = f[::-1][:5]
    g[-1] = -(_EDGE0 @ r)
    g[-2] = -(_EDGE1 @ r)
    return g / h


@_njit
def _first_derivative_loop(f, h, out):
    n = f.shape[0]
    for i in range(2, n - 2):
        out[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / (12.0 * h)
    out[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / (12.0 * h)
    out[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) / (12.0 * h)
    out[n - 1] = (25.0 * f[n - 1] - 48.0 * f[n - 2] + 36.0 * f[n - 3] - 16.0 * f[n - 4] + 3.0 * f[n - 5]) / (
        12.0 * h
    )
    out[n - 2] = (3.0 * f[n - 1] + 10.0 * f[n - 2] - 18.0 * f[n - 3] + 6.0 * f[n - 4] - f[n - 5]) / (12.0 * h)
    return out


def first_derivative_numba(f: np.ndarray, h: float) -> np.ndarray:
    f = np.ascontiguousarray(f)
    if f.size < 5:
        raise ValueError("need at least 5 samples for the 4th-order stencil")
    if np.iscomplexobj(f):
        f = f.astype(np.complex128)
    else:
        f = f.astype(np.float64)
    return _first_derivative_loop(f, float(h), np.empty_like(f))


def first_derivative(f: np.ndarray, h: float) -> np.ndarray:
    """4th-order finite-difference d/du of samples on a uniform grid of spacing h.

    Interior points use the central 5-point stencil; the two samples at each
    end use one-sided 4th-order stencils, so no boundary condition is imposed.
    """
    if USE_NUMBA:
        return first_derivative_numba(f, h)
    return first_derivative_numpy(f, h)


def first_derivative_matrix(n: int, h: float) -> np.ndarray:
    """Dense matrix of :func:`first_derivative` (same stencils)."""
    D = np.zeros((n, n))
    for i in range(2, n - 2):
        D[i, i - 2 : i + 3] = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0
    D[0, :5] = _EDGE0
    D[1, :5] = _EDGE1
    D[-1, -5:] = -_EDGE0[::-1]
    D[-2, -5:] = -_EDGE1[::-1]
    return D / h


# ---------------------------------------------------------------------------
# Crank-Nicolson propagation for a pentadiagonal real-symmetric Hamiltonian
#
# H is given by its main diagonal ``diag`` (length n) and two constant
# off-diagonals ``off1`` (|i-j| = 1) and ``off2`` (|i-j| = 2).  One step is
#   (1 + a H) psi_new = (1 - a H) psi,  a = i dt / (2 hbar).
# 1 + aH is complex symmetric with positive-definite real part, so LU without
# pivoting is safe.


@_njit
def _band_lu(diag, off1, off2, a):
    n = diag.shape[0]
    # B[i, j - i + 2] = M[i, j], M = 1 + a H
    B = np.zeros((n, 5), dtype=np.complex128)
    for i in range(n):
        B[i, 2] = 1.0 + a * diag[i]
        if i >= 1:
            B[i, 1] = a * off1
        if i >= 2:
            B[i, 0] = a * off2
        if i + 1 < n:
            B[i, 3] = a * off1
        if i + 2 < n:
            B[i, 4] = a * off2
    for k in range(n):
        piv = B[k, 2]
        for i in range(k + 1, min(k + 3, n)):
            lik = B[i, k - i + 2] / piv
            B[i, k - i + 2] = lik
            for j in range(k + 1, min(k + 3, n)):
                B[i, j - i + 2] -= lik * B[k, j - k + 2]
    return B


@_njit
def _band_solve(B, rhs, out):
    n = rhs.shape[0]
    for i in range(n):
        s = rhs[i]
        for k in range(max(0, i - 2), i):
            s -= B[i, k - i + 2] * out[k]
        out[i] = s
    for i in range(n - 1, -1, -1):
        s = out[i]
        for j in range(i + 1, min(i + 3, n)):
            s -= B[i, j - i + 2] * out[j]
        out[i] = s / B[i, 2]
    return out


@_njit
def _cn_loop(psi0, diag, off1, off2, a, nsteps, save_every):
    n = psi0.shape[0]
    B = _band_lu(diag, off1, off2, a)
    nsave = nsteps // save_every + 1
    snaps = np.empty((nsave, n), dtype=np.complex128)
    psi = psi0.copy()
    rhs = np.empty(n, dtype=np.complex128)
    snaps[0] = psi
    k = 1
    for step in range(1, nsteps + 1):
        for i in range(n):
            hp = diag[i] * psi[i]
            if i >= 1:
                hp += off1 * psi[i - 1]
            if i >= 2:
                hp += off2 * psi[i - 2]
            if i + 1 < n:
                hp += off1 * psi[i + 1]
            if i + 2 < n:
                hp += off2 * psi[i + 2]
            rhs[i] = psi[i] - a * hp
        _band_solve(B, rhs, psi)
        if step % save_every == 0:
            snaps[k] = psi
            k += 1
    return snaps


def cn_propagate_numba(psi0, diag, off1, off2, dt_over_hbar, nsteps, save_every=1):
    _check_cn_args(nsteps, save_every)
    a = 0.5j * dt_over_hbar
    return _cn_loop(
        np.ascontiguousarray(psi0, dtype=np.complex128),
        np.ascontiguousarray(diag, dtype=np.float64),
        float(off1),
        float(off2),
        complex(a),
        int(nsteps),
        int(save_every),
    )


def _pentadiagonal(diag, off1, off2):
    n = len(diag)
    return sp.diags(
        [np.full(n - 2, off2), np.full(n - 1, off1), np.asarray(diag, dtype=float), np.full(n - 1, off1), np.full(n - 2, off2)],
        [-2, -1, 0, 1, 2],
        format="csc",
    )


def cn_propagate_numpy(psi0, diag, off1, off2, dt_over_hbar, nsteps, save_every=1):
    _check_cn_args(nsteps, save_every)
    a = 0.5j * dt_over_hbar
    H = _pentadiagonal(diag, off1, off2)
    eye = sp.identity(len(diag), format="csc")
    lu = splu((eye + a * H).astype(np.complex128).tocsc())
    rhs_op = (eye - a * H).astype(np.complex128).tocsr()
    psi = np.array(psi0, dtype=np.complex128)
    snaps = [psi.copy()]
    for step in range(1, nsteps + 1):
        psi = lu.solve(rhs_op @ psi)
        if step % save_every == 0:
            snaps.append(psi.copy())
    return np.array(snaps)


def cn_propagate(psi0, diag, off1, off2, dt_over_hbar, nsteps, save_every=1):
    """Run ``nsteps`` Crank-Nicolson steps; return snapshots every ``save_every`` steps.

    Row 0 of the result is ``psi0``; row k is the state after ``k * save_every``
    steps.
    """
    if USE_NUMBA:
        return cn_propagate_numba(psi0, diag, off1, off2, dt_over_hbar, nsteps, save_every)
    return cn_propagate_numpy(psi0, diag, off1, off2, dt_over_hbar, nsteps, save_every)


def _check_cn_args(nsteps, save_every):
    if nsteps < 0 or save_every < 1 or nsteps % save_every:
        raise ValueError("nsteps must be a non-negative multiple of save_every")
