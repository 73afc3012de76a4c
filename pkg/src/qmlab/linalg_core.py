"""Dense complex linear algebra shared by every other module.

Matrices are plain 2-D numpy arrays. Validation helpers return read-only
copies so a checked density matrix or projection cannot drift afterwards.
Units: hbar = 1 here; ``expm_i(H, t)`` is ``exp(i H t)``.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

EXACT_TOL = 1e-10
QUAD_TOL = 1e-6


class NotHermitianError(ValueError):
    pass


class RankDeficiencyError(ValueError):
    pass


class InvalidStateError(ValueError):
    pass


def _square(M) -> np.ndarray:
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    return M


def _frozen(M: np.ndarray) -> np.ndarray:
    M = np.array(M, dtype=np.complex128)
    M.flags.writeable = False
    return M


def adjoint(M) -> np.ndarray:
    return np.asarray(M).conj().T


def is_hermitian(M, tol: float = EXACT_TOL) -> bool:
    """True iff max |M - M*| <= tol."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    M = _square(M)
    return bool(np.max(np.abs(M - adjoint(M)), initial=0.0) <= tol)


def commutator(A, B) -> np.ndarray:
    return A @ B - B @ A


def eig_hermitian(M, tol: float = EXACT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Ascending eigenvalues and orthonormal eigenvector columns of a Hermitian matrix."""
    M = _square(M)
    if not is_hermitian(M, tol):
        raise NotHermitianError("eig_hermitian needs a Hermitian matrix")
    return np.linalg.eigh(M)


def expm_i(H, t: float, tol: float = EXACT_TOL) -> np.ndarray:
    """exp(i H t) for Hermitian H, computed through its eigendecomposition."""
    w, V = eig_hermitian(H, tol)
    return (V * np.exp(1j * w * t)) @ V.conj().T


def gram_schmidt(vs: Sequence, threshold: float = 1e-12) -> list[np.ndarray]:
    """Orthonormalize vectors in order (modified Gram-Schmidt, one re-orthogonalization pass)."""
    out: list[np.ndarray] = []
    for k, v in enumerate(vs):
        r = np.array(v, dtype=np.complex128)
        scale = np.linalg.norm(r)
        for _ in range(2):
            for q in out:
                r = r - np.vdot(q, r) * q
        nr = np.linalg.norm(r)
        if scale == 0 or nr <= threshold * max(scale, 1.0):
            raise RankDeficiencyError(f"vector {k} is (numerically) in the span of the previous ones")
        out.append(r / nr)
    return out


def is_projection(P, tol: float = EXACT_TOL) -> bool:
    P = _square(P)
    return bool(np.max(np.abs(P - P @ P)) <= tol and np.max(np.abs(P - adjoint(P))) <= tol)


def as_projection(P, tol: float = EXACT_TOL) -> np.ndarray:
    if not is_projection(P, tol):
        raise InvalidStateError("matrix is not an orthogonal projection (P = P* = P^2)")
    return _frozen(P)


def projector_onto(vs: Sequence) -> np.ndarray:
    """Orthogonal projection onto span(vs)."""
    Q = np.array(gram_schmidt(vs)).T
    return Q @ Q.conj().T


def density_defects(rho) -> tuple[float, float, float]:
    """(hermiticity defect, |trace - 1|, most negative eigenvalue clipped at 0)."""
    rho = _square(rho)
    herm = float(np.max(np.abs(rho - adjoint(rho))))
    tr = abs(np.trace(rho) - 1.0)
    lo = float(np.linalg.eigvalsh((rho + adjoint(rho)) / 2)[0])
    return herm, float(tr), max(0.0, -lo)


def is_density(rho, tol: float = EXACT_TOL) -> bool:
    return all(d <= tol for d in density_defects(rho))


def as_density(rho, tol: float = EXACT_TOL) -> np.ndarray:
    herm, tr, neg = density_defects(rho)
    if herm > tol:
        raise InvalidStateError(f"density matrix not Hermitian (defect {herm:.3g})")
    if tr > tol:
        raise InvalidStateError(f"density matrix trace differs from 1 by {tr:.3g}")
    if neg > tol:
        raise InvalidStateError(f"density matrix has eigenvalue {-neg:.3g} < 0")
    return _frozen(rho)


def pure_state(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=np.complex128)
    psi = psi / np.linalg.norm(psi)
    return np.outer(psi, psi.conj())


def random_density(dim: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Random density matrix from a complex Ginibre factor (rank defaults to full)."""
    rank = dim if rank is None else rank
    G = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = G @ G.conj().T
    rho = (rho + rho.conj().T) / 2
    return rho / np.trace(rho).real


def random_hermitian(dim: int, rng: np.random.Generator) -> np.ndarray:
    G = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (G + G.conj().T) / 2


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    G = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    Q, R = np.linalg.qr(G)
    return Q * (np.diag(R) / np.abs(np.diag(R)))
