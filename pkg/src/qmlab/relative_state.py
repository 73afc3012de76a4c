"""Relative-state bookkeeping over a resolution of unity.

A resolution of unity is a list of mutually orthogonal projections Q_theta,
one per observer record theta, summing to the identity. Conditioning a state
on a record compresses it onto that record's subspace and renormalizes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .linalg_core import (
    EXACT_TOL,
    InvalidStateError,
    as_density,
    as_projection,
    commutator,
    random_hermitian,
    random_unitary,
)

WEIGHT_THRESHOLD = 1e-12


class EmptyBranchError(ValueError):
    """Raised when a record has (numerically) zero probability."""

    def __init__(self, label, weight):
        super().__init__(f"branch {label!r} is empty: Trace(Q rho) = {weight:.3g}")
        self.label = label
        self.weight = weight


@dataclass(frozen=True)
class ResolutionOfUnity:
    projections: tuple
    labels: tuple

    def __init__(self, projections: Sequence, labels: Sequence[str] | None = None, tol: float = EXACT_TOL):
        projs = tuple(as_projection(Q, tol) for Q in projections)
        if not projs:
            raise InvalidStateError("a resolution of unity needs at least one projection")
        labels = tuple(str(i) for i in range(len(projs))) if labels is None else tuple(str(x) for x in labels)
        if len(labels) != len(projs) or len(set(labels)) != len(labels):
            raise InvalidStateError("need one distinct label per projection")
        dim = projs[0].shape[0]
        if any(Q.shape != (dim, dim) for Q in projs):
            raise InvalidStateError("projections have mismatched dimensions")
        for i in range(len(projs)):
            for j in range(i + 1, len(projs)):
                if np.max(np.abs(projs[i] @ projs[j])) > tol:
                    raise InvalidStateError(f"Q[{labels[i]}] and Q[{labels[j]}] are not orthogonal")
        if np.max(np.abs(sum(projs) - np.eye(dim))) > tol:
            raise InvalidStateError("projections do not sum to the identity")
        object.__setattr__(self, "projections", projs)
        object.__setattr__(self, "labels", labels)

    @property
    def dim(self) -> int:
        return self.projections[0].shape[0]

    def __len__(self) -> int:
        return len(self.projections)

    def __getitem__(self, label: str) -> np.ndarray:
        return self.projections[self.labels.index(label)]

    @classmethod
    def from_blocks(cls, sizes: Sequence[int], basis=None, labels=None) -> "ResolutionOfUnity":
        """Block projections over consecutive columns of ``basis`` (identity by default)."""
        n = int(sum(sizes))
        V = np.eye(n) if basis is None else np.asarray(basis)
        projs, start = [], 0
        for s in sizes:
            cols = V[:, start : start + s]
            projs.append(cols @ cols.conj().T)
            start += s
        return cls(projs, labels)


@dataclass(frozen=True)
class RelativeState:
    rho_theta: np.ndarray
    weight: float
    label: str


def branch_weight(rho, Q) -> float:
    return float(np.real(np.trace(Q @ rho)))


def branch_weights(rho, R: ResolutionOfUnity) -> dict[str, float]:
    return {lab: branch_weight(rho, Q) for lab, Q in zip(R.labels, R.projections)}


def relative_density(rho, Q, label: str = "", threshold: float = WEIGHT_THRESHOLD) -> RelativeState:
    """rho^theta = Q rho Q / Trace(Q rho), with its weight Trace(Q rho)."""
    rho = as_density(rho)
    Q = as_projection(Q)
    w = branch_weight(rho, Q)
    if w <= threshold:
        raise EmptyBranchError(label, w)
    rt = Q @ rho @ Q / w
    return RelativeState(as_density((rt + rt.conj().T) / 2), w, label)


def conditional_expectation(rho, Q, A, threshold: float = WEIGHT_THRESHOLD, label: str = "") -> complex:
    """Trace(Q A Q rho) / Trace(Q rho)."""
    rho = np.asarray(rho)
    Q = as_projection(Q)
    w = branch_weight(rho, Q)
    if w <= threshold:
        raise EmptyBranchError(label, w)
    return complex(np.trace(Q @ A @ Q @ rho) / w)


def equivalent_mixture(rho, R: ResolutionOfUnity) -> np.ndarray:
    """rho^eq = sum_theta Q_theta rho Q_theta.

    Empty branches contribute zero, which is why this does not go through
    :func:`relative_density`.
    """
    rho = as_density(rho)
    out = sum(Q @ rho @ Q for Q in R.projections)
    return (out + out.conj().T) / 2


def commutes_with_all(A, R: ResolutionOfUnity, tol: float = EXACT_TOL) -> bool:
    return all(np.max(np.abs(commutator(A, Q))) <= tol for Q in R.projections)


def expectation(A, rho) -> complex:
    return complex(np.trace(A @ rho))


# -- sampling helpers for property tests and the harness ---------------------


def random_resolution(dim: int, n_blocks: int, rng: np.random.Generator) -> tuple[ResolutionOfUnity, np.ndarray, list[int]]:
    """Random resolution of unity in a Haar-random basis.

    Returns (R, basis, block sizes). Every block is non-empty.
    """
    if not 1 <= n_blocks <= dim:
        raise ValueError("need 1 <= n_blocks <= dim")
    cuts = np.sort(rng.choice(np.arange(1, dim), size=n_blocks - 1, replace=False)) if n_blocks > 1 else []
    sizes = np.diff(np.concatenate([[0], cuts, [dim]])).astype(int).tolist()
    V = random_unitary(dim, rng)
    return ResolutionOfUnity.from_blocks(sizes, V), V, sizes


def random_commutant_element(basis, sizes: Sequence[int], rng: np.random.Generator) -> np.ndarray:
    """Random Hermitian operator that is block diagonal in the record-adapted basis."""
    n = int(sum(sizes))
    B = np.zeros((n, n), dtype=np.complex128)
    start = 0
    for s in sizes:
        B[start : start + s, start : start + s] = random_hermitian(s, rng)
        start += s
    V = np.asarray(basis)
    return V @ B @ V.conj().T
