"""Three-record spin measurement model and its EPR singlet extension.

The full space is H_up (+) H_dn (+) H_xx, each a copy of the subsystem space
of dimension ``n_sub``; block 0 is "up", block 1 "dn", block 2 "xx" (no
record yet). hbar = 1.

Sign convention. ``hamiltonian`` returns the interaction with +iA_k in the
third block column. The closed-form propagator and density matrix
(``propagator``, ``evolve_closed_form``) are generated by the opposite
interaction sign: U(t) = exp(i t (H0 - H_int)) on [0, T_m]. ``propagator``
and ``evolve`` follow the closed forms; pass ``literal_hamiltonian=True`` to
get exp(i t H) with ``hamiltonian``'s H instead.
Both give the same record likelihoods and conditional tables. The
eigenvector pairing is reported by :func:`eigen_system`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg_core import (
    EXACT_TOL,
    InvalidStateError,
    as_density,
    as_projection,
    commutator,
    eig_hermitian,
    expm_i,
    pure_state,
)
from .relative_state import WEIGHT_THRESHOLD, EmptyBranchError, ResolutionOfUnity

RECORDS = ("up", "dn", "xx")


@dataclass(frozen=True)
class MeasurementModel:
    P1: np.ndarray
    P2: np.ndarray
    theta_mix: float
    T_m: float = 1.0
    H0: np.ndarray | None = None
    n_sub: int = field(init=False)

    def __post_init__(self):
        P1 = as_projection(self.P1)
        P2 = as_projection(self.P2)
        n = P1.shape[0]
        if n < 2 or P2.shape != (n, n):
            raise InvalidStateError("P1, P2 must be projections of equal dimension >= 2")
        if np.max(np.abs(P1 + P2 - np.eye(n))) > EXACT_TOL or np.max(np.abs(P1 @ P2)) > EXACT_TOL:
            raise InvalidStateError("need P1 + P2 = 1 and P1 P2 = 0")
        if not self.T_m > 0:
            raise InvalidStateError("T_m must be positive")
        H0 = np.zeros((n, n), dtype=np.complex128) if self.H0 is None else np.array(self.H0, dtype=np.complex128)
        if H0.shape != (n, n) or np.max(np.abs(H0 - H0.conj().T)) > EXACT_TOL:
            raise InvalidStateError("H0 must be a Hermitian matrix on the subsystem")
        for P in (P1, P2):
            if np.max(np.abs(commutator(H0, P))) > EXACT_TOL:
                raise InvalidStateError("H0 must commute with P1 and P2")
        H0.flags.writeable = False
        object.__setattr__(self, "P1", P1)
        object.__setattr__(self, "P2", P2)
        object.__setattr__(self, "H0", H0)
        object.__setattr__(self, "theta_mix", float(self.theta_mix))
        object.__setattr__(self, "T_m", float(self.T_m))
        object.__setattr__(self, "n_sub", n)

    @property
    def dim(self) -> int:
        return 3 * self.n_sub

    @classmethod
    def spin_half(cls, theta_mix: float, T_m: float = 1.0, H0=None) -> "MeasurementModel":
        return cls(np.diag([1.0, 0.0]), np.diag([0.0, 1.0]), theta_mix, T_m, H0)

    @classmethod
    def epr_pair(cls, theta_mix: float, T_m: float = 1.0, H0=None) -> "MeasurementModel":
        """Two spin-1/2 particles; the observer couples to particle A only."""
        up, dn = np.diag([1.0, 0.0]), np.diag([0.0, 1.0])
        return cls(np.kron(up, np.eye(2)), np.kron(dn, np.eye(2)), theta_mix, T_m, H0)


@dataclass(frozen=True)
class BlockState:
    rho: np.ndarray
    n_sub: int
    t: float = 0.0

    def block(self, i: int, j: int) -> np.ndarray:
        n = self.n_sub
        return self.rho[i * n : (i + 1) * n, j * n : (j + 1) * n]

    def index_range(self, record: str) -> range:
        k = RECORDS.index(record)
        return range(k * self.n_sub, (k + 1) * self.n_sub)


def build_A_operators(model: MeasurementModel) -> tuple[np.ndarray, np.ndarray]:
    c, s = np.cos(model.theta_mix), np.sin(model.theta_mix)
    A1 = c * model.P1 + s * model.P2
    A2 = c * model.P2 + s * model.P1
    return A1, A2


def interaction_phase(t: float, T_m: float) -> float:
    if not T_m > 0:
        raise ValueError("T_m must be positive")
    if t < 0:
        return 0.0
    if t > T_m:
        return np.pi / 2
    return np.pi * t / (2 * T_m)


def _blkdiag(M: np.ndarray) -> np.ndarray:
    return np.kron(np.eye(3), M)


def lift(op_sub) -> np.ndarray:
    """Subsystem operator acting identically in all three record blocks (P_k -> P_k hat)."""
    return _blkdiag(np.asarray(op_sub, dtype=np.complex128))


def record_projection(model: MeasurementModel, record: str) -> np.ndarray:
    k = RECORDS.index(record)
    e = np.zeros(3)
    e[k] = 1.0
    return np.kron(np.diag(e), np.eye(model.n_sub))


def record_resolution(model: MeasurementModel) -> ResolutionOfUnity:
    return ResolutionOfUnity([record_projection(model, r) for r in RECORDS], RECORDS)


def interaction_block(model: MeasurementModel) -> np.ndarray:
    """(pi / 2T_m) [[0, 0, iA1], [0, 0, iA2], [-iA1, -iA2, 0]]."""
    A1, A2 = build_A_operators(model)
    Z = np.zeros_like(A1)
    K = np.block([[Z, Z, 1j * A1], [Z, Z, 1j * A2], [-1j * A1, -1j * A2, Z]])
    return np.pi / (2 * model.T_m) * K


def hamiltonian(model: MeasurementModel, t: float) -> np.ndarray:
    H = _blkdiag(model.H0)
    if 0 <= t <= model.T_m:
        H = H + interaction_block(model)
    return H


def closed_form_generator(model: MeasurementModel) -> np.ndarray:
    """Constant generator G on [0, T_m] with exp(i t G) equal to the closed-form U(t)."""
    return _blkdiag(model.H0) - interaction_block(model)


def free_propagator(model: MeasurementModel, t: float) -> np.ndarray:
    """U0(t) = exp(i H0 t) on the subsystem."""
    return expm_i(model.H0, t)


def _rotation(model: MeasurementModel, phi: float) -> np.ndarray:
    A1, A2 = build_A_operators(model)
    c, s = np.cos(phi), np.sin(phi)
    return np.block(
        [
            [A2 @ A2 + A1 @ A1 * c, A1 @ A2 * (c - 1), A1 * s],
            [A1 @ A2 * (c - 1), A1 @ A1 + A2 @ A2 * c, A2 * s],
            [-A1 * s, -A2 * s, np.eye(model.n_sub) * c],
        ]
    )


def propagator(model: MeasurementModel, t: float, literal_hamiltonian: bool = False) -> np.ndarray:
    """Closed-form U(t) = U0(t) (e^{i phi} R+ + e^{-i phi} R- + R0)."""
    phi = interaction_phase(t, model.T_m)
    R = _rotation(model, -phi if literal_hamiltonian else phi)
    return _blkdiag(free_propagator(model, t)) @ R


def propagator_oracle(model: MeasurementModel, t: float, literal_hamiltonian: bool = False) -> np.ndarray:
    """U(t) from eigendecomposition exponentials of the piecewise-constant generator."""
    G = hamiltonian(model, 0.0) if literal_hamiltonian else closed_form_generator(model)
    free = _blkdiag(model.H0)
    if t < 0:
        return expm_i(free, t)
    if t <= model.T_m:
        return expm_i(G, t)
    return expm_i(free, t - model.T_m) @ expm_i(G, model.T_m)


@dataclass(frozen=True)
class EigenPair:
    name: str  # "e0", "e+", "e-"
    vector: np.ndarray
    nominal_eigenvalue: float  # nominal pairing: E_w, E_w + pi/2T_m, E_w - pi/2T_m
    eigenvalue: float  # Rayleigh quotient with hamiltonian()
    residual: float  # ||H e - eigenvalue e||


def eigen_system(model: MeasurementModel, w, E_w: float, tol: float = 1e-9) -> list[EigenPair]:
    """Closed-form eigenvectors e0, e+, e- built from an H0 eigenvector w.

    Each vector's eigenvalue under ``hamiltonian`` is measured numerically
    rather than assumed from the nominal pairing.
    """
    w = np.asarray(w, dtype=np.complex128)
    if abs(np.linalg.norm(w) - 1) > tol:
        raise ValueError("w must be normalized")
    if np.linalg.norm(model.H0 @ w - E_w * w) > tol:
        raise ValueError("w is not an eigenvector of H0 with eigenvalue E_w")
    A1, A2 = build_A_operators(model)
    shift = np.pi / (2 * model.T_m)
    vecs = {
        "e0": (np.concatenate([A2 @ w, -A1 @ w, 0 * w]), E_w),
        "e+": (np.concatenate([A1 @ w, A2 @ w, 1j * w]) / np.sqrt(2), E_w + shift),
        "e-": (np.concatenate([A1 @ w, A2 @ w, -1j * w]) / np.sqrt(2), E_w - shift),
    }
    H = hamiltonian(model, 0.0)
    out = []
    for name, (v, lam_disp) in vecs.items():
        v = v / np.linalg.norm(v)
        lam = float(np.real(np.vdot(v, H @ v)))
        out.append(EigenPair(name, v, lam_disp, lam, float(np.linalg.norm(H @ v - lam * v))))
    return out


def interaction_spectrum(model: MeasurementModel) -> np.ndarray:
    """Ascending spectrum of H on [0, T_m]."""
    return eig_hermitian(hamiltonian(model, 0.0))[0]


def expected_spectrum(model: MeasurementModel) -> np.ndarray:
    """{E_w, E_w +- pi/(2 T_m)} over the H0 spectrum, sorted."""
    E = eig_hermitian(model.H0)[0]
    shift = np.pi / (2 * model.T_m)
    return np.sort(np.concatenate([E, E + shift, E - shift]))


def initial_state(model: MeasurementModel, rho0_sub) -> np.ndarray:
    rho0 = as_density(rho0_sub)
    if rho0.shape != (model.n_sub, model.n_sub):
        raise InvalidStateError("rho0 must live on the subsystem")
    rho = np.zeros((model.dim, model.dim), dtype=np.complex128)
    rho[2 * model.n_sub :, 2 * model.n_sub :] = rho0
    return rho


def evolve(model: MeasurementModel, rho0_sub, t: float, literal_hamiltonian: bool = False) -> BlockState:
    """rho(t) = U(t) rho(0) U(t)* with the observer starting in the xx block."""
    U = propagator(model, t, literal_hamiltonian)
    rho = U @ initial_state(model, rho0_sub) @ U.conj().T
    return BlockState((rho + rho.conj().T) / 2, model.n_sub, float(t))


def evolve_closed_form(model: MeasurementModel, rho0_sub, t: float) -> BlockState:
    """The closed-form block formula for rho(t) in terms of rho0(t) = U0 rho0 U0*."""
    rho0 = as_density(rho0_sub)
    U0 = free_propagator(model, t)
    r = U0 @ rho0 @ U0.conj().T
    A1, A2 = build_A_operators(model)
    phi = interaction_phase(t, model.T_m)
    s, c = np.sin(phi), np.cos(phi)
    rho = np.block(
        [
            [A1 @ r @ A1 * s * s, A1 @ r @ A2 * s * s, A1 @ r * s * c],
            [A2 @ r @ A1 * s * s, A2 @ r @ A2 * s * s, A2 @ r * s * c],
            [r @ A1 * s * c, r @ A2 * s * c, r * c * c],
        ]
    )
    return BlockState(rho, model.n_sub, float(t))


def record_likelihood(state: BlockState, record: str) -> float:
    r = state.index_range(record)
    return float(np.real(np.trace(state.rho[r.start : r.stop, r.start : r.stop])))


def record_likelihoods(state: BlockState) -> dict[str, float]:
    return {rec: record_likelihood(state, rec) for rec in RECORDS}


def conditional_likelihood(state: BlockState, record: str, op_sub, threshold: float = WEIGHT_THRESHOLD) -> float:
    """Trace(op_hat Q_a rho Q_a) / Trace(Q_a rho) for a subsystem operator."""
    w = record_likelihood(state, record)
    if w <= threshold:
        raise EmptyBranchError(record, w)
    r = state.index_range(record)
    block = state.rho[r.start : r.stop, r.start : r.stop]
    return float(np.real(np.trace(np.asarray(op_sub) @ block)) / w)


def conditional_spin_likelihood(model: MeasurementModel, state: BlockState, record: str, spin: int) -> float:
    if spin not in (1, 2):
        raise ValueError("spin must be 1 (up) or 2 (down)")
    return conditional_likelihood(state, record, model.P1 if spin == 1 else model.P2)


def reference_record_likelihoods(phi: float) -> dict[str, float]:
    """Record likelihoods for Trace(P1 rho0) = 1/2: (sin^2/2, sin^2/2, cos^2)."""
    s2 = np.sin(phi) ** 2
    return {"up": s2 / 2, "dn": s2 / 2, "xx": 1 - s2}


def reference_conditional_table(theta_mix: float, spin: int) -> dict[str, float]:
    c2, s2 = np.cos(theta_mix) ** 2, np.sin(theta_mix) ** 2
    if spin == 1:
        return {"up": c2, "dn": s2, "xx": 0.5}
    return {"up": s2, "dn": c2, "xx": 0.5}


# -- EPR pair ----------------------------------------------------------------

_SX = np.array([[0, 1], [1, 0]], dtype=complex) / 2
_SY = np.array([[0, -1j], [1j, 0]], dtype=complex) / 2
_SZ = np.array([[1, 0], [0, -1]], dtype=complex) / 2


def singlet() -> np.ndarray:
    """(|ud> - |du>)/sqrt 2 as a density matrix on particle A (x) particle B."""
    return pure_state(np.array([0.0, 1.0, -1.0, 0.0]))


def total_spin_operators() -> dict[str, np.ndarray]:
    one = np.eye(2)
    return {ax: np.kron(S, one) + np.kron(one, S) for ax, S in (("x", _SX), ("y", _SY), ("z", _SZ))}


@dataclass(frozen=True)
class EPRRow:
    record: str
    likelihood: float
    b_up: float | None  # None when the record branch is empty
    b_down: float | None


def epr_scenario(model: MeasurementModel, t: float, rho0_sub=None) -> tuple[list[EPRRow], dict[str, float]]:
    """Per-record conditional likelihoods of particle-B spin, and the pair's total spin."""
    if model.n_sub != 4:
        raise ValueError("the EPR scenario needs a two-spin subsystem (n_sub = 4)")
    rho0 = singlet() if rho0_sub is None else rho0_sub
    state = evolve(model, rho0, t)
    b_up = np.kron(np.eye(2), np.diag([1.0, 0.0]))
    b_dn = np.kron(np.eye(2), np.diag([0.0, 1.0]))
    rows = []
    for rec in RECORDS:
        w = record_likelihood(state, rec)
        if w <= WEIGHT_THRESHOLD:
            rows.append(EPRRow(rec, w, None, None))
        else:
            rows.append(EPRRow(rec, w, conditional_likelihood(state, rec, b_up), conditional_likelihood(state, rec, b_dn)))
    spin = {ax: float(np.real(np.trace(lift(S) @ state.rho))) for ax, S in total_spin_operators().items()}
    return rows, spin
