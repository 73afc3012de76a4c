"""Harmonic-oscillator minimum packets and the x^3 p operator.

Units are explicit: mass ``m``, tension ``k`` and ``hbar`` live on
:class:`OscillatorSpec`. The symmetrized x^3 p operator is

    O f = -i hbar (x^3 f' + (x^3 f)') / 2,

applied with 4th-order finite differences. Two grids are used: a uniform grid
for Gaussian packets and a logarithmic grid (uniform in u = ln x) for the
eigenfunctions s_lambda, whose e^{-lambda/2x^2} factor vanishes with all
derivatives at the origin and whose x^{-3/2} tail reaches far out.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import kernels

NORM_TOL = 1e-6


class ResolutionWarning(UserWarning):
    pass


class DivergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class OscillatorSpec:
    m: float = 1.0
    k: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        if not (self.m > 0 and self.k > 0 and self.hbar > 0):
            raise ValueError("m, k and hbar must be positive")

    @property
    def w(self) -> float:
        return math.sqrt(self.k / self.m)

    @property
    def sigma2(self) -> float:
        """Minimum-packet position variance hbar / (2 sqrt(mk))."""
        return self.hbar / (2 * math.sqrt(self.m * self.k))

    @property
    def period(self) -> float:
        return 2 * math.pi / self.w


@dataclass(frozen=True)
class PacketSpec:
    A: float
    theta0: float = 0.0

    def __post_init__(self):
        if not self.A > 0:
            raise ValueError("amplitude A must be positive")

    def beta(self, spec: OscillatorSpec) -> float:
        return math.sqrt(spec.m * spec.k) * self.A

    def energy(self, spec: OscillatorSpec) -> float:
        return spec.k * self.A**2 / 2

    @classmethod
    def in_sigmas(cls, spec: OscillatorSpec, n_sigma: float) -> "PacketSpec":
        return cls(n_sigma * math.sqrt(spec.sigma2))


@dataclass(frozen=True)
class GridFunction:
    """Samples of a function on x = x(u) with u uniform.

    ``mapping`` is "uniform" (x = u) or "log" (x = e^u).
    """

    x: np.ndarray
    values: np.ndarray
    mapping: str = "uniform"

    def __post_init__(self):
        if self.mapping not in ("uniform", "log"):
            raise ValueError("mapping must be 'uniform' or 'log'")
        if self.x.shape != self.values.shape or self.x.ndim != 1 or self.x.size < 5:
            raise ValueError("x and values must be 1-D arrays of equal length >= 5")

    @property
    def u(self) -> np.ndarray:
        return self.x if self.mapping == "uniform" else np.log(self.x)

    @property
    def h(self) -> float:
        u = self.u
        return float(u[1] - u[0])

    @property
    def jacobian(self) -> np.ndarray:
        """dx/du at the samples."""
        return np.ones_like(self.x) if self.mapping == "uniform" else self.x

    @property
    def weights(self) -> np.ndarray:
        """Trapezoid weights for integrals over x."""
        w = np.full(self.x.size, self.h)
        w[0] = w[-1] = self.h / 2
        return w * self.jacobian

    def with_values(self, values) -> "GridFunction":
        return GridFunction(self.x, np.asarray(values), self.mapping)

    def d_dx(self, f=None) -> np.ndarray:
        f = self.values if f is None else f
        return kernels.first_derivative(f, self.h) / self.jacobian

    def integrate(self, f) -> complex:
        return complex(np.dot(self.weights, f))

    def inner(self, other: "GridFunction") -> complex:
        return self.integrate(np.conj(self.values) * other.values)

    def norm2(self) -> float:
        return float(np.real(self.integrate(np.abs(self.values) ** 2)))


# ---------------------------------------------------------------------------
# minimum packets


def minimum_packet(spec: OscillatorSpec, packet: PacketSpec, t, x) -> np.ndarray:
    """Coherent-state amplitude s_t(x), global phase phi(t) included.

    The prefactor is (2 pi sigma^2)^(-1/4), which makes the amplitude
    square-normalized.
    """
    x = np.asarray(x, dtype=float)
    s2, w, A = spec.sigma2, spec.w, packet.A
    phase = w * t / 2 - spec.k * A**2 / (4 * spec.hbar * w) * math.sin(2 * w * t)
    arg = -((x - A * math.cos(w * t)) ** 2) / (4 * s2) - 1j * (
        packet.beta(spec) * x * math.sin(w * t) / spec.hbar + phase
    )
    return (2 * math.pi * s2) ** -0.25 * np.exp(arg)


def packet_grid(spec: OscillatorSpec, packet: PacketSpec, spacing_sigmas: float = 0.02, pad_sigmas: float = 12.0) -> np.ndarray:
    """Odd-length uniform grid centered on 0 covering [-A - pad, A + pad]."""
    sigma = math.sqrt(spec.sigma2)
    h = spacing_sigmas * sigma
    L = packet.A + pad_sigmas * sigma
    n = int(math.ceil(L / h))
    return h * np.arange(-n, n + 1)


def packet_state(spec: OscillatorSpec, packet: PacketSpec, t: float = 0.0, x=None) -> GridFunction:
    x = packet_grid(spec, packet) if x is None else np.asarray(x, dtype=float)
    return GridFunction(x, minimum_packet(spec, packet, t, x))


class Moments(NamedTuple):
    meanX: float
    meanP: float
    varX: float
    varP: float
    uncertainty_product: float


def expectations_closed_form(spec: OscillatorSpec, packet: PacketSpec, t: float) -> Moments:
    w, A, s2 = spec.w, packet.A, spec.sigma2
    return Moments(
        A * math.cos(w * t),
        -math.sqrt(spec.m * spec.k) * A * math.sin(w * t),
        s2,
        spec.hbar**2 / (4 * s2),
        spec.hbar / 2,
    )


def spectral_derivative(state: GridFunction) -> np.ndarray:
    """d/dx by FFT; exact to rounding for band-limited samples that vanish at both ends."""
    if state.mapping != "uniform":
        raise ValueError("spectral derivative needs a uniform grid")
    k = 2 * np.pi * np.fft.fftfreq(state.x.size, d=state.h)
    return np.fft.ifft(1j * k * np.fft.fft(state.values))


def grid_moments(state: GridFunction, hbar: float) -> Moments:
    """Position moments by quadrature, momentum moments through the spectral derivative."""
    psi = state.values
    n2 = state.norm2()
    dpsi = spectral_derivative(state)
    mx = np.real(state.integrate(state.x * np.abs(psi) ** 2)) / n2
    mp = np.real(state.integrate(np.conj(psi) * (-1j * hbar) * dpsi)) / n2
    vx = np.real(state.integrate((state.x - mx) ** 2 * np.abs(psi) ** 2)) / n2
    vp = hbar**2 * np.real(state.integrate(np.abs(dpsi) ** 2)) / n2 - mp**2
    return Moments(float(mx), float(mp), float(vx), float(vp), float(math.sqrt(vx * vp)))


# ---------------------------------------------------------------------------
# the x^3 p operator


def x3p_apply(state: GridFunction, hbar: float) -> np.ndarray:
    f, x = state.values, state.x
    return -0.5j * hbar * (x**3 * state.d_dx(f) + state.d_dx(x**3 * f))


def _check_norm(state: GridFunction, what: str) -> None:
    defect = abs(state.norm2() - 1)
    if defect > NORM_TOL:
        warnings.warn(f"{what}: norm defect {defect:.2e} suggests an under-resolved grid", ResolutionWarning, stacklevel=3)


def x3p_quadrature(state: GridFunction, spec: OscillatorSpec) -> complex:
    """<s| O s> by 4th-order differences and trapezoid quadrature."""
    _check_norm(state, "x3p_quadrature")
    return state.integrate(np.conj(state.values) * x3p_apply(state, spec.hbar))


def x3p_closed_form(spec: OscillatorSpec, packet: PacketSpec, t: float) -> float:
    w, A, s2 = spec.w, packet.A, spec.sigma2
    c, s = math.cos(w * t), math.sin(w * t)
    return -math.sqrt(spec.m * spec.k) * A * s * (A**3 * c**3 + 3 * A * s2 * c)


def symmetry_defect(f: GridFunction, g: GridFunction, hbar: float) -> complex:
    """<f|O g> - <O f|g>; zero for a symmetric operator on its domain."""
    Og, Of = x3p_apply(g, hbar), x3p_apply(f, hbar)
    return f.integrate(np.conj(f.values) * Og) - f.integrate(np.conj(Of) * g.values)


def x3p_matrix(grid: GridFunction, hbar: float) -> np.ndarray:
    """Dense matrix of O in the L2-orthonormal sample basis.

    The stencils are the ones used by :func:`x3p_apply`; with trapezoid
    weights W the representation is W^(1/2) O W^(-1/2). Dense, so keep the
    grid to a few thousand points.
    """
    D = kernels.first_derivative_matrix(grid.x.size, grid.h) / grid.jacobian[:, None]
    X3 = grid.x**3
    O = -0.5j * hbar * (X3[:, None] * D + D * X3[None, :])
    sw = np.sqrt(grid.weights)
    return sw[:, None] * O / sw[None, :]


# ---------------------------------------------------------------------------
# classical comparison


def classical_trajectory(spec: OscillatorSpec, x0: float, p0: float, t) -> tuple:
    """Newtonian x(t), p(t) = m x'(t) and x^3 p for m x'' = -k x."""
    w, mk = spec.w, math.sqrt(spec.m * spec.k)
    t = np.asarray(t, dtype=float)
    x = x0 * np.cos(w * t) + p0 / mk * np.sin(w * t)
    p = -x0 * mk * np.sin(w * t) + p0 * np.cos(w * t)
    return x, p, x**3 * p


def classical_gap(spec: OscillatorSpec, packet: PacketSpec, t) -> np.ndarray:
    """x^3 p (classical, theta = 0) minus <X^3/2 P X^3/2>_t for the matched packet."""
    x, p, x3p = classical_trajectory(spec, packet.A, 0.0, t)
    q = np.vectorize(lambda tt: x3p_closed_form(spec, packet, tt))(np.asarray(t, dtype=float))
    return x3p - q


def gap_bound(spec: OscillatorSpec, packet: PacketSpec) -> float:
    """max_t |classical_gap| = (3/2) sqrt(mk) A^2 sigma^2."""
    return 1.5 * math.sqrt(spec.m * spec.k) * packet.A**2 * spec.sigma2


def classical_x3p_max(spec: OscillatorSpec, packet: PacketSpec) -> float:
    """max_t |A^3 cos^3 (-sqrt(mk) A sin)| = sqrt(mk) A^4 3 sqrt(3) / 16."""
    return math.sqrt(spec.m * spec.k) * packet.A**4 * 3 * math.sqrt(3) / 16


# ---------------------------------------------------------------------------
# the eigenfunctions s_lambda


def s_lambda(lam: float, x) -> np.ndarray:
    """sqrt(2 lam) exp(-lam / 2x^2) / x^(3/2) for x > 0, zero elsewhere."""
    if not lam > 0:
        raise ValueError("lambda must be positive")
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    xp = x[pos]
    out[pos] = math.sqrt(2 * lam) * np.exp(-lam / (2 * xp * xp)) / xp**1.5
    return out


def s_lambda_grid(lam: float, n: int = 2**14 + 1, floor: float = 1e-12, inner_exponent: float = 40.0) -> np.ndarray:
    """Logarithmic grid from where exp(-lam/2x^2) = e^-inner_exponent out to s_lambda = floor."""
    x_lo = math.sqrt(lam / (2 * inner_exponent))
    x_hi = (math.sqrt(2 * lam) / floor) ** (2 / 3)
    return np.exp(np.linspace(math.log(x_lo), math.log(x_hi), n))


def s_lambda_state(lam: float, n: int = 2**14 + 1) -> GridFunction:
    x = s_lambda_grid(lam, n)
    return GridFunction(x, s_lambda(lam, x).astype(np.complex128), "log")


def s_lambda_expectations(lam: float, spec: OscillatorSpec, n: int = 2**14 + 1) -> dict[str, complex]:
    """Quadrature norm, <X>, <P> and <X^3/2 P X^3/2> for s_lambda."""
    st = s_lambda_state(lam, n)
    s = st.values
    return {
        "norm": st.norm2(),
        "meanX": float(np.real(st.integrate(st.x * np.abs(s) ** 2))),
        "meanP": st.integrate(np.conj(s) * (-1j * spec.hbar) * st.d_dx()),
        "x3p": st.integrate(np.conj(s) * x3p_apply(st, spec.hbar)),
    }


def s_lambda_table(lam: float, spec: OscillatorSpec) -> dict[str, complex]:
    return {"norm": 1.0, "meanX": math.sqrt(math.pi * lam), "meanP": 0.0, "x3p": -1j * spec.hbar * lam}


def s_lambda_eigen_residual(lam: float, spec: OscillatorSpec, n: int = 2**14 + 1) -> float:
    """||O s - (-i hbar lam) s|| / ||s|| on the log grid."""
    st = s_lambda_state(lam, n)
    r = x3p_apply(st, spec.hbar) + 1j * spec.hbar * lam * st.values
    return math.sqrt(np.real(st.integrate(np.abs(r) ** 2)) / st.norm2())


def s_lambda_energy(lam: float, spec: OscillatorSpec, x_max: float, n: int = 2**13 + 1) -> float:
    """<s|H s> with the potential integral cut off at x_max (grows like log x_max)."""
    x_lo = math.sqrt(lam / 80)
    x = np.exp(np.linspace(math.log(x_lo), math.log(x_max), n))
    st = GridFunction(x, s_lambda(lam, x).astype(np.complex128), "log")
    s = st.values
    kinetic = spec.hbar**2 / (2 * spec.m) * np.real(st.integrate(np.abs(st.d_dx()) ** 2))
    potential = spec.k / 2 * np.real(st.integrate(st.x**2 * np.abs(s) ** 2))
    return float(kinetic + potential)


# ---------------------------------------------------------------------------
# energy eigenstates


def energy_eigenstate_variance(n: int, spec: OscillatorSpec) -> tuple[float, float]:
    """(<X^2> = (n + 1/2) hbar / (m w), matched amplitude A with E = m w^2 A^2 / 2)."""
    if n < 0:
        raise ValueError("n must be non-negative")
    s2 = (n + 0.5) * spec.hbar / (spec.m * spec.w)
    return s2, math.sqrt(2 * s2)


def hermite_function(n: int, spec: OscillatorSpec, x) -> np.ndarray:
    """Normalized oscillator eigenfunction s_n(x) via the stable three-term recurrence."""
    if n < 0:
        raise ValueError("n must be non-negative")
    x0 = math.sqrt(spec.hbar / (spec.m * spec.w))
    xi = np.asarray(x, dtype=float) / x0
    prev = np.zeros_like(xi)
    cur = math.pi**-0.25 * np.exp(-xi * xi / 2)
    for j in range(1, n + 1):
        prev, cur = cur, math.sqrt(2 / j) * xi * cur - math.sqrt((j - 1) / j) * prev
    return cur / math.sqrt(x0)


# ---------------------------------------------------------------------------
# Crank-Nicolson grid evolution (independent oracle for the closed forms)

DEFAULT_STEPS_PER_PERIOD = 16000
MAX_NORM_DRIFT = 1e-3


def _cn_operator(spec: OscillatorSpec, x: np.ndarray, h: float):
    c = -(spec.hbar**2) / (2 * spec.m * h * h)
    diag = c * (-30.0 / 12.0) + 0.5 * spec.k * x**2
    return diag, c * (16.0 / 12.0), c * (-1.0 / 12.0)


def grid_trajectory(state0: GridFunction, spec: OscillatorSpec, t_end: float, n_samples: int = 16,
                    steps_per_period: int = DEFAULT_STEPS_PER_PERIOD) -> tuple[np.ndarray, list[GridFunction]]:
    """Evolve under the oscillator Hamiltonian; return n_samples + 1 evenly spaced snapshots.

    4th-order Laplacian with zero values outside the grid, Crank-Nicolson in
    time. The step count is rounded up so the snapshots fall on steps and
    dt <= period / steps_per_period.
    """
    if state0.mapping != "uniform":
        raise ValueError("grid evolution needs a uniform grid")
    if steps_per_period < 200:
        raise ValueError("steps_per_period below 200 violates the step bound")
    if t_end == 0:
        return np.zeros(1), [state0]
    per_sample = max(1, math.ceil(abs(t_end) / n_samples / (spec.period / steps_per_period)))
    nsteps = per_sample * n_samples
    dt = t_end / nsteps
    diag, off1, off2 = _cn_operator(spec, state0.x, state0.h)
    snaps = kernels.cn_propagate(state0.values, diag, off1, off2, dt / spec.hbar, nsteps, per_sample)
    n0 = state0.norm2()
    out = []
    for row in snaps:
        g = state0.with_values(row)
        drift = abs(g.norm2() - n0)
        if drift > MAX_NORM_DRIFT:
            raise DivergenceError(f"norm drifted by {drift:.2e}")
        out.append(g)
    return np.linspace(0.0, t_end, n_samples + 1), out


def grid_evolve(state0: GridFunction, spec: OscillatorSpec, t: float,
                steps_per_period: int = DEFAULT_STEPS_PER_PERIOD) -> GridFunction:
    return grid_trajectory(state0, spec, t, 1, steps_per_period)[1][-1]
