"""Position under the Lorentz-invariant one-particle inner product (1 spatial dimension).

States are momentum-space amplitudes f(p) on the mass shell, omega = sqrt(m^2 + p^2),
with the invariant scalar product

    <f|g> = int dp conj(f) g / (2 omega).

Multiplication by position acts as i hbar d/dp. Because the measure 1/(2 omega)
depends on p, integration by parts leaves a remainder, so <f|x g> != <x f|g>:

    <f|x g> - <x f|g> = i hbar int dp conj(f) g p / (2 omega^3).

Integrals use composite Gauss-Legendre panels of equal width; derivatives use
the exact polynomial differentiation matrix on each panel's nodes.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial import legendre as L


class GridMismatchError(ValueError):
    pass


class ResolutionWarning(UserWarning):
    pass


@dataclass(frozen=True)
class MomentumGrid:
    """Composite Gauss-Legendre rule on [-P, P] with ``n_panels`` panels of ``order`` nodes."""

    P: float = 16.0
    n_panels: int = 64
    order: int = 16

    def __post_init__(self):
        if not (self.P > 0 and self.n_panels >= 1 and self.order >= 2):
            raise ValueError("need P > 0, n_panels >= 1, order >= 2")
        t, w = L.leggauss(self.order)
        half = self.P / self.n_panels
        centers = -self.P + half * (2 * np.arange(self.n_panels) + 1)
        # Differentiation on reference nodes: values -> Legendre coefficients -> derivative.
        V = L.legvander(t, self.order - 1)
        dV = np.stack([L.legval(t, L.legder(np.eye(self.order)[j])) for j in range(self.order)], axis=1)
        object.__setattr__(self, "nodes", (centers[:, None] + half * t[None, :]).ravel())
        object.__setattr__(self, "weights", np.tile(half * w, self.n_panels))
        object.__setattr__(self, "_dmat", dV @ np.linalg.inv(V) / half)

    def derivative(self, values: np.ndarray) -> np.ndarray:
        v = np.asarray(values).reshape(self.n_panels, self.order)
        return (v @ self._dmat.T).ravel()

    def integrate(self, f: np.ndarray) -> complex:
        return complex(np.dot(self.weights, f))


@dataclass(frozen=True)
class MomentumWavefunction:
    grid: MomentumGrid
    values: np.ndarray
    mass: float

    def __post_init__(self):
        if not self.mass > 0:
            raise ValueError("mass must be positive")
        if self.values.shape != self.grid.nodes.shape:
            raise GridMismatchError("values do not match the grid nodes")

    @property
    def p(self) -> np.ndarray:
        return self.grid.nodes

    @property
    def omega(self) -> np.ndarray:
        return np.sqrt(self.mass**2 + self.p**2)

    def with_mass(self, mass: float) -> "MomentumWavefunction":
        return MomentumWavefunction(self.grid, self.values, float(mass))

    def tail_fraction(self, f=None) -> float:
        """Fraction of int |f|^2 dp that sits in the two outermost panels."""
        f = self.values if f is None else f
        dens = self.grid.weights * np.abs(f) ** 2
        k = self.grid.order
        tot = dens.sum()
        return float((dens[:k].sum() + dens[-k:].sum()) / tot) if tot > 0 else 0.0


def wavefunction(grid: MomentumGrid, mass: float, amplitude: Callable[[np.ndarray], np.ndarray]) -> MomentumWavefunction:
    return MomentumWavefunction(grid, np.asarray(amplitude(grid.nodes), dtype=np.complex128), float(mass))


def gaussian(grid: MomentumGrid, mass: float, p0: float = 0.0, width: float = 1.0, hermite: int = 0,
             phase: float = 0.0) -> MomentumWavefunction:
    """exp(-(p - p0)^2 / (2 width^2)) H_n((p - p0)/width) e^{i phase p}."""
    def amp(p):
        z = (p - p0) / width
        c = np.zeros(hermite + 1)
        c[-1] = 1.0
        return np.polynomial.hermite.hermval(z, c) * np.exp(-z * z / 2 + 1j * phase * p)

    f = wavefunction(grid, mass, amp)
    if f.tail_fraction() > 1e-10:
        warnings.warn("wavefunction not contained in the momentum window (tail mass > 1e-10)", ResolutionWarning, stacklevel=2)
    return f


def _check_pair(f: MomentumWavefunction, g: MomentumWavefunction) -> None:
    if f.grid != g.grid:
        raise GridMismatchError("wavefunctions live on different grids")
    if f.mass != g.mass:
        raise GridMismatchError("wavefunctions have different masses")


def invariant_inner(f: MomentumWavefunction, g: MomentumWavefunction) -> complex:
    _check_pair(f, g)
    return f.grid.integrate(np.conj(f.values) * g.values / (2 * f.omega))


def position_element(f: MomentumWavefunction, g: MomentumWavefunction, hbar: float = 1.0) -> complex:
    """<f| x g> = i hbar int dp conj(f) g' / (2 omega)."""
    _check_pair(f, g)
    dg = g.grid.derivative(g.values)
    if g.tail_fraction(dg) > 1e-8:
        warnings.warn("derivative not contained in the momentum window", ResolutionWarning, stacklevel=2)
    return 1j * hbar * f.grid.integrate(np.conj(f.values) * dg / (2 * f.omega))


def adjoint_asymmetry(f: MomentumWavefunction, g: MomentumWavefunction, hbar: float = 1.0) -> complex:
    """<f|x g> - <x f|g>, with <x f|g> = conj(<g|x f>)."""
    return position_element(f, g, hbar) - np.conj(position_element(g, f, hbar))


def asymmetry_oracle(f: MomentumWavefunction, g: MomentumWavefunction, hbar: float = 1.0) -> complex:
    """Integrated-by-parts form i hbar int dp conj(f) g p / (2 omega^3); no derivatives."""
    _check_pair(f, g)
    return 1j * hbar * f.grid.integrate(np.conj(f.values) * g.values * f.p / (2 * f.omega**3))


@dataclass(frozen=True)
class LimitRow:
    mass: float
    inner: complex
    position: complex
    asymmetry: complex
    ratio: float  # |asymmetry| / |inner|


def limit_study(f: MomentumWavefunction, g: MomentumWavefunction, masses: Sequence[float], hbar: float = 1.0) -> list[LimitRow]:
    masses = [float(m) for m in masses]
    if any(b <= a for a, b in zip(masses, masses[1:])):
        raise ValueError("masses must be strictly ascending")
    rows = []
    for m in masses:
        fm, gm = f.with_mass(m), g.with_mass(m)
        inner = invariant_inner(fm, gm)
        asym = adjoint_asymmetry(fm, gm, hbar)
        ratio = abs(asym) / abs(inner) if abs(inner) > 0 else math.inf
        rows.append(LimitRow(m, inner, position_element(fm, gm, hbar), asym, ratio))
    return rows


def fit_power_law(masses: Sequence[float], values: Sequence[float]) -> float:
    """Least-squares slope of log(values) against log(masses)."""
    return float(np.polyfit(np.log(np.asarray(masses, float)), np.log(np.asarray(values, float)), 1)[0])
