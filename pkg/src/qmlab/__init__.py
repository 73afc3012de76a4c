"""Numerical checks for observer-relative states, a pointer measurement model,
the x^3 p operator on the harmonic oscillator, and position under the
Lorentz-invariant inner product."""

__version__ = "0.1.0"
