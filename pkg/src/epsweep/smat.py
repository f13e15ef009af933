"""Resonance S-matrix line shapes.

Widths here are positive (the usual resonance convention).  Eigenvalues from
the Hamiltonian modules carry Gamma < 0 for decay; use
:func:`resonance_from_eigenvalue` to cross over.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class Resonance:
    energy: float
    width: float

    def __post_init__(self):
        if not self.width > 0:
            raise ValueError(f"resonance width must be positive, got {self.width!r}")


@dataclass(frozen=True, eq=False)
class LineShape:
    energies: np.ndarray
    s_values: np.ndarray
    sigma: np.ndarray


def resonance_from_eigenvalue(lam: complex) -> Resonance:
    """lambda = E + (i/2) Gamma with Gamma < 0  ->  Resonance(E, -Gamma)."""
    return Resonance(lam.real, -2.0 * lam.imag)


def _pole(E, res: Resonance):
    return np.asarray(E, dtype=float) - res.energy - 0.5j * res.width


def breit_wigner(E, res: Resonance):
    """S = (E - E1 + i G/2) / (E - E1 - i G/2); unimodular on the real axis."""
    d = _pole(E, res)
    return np.conj(d) / d


def breit_wigner_additive(E, res: Resonance):
    """S = 1 + i G / (E - E1 - i G/2), algebraically equal to :func:`breit_wigner`."""
    return 1.0 + 1j * res.width / _pole(E, res)


def two_resonance_s(E, r1: Resonance, r2: Resonance):
    d1, d2 = _pole(E, r1), _pole(E, r2)
    return (np.conj(d1) * np.conj(d2)) / (d1 * d2)


def double_pole_s(E, ed: float, gamma_d: float):
    """S at the coalescence of two resonances (E1 = E2 = ed, G1 = G2 = gamma_d)."""
    if not gamma_d > 0:
        raise ValueError("gamma_d must be positive")
    d = np.asarray(E, dtype=float) - ed - 0.5j * gamma_d
    return 1.0 + 2j * gamma_d / d - gamma_d ** 2 / d ** 2


def cross_section(energies: Sequence[float], s_values) -> LineShape:
    """sigma = |1 - S|^2 (proportionality constant set to 1)."""
    e = np.asarray(energies, dtype=float)
    if e.size == 0:
        raise ValueError("empty energy grid")
    s = np.broadcast_to(np.asarray(s_values, dtype=complex), e.shape).copy()
    return LineShape(e, s, np.abs(1.0 - s) ** 2)


def line_shape(energies: Sequence[float], resonances: Sequence[Resonance]) -> LineShape:
    """Product of unitary single-resonance factors over ``resonances``."""
    e = np.asarray(energies, dtype=float)
    s = np.ones(e.shape, dtype=complex)
    for r in resonances:
        s = s * breit_wigner(e, r)
    return cross_section(e, s)


def local_maxima(values) -> np.ndarray:
    v = np.asarray(values)
    idx = np.flatnonzero((v[1:-1] > v[:-2]) & (v[1:-1] >= v[2:])) + 1
    return idx
