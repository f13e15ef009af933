"""Hamiltonian families for small open quantum systems.

Every builder returns a complex-symmetric matrix (plain transpose, no
conjugation).  Widths are signed: ``gamma < 0`` is loss, ``gamma > 0`` gain,
and the diagonal entries are ``eps = e + (i/2) * gamma``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np


class DimensionError(ValueError):
    """Raised when a builder receives the wrong number of levels."""


def _check_finite(*values) -> None:
    for v in values:
        if not cmath.isfinite(complex(v)):
            raise ValueError(f"non-finite model parameter: {v!r}")


@dataclass(frozen=True)
class Level:
    e: float
    gamma: float

    def __post_init__(self):
        _check_finite(self.e, self.gamma)

    @property
    def eps(self) -> complex:
        return complex(self.e, 0.5 * self.gamma)


@dataclass(frozen=True)
class Coupling:
    omega: complex
    gaussian_modulated: bool = False

    def __post_init__(self):
        _check_finite(self.omega)


@dataclass(frozen=True)
class ChannelVector:
    v: tuple[float, ...]
    alpha: float

    def __post_init__(self):
        object.__setattr__(self, "v", tuple(float(x) for x in self.v))
        _check_finite(self.alpha, *self.v)
        if self.alpha < 0:
            raise ValueError("alpha must be non-negative")
        if not any(self.v):
            raise ValueError("channel vector needs at least one nonzero amplitude")


@dataclass(frozen=True, eq=False)
class ModelMatrix:
    """Complex-symmetric N x N Hamiltonian.

    ``h0_diagonal`` holds the unperturbed energies that define the basis for
    mixing coefficients; for every builder here it equals the diagonal.
    """

    entries: np.ndarray
    h0_diagonal: tuple[complex, ...] = field(default=())

    def __post_init__(self):
        a = np.array(self.entries, dtype=complex)
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)
        if not self.h0_diagonal:
            object.__setattr__(self, "h0_diagonal", tuple(complex(x) for x in np.diag(a)))
        if not np.all(np.isfinite(a)):
            raise ValueError("model matrix has non-finite entries")

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def trace(self) -> complex:
        return complex(np.trace(self.entries))

    def __getitem__(self, idx):
        return self.entries[idx]

    def __repr__(self):
        return f"ModelMatrix(n={self.n}, entries={self.entries.tolist()!r})"


def assemble(diagonal: Sequence[complex], couplings: dict[tuple[int, int], complex]) -> ModelMatrix:
    """Build a symmetric matrix from its diagonal and upper-triangle couplings.

    Entries may be complex-valued functions of a complex parameter; the result
    is still symmetric because each coupling is written once to both slots.
    """
    n = len(diagonal)
    h = np.zeros((n, n), dtype=complex)
    for i, d in enumerate(diagonal):
        h[i, i] = d
    for (i, j), w in couplings.items():
        if i == j:
            raise ValueError("couplings must be off-diagonal")
        h[i, j] = w
        h[j, i] = w
    return ModelMatrix(h)


def gaussian_coupling(omega: complex, e_i, e_j) -> complex:
    """Energy-distance weighted coupling ``omega * exp(-(e_i - e_j)**2)``."""
    d = e_i - e_j
    if isinstance(d, complex):
        return omega * cmath.exp(-d * d)
    return omega * math.exp(-d * d)


def _pair_coupling(coupling: Coupling, e_i, e_j) -> complex:
    if coupling.gaussian_modulated:
        return complex(gaussian_coupling(coupling.omega, e_i, e_j))
    return complex(coupling.omega)


def build_two_level(levels: Sequence[Level], coupling: Coupling) -> ModelMatrix:
    if len(levels) != 2:
        raise DimensionError(f"two-level model needs 2 levels, got {len(levels)}")
    l1, l2 = levels
    w = _pair_coupling(coupling, l1.e, l2.e)
    return assemble([l1.eps, l2.eps], {(0, 1): w})


def build_pt(e: float, gamma: float, w: float, lossy_variant: bool = False) -> ModelMatrix:
    """Two modes with gain/loss ``gamma`` and real coupling ``w``.

    Balanced: diag(e - i gamma/2, e + i gamma/2).  Lossy variant (no gain):
    diag(e - i gamma/2, e).
    """
    _check_finite(e, gamma, w)
    lower = complex(e, 0.0) if lossy_variant else complex(e, 0.5 * gamma)
    return assemble([complex(e, -0.5 * gamma), lower], {(0, 1): complex(w)})


def build_three_level_doorway(levels: Sequence[Level], coupling: Coupling) -> ModelMatrix:
    """Level 1 is the doorway: it couples to levels 2 and 3, which do not couple."""
    if len(levels) != 3:
        raise DimensionError(f"doorway model needs 3 levels, got {len(levels)}")
    l1, l2, l3 = levels
    return assemble(
        [l1.eps, l2.eps, l3.eps],
        {
            (0, 1): _pair_coupling(coupling, l1.e, l2.e),
            (0, 2): _pair_coupling(coupling, l1.e, l3.e),
        },
    )


def build_channel_model(hb_diag: Sequence[float], channel: ChannelVector) -> ModelMatrix:
    """``diag(hb) - i * alpha * V V^T`` for a single real channel vector V."""
    hb = np.asarray(hb_diag, dtype=float)
    v = np.asarray(channel.v, dtype=float)
    if hb.shape != v.shape:
        raise DimensionError(f"hb has {hb.size} entries but V has {v.size}")
    _check_finite(*hb)
    n = hb.size
    h = np.zeros((n, n), dtype=complex)
    for i in range(n):
        h[i, i] = complex(hb[i], -channel.alpha * (v[i] * v[i]))
        for j in range(i + 1, n):
            w = complex(0.0, -channel.alpha * (v[i] * v[j]))
            h[i, j] = w
            h[j, i] = w
    return ModelMatrix(h)
