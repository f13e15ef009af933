"""Closed-form eigenvalues for the two- and three-level models."""
from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass

from .ham import DimensionError, ModelMatrix

SQRT3 = math.sqrt(3.0)


class StructureError(ValueError):
    """The matrix does not have the structure the formula assumes."""


class BranchDegeneracyError(ArithmeticError):
    """Cardano's ``u`` vanished with ``p != 0``; use a numeric eigensolver."""


class RegimeTag(enum.Enum):
    LEVEL_REPULSION = "level_repulsion"
    WIDTH_BIFURCATION = "width_bifurcation"
    EXCEPTIONAL_POINT = "exceptional_point"


@dataclass(frozen=True)
class Regime:
    tag: RegimeTag
    detail: float  # |D|, distance of the discriminant from zero


@dataclass(frozen=True)
class TwoLevelEigen:
    lambda_plus: complex
    lambda_minus: complex
    z: complex

    @property
    def lambdas(self) -> tuple[complex, complex]:
        return (self.lambda_plus, self.lambda_minus)


@dataclass(frozen=True)
class CubicSolution:
    lambdas: tuple[complex, complex, complex]
    R: complex
    S: complex
    T: complex
    p: complex
    q: complex
    u: complex
    v: complex


def _require_n(m: ModelMatrix, n: int) -> None:
    if m.n != n:
        raise DimensionError(f"expected a {n}x{n} matrix, got {m.n}x{m.n}")


def two_level_discriminant(m: ModelMatrix) -> complex:
    """D = (eps1 - eps2)**2 + 4 omega**2; the EP condition is D = 0."""
    _require_n(m, 2)
    d = m[0, 0] - m[1, 1]
    w = m[0, 1]
    return complex(d * d + 4.0 * w * w)


def two_level_eigenvalues(m: ModelMatrix) -> TwoLevelEigen:
    _require_n(m, 2)
    center = 0.5 * (m[0, 0] + m[1, 1])
    z = 0.5 * cmath.sqrt(two_level_discriminant(m))
    return TwoLevelEigen(complex(center + z), complex(center - z), z)


def classify_two_level(m: ModelMatrix, tolerance: float = 1e-9) -> Regime:
    """Level repulsion when Z is (mostly) real, width bifurcation when (mostly)
    imaginary, EP when the discriminant vanishes within ``tolerance``."""
    dsc = two_level_discriminant(m)
    mag = abs(dsc)
    if mag <= tolerance:
        return Regime(RegimeTag.EXCEPTIONAL_POINT, mag)
    # sqrt(D) has |Re| >= |Im| exactly when Re D >= 0
    if dsc.real >= 0.0:
        return Regime(RegimeTag.LEVEL_REPULSION, mag)
    return Regime(RegimeTag.WIDTH_BIFURCATION, mag)


def _signed_sqrt_of_real(x: float) -> complex:
    # keeps the result exactly real (or exactly imaginary) for real input
    if x >= 0.0:
        return complex(math.sqrt(x), 0.0)
    return complex(0.0, math.sqrt(-x))


def pt_discriminant(gamma: float, w: float, lossy_variant: bool = False) -> float:
    """4|w|^2 - gamma^2 (balanced) or 4|w|^2 - gamma^2/4 (lossy), in factored
    form so the sign is exact at the threshold."""
    g = abs(gamma) / 2.0 if lossy_variant else abs(gamma)
    two_w = 2.0 * abs(w)
    return (two_w - g) * (two_w + g)


def pt_eigenvalues(e: float, gamma: float, w: float, lossy_variant: bool = False) -> TwoLevelEigen:
    z = 0.5 * _signed_sqrt_of_real(pt_discriminant(gamma, w, lossy_variant))
    center = complex(e, -gamma / 4.0) if lossy_variant else complex(e, 0.0)
    return TwoLevelEigen(center + z, center - z, z)


def pt_large_gamma_limit(e: float, gamma: float) -> tuple[complex, complex]:
    """Asymptotic modes of the lossy variant: one lossless, one with loss gamma/2."""
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    return complex(e, 0.0), complex(e, -gamma / 2.0)


def mixed_sign_z(m: ModelMatrix) -> complex:
    """Z written out in terms of real energies and widths (any width signs)."""
    _require_n(m, 2)
    e1, e2 = m[0, 0].real, m[1, 1].real
    g1, g2 = 2.0 * m[0, 0].imag, 2.0 * m[1, 1].imag
    w = m[0, 1]
    de, dg = e1 - e2, g1 - g2
    inner = de * de - 0.25 * dg * dg + 1j * de * dg + 4.0 * w * w
    return 0.5 * cmath.sqrt(complex(inner))


def _principal_cbrt(x: complex) -> complex:
    if x == 0:
        return 0j
    r, phi = cmath.polar(x)
    return cmath.rect(r ** (1.0 / 3.0), phi / 3.0)


def _depressed_roots(p: complex, q: complex) -> tuple[complex, complex, complex, complex, complex]:
    """Roots y of y^3 + p y + q = 0 plus the (u, v) used."""
    if p == 0 and q == 0:
        return 0j, 0j, 0j, 0j, 0j
    s = cmath.sqrt((p / 3.0) ** 3 + (q / 2.0) ** 2)
    # both signs of s give the same root set with u and v exchanged; the larger
    # radicand keeps v = -p/(3u) well conditioned
    a_plus, a_minus = -q / 2.0 + s, -q / 2.0 - s
    radicand = a_plus if abs(a_plus) >= abs(a_minus) else a_minus
    u = _principal_cbrt(radicand)
    floor = 1e-14 * max(1.0, abs(p), abs(q)) ** (1.0 / 3.0)
    if abs(u) < floor:
        if p != 0:
            raise BranchDegeneracyError(f"|u|={abs(u):.3e} below floor with p={p!r}")
        v = 0j
    else:
        v = -p / (3.0 * u)
    half_sum, half_diff = (u + v) / 2.0, (u - v) / 2.0
    y1 = u + v
    y2 = -half_sum + half_diff * 1j * SQRT3
    y3 = -half_sum - half_diff * 1j * SQRT3
    return y1, y2, y3, u, v


def cubic_coefficients(m: ModelMatrix) -> tuple[complex, complex, complex]:
    """R, S, T of lambda^3 + R lambda^2 + S lambda + T for a doorway matrix.

    Allows omega_12 != omega_13 (as produced by the Gaussian modulation); with
    equal couplings this reduces to S = ... - 2 omega^2, T = omega^2 (eps2 + eps3) - eps1 eps2 eps3.
    """
    _require_n(m, 3)
    if m[1, 2] != 0 or m[2, 1] != 0:
        raise StructureError("cardano_eigenvalues requires a doorway matrix (entry (2,3) = 0)")
    e1, e2, e3 = (complex(m[i, i]) for i in range(3))
    w12, w13 = complex(m[0, 1]) ** 2, complex(m[0, 2]) ** 2
    R = -(e1 + e2 + e3)
    S = e1 * e2 + e1 * e3 + e2 * e3 - w12 - w13
    T = w12 * e3 + w13 * e2 - e1 * e2 * e3
    return R, S, T


def cardano_eigenvalues(m: ModelMatrix) -> CubicSolution:
    R, S, T = cubic_coefficients(m)
    # p, q are shift invariant; computing them relative to eps1 avoids the
    # cancellation that otherwise spoils near-degenerate diagonals
    shift = complex(m[0, 0])
    Rs, Ss, Ts = cubic_coefficients(_shifted(m, shift))
    p = (3.0 * Ss - Rs * Rs) / 3.0
    q = 2.0 * Rs ** 3 / 27.0 - Rs * Ss / 3.0 + Ts
    y1, y2, y3, u, v = _depressed_roots(p, q)
    offset = shift - Rs / 3.0
    lambdas = (y1 + offset, y2 + offset, y3 + offset)
    return CubicSolution(lambdas, R, S, T, p, q, u, v)


def _shifted(m: ModelMatrix, c: complex) -> ModelMatrix:
    h = m.entries.copy()
    for i in range(m.n):
        h[i, i] -= c
    return ModelMatrix(h)


def char_poly_coefficients3(m: ModelMatrix) -> tuple[complex, complex, complex]:
    """R, S, T of det(lambda - H) for any 3x3 matrix."""
    _require_n(m, 3)
    h = m.entries
    R = -complex(h[0, 0] + h[1, 1] + h[2, 2])
    S = complex(
        h[0, 0] * h[1, 1] - h[0, 1] * h[1, 0]
        + h[0, 0] * h[2, 2] - h[0, 2] * h[2, 0]
        + h[1, 1] * h[2, 2] - h[1, 2] * h[2, 1]
    )
    T = -complex(
        h[0, 0] * (h[1, 1] * h[2, 2] - h[1, 2] * h[2, 1])
        - h[0, 1] * (h[1, 0] * h[2, 2] - h[1, 2] * h[2, 0])
        + h[0, 2] * (h[1, 0] * h[2, 1] - h[1, 1] * h[2, 0])
    )
    return R, S, T


def cubic_discriminant(m: ModelMatrix) -> complex:
    """prod_{i<j} (lambda_i - lambda_j)^2 from the characteristic polynomial."""
    Rs, Ss, Ts = char_poly_coefficients3(_shifted(m, complex(m[0, 0])))
    return (
        18.0 * Rs * Ss * Ts
        - 4.0 * Rs ** 3 * Ts
        + Rs * Rs * Ss * Ss
        - 4.0 * Ss ** 3
        - 27.0 * Ts * Ts
    )


def triple_crossing_limit(eps, u: complex) -> tuple[complex, complex, complex]:
    """Eigenvalues along the v = -u family approaching the triple crossing."""
    if len(eps) != 3:
        raise DimensionError("triple crossing needs three energies")
    center = sum(complex(x) for x in eps) / 3.0
    split = 1j * u * SQRT3
    return center, center + split, center - split
