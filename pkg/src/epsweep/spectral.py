"""Numeric eigendecomposition of complex-symmetric matrices.

Right eigenvectors are normalized with the bilinear form (no conjugation),
``phi^T phi = 1``, which leaves ``phi^T phi`` real; the Hermitian norm
``A = phi^H phi`` then measures how far a state is from an orthogonal one and
diverges at an exceptional point.  Phase rigidity is ``r = 1/A``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .ham import ModelMatrix

NEAR_EP_CAP = 1e12
# at an exact EP LAPACK returns self-overlaps and eigenvalue splittings of
# order sqrt(machine epsilon); anything below this is not distinguishable from 0
SELF_OVERLAP_TOL = 1e-6
"""Sentinel reported for A and |b_ij| once the normalization has diverged."""


class SolverError(RuntimeError):
    def __init__(self, message: str, residual: float = math.nan):
        super().__init__(message)
        self.residual = residual


@dataclass(frozen=True, eq=False)
class Eigenpair:
    lam: complex
    phi: np.ndarray


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Eigenvalues and biorthonormal right eigenvectors.

    ``vectors[i]`` is the eigenvector of ``eigenvalues[i]`` expressed in the
    unperturbed basis, so ``vectors[i, j]`` is the mixing coefficient b_ij.
    """

    eigenvalues: np.ndarray
    vectors: np.ndarray
    a_norm: np.ndarray
    rigidity: np.ndarray
    near_ep_flags: np.ndarray
    b_overlap: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.eigenvalues.size

    @property
    def pairs(self) -> list[Eigenpair]:
        return [Eigenpair(complex(l), v.copy()) for l, v in zip(self.eigenvalues, self.vectors)]

    @property
    def any_near_ep(self) -> bool:
        return bool(self.near_ep_flags.any())

    def permuted(self, perm: Sequence[int]) -> "Spectrum":
        perm = np.asarray(perm, dtype=int)
        return Spectrum(
            self.eigenvalues[perm],
            self.vectors[perm],
            self.a_norm[perm],
            self.rigidity[perm],
            self.near_ep_flags[perm],
            self.b_overlap[np.ix_(perm, perm)],
        )

    def with_signs(self, signs: Sequence[float]) -> "Spectrum":
        signs = np.asarray(signs, dtype=float)
        return Spectrum(
            self.eigenvalues,
            self.vectors * signs[:, None],
            self.a_norm,
            self.rigidity,
            self.near_ep_flags,
            self.b_overlap,
        )

    def bilinear_gram(self) -> np.ndarray:
        """<phi_i^*|phi_j> = phi_i^T phi_j; the identity away from EPs."""
        return self.vectors @ self.vectors.T

    def hermitian_gram(self) -> np.ndarray:
        """<phi_i|phi_j> = phi_i^H phi_j."""
        return self.vectors.conj() @ self.vectors.T


@dataclass(frozen=True, eq=False)
class MixingTable:
    b: np.ndarray
    magnitudes: np.ndarray
    phases: np.ndarray


@dataclass(frozen=True)
class AngleDiagnostic:
    cos_omega_mag: float
    raw_overlap: complex


@dataclass(frozen=True)
class TrackResult:
    perm: tuple[int, ...]
    ambiguous: bool = False


@dataclass(frozen=True)
class PhaseJump:
    index: int  # jump happens between samples ``index`` and ``next_index``
    next_index: int
    magnitude: float


@dataclass(frozen=True, eq=False)
class PhaseTrajectory:
    unwrapped: np.ndarray
    jumps: tuple[PhaseJump, ...]


def _fix_sign(phi: np.ndarray) -> np.ndarray:
    k = int(np.argmax(np.abs(phi)))
    c = phi[k]
    if c.real < 0 or (c.real == 0 and c.imag < 0):
        return -phi
    return phi


def _bilinear_orthogonalize(vecs: list[np.ndarray], floor: float) -> list[np.ndarray] | None:
    """Gram-Schmidt with the bilinear form inside a degenerate cluster."""
    out: list[np.ndarray] = []
    for v in vecs:
        w = v.astype(complex).copy()
        for o in out:
            w = w - (o @ w) * o
        norm = math.sqrt(float(np.vdot(w, w).real))
        if norm == 0.0:
            return None
        w = w / norm
        s = w @ w
        if abs(s) < floor:
            return None
        out.append(w / np.sqrt(s))
    return out


def biorthonormalize(
    pairs: Sequence[Eigenpair],
    tolerance: float = SELF_OVERLAP_TOL,
    ortho_tol: float = 1e-8,
) -> Spectrum:
    """Scale eigenvectors so that phi_i^T phi_j = delta_ij.

    A vector whose bilinear self-overlap (for unit Hermitian norm) is below
    ``tolerance`` is self-orthogonal to working precision: it is flagged,
    left at unit norm, and A, |b| are reported as ``NEAR_EP_CAP``.  A pair of
    vectors whose mutual bilinear overlap exceeds ``ortho_tol`` after scaling
    is also flagged, since the normalization no longer holds there.
    """
    n = len(pairs)
    lams = np.array([complex(p.lam) for p in pairs])
    units = []
    for p in pairs:
        phi = np.asarray(p.phi, dtype=complex)
        norm = math.sqrt(float(np.vdot(phi, phi).real))
        if norm == 0.0:
            raise ValueError("zero eigenvector")
        units.append(phi / norm)

    vecs: list[np.ndarray | None] = [None] * n
    flags = np.zeros(n, dtype=bool)

    # exactly degenerate but diagonalizable clusters need a basis rotation
    scale = max(1.0, float(np.max(np.abs(lams))))
    done = set()
    cluster_of = list(range(n))  # equal ids: rotated together, genuinely degenerate
    for i in range(n):
        if i in done:
            continue
        cluster = [j for j in range(n) if j not in done and abs(lams[j] - lams[i]) <= 1e-12 * scale]
        done.update(cluster)
        if len(cluster) > 1:
            ortho = _bilinear_orthogonalize([units[j] for j in cluster], tolerance)
            if ortho is not None:
                for j, w in zip(cluster, ortho):
                    vecs[j] = w
                    cluster_of[j] = i
                continue
        for j in cluster:
            u = units[j]
            s = u @ u
            if abs(s) < tolerance:
                flags[j] = True
                vecs[j] = u
            else:
                vecs[j] = u / np.sqrt(s)

    vectors = np.array([_fix_sign(v) for v in vecs])
    a_norm = np.einsum("ij,ij->i", vectors.conj(), vectors).real.copy()
    a_norm[flags] = NEAR_EP_CAP
    np.minimum(a_norm, NEAR_EP_CAP, out=a_norm)
    # |phi^T phi| <= phi^H phi; clip rounding so that r stays in (0, 1]
    np.maximum(a_norm, 1.0, out=a_norm)
    rigidity = 1.0 / a_norm

    # eigenvalues closer than tolerance (relative) cannot be normalized reliably
    for i in range(n):
        for j in range(i + 1, n):
            if cluster_of[i] != cluster_of[j] and abs(lams[i] - lams[j]) < tolerance * scale:
                flags[i] = flags[j] = True

    gram = vectors @ vectors.T
    off = np.abs(gram - np.eye(n))
    for i in range(n):
        for j in range(i + 1, n):
            if off[i, j] > ortho_tol:
                flags[i] = flags[j] = True

    b_overlap = np.abs(vectors.conj() @ vectors.T)
    return Spectrum(lams, vectors, a_norm, rigidity, flags, b_overlap)


def eigendecompose(m: ModelMatrix, tolerance: float = SELF_OVERLAP_TOL) -> Spectrum:
    h = m.entries
    if h.shape[0] < 2:
        raise ValueError("need N >= 2")
    try:
        lams, cols = np.linalg.eig(h)
    except np.linalg.LinAlgError as exc:
        raise SolverError(f"eigensolver failed: {exc}") from exc
    hnorm = max(float(np.linalg.norm(h)), 1e-300)  # Frobenius >= spectral norm
    res = np.sqrt(np.sum(np.abs(h @ cols - cols * lams) ** 2, axis=0))
    bounds = 1e-9 * hnorm * np.sqrt(np.sum(np.abs(cols) ** 2, axis=0))
    bad = np.flatnonzero(res > bounds)
    if bad.size:
        k = int(bad[0])
        raise SolverError(f"eigenpair {k} residual {res[k]:.3e} exceeds {bounds[k]:.3e}", float(res[k]))
    pairs = [Eigenpair(complex(lams[k]), cols[:, k]) for k in range(lams.size)]
    return biorthonormalize(pairs, tolerance)


def mixing_coefficients(s: Spectrum, m: ModelMatrix) -> MixingTable:
    """b_ij in Phi_i = sum_j b_ij Phi_j^0, with Phi_j^0 the unit vectors of
    the diagonal unperturbed Hamiltonian."""
    if len(m.h0_diagonal) != s.n:
        raise ValueError("spectrum and model sizes differ")
    b = s.vectors.copy()
    mags = np.abs(b)
    mags[s.near_ep_flags & (s.a_norm >= NEAR_EP_CAP)] = NEAR_EP_CAP
    return MixingTable(b, mags, np.angle(b))


def eigenvector_angle(phi1, phi2) -> AngleDiagnostic:
    phi1 = np.asarray(phi1, dtype=complex)
    phi2 = np.asarray(phi2, dtype=complex)
    n1, n2 = np.linalg.norm(phi1), np.linalg.norm(phi2)
    if n1 == 0 or n2 == 0:
        raise ValueError("eigenvector_angle needs nonzero vectors")
    raw = complex(np.vdot(phi1, phi2))
    return AngleDiagnostic(min(1.0, abs(raw) / (n1 * n2)), raw)


def phase_difference_norm(phi1, phi2) -> float:
    """min over chi of || phi1 - e^{i chi} phi2 || for unit-normalized inputs."""
    u1 = np.asarray(phi1, dtype=complex)
    u2 = np.asarray(phi2, dtype=complex)
    u1 = u1 / np.linalg.norm(u1)
    u2 = u2 / np.linalg.norm(u2)
    return math.sqrt(max(0.0, 2.0 - 2.0 * abs(np.vdot(u2, u1))))


def _unit_rows(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def track(prev: Spectrum, nxt: Spectrum, tie_tol: float = 1e-6) -> TrackResult:
    """Match labels of ``prev`` to eigenpairs of ``nxt``.

    ``perm[i]`` is the index in ``nxt`` that continues state ``i`` of ``prev``.
    Assignment maximizes the summed Hermitian overlaps; when a state has two
    candidate overlaps within ``tie_tol`` the eigenvalue distance decides.
    """
    if prev.n != nxt.n:
        raise ValueError("spectra have different sizes")
    overlap = np.abs(_unit_rows(prev.vectors).conj() @ _unit_rows(nxt.vectors).T)
    ambiguous = False
    if prev.n > 1:
        top2 = np.sort(overlap, axis=1)[:, -2:]
        ambiguous = bool(np.any(top2[:, 1] - top2[:, 0] < tie_tol))
    if ambiguous:
        cost = np.abs(prev.eigenvalues[:, None] - nxt.eigenvalues[None, :])
    else:
        cost = -overlap
    rows, cols = linear_sum_assignment(cost)
    perm = np.empty(prev.n, dtype=int)
    perm[rows] = cols
    return TrackResult(tuple(int(x) for x in perm), ambiguous)


def continue_signs(prev: Spectrum, nxt: Spectrum) -> Spectrum:
    """Flip eigenvector signs of an already tracked ``nxt`` so that
    Re<phi_prev|phi_next> >= 0 for every label."""
    dots = np.einsum("ij,ij->i", prev.vectors.conj(), nxt.vectors).real
    return nxt.with_signs(np.where(dots < 0, -1.0, 1.0))


def phase_trajectory(theta_series, threshold: float = math.pi / 8) -> PhaseTrajectory:
    """Unwrap a sampled phase and report steps larger than ``threshold``.

    NaN samples (e.g. flagged EP rows) are kept as NaN and skipped; a jump
    across them is reported between the bracketing finite samples.
    """
    theta = np.asarray(theta_series, dtype=float)
    out = np.full_like(theta, np.nan)
    jumps = []
    last_i = None
    for k, t in enumerate(theta):
        if not np.isfinite(t):
            continue
        if last_i is None:
            out[k] = t
        else:
            step = (t - theta[last_i] + math.pi) % (2 * math.pi) - math.pi
            out[k] = out[last_i] + step
            if abs(step) > threshold:
                jumps.append(PhaseJump(last_i, k, float(step)))
        last_i = k
    return PhaseTrajectory(out, tuple(jumps))


def source_term_overlaps(s: Spectrum, m: ModelMatrix) -> np.ndarray:
    """<Phi_k|W|Phi_i> with W = -(off-diagonal part of H); these drive the
    nonlinear source term and vanish with the coupling."""
    w = -(m.entries - np.diag(np.diag(m.entries)))
    return s.vectors.conj() @ w @ s.vectors.T
