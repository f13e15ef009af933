"""Locating exceptional points along sweeps and in parameter planes."""
from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import closedform, spectral
from .ham import ModelMatrix

TOL_GAP = 1e-8
BRACKET_FRACTION = 0.05
COLLINEAR_COS = 0.99

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class EpKind(enum.Enum):
    SINGLE = "SINGLE"
    PAIR_MEMBER = "PAIR_MEMBER"
    NOT_AN_EP = "NOT_AN_EP"


@dataclass(frozen=True)
class CoalescenceSample:
    param: float
    gap: float
    rigidity_min: float


@dataclass(frozen=True)
class ScanResult:
    samples: tuple[CoalescenceSample, ...]
    brackets: tuple[tuple[float, float], ...]
    local_minima: tuple[int, ...] = ()

    @property
    def params(self) -> np.ndarray:
        return np.array([s.param for s in self.samples])

    @property
    def gaps(self) -> np.ndarray:
        return np.array([s.gap for s in self.samples])


@dataclass(frozen=True)
class EpLocation:
    params: tuple[float, ...]
    residual: float
    pair: tuple[int, int]
    kind: EpKind
    min_gap: float = math.nan
    iterations: int = 0
    converged: bool = True
    message: str = ""
    trace: tuple[tuple[float, ...], ...] = field(default=(), repr=False)

    @property
    def is_ep(self) -> bool:
        return self.converged and self.kind is not EpKind.NOT_AN_EP


def as_family(scenario) -> Callable[[float], ModelMatrix]:
    """Accept a Scenario (anything with ``matrix_at``) or a plain callable."""
    return getattr(scenario, "matrix_at", scenario)


def discriminant(m: ModelMatrix) -> complex:
    """Polynomial discriminant prod_{i<j} (lambda_i - lambda_j)^2.

    Analytic in the matrix entries, so it stays accurate where numerically
    computed eigenvalues near an EP carry sqrt(machine-epsilon) errors.
    """
    if m.n == 2:
        return closedform.two_level_discriminant(m)
    if m.n == 3:
        return closedform.cubic_discriminant(m)
    lam = np.linalg.eigvals(m.entries)
    out = 1.0 + 0j
    for i, j in itertools.combinations(range(lam.size), 2):
        out *= (lam[i] - lam[j]) ** 2
    return complex(out)


def closest_pair(m: ModelMatrix) -> tuple[tuple[int, int], float]:
    """Indices (into numpy's eigenvalue order) of the closest eigenvalue pair
    and their distance.  The distance comes from the discriminant for N <= 3."""
    if m.n == 2:
        return (0, 1), math.sqrt(abs(closedform.two_level_discriminant(m)))
    lam = np.linalg.eig(m.entries)[0]
    pairs = list(itertools.combinations(range(lam.size), 2))
    dist = [abs(lam[i] - lam[j]) for i, j in pairs]
    k = int(np.argmin(dist))
    gap = dist[k]
    if m.n == 3:
        others = 1.0
        for idx, (i, j) in enumerate(pairs):
            if idx != k:
                others *= abs(lam[i] - lam[j]) ** 2
        if others > 0:
            gap = math.sqrt(abs(discriminant(m)) / others)
    return pairs[k], float(gap)


def min_gap(m: ModelMatrix) -> float:
    return closest_pair(m)[1]


def _collinear(m: ModelMatrix, pair: tuple[int, int]) -> bool:
    lam, vec = np.linalg.eig(m.entries)
    i, j = pair
    return spectral.eigenvector_angle(vec[:, i], vec[:, j]).cos_omega_mag > COLLINEAR_COS


def scan_coalescence(
    scenario,
    grid: Sequence[float],
    bracket_threshold: float | None = None,
) -> ScanResult:
    """Sample the minimal eigenvalue gap and rigidity along ``grid``.

    Candidate brackets are interior local minima of the gap lying below
    ``bracket_threshold`` (default: 5% of the median gap).
    """
    grid = np.asarray(grid, dtype=float)
    if grid.size < 3 or np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be strictly increasing with at least 3 points")
    family = as_family(scenario)
    samples = []
    for x in grid:
        m = family(float(x))
        spec = spectral.eigendecompose(m)
        samples.append(CoalescenceSample(float(x), min_gap(m), float(spec.rigidity.min())))
    gaps = np.array([s.gap for s in samples])
    if bracket_threshold is None:
        bracket_threshold = BRACKET_FRACTION * float(np.median(gaps))
    minima = []
    for i in range(1, grid.size - 1):
        if gaps[i] <= gaps[i - 1] and gaps[i] <= gaps[i + 1] and (gaps[i] < gaps[i - 1] or gaps[i] < gaps[i + 1]):
            minima.append(i)
    brackets = tuple((float(grid[i - 1]), float(grid[i + 1])) for i in minima if gaps[i] < bracket_threshold)
    return ScanResult(tuple(samples), brackets, tuple(minima))


def _golden_min(f: Callable[[float], float], lo: float, hi: float, max_iter: int = 400) -> tuple[float, int]:
    """Golden-section search, run until the bracket stops shrinking."""
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    it = 0
    while it < max_iter:
        it += 1
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
        if not (a < c < d < b):
            break
    candidates = [(fc, c), (fd, d), (f(a), a), (f(b), b)]
    best = min(candidates, key=lambda t: (t[0], t[1]))
    return best[1], it


def refine_ep_1d(
    scenario,
    bracket: tuple[float, float],
    tol: float = 1e-6,
    tol_gap: float = TOL_GAP,
    sibling: bool = False,
) -> EpLocation:
    """Minimize the eigenvalue coalescence measure inside ``bracket``.

    The search runs to machine precision (``tol`` is the accuracy the result
    is guaranteed to, not a stopping criterion).  If the smallest gap found
    exceeds ``10 * tol_gap`` the bracket holds an avoided crossing and the
    result is returned with kind NOT_AN_EP.
    """
    lo, hi = map(float, bracket)
    if not lo < hi:
        raise ValueError("bracket must satisfy lo < hi")
    family = as_family(scenario)
    n = family(lo).n

    if n <= 3:
        def objective(x):
            return abs(discriminant(family(x)))
    else:
        def objective(x):
            return min_gap(family(x))

    x, iters = _golden_min(objective, lo, hi)
    m = family(x)
    pair, gap = closest_pair(m)
    residual = abs(discriminant(m)) if n == 2 else gap * gap
    is_ep = gap <= 10.0 * tol_gap and _collinear(m, pair)
    if not is_ep:
        kind = EpKind.NOT_AN_EP
    else:
        kind = EpKind.PAIR_MEMBER if sibling else EpKind.SINGLE
    return EpLocation((x,), residual, pair, kind, gap, iters, True)


def _residual_vec(family2, p) -> np.ndarray:
    d = discriminant(family2(float(p[0]), float(p[1])))
    return np.array([d.real, d.imag])


def refine_ep_2d(
    family2: Callable[[float, float], ModelMatrix],
    start: tuple[float, float],
    tol: float = 1e-12,
    max_iter: int = 100,
    max_step: float = 1.0,
    fd_step: float = 1e-7,
) -> EpLocation:
    """Newton iteration on (Re D, Im D) over two real parameters.

    The Jacobian comes from central differences and the step is the
    minimum-norm least-squares solution, so a curve of EPs (rank-one
    Jacobian) is handled.  Steps are capped at ``max_step`` and halved until
    |D| decreases; failure to decrease ends the run with converged=False.
    """

    def jacobian(p):
        jac = np.empty((2, 2))
        for k in range(2):
            h = fd_step * max(1.0, abs(p[k]))
            e = np.zeros(2)
            e[k] = h
            jac[:, k] = (_residual_vec(family2, p + e) - _residual_vec(family2, p - e)) / (2.0 * h)
        return jac

    def attempt(p0):
        p = np.array(p0, dtype=float)
        f = _residual_vec(family2, p)
        trace = [tuple(p)]
        for it in range(1, max_iter + 1):
            if math.hypot(*f) < tol:
                return p, f, it - 1, True, "", trace
            jac = jacobian(p)
            if not np.all(np.isfinite(jac)) or not np.any(jac):
                return p, f, it, False, "singular Jacobian", trace
            # singular values below the finite-difference accuracy are noise
            step = np.linalg.lstsq(jac, -f, rcond=1e-7)[0]
            norm = float(np.linalg.norm(step))
            if norm > max_step:
                step *= max_step / norm
            fnorm = math.hypot(*f)
            t = 1.0
            for _ in range(40):
                trial = p + t * step
                ft = _residual_vec(family2, trial)
                if math.hypot(*ft) < fnorm:
                    break
                t *= 0.5
            else:
                return p, f, it, False, "no decrease along Newton direction", trace
            p, f = trial, ft
            trace.append(tuple(p))
        ok = math.hypot(*f) < tol
        return p, f, max_iter, ok, "" if ok else "iteration limit reached", trace

    p, f, its, ok, msg, trace = attempt(start)
    if not ok and msg == "singular Jacobian":
        nudge = 1e-4 * max(1.0, abs(start[0]), abs(start[1]))
        p, f, its2, ok, msg, trace2 = attempt((start[0] + nudge, start[1] + nudge))
        its += its2
        trace += trace2
        if not ok:
            msg = "singular Jacobian after perturbation: " + msg
    m = family2(float(p[0]), float(p[1]))
    pair, gap = closest_pair(m)
    kind = EpKind.SINGLE if ok else EpKind.NOT_AN_EP
    return EpLocation(
        (float(p[0]), float(p[1])),
        float(math.hypot(*f)),
        pair,
        kind,
        gap,
        its,
        ok,
        msg,
        tuple(trace),
    )


def continue_to_complex(
    scenario,
    x0: float,
    tol: float | None = None,
    max_imag: float | None = None,
) -> EpLocation:
    """Find the EP of the analytically continued one-parameter family nearest
    to the real sweep value ``x0`` (an avoided crossing on the real axis).

    Returns params (Re x, Im x).  The point is accepted only if the two
    eigenvectors there are collinear (a diabolic crossing is rejected).
    """
    family = as_family(scenario)

    def family2(re, im):
        return family(complex(re, im))

    m0 = family(float(x0))
    scale = abs(discriminant(m0))
    if tol is None:
        tol = max(1e-14 * scale, 1e-300)
    loc = refine_ep_2d(family2, (float(x0), 0.0), tol=tol, max_step=0.1 * max(1.0, abs(x0)))
    if not loc.converged:
        # Newton stalling at round-off level still counts as converged
        if not (loc.message.startswith("no decrease") and loc.residual <= 1e-8 * scale):
            return loc
        loc = EpLocation(loc.params, loc.residual, loc.pair, EpKind.SINGLE, loc.min_gap, loc.iterations, True,
                         "stalled at round-off", loc.trace)
    m = family2(*loc.params)
    collinear = _collinear(m, loc.pair)
    within = max_imag is None or abs(loc.params[1]) <= max_imag
    if collinear and within:
        return loc
    why = "eigenvectors not collinear (diabolic point)" if not collinear else "imaginary part out of range"
    return EpLocation(loc.params, loc.residual, loc.pair, EpKind.NOT_AN_EP, loc.min_gap, loc.iterations, True, why)
