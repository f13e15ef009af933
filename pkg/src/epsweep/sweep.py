"""Sweep execution, EP search and S-matrix tables behind the CLI."""
from __future__ import annotations

import enum
import io
import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from . import closedform, eploc, smat, spectral
from .ham import ModelMatrix
from .scenario import Scenario

CLOSED_FORM_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class SweepRow:
    param: float
    eigenvalues: np.ndarray  # tracked order; E = real part, Gamma/2 = imag part
    rigidity: np.ndarray
    b_abs: np.ndarray
    theta: np.ndarray  # unwrapped along the sweep
    cos_omega: tuple[float, ...]  # (pair,) for N = 2, (min, max) for N >= 3
    near_ep: np.ndarray
    flags: tuple[str, ...] = ()
    error: str = ""
    vectors: np.ndarray | None = field(default=None, repr=False)

    @property
    def ok(self) -> bool:
        return not self.error


@dataclass(frozen=True, eq=False)
class SweepResult:
    scenario: Scenario
    rows: tuple[SweepRow, ...]

    @property
    def n(self) -> int:
        return self.scenario.n

    def params(self) -> np.ndarray:
        return np.array([r.param for r in self.rows])

    def eigenvalues(self) -> np.ndarray:
        return np.array([r.eigenvalues for r in self.rows])

    def columns(self) -> list[str]:
        return csv_header(self.scenario.sweep.param, self.n)

    def to_csv(self) -> str:
        return rows_to_csv(self)


def _pairwise_cos(vectors: np.ndarray) -> list[float]:
    # |<phi_i|phi_j>| / (|phi_i| |phi_j|) for i < j, from one Hermitian Gram matrix
    unit = vectors / np.linalg.norm(vectors, axis=1, keepdims=True)
    cos = np.minimum(np.abs(unit.conj() @ unit.T), 1.0)
    iu = np.triu_indices(vectors.shape[0], 1)
    return [float(c) for c in cos[iu]]


def _closed_form_mismatch(m: ModelMatrix, lams: np.ndarray) -> float:
    try:
        if m.n == 2:
            ref = np.array(closedform.two_level_eigenvalues(m).lambdas)
        elif m.n == 3 and m[1, 2] == 0:
            ref = np.array(closedform.cardano_eigenvalues(m).lambdas)
        else:
            return math.nan
    except closedform.BranchDegeneracyError:
        return math.nan
    return matched_distance(ref, lams)


def matched_distance(a: Sequence[complex], b: Sequence[complex]) -> float:
    """Largest |a_i - b_perm(i)| under the assignment minimizing the total."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    cost = np.abs(a[:, None] - b[None, :])
    r, c = linear_sum_assignment(cost)
    return float(cost[r, c].max())


def _decompose(m: ModelMatrix):
    try:
        return spectral.eigendecompose(m), ""
    except spectral.SolverError as exc:
        return None, f"ERR:{type(exc).__name__}"


def _initial_labels(spec: spectral.Spectrum) -> np.ndarray:
    # state i starts as the eigenvector dominated by unperturbed level i
    rows, cols = linear_sum_assignment(-np.abs(spec.vectors))
    perm = np.empty(spec.n, dtype=int)
    perm[cols] = rows
    return perm


def run_sweep(
    scenario: Scenario,
    points: int | None = None,
    workers: int | None = None,
) -> SweepResult:
    """Evaluate the scenario on its grid and track eigenstates across points.

    Decompositions are independent and may run on ``workers`` threads; the
    tracking pass and the row order follow the grid regardless.
    """
    grid = scenario.grid(points)
    matrices = [scenario.matrix_at(float(x)) for x in grid]
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_decompose, matrices))
    else:
        results = [_decompose(m) for m in matrices]

    n = scenario.n
    tracked: list[spectral.Spectrum | None] = []
    amb_flags: list[bool] = []
    prev = None
    for spec, err in results:
        if spec is None:
            tracked.append(None)
            amb_flags.append(False)
            continue
        if prev is None:
            spec = spec.permuted(_initial_labels(spec))
            amb = False
        else:
            tr = spectral.track(prev, spec)
            spec = spectral.continue_signs(prev, spec.permuted(tr.perm))
            amb = tr.ambiguous
        tracked.append(spec)
        amb_flags.append(amb)
        prev = spec

    nan_nn = np.full((n, n), np.nan)
    theta_raw = np.array([np.angle(s.vectors) if s is not None else nan_nn for s in tracked])
    theta_unwrapped = np.empty_like(theta_raw)
    for i in range(n):
        for j in range(n):
            theta_unwrapped[:, i, j] = spectral.phase_trajectory(theta_raw[:, i, j]).unwrapped

    rows = []
    for k, (x, m, spec, (_, err)) in enumerate(zip(grid, matrices, tracked, results)):
        if spec is None:
            rows.append(
                SweepRow(
                    float(x),
                    np.full(n, np.nan + 0j),
                    np.full(n, np.nan),
                    nan_nn.copy(),
                    nan_nn.copy(),
                    (math.nan,) if n == 2 else (math.nan, math.nan),
                    np.zeros(n, dtype=bool),
                    (err,),
                    err,
                )
            )
            continue
        mix = spectral.mixing_coefficients(spec, m)
        cosines = _pairwise_cos(spec.vectors)
        cos_omega = (cosines[0],) if n == 2 else (min(cosines), max(cosines))
        flags = [f"EP{i + 1}" for i in range(n) if spec.near_ep_flags[i]]
        if amb_flags[k]:
            flags.append("AMB")
        if not spec.any_near_ep:
            mismatch = _closed_form_mismatch(m, spec.eigenvalues)
            # eigenvalue condition numbers are the A_i = 1/r_i
            scale = max(1.0, float(np.abs(spec.eigenvalues).max())) / float(spec.rigidity.min())
            if mismatch > CLOSED_FORM_TOL * scale:
                flags.append("CF")
        rows.append(
            SweepRow(
                float(x),
                spec.eigenvalues.copy(),
                spec.rigidity.copy(),
                mix.magnitudes,
                theta_unwrapped[k],
                cos_omega,
                spec.near_ep_flags.copy(),
                tuple(flags),
                "",
                spec.vectors.copy(),
            )
        )
    return SweepResult(scenario, tuple(rows))


def csv_header(param: str, n: int) -> list[str]:
    cols = [param]
    for i in range(1, n + 1):
        cols += [f"E_{i}", f"G_half_{i}"]
    cols += [f"r_{i}" for i in range(1, n + 1)]
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            cols += [f"b_abs_{i}_{j}", f"theta_{i}_{j}"]
    cols += ["cos_omega"] if n == 2 else ["cos_omega_min", "cos_omega_max"]
    cols.append("flags")
    return cols


def fmt(x: float) -> str:
    """17 significant digits in scientific notation; 'nan' for missing."""
    if isinstance(x, (float, np.floating)) and not math.isfinite(x):
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    return f"{float(x):.16e}"


def rows_to_csv(result: SweepResult) -> str:
    n = result.n
    buf = io.StringIO()
    buf.write(",".join(result.columns()) + "\n")
    for r in result.rows:
        vals = [fmt(r.param)]
        for i in range(n):
            vals += [fmt(r.eigenvalues[i].real), fmt(r.eigenvalues[i].imag)]
        vals += [fmt(v) for v in r.rigidity]
        for i in range(n):
            for j in range(n):
                vals += [fmt(r.b_abs[i, j]), fmt(r.theta[i, j])]
        vals += [fmt(c) for c in r.cos_omega]
        vals.append(";".join(r.flags))
        buf.write(",".join(vals) + "\n")
    return buf.getvalue()


# --- EP search ---------------------------------------------------------------


class SearchMode(enum.Enum):
    SCAN_1D = "SCAN_1D"
    REFINE_2D = "REFINE_2D"


@dataclass(frozen=True)
class EpReport:
    scenario_id: str
    mode: SearchMode
    eps: tuple[eploc.EpLocation, ...]
    rejected: tuple[eploc.EpLocation, ...] = ()

    def to_dict(self) -> dict:
        def loc(e: eploc.EpLocation) -> dict:
            return {
                "params": list(e.params),
                "continued": len(e.params) == 2 and self.mode is SearchMode.SCAN_1D,
                "residual": e.residual,
                "min_gap": e.min_gap,
                "pair": list(e.pair),
                "kind": e.kind.value,
                "iterations": e.iterations,
                "converged": e.converged,
                "message": e.message,
            }

        return {
            "scenario": self.scenario_id,
            "mode": self.mode.value,
            "eps": [loc(e) for e in self.eps],
            "rejected": [loc(e) for e in self.rejected],
        }


def run_ep_search(
    scenario: Scenario,
    mode: SearchMode = SearchMode.SCAN_1D,
    tol: float = 1e-6,
    points: int | None = None,
    continue_complex: bool = True,
) -> EpReport:
    """Find EPs of a scenario.

    SCAN_1D scans the sweep grid, refines each gap minimum on the real axis,
    and (if ``continue_complex``) follows gap minima that turn out to be
    avoided crossings into the complex parameter plane, reporting the nearby
    EP as (Re x, Im x).  REFINE_2D runs the Newton refinement over the
    (primary, secondary) plane starting from the middle of the sweep.
    """
    if mode is SearchMode.REFINE_2D:
        if scenario.secondary is None:
            raise ValueError("REFINE_2D needs a scenario with a secondary parameter")

        def family2(a, y):
            return scenario.matrix_at_point(a, y)

        if scenario.sweeps_secondary:
            start = (scenario.primary.value, 0.5 * (scenario.sweep.start + scenario.sweep.stop))
        else:
            start = (0.5 * (scenario.sweep.start + scenario.sweep.stop), scenario.secondary.value)
        loc = eploc.refine_ep_2d(family2, start, tol=1e-12)
        ok = loc.converged and loc.kind is not eploc.EpKind.NOT_AN_EP
        return EpReport(scenario.id, mode, (loc,) if ok else (), () if ok else (loc,))

    grid = scenario.grid(points)
    scan = eploc.scan_coalescence(scenario, grid)
    gaps = scan.gaps
    bracketed = {b for b in scan.brackets}
    found, rejected = [], []
    for i in scan.local_minima:
        br = (float(grid[i - 1]), float(grid[i + 1]))
        loc = None
        if br in bracketed:
            loc = eploc.refine_ep_1d(scenario, br, tol=tol)
            if loc.kind is not eploc.EpKind.NOT_AN_EP:
                found.append(loc)
                continue
        if continue_complex:
            span = scenario.sweep.stop - scenario.sweep.start
            cont = eploc.continue_to_complex(scenario, float(grid[i]), max_imag=0.1 * span)
            if cont.is_ep and scenario.sweep.start <= cont.params[0] <= scenario.sweep.stop:
                found.append(cont)
                continue
            rejected.append(cont)
        elif loc is not None:
            rejected.append(loc)
    found = _dedupe(found)
    real = [e for e in found if len(e.params) == 1]
    if len(real) > 1:
        real = [
            eploc.EpLocation(e.params, e.residual, e.pair, eploc.EpKind.PAIR_MEMBER, e.min_gap, e.iterations)
            for e in real
        ]
    cont = [e for e in found if len(e.params) == 2]
    ordered = sorted(real + cont, key=lambda e: e.params[0])
    return EpReport(scenario.id, mode, tuple(ordered), tuple(rejected))


def _dedupe(locs: list[eploc.EpLocation], tol: float = 1e-5) -> list[eploc.EpLocation]:
    # a real-axis EP is the point (x, 0) of the complex plane; keep the first
    def key(e):
        return complex(e.params[0], e.params[1] if len(e.params) == 2 else 0.0)

    out: list[eploc.EpLocation] = []
    for e in sorted(locs, key=lambda e: len(e.params)):
        if all(abs(key(e) - key(o)) > tol * max(1.0, abs(key(o))) for o in out):
            out.append(e)
    return out


# --- S matrix -----------------------------------------------------------------


def run_smatrix(
    resonances: Sequence[smat.Resonance] | Sequence[tuple[float, float]],
    energies: Sequence[float],
    double_pole: bool = False,
) -> smat.LineShape:
    """Line shape on ``energies`` for a product of resonances, or the
    double-pole form when ``double_pole`` is set (first resonance used)."""
    res = [r if isinstance(r, smat.Resonance) else smat.Resonance(*r) for r in resonances]
    if not res:
        raise ValueError("need at least one resonance")
    e = np.asarray(energies, dtype=float)
    if double_pole:
        return smat.cross_section(e, smat.double_pole_s(e, res[0].energy, res[0].width))
    return smat.line_shape(e, res)


def line_shape_csv(shape: smat.LineShape) -> str:
    buf = io.StringIO()
    buf.write("E,re_S,im_S,sigma\n")
    for e, s, sig in zip(shape.energies, shape.s_values, shape.sigma):
        buf.write(f"{fmt(e)},{fmt(s.real)},{fmt(s.imag)},{fmt(sig)}\n")
    return buf.getvalue()
