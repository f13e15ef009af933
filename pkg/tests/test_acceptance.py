"""Acceptance gate: one check per criterion, at the stated tolerances.

Each check records a PASS/FAIL line; the lines are printed at the end of the
pytest run (see conftest.py) and by ``python tests/test_acceptance.py``.
"""
from __future__ import annotations

import math
import sys
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from conftest import random_doorway, random_two_level  # noqa: E402

from epsweep import closedform, eploc, ham, smat, spectral  # noqa: E402
from epsweep.scenario import PRESETS, get_scenario  # noqa: E402
from epsweep.sweep import matched_distance, run_ep_search, run_sweep  # noqa: E402

RESULTS: dict[int, tuple[bool, str]] = {}


def record(n: int, ok: bool, detail: str) -> bool:
    RESULTS[n] = (bool(ok), detail)
    return bool(ok)


def summary_lines() -> list[str]:
    return [f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}" for n, (ok, detail) in sorted(RESULTS.items())]


_sweeps: dict[str, object] = {}
_reports: dict[str, object] = {}


def sweep_of(sid):
    if sid not in _sweeps:
        _sweeps[sid] = run_sweep(PRESETS[sid])
    return _sweeps[sid]


def report_of(sid):
    if sid not in _reports:
        _reports[sid] = run_ep_search(PRESETS[sid])
    return _reports[sid]


# 1 -----------------------------------------------------------------------------


def check_1() -> bool:
    rng = np.random.default_rng(1)
    t0 = time.perf_counter()
    worst2 = worst3 = 0.0
    for _ in range(1000):
        m = random_two_level(rng)
        num = spectral.eigendecompose(m).eigenvalues
        worst2 = max(worst2, matched_distance(closedform.two_level_eigenvalues(m).lambdas, num))
    for _ in range(1000):
        m = random_doorway(rng)
        num = spectral.eigendecompose(m).eigenvalues
        worst3 = max(worst3, matched_distance(closedform.cardano_eigenvalues(m).lambdas, num))
    dt = time.perf_counter() - t0
    ok = worst2 < 1e-9 and worst3 < 1e-9 and dt < 10
    return record(1, ok, f"max mismatch 2x2 {worst2:.2e}, 3x3 {worst3:.2e} (< 1e-9); runtime {dt:.2f} s (< 10 s)")


# 2 -----------------------------------------------------------------------------


def check_2() -> bool:
    ab = [e.params[0] for e in report_of("part1-fig1ab").eps]
    ef = [e.params[0] for e in report_of("part1-fig1ef").eps]
    ok_ab = len(ab) == 1 and abs(ab[0] - 0.666667) <= 1e-5
    ok_ef = len(ef) == 2 and abs(ef[0] - 0.6) <= 1e-5 and abs(ef[1] - 0.733333) <= 1e-5
    # Fig. 9 EPs lie off the real a axis; compare their real parts
    nine = sorted(e.params[0] for e in report_of("part2-fig9").eps)
    targets = [-4.0, -2.0, 2.0, 4.0]
    ok_9 = len(nine) == 4 and all(abs(x - t) <= 0.1 for x, t in zip(nine, targets))
    fig9 = ", ".join(
        f"{e.params[0]:+.4f}{e.params[1]:+.4f}i" if len(e.params) == 2 else f"{e.params[0]:+.4f}"
        for e in report_of("part2-fig9").eps
    )
    detail = (
        f"fig1ab {[round(x, 7) for x in ab]} [{'ok' if ok_ab else 'X'}]; "
        f"fig1ef {[round(x, 7) for x in ef]} [{'ok' if ok_ef else 'X'}]; "
        f"fig9 a = {fig9} vs -4,-2,2,4 +-0.1 [{'ok' if ok_9 else 'X'}]"
    )
    return record(2, ok_ab and ok_ef and ok_9, detail)


# 3 -----------------------------------------------------------------------------


def check_3() -> bool:
    m = ham.build_two_level([ham.Level(0.5, -0.8), ham.Level(0.5, -0.8)], ham.Coupling(0.01j))
    lam = spectral.eigendecompose(m).eigenvalues
    spread2 = abs(lam[0].imag - lam[1].imag)
    lam3 = spectral.eigendecompose(get_scenario("part2-fig6").matrix_at(2 / 3)).eigenvalues
    spread3 = float(lam3.imag.max() - lam3.imag.min())
    ok = abs(spread2 - 0.02) <= 1e-10 and abs(spread3 - 0.03) <= 0.003
    return record(3, ok, f"two-level spread {spread2:.12f} (0.02 +- 1e-10); fig6 spread at a_cr {spread3:.5f} (0.030 +- 0.003)")


# 4 -----------------------------------------------------------------------------


def check_4() -> bool:
    w = 0.05
    gammas = np.concatenate(
        [np.linspace(-0.3, 0.3, 601), [0.1, -0.1, np.nextafter(0.1, 0), np.nextafter(0.1, 1), -np.nextafter(0.1, 1)]]
    )
    bad = []
    for g in gammas:
        d = closedform.pt_discriminant(g, w)
        lp, lm = closedform.pt_eigenvalues(0.5, g, w).lambdas
        if abs(g) < 0.1:
            ok = d > 0 and lp.imag == 0 and lm.imag == 0 and lp != lm
        elif abs(g) > 0.1:
            ok = d < 0 and lp.real == lm.real and lp.imag == -lm.imag != 0
        else:
            ok = d == 0 and lp == lm
        if not ok:
            bad.append(g)
    return record(4, not bad, f"{len(gammas)} gamma values incl. exact threshold and its float neighbours; violations {len(bad)}")


# 5 -----------------------------------------------------------------------------


def check_5() -> bool:
    worst_gram = 0.0
    a_ok = r_ok = True
    nrows = 0
    for sid in PRESETS:
        for row in sweep_of(sid).rows:
            if not row.ok or row.near_ep.any():
                continue
            nrows += 1
            v = row.vectors
            worst_gram = max(worst_gram, float(np.abs(v @ v.T - np.eye(len(v))).max()))
            a = 1 / row.rigidity
            a_ok &= bool(np.all(a >= 1))
            r_ok &= bool(np.all((row.rigidity > 0) & (row.rigidity <= 1)))
    near = []
    for sid in PRESETS:
        res = sweep_of(sid)
        grid = res.params()
        for e in report_of(sid).eps:
            if len(e.params) != 1:
                continue  # off-axis EP, no grid point sits next to it
            row = res.rows[int(np.argmin(np.abs(grid - e.params[0])))]
            near.append((sid, e.params[0], float(row.rigidity.min()), float(row.b_abs.max())))
    r_fail = [x for x in near if not x[2] < 0.2]
    b_fail = [x for x in near if not x[3] > 10]
    ok = worst_gram < 1e-8 and a_ok and r_ok and not r_fail and not b_fail
    detail = (
        f"{nrows} unflagged rows: max |phi^T phi - I| {worst_gram:.1e} (< 1e-8), A >= 1 {a_ok}, r in (0,1] {r_ok}; "
        f"{len(near)} EP-nearest rows: r < 0.2 fails {len(r_fail)}, |b| > 10 fails {len(b_fail)}"
    )
    if b_fail:
        detail += " (" + ", ".join(f"{s}@{x:.4f} |b|={b:.2f}" for s, x, _, b in b_fail) + ")"
    return record(5, ok, detail)


# 6 -----------------------------------------------------------------------------


def check_6() -> bool:
    sc = get_scenario("part1-fig1ab")
    loc = report_of("part1-fig1ab").eps[0]
    _, vec = np.linalg.eig(sc.matrix_at(loc.params[0]).entries)
    cos = spectral.eigenvector_angle(vec[:, 0], vec[:, 1]).cos_omega_mag
    dist = spectral.phase_difference_norm(vec[:, 0], vec[:, 1])
    ok = cos > 0.999 and dist < 0.05
    return record(6, ok, f"at a = {loc.params[0]:.9f}: cos_omega_mag {cos:.9f} (> 0.999), min_chi |phi1 - e^(i chi) phi2| {dist:.2e} (< 0.05)")


# 7 -----------------------------------------------------------------------------


def check_7() -> bool:
    res = sweep_of("part1-fig2ab")
    mags = []
    ok = True
    for i in range(2):
        for j in range(2):
            pt = spectral.phase_trajectory(np.array([r.theta[i, j] for r in res.rows]))
            if len(pt.jumps) != 1:
                ok = False
                mags.append(f"{len(pt.jumps)} jumps")
                continue
            m = pt.jumps[0].magnitude
            mags.append(f"{m:+.4f}")
            ok &= abs(abs(m) - math.pi / 4) <= 0.05
    signs = {s[0] for s in mags}
    ok &= len(signs) == 1
    return record(7, ok, f"theta_11, theta_12, theta_21, theta_22 jumps {', '.join(mags)} (pi/4 = {math.pi / 4:.4f} +- 0.05, same sign)")


# 8 -----------------------------------------------------------------------------


def check_8() -> bool:
    e = np.linspace(-2.0, 3.0, 10_000)
    r1, r2 = smat.Resonance(0.4, 0.15), smat.Resonance(0.7, 0.3)
    u11 = np.abs(np.abs(smat.breit_wigner(e, r1)) - 1).max()
    u12 = np.abs(np.abs(smat.two_resonance_s(e, r1, r2)) - 1).max()
    dp = smat.double_pole_s(e, 0.5, 0.2)
    u13 = np.abs(np.abs(dp) - 1).max()
    coal = np.abs(smat.two_resonance_s(e, smat.Resonance(0.5, 0.2), smat.Resonance(0.5, 0.2)) - dp).max()
    sig = smat.cross_section(e, dp).sigma
    peaks = smat.local_maxima(sig)
    heights = sig[peaks]
    two = len(peaks) == 2
    unequal = two and abs(heights[0] - heights[1]) > 1e-9 * heights.max()
    # shoulder asymmetry of each peak: slopes on the two sides differ
    asym = []
    for k in peaks:
        left = sig[k] - sig[max(k - 200, 0)]
        right = sig[k] - sig[min(k + 200, e.size - 1)]
        asym.append(abs(left - right) / sig[k])
    ok = max(u11, u12, u13) < 1e-12 and coal < 1e-12 and two and unequal
    detail = (
        f"|S|-1 max {max(u11, u12, u13):.1e}; coalescence {coal:.1e}; "
        f"{len(peaks)} sigma maxima at E = {np.round(e[peaks], 4).tolist()} heights {np.round(heights, 12).tolist()} "
        f"(unequal: {unequal}); shoulder asymmetry {np.round(asym, 3).tolist()}"
    )
    return record(8, ok, detail)


# 9 -----------------------------------------------------------------------------


def check_9() -> bool:
    rng = np.random.default_rng(9)
    worst = 0.0
    trap_ok = 0
    for _ in range(100):
        n = int(rng.integers(2, 7))
        hb = np.sort(rng.uniform(0, 1, n))
        v = tuple(rng.uniform(-1, 1, n))
        alpha = rng.uniform(0, 10)
        lam = np.linalg.eigvals(ham.build_channel_model(hb, ham.ChannelVector(v, alpha)).entries)
        target = -alpha * float(np.sum(np.square(v)))
        worst = max(worst, abs(lam.imag.sum() - target) / max(1.0, abs(target)))
        widths = []
        for a in (10.0, 1000.0):
            lam = np.linalg.eigvals(ham.build_channel_model(hb, ham.ChannelVector(v, a)).entries)
            widths.append(np.sort(-2 * lam.imag))
        ratio = widths[1] / widths[0]
        grows = np.abs(ratio - 100) <= 5
        shrinks = ratio < 1
        if grows.sum() == 1 and grows[-1] and shrinks[:-1].all():
            trap_ok += 1
    ok = worst < 1e-12 and trap_ok == 100
    return record(9, ok, f"trace law max rel. error {worst:.1e} (< 1e-12); width trapping alpha 10 -> 1000 in {trap_ok}/100 instances")


# 10 ----------------------------------------------------------------------------


def check_10() -> bool:
    differing = []
    for sid in PRESETS:
        a = sweep_of(sid).to_csv()
        b = run_sweep(PRESETS[sid], workers=4).to_csv()
        if a != b:
            differing.append(sid)
    return record(10, not differing, f"{len(PRESETS)} presets re-run (threaded); differing CSVs: {differing or 'none'}")


CHECKS = [check_1, check_2, check_3, check_4, check_5, check_6, check_7, check_8, check_9, check_10]


@pytest.mark.parametrize("check", CHECKS, ids=[f"criterion_{i + 1}" for i in range(len(CHECKS))])
def test_criterion(check):
    assert check(), summary_lines()[-1] if RESULTS else ""


if __name__ == "__main__":
    for c in CHECKS:
        c()
    print("\n".join(summary_lines()))
    sys.exit(0 if all(ok for ok, _ in RESULTS.values()) else 1)
