import cmath
import math

import numpy as np
import pytest
from conftest import random_doorway, random_two_level

from epsweep import closedform as cf
from epsweep import ham
from epsweep.sweep import matched_distance


def two(e1, e2, g1, g2, w):
    return ham.build_two_level([ham.Level(e1, g1), ham.Level(e2, g2)], ham.Coupling(w))


def test_two_level_examples():
    r = cf.two_level_eigenvalues(two(0.3, 0.7, -0.2, -0.4, 0))
    assert matched_distance(r.lambdas, [0.3 - 0.1j, 0.7 - 0.2j]) < 1e-15
    r = cf.two_level_eigenvalues(two(0.4, 0.4, -0.2, -0.2, 0.05))
    assert r.lambda_plus == pytest.approx(0.45 - 0.1j) and r.lambda_minus == pytest.approx(0.35 - 0.1j)
    r = cf.two_level_eigenvalues(two(2 / 3, 2 / 3, -1.0, -1.2, 0.05))
    assert abs(r.z) < 1e-8
    assert r.lambda_plus == pytest.approx(2 / 3 - 0.55j)


@pytest.mark.parametrize(
    "de,tag",
    [
        (0.3, cf.RegimeTag.LEVEL_REPULSION),
        (0.1, cf.RegimeTag.EXCEPTIONAL_POINT),
        (0.01, cf.RegimeTag.WIDTH_BIFURCATION),
    ],
)
def test_classify(de, tag):
    m = two(0.5 + de, 0.5, -0.2, -0.2, 0.05j)
    assert cf.classify_two_level(m).tag is tag
    lp, lm = cf.two_level_eigenvalues(m).lambdas
    if tag is cf.RegimeTag.LEVEL_REPULSION:
        assert lp.imag - lm.imag == 0
    if tag is cf.RegimeTag.WIDTH_BIFURCATION:
        assert lp.real - lm.real == 0


def test_width_bifurcation_spread_is_two_omega0():
    lp, lm = cf.two_level_eigenvalues(two(0.5, 0.5, -0.3, -0.3, 0.01j)).lambdas
    assert abs(lp.imag - lm.imag) == pytest.approx(0.02, abs=1e-15)


def test_pt():
    r = cf.pt_eigenvalues(0.5, 0.0, 0.05)
    assert r.lambdas == (0.55, 0.45)
    r = cf.pt_eigenvalues(0.5, 0.1, 0.05)
    assert r.lambda_plus == r.lambda_minus == 0.5
    r = cf.pt_eigenvalues(0.5, 0.2, 0.05)
    assert r.lambda_plus == pytest.approx(0.5 + 0.5j * math.sqrt(0.03), abs=1e-15)
    for gamma, w, lossy in ((0.3, 0.05, False), (0.3, 0.05, True), (0.05, 0.1, True)):
        ref = np.linalg.eigvals(ham.build_pt(0.5, gamma, w, lossy).entries)
        assert matched_distance(cf.pt_eigenvalues(0.5, gamma, w, lossy).lambdas, ref) < 1e-12


def test_pt_large_gamma():
    assert cf.pt_large_gamma_limit(0.5, 1.0) == (0.5, 0.5 - 0.5j)
    w = 0.05
    lam = cf.pt_eigenvalues(0.5, 100 * w, w, lossy_variant=True).lambdas
    lim = cf.pt_large_gamma_limit(0.5, 100 * w)
    assert matched_distance(lam, lim) < 0.01 * max(abs(x) for x in lim)
    with pytest.raises(ValueError):
        cf.pt_large_gamma_limit(0.5, 0.0)


def test_mixed_sign_z(rng):
    assert abs(cf.mixed_sign_z(two(0.5, 0.5, -0.1, 0.1, 0.05))) < 1e-15
    assert abs(cf.mixed_sign_z(two(0.5, 0.5, -0.1, 0.1, 0.05j))) > 0.01
    for _ in range(100):
        m = random_two_level(rng)
        z1, z2 = cf.mixed_sign_z(m), cf.two_level_eigenvalues(m).z
        assert min(abs(z1 - z2), abs(z1 + z2)) < 1e-13


def test_cardano_examples():
    levels = [ham.Level(1, -0.99), ham.Level(0, -0.99), ham.Level(-1 / 3, -0.97)]
    m = ham.build_three_level_doorway(levels, ham.Coupling(0))
    assert matched_distance(cf.cardano_eigenvalues(m).lambdas, [lv.eps for lv in levels]) < 1e-14
    a = 2 / 3
    levels = [ham.Level(1 - a / 2, -0.99), ham.Level(a, -0.99), ham.Level(-1 / 3 + 1.5 * a, -0.97)]
    m = ham.build_three_level_doorway(levels, ham.Coupling(0.01, gaussian_modulated=True))
    assert matched_distance(cf.cardano_eigenvalues(m).lambdas, np.linalg.eigvals(m.entries)) < 1e-10
    eps = 0.3 - 0.2j
    m = ham.assemble([eps] * 3, {})
    sol = cf.cardano_eigenvalues(m)
    assert all(lam == pytest.approx(eps, abs=1e-15) for lam in sol.lambdas)
    assert all(lam == pytest.approx(-sol.R / 3) for lam in sol.lambdas)


def test_cardano_rejects_non_doorway():
    m = ham.assemble([0, 1, 2], {(0, 1): 0.1, (1, 2): 0.1})
    with pytest.raises(cf.StructureError):
        cf.cardano_eigenvalues(m)


def test_sum_rule_and_residual(rng):
    for _ in range(200):
        for m in (random_two_level(rng), random_doorway(rng)):
            lams = cf.two_level_eigenvalues(m).lambdas if m.n == 2 else cf.cardano_eigenvalues(m).lambdas
            tr = m.trace()
            assert abs(sum(lams) - tr) <= 1e-12 * max(1.0, abs(tr))
            coeffs = np.poly(m.entries)
            for lam in lams:
                assert abs(np.polyval(coeffs, lam)) <= 1e-10 * max(1.0, abs(lam) ** m.n)


def test_cubic_discriminant_matches_product(rng):
    for _ in range(50):
        m = random_doorway(rng)
        lam = np.linalg.eigvals(m.entries)
        prod = ((lam[0] - lam[1]) * (lam[0] - lam[2]) * (lam[1] - lam[2])) ** 2
        assert abs(cf.cubic_discriminant(m) - prod) <= 1e-9 * max(1.0, abs(prod))


def test_triple_crossing():
    eps = (0.5 - 0.1j, 0.2, -0.1 + 0.3j)
    c = sum(eps) / 3
    assert cf.triple_crossing_limit(eps, 0) == (c, c, c)
    l1, l2, l3 = cf.triple_crossing_limit(eps, 0.01)
    assert l1 == c
    assert l2 - l3 == pytest.approx(2 * 0.01 * math.sqrt(3) * 1j)
    assert sum((l1, l2, l3)) == pytest.approx(sum(eps))
