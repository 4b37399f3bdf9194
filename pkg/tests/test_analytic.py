import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from polytess import analytic as an
from polytess.directional import discrete, g3, g4, gk

ISO = 2 - math.pi ** 2 / 6
SQ2, SQ3, SQ5 = math.sqrt(2), math.sqrt(3), math.sqrt(5)


@pytest.mark.parametrize("k,exact", [(3, 2 / 9), (4, 4 * (5 * SQ2 - 7)), (5, 32 / SQ5 - 14),
                                     (6, 4 / 3 * (70 * SQ3 - 121))])
def test_gk_closed_forms(k, exact):
    assert an.p3_gk(k).value == pytest.approx(exact, abs=1e-12)
    assert an.P3_GK_CLOSED[k] == pytest.approx(exact, abs=1e-15)


def test_gk_six_decimal():
    assert an.p3_gk(6).value == pytest.approx(0.324742, abs=5e-7)


def test_gk_domain():
    with pytest.raises(an.DomainError):
        an.p3_gk(2)
    with pytest.raises(an.DomainError):
        an.p3_gk(3.5)


def test_gk_monotone_and_bounded():
    vals = [an.p3_gk(k).value for k in range(3, 201)]
    assert all(b > a for a, b in zip(vals, vals[1:]))
    assert vals[0] == pytest.approx(2 / 9) and max(vals) < ISO


def test_gk_limit():
    assert abs(an.p3_gk(2000).value - ISO) < 1e-3


def _brute_gk(k):
    """Direct sum over admissible (phi0, i, j) atoms, without folding in sigma_k."""
    total = 0.0
    for i in range(1, k - 1):
        for j in range(1, k - i):
            for l0 in range(k):
                if l0 < k - i:   # phi0 = l0 pi/k below pi - phi1, compared on atom indices
                    a, b, c = (math.sin(i * math.pi / k), math.sin(j * math.pi / k),
                               math.sin((i + j) * math.pi / k))
                    total += a * b * c / (a + b + c)
    return 4 / k * math.tan(math.pi / (2 * k)) ** 2 * total


@pytest.mark.parametrize("k", [3, 4, 7, 12])
def test_gk_against_unfolded_sum(k):
    assert an.p3_gk(k).value == pytest.approx(_brute_gk(k), rel=1e-13)


@pytest.mark.parametrize("k", [3, 4, 5, 6, 9, 16, 31])
def test_gk_against_enumeration(k):
    assert an.p3_discrete(gk(k)).value == pytest.approx(an.p3_gk(k).value, abs=1e-12)


def test_sigma_k():
    assert an.sigma_k(5, 2) == 3 and an.sigma_k(3, 1) == 2
    for k in range(3, 51):
        for i in range(1, k - 1):
            brute = sum(1 for l in range(k) if l * math.pi / k < math.pi - i * math.pi / k - 1e-12)
            assert an.sigma_k(k, i) == brute
    with pytest.raises(an.DomainError):
        an.sigma_k(5, 4)


def test_g3_optimum():
    assert an.p3_g3(1 / 3, 1 / 3).value == pytest.approx(2 / 9, abs=1e-15)
    p, q = an.argmax_p3_g3()
    assert abs(p - 1 / 3) < 1e-6 and abs(q - 1 / 3) < 1e-6
    assert an.p3_g3(p, q).value == pytest.approx(2 / 9, abs=1e-12)


def test_g3_gradient_vanishes_at_optimum():
    h = 1e-6
    f = lambda p, q: an.p3_g3(p, q).value
    c = 1 / 3
    fd = ((f(c + h, c) - f(c - h, c)) / (2 * h), (f(c, c + h) - f(c, c - h)) / (2 * h))
    assert max(map(abs, fd)) < 1e-8
    assert max(map(abs, an.p3_g3_gradient(c, c))) < 1e-14


@given(st.floats(0.02, 0.9), st.floats(0.02, 0.9))
def test_g3_gradient_matches_finite_differences(p, q):
    if p + q > 0.96:
        return
    h = 1e-6
    f = lambda a, b: an.p3_g3(a, b).value
    fd = ((f(p + h, q) - f(p - h, q)) / (2 * h), (f(p, q + h) - f(p, q - h)) / (2 * h))
    assert an.p3_g3_gradient(p, q) == pytest.approx(fd, abs=1e-7)


def test_g3_permutation_symmetry():
    rng = np.random.default_rng(1)
    w = rng.dirichlet([1, 1, 1], size=10_000)
    for p, q, r in w:
        ref = 2 * p * q * r / (p * q + q * r + r * p)
        for a, b, _ in itertools.permutations((p, q, r)):
            assert abs(an.p3_g3(a, b).value - ref) <= 1e-12


@pytest.mark.parametrize("p,q", [(0.2, 0.5), (0.6, 0.1), (0.05, 0.05)])
def test_g3_against_enumeration(p, q):
    assert an.p3_discrete(g3(p, q)).value == pytest.approx(an.p3_g3(p, q).value, abs=1e-13)


def test_g3_degenerate_limit():
    assert an.p3_g3(1e-9, 0.4).value < 1e-8
    with pytest.raises(an.DomainError):
        an.p3_g3(0.5, 0.6)


def test_g4_equal_weights():
    assert an.p3_g4(0.25, 0.25, 0.25).value == pytest.approx(an.p3_gk(4).value, abs=1e-12)
    assert an.p3_g4(0.25, 0.25, 0.25).value == pytest.approx(4 * (5 * SQ2 - 7), abs=1e-12)


def test_g4_display_small_p():
    assert an.p3_g4(1e-9, 0.3, 0.3).value < 1e-8
    with pytest.raises(an.DomainError):
        an.p3_g4(0.5, 0.3, 0.3)


def test_enumeration_rotation_invariant():
    # rotating G4 weights by pi/4 relabels the same tessellation
    a = an.p3_discrete(g4(0.1, 0.2, 0.3)).value
    b = an.p3_discrete(g4(0.4, 0.1, 0.2)).value
    assert a == pytest.approx(b, abs=1e-14)


def test_enumeration_two_directions():
    assert an.p3_discrete(discrete([0.0, 1.0], [0.3, 0.7])).value == 0.0


def test_uniform_constant():
    v = an.p3_uniform()
    assert v.value == ISO and v.form == "closed_form"
    assert v.value == pytest.approx(0.355066, abs=1e-6)


def test_p4():
    v = an.p4_uniform()
    assert v.value == pytest.approx(0.3814662248, abs=1e-10)
    assert v.value + an.p3_uniform().value < 1
    n = 10 ** 5
    assert abs(an.p4_uniform(n).value - an.p4_uniform(2 * n).value) < 1e-12
    raw = an.zeta3_partial(n, tail_corrected=False) - an.zeta3_partial(2 * n, tail_corrected=False)
    assert raw == pytest.approx(-3 / (8 * n * n), rel=1e-3)   # raw partial sums alone converge slower


def test_zeta3():
    assert an.zeta3() == pytest.approx(1.2020569031595942, abs=2e-14)


def test_limit_integral():
    v = an.limit_integral(256)
    assert abs(v.value - ISO) < 1e-8 and v.error_bound < 1e-8 and v.form == "quadrature"


def test_limit_integral_doubling():
    grids = [16, 32, 64, 128, 256]
    diffs = [abs(an.limit_integral(2 * g).value - an.limit_integral(g).value) for g in grids]
    for a, b in zip(diffs, diffs[1:]):
        assert b <= a + 1e-13   # rounding floor once the rule has converged


def test_limit_integrand_boundary():
    assert float(an.limit_integrand(0.3, 1e-12)) == pytest.approx(0.0, abs=1e-11)
    assert float(an.limit_integrand(0.3, 0.0)) == 0.0


def test_grid_guard():
    with pytest.raises(an.DomainError):
        an.limit_integral(8)


def test_iso_reductions():
    double, single = an.iso_integral_reduction_check(256)
    assert abs(double.value - ISO) < 1e-6
    assert abs(single.value - ISO) < 1e-8
    assert abs(double.value - single.value) < 1e-6


def test_tan_factor():
    k = 1000
    gap = an.tan_factor(k) - math.pi ** 2
    assert abs(gap) / math.pi ** 2 < 1e-5
    assert gap == pytest.approx(math.pi ** 4 / (6 * k * k), rel=1e-4)


def test_fk_converges():
    rng = np.random.default_rng(2)
    pts = rng.uniform(0, math.pi, size=(100, 3))
    pts = pts[an._indicator(*pts.T)]
    assert len(pts) > 5
    err10 = np.abs(an.fk_integrand(10, *pts.T) - an.f_limit_integrand(*pts.T)).max()
    err100 = np.abs(an.fk_integrand(100, *pts.T) - an.f_limit_integrand(*pts.T)).max()
    assert err100 * 3 <= err10


def test_fk_indicator_zero():
    assert an.fk_integrand(10, 2.5, 1.0, 1.5) == 0.0     # phi0 >= pi - phi1
    assert an.f_limit_integrand(0.1, 1.0, 0.5) == 0.0    # phi1 >= phi2


def test_analytic_value_guard():
    with pytest.raises(ValueError):
        an.AnalyticValue(0.1, "quadrature", -1.0)
