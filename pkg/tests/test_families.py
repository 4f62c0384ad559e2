"""Parametrized families: construction, center enumeration, multiplier
continuation and component counting."""

import numpy as np
import pytest

from dynbif import arith
from dynbif.errors import DegenerateMapError, PreconditionError
from dynbif.families import (
    DEGEN_CATALOG,
    PCA3,
    QUAD,
    centers_1d,
    centers_2d,
    component_count,
    degen_parameter,
    family_from_id,
    map_at,
    marked_critical_points,
    multiplier_continuation,
    pca_map,
    pca3_cycle_multiplier,
    power_map_degree,
    power_map_spectrum,
    quad_center_evaluator,
    quad_cycle_multiplier,
    quadrat_fixed_normal_form,
)

# frozen real and complex period-3 centers of z^2 + c (roots of
# c^3 + 2c^2 + c + 1)
PERIOD3_CENTERS = [
    -1.7548776662466927,
    complex(-0.12256116687665362, 0.7448617666197442),
    complex(-0.12256116687665362, -0.7448617666197442),
]

# distinct-component counts for z^2 + c at periods 1..12
QUAD_COMPONENT_COUNTS = [1, 1, 3, 6, 15, 27, 63, 120, 252, 495, 1023, 2010]


def _match(found, expected, tol):
    remaining = list(expected)
    assert len(found) == len(remaining)
    for z in found:
        dists = [abs(complex(z) - complex(w)) for w in remaining]
        i = int(np.argmin(dists))
        assert dists[i] <= tol
        remaining.pop(i)


# ---------------------------------------------------------------------------
# family construction
# ---------------------------------------------------------------------------


def test_family_ids():
    assert family_from_id("quad") is QUAD
    assert family_from_id("pca3") is PCA3
    assert family_from_id("degen:inv_t2").catalog_formula == "1/t^2"
    with pytest.raises(PreconditionError):
        family_from_id("nope")


def test_degen_parameters():
    assert degen_parameter(DEGEN_CATALOG["inv_t"], 0.01) == pytest.approx(100.0)
    assert degen_parameter(DEGEN_CATALOG["inv_t2"], 0.1) == pytest.approx(100.0)
    assert degen_parameter(DEGEN_CATALOG["t"], 0.1) == pytest.approx(0.1)
    with pytest.raises(PreconditionError):
        degen_parameter(DEGEN_CATALOG["t"], 0.0)


def test_pca_map_cubic_coeffs():
    # d = 3, free critical point c = 2, a = 1:
    # z^3/3 - z^2 + 1 has derivative z^2 - 2z = z(z - 2)
    coeffs = pca_map(3, [2.0], 1.0)
    assert np.allclose(coeffs, [1.0, 0.0, -1.0, 1.0 / 3.0])
    assert marked_critical_points(PCA3, [2.0, 1.0]) == [0.0, 2.0]


def test_pca_map_critical_points_property():
    rng = np.random.default_rng(5)
    for d in range(2, 7):
        c = rng.standard_normal(d - 2) + 1j * rng.standard_normal(d - 2)
        coeffs = pca_map(d, c, 0.3 + 0.1j)
        dcoeffs = coeffs[1:] * np.arange(1, d + 1)
        crit = np.roots(dcoeffs[::-1])
        _match(crit, np.concatenate([[0.0], c]), 1e-8)


def test_quad_lift():
    F = map_at(QUAD, [-1.0])
    z = 0.5 + 0.5j
    from dynbif.dynamics import SpherePoint
    assert F.apply(SpherePoint.from_affine(z)).affine() == pytest.approx(
        z * z - 1.0)


def test_quadrat_normal_form_index_relation():
    mu1, mu2 = 0.3 + 0.1j, -0.7j
    lift, mu3 = quadrat_fixed_normal_form(mu1, mu2)
    # fixed points 0 and infinity carry the prescribed multipliers
    assert lift.affine_derivative(0.0) == pytest.approx(mu1, rel=1e-12)
    s = (1.0 / (1.0 - mu1) + 1.0 / (1.0 - mu2) + 1.0 / (1.0 - mu3))
    assert s == pytest.approx(1.0, rel=1e-10)
    with pytest.raises(DegenerateMapError):
        quadrat_fixed_normal_form(2.0, 0.5)


def test_power_map_detection():
    assert power_map_degree(map_at(QUAD, [0.0])) == 2
    assert power_map_degree(map_at(QUAD, [-1.0])) is None
    spec1 = dict(power_map_spectrum(2, 1))
    assert spec1 == {0.0 + 0.0j: 2, 2.0 + 0.0j: 1}
    spec3 = power_map_spectrum(2, 3)
    assert spec3 == [(8.0 + 0.0j, 2)]
    # census: cycles * period = exact-period point count
    for d in (2, 3):
        for n in range(2, 13):
            (mult, count), = power_map_spectrum(d, n)
            assert count * n == arith.exact_cycle_point_count(d, n)
            assert mult == complex(d) ** n


# ---------------------------------------------------------------------------
# quadratic centers
# ---------------------------------------------------------------------------


def test_center_evaluator_matches_orbit():
    ev = quad_center_evaluator(4)
    cs = np.array([0.3 + 0.2j, -1.1, 2.0 - 1.0j])
    vals, dvals = ev(cs)
    for c, v in zip(cs, vals):
        z = 0.0j
        for _ in range(4):
            z = z * z + c
        assert v == pytest.approx(z, rel=1e-9)
    # derivative by central differences
    h = 1e-6
    vp, _ = ev(cs + h)
    vm, _ = ev(cs - h)
    for fd, dv in zip((vp - vm) / (2 * h), dvals):
        assert fd == pytest.approx(dv, rel=1e-5)


def test_quad_centers_small_periods():
    assert [c.parameter[0] for c in centers_1d(QUAD, 1)] == [0.0 + 0.0j]
    _match([c.parameter[0] for c in centers_1d(QUAD, 2)], [-1.0], 1e-10)
    _match([c.parameter[0] for c in centers_1d(QUAD, 3)],
           PERIOD3_CENTERS, 1e-10)


def test_quad_centers_have_exact_period_and_small_residual():
    for n in (4, 5, 6):
        cs = centers_1d(QUAD, n)
        assert len(cs) == QUAD_COMPONENT_COUNTS[n - 1]
        for c in cs:
            assert c.periods.periods == (n,)
            assert max(c.residuals) < 1e-8
            # the critical orbit really closes at period n, not a divisor
            z = 0.0j
            for k in range(1, n):
                z = z * z + c.parameter[0]
                assert abs(z) > 1e-6
            assert abs(z * z + c.parameter[0]) < 1e-8


def test_quad_center_counts_mid_range():
    for n in (7, 8, 9):
        assert len(centers_1d(QUAD, n)) == QUAD_COMPONENT_COUNTS[n - 1]


def test_quad_centers_cap():
    with pytest.raises(PreconditionError):
        centers_1d(QUAD, 15)


# ---------------------------------------------------------------------------
# cubic centers
# ---------------------------------------------------------------------------


def test_pca3_centers_1_1():
    # both critical points fixed: the only markings are the intersection of
    # P(0) = 0 and P(c) = c; count with multiplicity must fill the product
    # of the two system degrees
    sols = centers_2d(PCA3, 1, 1)
    total = sum(s.multiplicity for s in sols)
    assert total == 9  # 3 x 3 product count
    for s in sols:
        c, a = s.parameter
        # verify the fixed-point conditions directly
        coeffs = pca_map(3, [c], a)
        p = np.polynomial.polynomial.polyval
        assert abs(p(0.0j, coeffs)) < 1e-7
        assert abs(p(c, coeffs) - c) < 1e-7


def test_pca3_centers_1_2_multiplicity():
    sols = centers_2d(PCA3, 1, 2)
    assert sum(s.multiplicity for s in sols) == 18
    # the period-1 marking is non-reduced: every solution has multiplicity 3
    assert {s.multiplicity for s in sols} == {3}
    assert len(sols) == 6


def test_pca3_centers_2_2_distinct():
    sols = centers_2d(PCA3, 2, 2)
    assert sum(s.multiplicity for s in sols) == 36
    for s in sols:
        assert max(s.residuals) < 1e-8


# ---------------------------------------------------------------------------
# multiplier continuation
# ---------------------------------------------------------------------------


def _quad_center(n):
    return centers_1d(QUAD, n)


def test_continuation_quad_period1_closed_form():
    center = _quad_center(1)[0]
    for w in [0.3, -0.5 + 0.4j, 0.9j]:
        c = multiplier_continuation(QUAD, center, (w,))
        want = w / 2.0 - w * w / 4.0
        assert c == pytest.approx(want, abs=1e-10)


def test_continuation_quad_period2_closed_form():
    center = _quad_center(2)[0]
    for w in [0.2, -0.6, 0.5 - 0.5j]:
        c = multiplier_continuation(QUAD, center, (w,))
        assert c == pytest.approx(-1.0 + w / 4.0, abs=1e-10)


def test_continuation_quad_multiplier_recheck():
    rng = np.random.default_rng(11)
    for center in _quad_center(3):
        w = 0.8 * np.exp(2j * np.pi * rng.random())
        c = multiplier_continuation(QUAD, center, (w,))
        got = quad_cycle_multiplier(complex(c), 3)
        assert got == pytest.approx(w, abs=1e-9)


def test_continuation_rejects_large_targets():
    center = _quad_center(1)[0]
    with pytest.raises(PreconditionError):
        multiplier_continuation(QUAD, center, (1.2,))


def test_continuation_pca3():
    sols = centers_2d(PCA3, 1, 2)
    center = sols[0]
    w0, w1 = 0.4 + 0.2j, -0.3 + 0.1j
    c, a = multiplier_continuation(PCA3, center, (w0, w1))
    c, a = complex(c), complex(a)
    crit = marked_critical_points(PCA3, [c, a])
    m0 = pca3_cycle_multiplier(c, a, crit[0], 1)
    m1 = pca3_cycle_multiplier(c, a, crit[1], 2)
    assert m0 == pytest.approx(w0, abs=1e-9)
    assert m1 == pytest.approx(w1, abs=1e-9)


# ---------------------------------------------------------------------------
# component counting
# ---------------------------------------------------------------------------


def test_component_count_quad_small():
    for n in (1, 2, 3, 4, 5, 6):
        cc = component_count(QUAD, arith.PeriodTuple((n,)))
        assert cc.N == QUAD_COMPONENT_COUNTS[n - 1]
        assert cc.deficiency == pytest.approx(0.0, abs=1e-12)


def test_component_count_pca3_2_2():
    cc = component_count(PCA3, arith.PeriodTuple((2, 2)))
    assert cc.N == 24
    assert cc.deficiency >= -1e-12
    assert cc.deficiency == pytest.approx(cc.merged_fraction, abs=1e-12)
    assert cc.stab == 2


def test_component_count_pca3_1_2():
    cc = component_count(PCA3, arith.PeriodTuple((1, 2)))
    assert cc.marked_solutions == 36
    assert cc.N == 24
    assert cc.stab == 1
