import math

import numpy as np
import pytest

from dimerlab import criticality as cr
from dimerlab.errors import DomainError, FitQualityError
from dimerlab.special_functions import H_C, J_C, M_C, XI_C, g_inverse
from dimerlab.variational import classify


def test_amplitude_constants_closed_forms():
    ac = cr.amplitude_constants()
    assert ac.c_m == pytest.approx(math.sqrt(3 * math.sqrt(2)) / (2 * J_C),
                                   abs=1e-15)
    assert ac.c_m == pytest.approx(0.70680034246694444, abs=1e-13)
    assert ac.c_phi == pytest.approx(2 ** 0.25 / (2 * J_C), abs=1e-15)
    assert ac.c_phi == pytest.approx(0.40807136798661006, abs=1e-13)
    assert ac.c_inf == pytest.approx(0.62977850789074929, abs=1e-13)
    # the directional amplitude vanishes exactly on the wall tangent
    assert ac.c_alpha(1.0 - 2.0 * M_C) == pytest.approx(0.0, abs=1e-15)
    assert ac.c_alpha(0.0) == pytest.approx(0.34994842673688, abs=1e-12)
    # odd symmetry around the tangent direction
    t = 1.0 - 2.0 * M_C
    assert ac.c_alpha(t + 0.3) == pytest.approx(-ac.c_alpha(t - 0.3),
                                                abs=1e-14)


def test_cubic_residual_fourth_order():
    # at a solved consistency root, the cubic normal form vanishes to
    # fourth order in u = xi - xi_c
    for d in (1e-3, 1e-4, 1e-5):
        h, j = H_C + d, J_C
        m = classify(h, j).points[0].m
        xi = (2 * m - 1) * j + h
        u = xi - XI_C
        r = cr.critical_cubic_residual(xi, h, j)
        assert abs(r) < 0.5 * abs(u) ** 4
    with pytest.raises(DomainError):
        cr.critical_cubic(0.0, -1.0)


def test_cubic_rho_is_tangent_distance():
    cc = cr.critical_cubic(H_C + (1 - 2 * M_C) * 1e-3, J_C + 1e-3)
    # rho vanishes along the tangent direction up to rounding of h_c + t*dh
    assert cc.rho == pytest.approx(0.0, abs=1e-15)


def test_curve_specs():
    assert cr.tangent_curve().point(1e-3) == pytest.approx(
        (H_C + (1 - 2 * M_C) * 1e-3, J_C + 1e-3))
    assert cr.flat_j_curve().point(1e-3) == pytest.approx(
        (H_C + 1e-3, J_C))
    assert cr.slope_curve(0.5).point(1e-3) == pytest.approx(
        (H_C + 0.5e-3, J_C + 1e-3))
    with pytest.raises(DomainError):
        cr.CurveSpec("diagonal")
    with pytest.raises(DomainError):
        cr.CurveSpec("slope")
    with pytest.raises(DomainError):
        cr.flat_j_curve().point(0.0)


def test_default_distances():
    ds = cr.default_distances()
    assert len(ds) == 13
    assert ds[0] == 1e-2
    assert ds[-1] == pytest.approx(1e-2 * 2.0 ** -12)


def test_flat_j_cube_root():
    fit = cr.exponent_fit(cr.flat_j_curve())
    assert fit.exponent == pytest.approx(1.0 / 3.0, abs=0.02)
    assert fit.r_squared >= 0.999


def test_tangent_square_root_both_branches():
    for branch in ("upper", "lower"):
        fit = cr.exponent_fit(cr.tangent_curve(), branch=branch)
        assert fit.exponent == pytest.approx(0.5, abs=0.02)
        assert fit.r_squared >= 0.999


def test_slope_curve_cube_root_with_directional_amplitude():
    ac = cr.amplitude_constants()
    for alpha in (0.0, 1.0):
        fit = cr.exponent_fit(cr.slope_curve(alpha))
        assert fit.exponent == pytest.approx(1.0 / 3.0, abs=0.03)
        # amplitude measured at the smallest retained distance; the
        # correction decays like d^(1/3), so allow a few percent here
        d, dev = min(fit.samples)
        assert dev / d ** (1.0 / 3.0) == pytest.approx(
            abs(ac.c_alpha(alpha)), rel=0.03)


def test_wall_exponent_check():
    we = cr.wall_exponent_check(cr.default_distances(10))
    assert we.fit_upper.exponent == pytest.approx(0.5, abs=0.02)
    assert we.fit_lower.exponent == pytest.approx(0.5, abs=0.02)
    ac = cr.amplitude_constants()
    assert we.sqrt_ratios_upper[-1] == pytest.approx(ac.c_m, rel=0.02)
    assert we.sqrt_ratios_lower[-1] == pytest.approx(ac.c_m, rel=0.02)


def test_flex_point_scaling():
    fl = cr.flex_point_scaling(cr.default_distances(10))
    assert fl.fit_upper.exponent == pytest.approx(0.5, abs=0.02)
    assert fl.fit_lower.exponent == pytest.approx(0.5, abs=0.02)
    ac = cr.amplitude_constants()
    assert fl.sqrt_ratios_upper[-1] == pytest.approx(ac.c_phi, rel=0.01)
    assert fl.sqrt_ratios_lower[-1] == pytest.approx(ac.c_phi, rel=0.01)


def test_loglog_fit_quality_guard():
    # data that is nowhere near a power law must be rejected
    rng = np.random.default_rng(0)
    pairs = [(d, 1.0 + float(rng.uniform(0.0, 5.0)))
             for d in cr.default_distances()]
    with pytest.raises(FitQualityError):
        cr._loglog_fit(pairs)


def test_fit_drop_rule_keeps_quality():
    fit = cr.exponent_fit(cr.tangent_curve(), branch="upper")
    assert fit.n_dropped in (0, 2)
    assert fit.r_squared >= 0.999
