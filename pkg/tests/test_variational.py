import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dimerlab import variational as va
from dimerlab.errors import BranchUndefinedError, DomainError
from dimerlab.special_functions import H_C, J_C, M_C, g, pressure_md

# 30-digit oracles (bisection on the consistency equation in extended
# precision):
M_STAR_0_1 = 0.81019034110019623  # m*(h=0, J=1)
PSI1_2 = -0.22552160248492583     # psi_1(J=2)
PSI2_2 = -0.62105198779504683     # psi_2(J=2)
A1_2 = 0.13364128879227351
A2_2 = 3.74135871120772649
DM_DH_0_1 = 0.53518987020656520


def test_tilde_p_values():
    # -J/4 + J/2 + p(0) at m = 1/2 leaves only the pure pressure shift
    assert va.tilde_p(0.5, 0.0, 1.0) == pytest.approx(
        0.25 + pressure_md(0.0), abs=1e-15)
    assert va.tilde_p(0.5, 0.0, 1.0) == pytest.approx(0.54022881943455087,
                                                      abs=1e-14)
    with pytest.raises(DomainError):
        va.tilde_p(0.5, 0.0, 0.0)


def test_tilde_p_derivatives_vanish_at_critical_point():
    d1, d2 = va.tilde_p_derivatives(M_C, H_C, J_C)
    assert abs(d1) < 1e-13
    assert abs(d2) < 1e-13


def test_tilde_p_derivatives_match_finite_differences():
    eps = 1e-6
    eps2 = 1e-4  # second difference needs a larger step for rounding noise
    for (m, h, j) in [(0.3, 0.1, 0.8), (0.7, -0.5, 2.0), (0.5, 0.0, 1.4)]:
        d1, d2 = va.tilde_p_derivatives(m, h, j)
        fd1 = (va.tilde_p(m + eps, h, j) - va.tilde_p(m - eps, h, j)) / (2 * eps)
        fd2 = (va.tilde_p(m + eps2, h, j) - 2 * va.tilde_p(m, h, j)
               + va.tilde_p(m - eps2, h, j)) / eps2 ** 2
        assert d1 == pytest.approx(fd1, abs=1e-8)
        assert d2 == pytest.approx(fd2, abs=1e-6)


def test_a_coefficients_and_psi():
    a1, a2 = va.a_coefficients(2.0)
    assert a1 == pytest.approx(A1_2, abs=1e-13)
    assert a2 == pytest.approx(A2_2, abs=1e-12)
    psi1, psi2 = va.psi_curves(2.0)
    assert psi1 == pytest.approx(PSI1_2, abs=1e-12)
    assert psi2 == pytest.approx(PSI2_2, abs=1e-12)
    assert psi1 > psi2
    with pytest.raises(DomainError):
        va.psi_curves(1.0)
    # degeneracy at the critical coupling
    p1, p2 = va.psi_curves(J_C)
    assert p1 == pytest.approx(H_C, abs=1e-12)
    assert p2 == pytest.approx(H_C, abs=1e-12)


def test_psi_curves_ordering_and_tangency():
    # psi_2 < psi_1 always; the strip shrinks to h_c as J decreases to J_c
    for j in (1.5, 2.0, 3.0, 5.0):
        psi1, psi2 = va.psi_curves(j)
        assert psi2 < psi1
    prev = None
    for eps in (1e-2, 1e-4, 1e-6):
        psi1, psi2 = va.psi_curves(J_C + eps)
        width = psi1 - psi2
        assert width > 0.0
        if prev is not None:
            assert width < prev
        prev = width
        assert abs(psi1 - H_C) < 10 * math.sqrt(eps)


def test_inflection_points():
    assert va.inflection_points(0.0, 1.0) is None
    assert va.inflection_points(0.0, J_C) is None
    phi1, phi2 = va.inflection_points(0.0, 2.0)
    assert phi1 == pytest.approx(0.5 + math.log(A1_2) / 8.0, abs=1e-12)
    assert phi2 == pytest.approx(0.5 + math.log(A2_2) / 8.0, abs=1e-12)
    # second derivative is zero at the inflection points, negative outside
    for phi in (phi1, phi2):
        assert abs(va.tilde_p_derivatives(phi, 0.0, 2.0)[1]) < 1e-12
    assert va.tilde_p_derivatives(phi1 - 0.05, 0.0, 2.0)[1] < 0.0
    assert va.tilde_p_derivatives(phi2 + 0.05, 0.0, 2.0)[1] < 0.0
    assert va.tilde_p_derivatives(0.5 * (phi1 + phi2), 0.0, 2.0)[1] > 0.0


def test_classify_regions():
    rep = va.classify(0.0, 1.0)
    assert rep.region == "subcritical"
    assert len(rep.points) == 1

    rep = va.classify(-0.41, 2.0)
    assert rep.region == "three-solutions"
    kinds = [p.kind for p in rep.points]
    assert kinds == ["local-max", "local-min", "local-max"]
    m1, m0, m2 = (p.m for p in rep.points)
    phi1, phi2 = rep.phi
    assert m1 < phi1 < m0 < phi2 < m2

    assert va.classify(0.5, 2.0).region == "above-psi1"
    assert va.classify(-1.0, 2.0).region == "below-psi2"

    psi1, psi2 = va.psi_curves(2.0)
    on1 = va.classify(psi1, 2.0)
    assert on1.region == "on-psi1"
    assert [p.kind for p in on1.points] == ["inflection-degenerate",
                                            "global-max-candidate"]
    on2 = va.classify(psi2, 2.0)
    assert on2.region == "on-psi2"
    assert [p.kind for p in on2.points] == ["global-max-candidate",
                                            "inflection-degenerate"]


@given(st.floats(-3.0, 3.0), st.floats(0.05, 6.0))
@settings(max_examples=150, deadline=None)
def test_solved_points_satisfy_consistency(h, j):
    rep = va.classify(h, j)
    for pt in rep.points:
        if pt.kind != "inflection-degenerate":
            assert abs(pt.residual) <= 1e-12


def test_classification_matches_grid_sign_scan():
    rng = np.random.default_rng(42)
    ms = np.linspace(0.0, 1.0, 10001)
    for _ in range(500):
        j = float(rng.uniform(0.05, 6.0))
        h = float(rng.uniform(-3.0, 3.0))
        rep = va.classify(h, j)
        if rep.region in ("on-psi1", "on-psi2"):
            continue  # tangency cannot be resolved by a sign scan
        f = g((2.0 * ms - 1.0) * j + h) - ms
        changes = int(np.sum(np.sign(f[1:]) * np.sign(f[:-1]) < 0))
        expected = sum(1 for p in rep.points
                       if p.kind != "inflection-degenerate")
        assert changes == expected, (h, j, rep.region)


def test_near_critical_roots_stay_accurate():
    for eps in (1e-5, 1e-6, 1e-7):
        j = J_C + eps
        psi1, psi2 = va.psi_curves(j)
        rep = va.classify(0.5 * (psi1 + psi2), j,
                          boundary_tol=1e-3 * (psi1 - psi2))
        assert rep.region == "three-solutions"
        assert max(abs(p.residual) for p in rep.points) <= 1e-12


def test_global_maximizer_unique_region():
    gm = va.global_maximizer(0.0, 1.0)
    assert not gm.on_wall
    assert gm.m_star == pytest.approx(M_STAR_0_1, abs=1e-12)
    assert gm.pressure == pytest.approx(va.tilde_p(M_STAR_0_1, 0.0, 1.0),
                                        abs=1e-13)
    # the maximizer beats nearby trial densities
    for m in np.linspace(0.01, 0.99, 25):
        assert va.tilde_p(float(m), 0.0, 1.0) <= gm.pressure + 1e-15


def test_global_maximizer_three_solutions():
    gm = va.global_maximizer(-0.3, 2.0)  # above the wall at J = 2
    assert not gm.on_wall
    assert gm.m_star > 0.9
    gm = va.global_maximizer(-0.5, 2.0)  # below the wall
    assert not gm.on_wall
    assert gm.m_star < 0.2


def test_susceptibilities():
    dm_dh, dm_dj = va.susceptibilities(0.0, 1.0)
    assert dm_dh == pytest.approx(DM_DH_0_1, abs=1e-12)
    assert dm_dj == pytest.approx((2 * M_STAR_0_1 - 1) * DM_DH_0_1, abs=1e-12)
    # finite-difference cross-check on the solved branch
    eps = 1e-6
    fd_h = (va.global_maximizer(eps, 1.0).m_star
            - va.global_maximizer(-eps, 1.0).m_star) / (2 * eps)
    fd_j = (va.global_maximizer(0.0, 1.0 + eps).m_star
            - va.global_maximizer(0.0, 1.0 - eps).m_star) / (2 * eps)
    assert dm_dh == pytest.approx(fd_h, abs=1e-5)
    assert dm_dj == pytest.approx(fd_j, abs=1e-5)


def test_susceptibilities_branches():
    # inside the strip at J = 2 all three branches are defined
    h = -0.41
    for branch, sign in (("m1", 1.0), ("m2", 1.0)):
        dm_dh, _ = va.susceptibilities(h, 2.0, branch)
        assert dm_dh > 0.0  # local maxima respond positively to the field
    dm_dh0, _ = va.susceptibilities(h, 2.0, "m0")
    assert dm_dh0 < 0.0  # the local minimum moves the other way
    with pytest.raises(BranchUndefinedError):
        va.susceptibilities(0.5, 2.0, "m1")  # above psi_1
    with pytest.raises(BranchUndefinedError):
        va.susceptibilities(-1.0, 2.0, "m2")  # below psi_2
    with pytest.raises(BranchUndefinedError):
        va.susceptibilities(0.0, 1.0, "m0")  # subcritical
    with pytest.raises(BranchUndefinedError):
        va.susceptibilities(h, 2.0, "auto")  # ambiguous
    with pytest.raises(BranchUndefinedError):
        va.susceptibilities(H_C, J_C)  # critical point
    with pytest.raises(BranchUndefinedError):
        va.susceptibilities(0.0, 1.0, "bogus")


def test_large_j_asymptotics():
    rows = va.large_j_asymptotics([5.0, 10.0, 20.0], -0.5)
    assert [r.j for r in rows] == [5.0, 10.0, 20.0]
    for row in rows:
        assert 0.0 <= row.m1 < row.m0 < row.m2 <= 1.0
    # both scaled quantities shrink toward zero along the sequence
    assert rows[0].j_times_m1 > rows[1].j_times_m1 > rows[2].j_times_m1
    assert (rows[0].j_times_one_minus_m2
            >= rows[1].j_times_one_minus_m2
            >= rows[2].j_times_one_minus_m2)
    with pytest.raises(DomainError):
        va.large_j_asymptotics([2.0], 0.5)  # outside the strip
