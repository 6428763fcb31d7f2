"""Variational pressure of the interacting model and its stationary points.

The limiting pressure is the maximum over m in [0, 1] of

    ptilde(m) = -J m^2 + J/2 + p_md((2m - 1) J + h),

whose stationary points solve the consistency equation m = g((2m-1)J + h).
This module classifies the stationary structure for any (h, J), locates
all solutions by bisection plus a guarded Newton polish, and evaluates the
branch susceptibilities in closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import BranchUndefinedError, DomainError
from .special_functions import (G1_MAX, H_C, J_C, M_C, XI_C, g,
                                g_derivatives, g_prime_threshold,
                                pressure_md)

__all__ = [
    "BOUNDARY_TOL",
    "WALL_TOL",
    "StationaryPoint",
    "StationaryReport",
    "GlobalMaximizer",
    "tilde_p",
    "tilde_p_derivatives",
    "a_coefficients",
    "inflection_points",
    "psi_curves",
    "classify",
    "solve_consistency",
    "global_maximizer",
    "susceptibilities",
    "large_j_asymptotics",
]

#: Half-width of the band around psi_1/psi_2 treated as the boundary case.
BOUNDARY_TOL = 1e-9
#: Pressure differences below this are treated as coexistence.
WALL_TOL = 1e-10

#: Fixed-point residual |m - g((2m-1)J+h)| guaranteed by the solver.
RESIDUAL_TOL = 1e-12


def _check_j(j: float) -> None:
    if not (j > 0.0):
        raise DomainError(f"coupling must be positive, got {j!r}")


def tilde_p(m: float, h: float, j: float) -> float:
    """Variational pressure functional at trial density ``m``."""
    _check_j(j)
    return -j * m * m + 0.5 * j + pressure_md((2.0 * m - 1.0) * j + h)


def tilde_p_derivatives(m: float, h: float, j: float) -> tuple[float, float]:
    """First and second m-derivatives of the variational functional."""
    _check_j(j)
    xi = (2.0 * m - 1.0) * j + h
    g1 = g_derivatives(xi)[0]
    return (-2.0 * j * m + 2.0 * j * g(xi),
            -2.0 * j + 4.0 * j * j * g1)


def a_coefficients(j: float) -> tuple[float, float]:
    """Endpoints a_1(J) <= a_2(J) of the band where g' > 1/(2J).

    Defined for J >= J_C; both collapse to e^{2 XI_C} at J = J_C.
    """
    _check_j(j)
    if j < J_C * (1.0 - 1e-14):
        raise DomainError(f"a_coefficients requires J >= J_C, got {j!r}")
    band = g_prime_threshold(min(0.5 / j, G1_MAX))
    return math.exp(2.0 * band.lower), math.exp(2.0 * band.upper)


def inflection_points(h: float, j: float) -> tuple[float, float] | None:
    """Zeros phi_1 <= phi_2 of the second derivative of ptilde, or None
    when J <= J_C (the functional is then strictly concave)."""
    _check_j(j)
    if j <= J_C:
        return None
    a1, a2 = a_coefficients(j)
    inv = 1.0 / (4.0 * j)
    base = 0.5 - h / (2.0 * j)
    return base + math.log(a1) * inv, base + math.log(a2) * inv


def psi_curves(j: float) -> tuple[float, float]:
    """Fields psi_1(J) >= psi_2(J) at which an inflection point collides
    with a stationary point.  Defined for J >= J_C, equal at J = J_C."""
    _check_j(j)
    if j < J_C * (1.0 - 1e-14):
        raise DomainError(f"psi_curves requires J >= J_C, got {j!r}")
    a1, a2 = a_coefficients(j)
    out = []
    for a in (a1, a2):
        xi = 0.5 * math.log(a)
        out.append(j + xi - 2.0 * j * g(xi))
    return out[0], out[1]


@dataclass(frozen=True)
class StationaryPoint:
    m: float
    kind: str  # "local-max", "local-min", "global-max-candidate",
    #            "inflection-degenerate"
    residual: float


@dataclass(frozen=True)
class StationaryReport:
    h: float
    j: float
    region: str  # "subcritical", "three-solutions", "above-psi1",
    #              "below-psi2", "on-psi1", "on-psi2"
    points: tuple[StationaryPoint, ...]
    phi: tuple[float, float] | None
    psi: tuple[float, float] | None


def solve_consistency(h: float, j: float, lo: float, hi: float) -> float:
    """Root of m - g((2m-1)J + h) in [lo, hi], where g' - 1/(2J) has one
    sign on the interval (so the map is monotone there).

    Bisection down to an interval of width 1e-14 followed by a guarded
    Newton polish; the fixed-point residual of the result is below
    RESIDUAL_TOL.
    """
    def f(m: float) -> float:
        return g((2.0 * m - 1.0) * j + h) - m

    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0.0:
        raise DomainError(
            f"no sign change of the consistency map on [{lo}, {hi}]")
    a, b, fa = lo, hi, flo
    while b - a > 1e-14:
        mid = 0.5 * (a + b)
        if mid == a or mid == b:
            break
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm > 0.0) == (fa > 0.0):
            a, fa = mid, fm
        else:
            b = mid
    m = 0.5 * (a + b)
    for _ in range(3):
        r = f(m)
        if abs(r) <= 1e-16:
            break
        xi = (2.0 * m - 1.0) * j + h
        fprime = 2.0 * j * g_derivatives(xi)[0] - 1.0
        if fprime == 0.0:
            break
        step = r / fprime
        if not (lo <= m - step <= hi):
            break
        m -= step
    return m


def _point(m: float, h: float, j: float, kind: str) -> StationaryPoint:
    return StationaryPoint(m, kind, g((2.0 * m - 1.0) * j + h) - m)


def classify(h: float, j: float,
             boundary_tol: float = BOUNDARY_TOL) -> StationaryReport:
    """Stationary-point structure of the variational functional at (h, J)."""
    _check_j(j)
    if j <= J_C:
        m = solve_consistency(h, j, 0.0, 1.0)
        return StationaryReport(h, j, "subcritical",
                                (_point(m, h, j, "global-max-candidate"),),
                                None, None)
    phi1, phi2 = inflection_points(h, j)
    psi1, psi2 = psi_curves(j)
    lo1, hi1 = 0.0, min(phi1, 1.0)
    lo0, hi0 = max(phi1, 0.0), min(phi2, 1.0)
    lo2, hi2 = max(phi2, 0.0), 1.0
    if h > psi1 + boundary_tol:
        m2 = solve_consistency(h, j, lo2, hi2)
        points = (_point(m2, h, j, "global-max-candidate"),)
        region = "above-psi1"
    elif h >= psi1 - boundary_tol:
        m2 = solve_consistency(h, j, lo2, hi2)
        points = (_point(phi1, h, j, "inflection-degenerate"),
                  _point(m2, h, j, "global-max-candidate"))
        region = "on-psi1"
    elif h > psi2 + boundary_tol:
        m1 = solve_consistency(h, j, lo1, hi1)
        m0 = solve_consistency(h, j, lo0, hi0)
        m2 = solve_consistency(h, j, lo2, hi2)
        points = (_point(m1, h, j, "local-max"),
                  _point(m0, h, j, "local-min"),
                  _point(m2, h, j, "local-max"))
        region = "three-solutions"
    elif h >= psi2 - boundary_tol:
        m1 = solve_consistency(h, j, lo1, hi1)
        points = (_point(m1, h, j, "global-max-candidate"),
                  _point(phi2, h, j, "inflection-degenerate"))
        region = "on-psi2"
    else:
        m1 = solve_consistency(h, j, lo1, hi1)
        points = (_point(m1, h, j, "global-max-candidate"),)
        region = "below-psi2"
    return StationaryReport(h, j, region, points, (phi1, phi2), (psi1, psi2))


@dataclass(frozen=True)
class GlobalMaximizer:
    h: float
    j: float
    pressure: float
    on_wall: bool
    m_star: float | None = None
    m_pair: tuple[float, float] | None = None


def global_maximizer(h: float, j: float,
                     wall_tol: float = WALL_TOL) -> GlobalMaximizer:
    """Maximizer(s) of the variational functional and the limiting pressure.

    When the two local maxima agree in pressure to within ``wall_tol`` the
    point is reported as coexistence and both maximizers are returned.
    """
    rep = classify(h, j)
    if rep.region == "three-solutions":
        m1 = rep.points[0].m
        m2 = rep.points[2].m
        p1 = tilde_p(m1, h, j)
        p2 = tilde_p(m2, h, j)
        if abs(p2 - p1) <= wall_tol:
            return GlobalMaximizer(h, j, max(p1, p2), True,
                                   m_pair=(m1, m2))
        if p2 > p1:
            return GlobalMaximizer(h, j, p2, False, m_star=m2)
        return GlobalMaximizer(h, j, p1, False, m_star=m1)
    if rep.region == "on-psi1":
        m = rep.points[1].m
    elif rep.region == "on-psi2":
        m = rep.points[0].m
    else:
        m = rep.points[0].m
    return GlobalMaximizer(h, j, tilde_p(m, h, j), False, m_star=m)


_BRANCH_ALIASES = {
    "m1": "m1", "mu1": "m1", "lower": "m1",
    "m2": "m2", "mu2": "m2", "upper": "m2",
    "m0": "m0", "mu0": "m0", "middle": "m0",
    "auto": "auto", "unique": "auto",
}


def susceptibilities(h: float, j: float,
                     branch: str = "auto") -> tuple[float, float]:
    """Field and coupling derivatives (dm/dh, dm/dJ) of a solution branch.

    The closed forms are
        dm/dh = 2 m (1-m) / (2 - m - 4 J m (1-m)),
        dm/dJ = (2m - 1) dm/dh,
    valid strictly inside the branch's domain of definition.
    """
    key = _BRANCH_ALIASES.get(branch)
    if key is None:
        raise BranchUndefinedError(f"unknown branch {branch!r}")
    if (abs(j - J_C) <= 1e-12 and abs(h - H_C) <= 1e-12):
        raise BranchUndefinedError(
            "susceptibilities diverge at the critical point")
    rep = classify(h, j)
    if key == "auto":
        if len(rep.points) != 1:
            raise BranchUndefinedError(
                f"branch 'auto' is ambiguous in region {rep.region!r}")
        m = rep.points[0].m
    elif key == "m1":
        if rep.region in ("above-psi1", "on-psi1"):
            raise BranchUndefinedError(
                f"branch 'm1' undefined in region {rep.region!r}")
        m = rep.points[0].m
    elif key == "m2":
        if rep.region in ("below-psi2", "on-psi2"):
            raise BranchUndefinedError(
                f"branch 'm2' undefined in region {rep.region!r}")
        m = rep.points[-1].m
    else:  # m0
        if rep.region != "three-solutions":
            raise BranchUndefinedError(
                f"branch 'm0' undefined in region {rep.region!r}")
        m = rep.points[1].m
    den = 2.0 - m - 4.0 * j * m * (1.0 - m)
    if den == 0.0:
        raise BranchUndefinedError(
            "susceptibility denominator vanishes (inflection collision)")
    dm_dh = 2.0 * m * (1.0 - m) / den
    return dm_dh, (2.0 * m - 1.0) * dm_dh


@dataclass(frozen=True)
class AsymptoticsRow:
    j: float
    m1: float
    m0: float
    m2: float
    j_times_m1: float
    j_times_one_minus_m2: float


def large_j_asymptotics(j_list: list[float], h: float) -> list[AsymptoticsRow]:
    """Track the three branches at fixed ``h`` for a list of couplings.

    Requires each J to lie in the three-solution strip at field ``h``;
    J*m1 and J*(1-m2) approach finite limits as J grows.
    """
    rows = []
    for j in j_list:
        rep = classify(h, j)
        if rep.region != "three-solutions":
            raise DomainError(
                f"(h={h}, J={j}) is not in the three-solution strip "
                f"(region {rep.region!r})")
        m1, m0, m2 = (p.m for p in rep.points)
        rows.append(AsymptoticsRow(j, m1, m0, m2, j * m1, j * (1.0 - m2)))
    return rows
