"""Critical-point expansion: cubic normal form, amplitudes and exponents.

Near (h_c, J_c) the consistency equation reduces to the depressed cubic

    u^3 - kappa1 (J - J_c) u - kappa2 rho = 0,    u = xi - xi_c,

with rho = (h - h_c) + (2 m_c - 1)(J - J_c).  The density deviation grows
like a square root along directions tangent to the coexistence line and
like a cube root along every other direction; this module measures those
exponents by log-log regression against the exact solver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BranchUndefinedError, DomainError, FitQualityError
from .phase_boundary import wall
from .special_functions import H_C, J_C, M_C, XI_C
from .variational import classify, global_maximizer, inflection_points

__all__ = [
    "R_SQUARED_MIN",
    "CriticalCubic",
    "critical_cubic",
    "critical_cubic_residual",
    "AmplitudeConstants",
    "amplitude_constants",
    "CurveSpec",
    "tangent_curve",
    "slope_curve",
    "flat_j_curve",
    "ExponentFit",
    "default_distances",
    "exponent_fit",
    "WallExponents",
    "wall_exponent_check",
    "FlexScaling",
    "flex_point_scaling",
]

R_SQUARED_MIN = 0.999
#: Tangent slope of the coexistence line at the critical point.
TANGENT_SLOPE = 1.0 - 2.0 * M_C


@dataclass(frozen=True)
class CriticalCubic:
    kappa1: float
    kappa2: float
    rho: float


def critical_cubic(h: float, j: float) -> CriticalCubic:
    """Coefficients of the cubic normal form at (h, J)."""
    if not (j > 0.0):
        raise DomainError(f"coupling must be positive, got {j!r}")
    kappa1 = 3.0 * (J_C / j) * (2.0 - M_C)
    kappa2 = 3.0 * (J_C * J_C / j) * (2.0 - M_C)
    rho = (h - H_C) + (2.0 * M_C - 1.0) * (j - J_C)
    return CriticalCubic(kappa1, kappa2, rho)


def critical_cubic_residual(xi: float, h: float, j: float) -> float:
    """Value of the cubic normal form at effective field ``xi``.

    Vanishes to fourth order in (xi - xi_c) on solutions of the
    consistency equation near the critical point.
    """
    cc = critical_cubic(h, j)
    u = xi - XI_C
    return u ** 3 - cc.kappa1 * (j - J_C) * u - cc.kappa2 * cc.rho


@dataclass(frozen=True)
class AmplitudeConstants:
    """Leading amplitudes of the density deviation near the critical point.

    c_m: along the coexistence line, |m_i - m_c| ~ c_m sqrt(J - J_c).
    c_phi: inflection points, |phi_i - m_c| ~ c_phi sqrt(J - J_c).
    c_inf: at J = J_c, |m - m_c| ~ c_inf |h - h_c|^(1/3).
    """

    c_m: float = math.sqrt(3.0 * (2.0 - M_C)) / (2.0 * J_C)
    c_phi: float = math.sqrt(2.0 - M_C) / (2.0 * J_C)
    c_inf: float = (3.0 * J_C * (2.0 - M_C)) ** (1.0 / 3.0) / (2.0 * J_C)

    def c_alpha(self, alpha: float) -> float:
        """Amplitude along h - h_c = alpha (J - J_c); vanishes on the
        tangent direction alpha = 1 - 2 m_c."""
        s = 3.0 * J_C * (2.0 - M_C) * (alpha + 2.0 * M_C - 1.0)
        return math.copysign(abs(s) ** (1.0 / 3.0), s) / (2.0 * J_C)


def amplitude_constants() -> AmplitudeConstants:
    return AmplitudeConstants()


@dataclass(frozen=True)
class CurveSpec:
    """A one-parameter approach path to the critical point.

    kind "tangent": (h, J) = (h_c + (1-2m_c) d, J_c + d);
    kind "slope":   (h, J) = (h_c + alpha d,    J_c + d);
    kind "flat-j":  (h, J) = (h_c + d,          J_c).
    """

    kind: str
    alpha: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("tangent", "slope", "flat-j"):
            raise DomainError(f"unknown curve kind {self.kind!r}")
        if self.kind == "slope" and self.alpha is None:
            raise DomainError("slope curves need an alpha")

    def point(self, distance: float) -> tuple[float, float]:
        if distance <= 0.0:
            raise DomainError(f"distance must be positive, got {distance!r}")
        if self.kind == "tangent":
            return H_C + TANGENT_SLOPE * distance, J_C + distance
        if self.kind == "slope":
            return H_C + self.alpha * distance, J_C + distance
        return H_C + distance, J_C


def tangent_curve() -> CurveSpec:
    return CurveSpec("tangent")


def slope_curve(alpha: float) -> CurveSpec:
    return CurveSpec("slope", alpha)


def flat_j_curve() -> CurveSpec:
    return CurveSpec("flat-j")


def default_distances(k_max: int = 12, start: float = 1e-2) -> list[float]:
    """Geometric ladder start * 2^-k for k = 0 .. k_max."""
    return [start * 2.0 ** (-k) for k in range(k_max + 1)]


@dataclass(frozen=True)
class ExponentFit:
    exponent: float
    log_amplitude: float
    r_squared: float
    n_dropped: int
    samples: tuple[tuple[float, float], ...] = field(repr=False)

    @property
    def amplitude(self) -> float:
        return math.exp(self.log_amplitude)


def _loglog_fit(pairs: list[tuple[float, float]],
                allow_drop: bool = True,
                drop_largest: int = 0) -> ExponentFit:
    def fit(p):
        x = np.log([a for a, _ in p])
        y = np.log([b for _, b in p])
        slope, intercept = np.polyfit(x, y, 1)
        resid = y - (slope * x + intercept)
        ss_tot = float(np.sum((y - y.mean()) ** 2))
        r2 = 1.0 - float(np.sum(resid ** 2)) / ss_tot
        return float(slope), float(intercept), r2

    dropped = 0
    if drop_largest:
        pairs = sorted(pairs)[:-drop_largest]
        dropped = drop_largest
    slope, intercept, r2 = fit(pairs)
    if r2 < R_SQUARED_MIN and allow_drop and len(pairs) > 4:
        # The largest distances are farthest from the asymptotic regime.
        trimmed = sorted(pairs)[:-2]
        slope, intercept, r2 = fit(trimmed)
        pairs = trimmed
        dropped += 2
    if r2 < R_SQUARED_MIN:
        raise FitQualityError(
            f"log-log fit reached r^2 = {r2:.6f} < {R_SQUARED_MIN}")
    return ExponentFit(slope, intercept, r2, dropped, tuple(pairs))


def _branch_density(h: float, j: float, branch: str) -> float:
    rep = classify(h, j)
    if branch == "lower":
        if rep.region in ("above-psi1", "on-psi1"):
            raise BranchUndefinedError(f"no lower branch in {rep.region!r}")
        return rep.points[0].m
    if branch == "upper":
        if rep.region in ("below-psi2", "on-psi2"):
            raise BranchUndefinedError(f"no upper branch in {rep.region!r}")
        return rep.points[-1].m
    if branch == "auto":
        gm = global_maximizer(h, j)
        if gm.on_wall:
            raise BranchUndefinedError(
                "curve hit the coexistence line; pick an explicit branch")
        return gm.m_star
    raise BranchUndefinedError(f"unknown branch {branch!r}")


def exponent_fit(curve: CurveSpec, distances: list[float] | None = None,
                 branch: str = "auto", drop_largest: int = 0) -> ExponentFit:
    """Fit |m(d) - m_c| ~ amplitude * d^exponent along an approach curve.

    ``drop_largest`` discards that many of the largest distances up front
    (they are farthest from the asymptotic regime).
    """
    if distances is None:
        distances = default_distances()
    pairs = []
    for d in distances:
        h, j = curve.point(d)
        dev = abs(_branch_density(h, j, branch) - M_C)
        if dev == 0.0:
            raise FitQualityError(
                f"density deviation underflowed at distance {d}")
        pairs.append((d, dev))
    return _loglog_fit(pairs, drop_largest=drop_largest)


@dataclass(frozen=True)
class WallExponents:
    fit_upper: ExponentFit
    fit_lower: ExponentFit
    sqrt_ratios_upper: tuple[float, ...]
    sqrt_ratios_lower: tuple[float, ...]


def wall_exponent_check(distances: list[float] | None = None) -> WallExponents:
    """Exponent 1/2 of both density branches along the coexistence line.

    Also reports (m2 - m_c)/sqrt(J - J_c) and (m_c - m1)/sqrt(J - J_c),
    which converge to the amplitude c_m.
    """
    if distances is None:
        distances = default_distances()
    up, lo, rup, rlo = [], [], [], []
    for d in distances:
        w = wall(J_C + d)
        if w.degenerate_strip:
            raise DomainError(
                f"coexistence strip degenerate at distance {d}")
        up.append((d, w.m2 - M_C))
        lo.append((d, M_C - w.m1))
        rup.append((w.m2 - M_C) / math.sqrt(d))
        rlo.append((M_C - w.m1) / math.sqrt(d))
    return WallExponents(_loglog_fit(up), _loglog_fit(lo),
                         tuple(rup), tuple(rlo))


@dataclass(frozen=True)
class FlexScaling:
    fit_upper: ExponentFit
    fit_lower: ExponentFit
    sqrt_ratios_upper: tuple[float, ...]
    sqrt_ratios_lower: tuple[float, ...]


def flex_point_scaling(distances: list[float] | None = None) -> FlexScaling:
    """Square-root scaling of the inflection points phi_i(h_c, J_c + d).

    The ratios (phi2 - m_c)/sqrt(d) and (m_c - phi1)/sqrt(d) converge to
    the amplitude c_phi.
    """
    if distances is None:
        distances = default_distances()
    up, lo, rup, rlo = [], [], [], []
    for d in distances:
        j = J_C + d
        h = H_C + TANGENT_SLOPE * d
        phi1, phi2 = inflection_points(h, j)
        up.append((d, phi2 - M_C))
        lo.append((d, M_C - phi1))
        rup.append((phi2 - M_C) / math.sqrt(d))
        rlo.append((M_C - phi1) / math.sqrt(d))
    return FlexScaling(_loglog_fit(up), _loglog_fit(lo),
                       tuple(rup), tuple(rlo))
