"""Coexistence line of the interacting model.

For J > J_C the two local maxima of the variational functional exchange
global dominance across a curve gamma(J) inside the strip
psi_2(J) < h < psi_1(J).  The pressure difference is strictly increasing
in h, so the curve is located by bisection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .special_functions import J_C
from .variational import classify, psi_curves, tilde_p

__all__ = [
    "WALL_BISECTION_TOL",
    "DEGENERATE_STRIP_WIDTH",
    "WallSample",
    "delta",
    "wall",
    "wall_table",
]

WALL_BISECTION_TOL = 1e-12
#: Below this strip width the two maxima are numerically indistinguishable.
DEGENERATE_STRIP_WIDTH = 1e-12


def _extremal_pair(h: float, j: float) -> tuple[float, float]:
    """The two outer stationary points m1 <= m2 for h in the closed strip."""
    psi1, psi2 = psi_curves(j)
    # Shrink the boundary band well below the strip width so that points
    # strictly inside the strip are never misclassified as tangent cases.
    tol = min(1e-9, 1e-3 * (psi1 - psi2))
    rep = classify(h, j, boundary_tol=tol)
    if rep.region == "three-solutions":
        return rep.points[0].m, rep.points[2].m
    if rep.region in ("on-psi1", "on-psi2"):
        return rep.points[0].m, rep.points[-1].m
    raise DomainError(
        f"h={h} lies outside the coexistence strip at J={j} "
        f"(region {rep.region!r})")


def delta(h: float, j: float) -> float:
    """Pressure difference ptilde(m2) - ptilde(m1) on the closed strip.

    Strictly increasing in h; its unique zero is the coexistence field.
    """
    m1, m2 = _extremal_pair(h, j)
    return tilde_p(m2, h, j) - tilde_p(m1, h, j)


@dataclass(frozen=True)
class WallSample:
    j: float
    gamma: float
    gamma_prime: float
    m1: float
    m2: float
    delta_residual: float
    degenerate_strip: bool = False

    @property
    def jump(self) -> float:
        return self.m2 - self.m1


def wall(j: float) -> WallSample:
    """Coexistence field gamma(J) with the flanking densities.

    gamma_prime is the closed-form slope 1 - m1 - m2.  When the strip is
    narrower than DEGENERATE_STRIP_WIDTH the midpoint is returned with the
    ``degenerate_strip`` flag set.
    """
    if not (j > J_C):
        raise DomainError(f"the coexistence line requires J > J_C, got {j!r}")
    psi1, psi2 = psi_curves(j)
    if psi1 - psi2 < DEGENERATE_STRIP_WIDTH:
        mid = 0.5 * (psi1 + psi2)
        m1, m2 = _extremal_pair(mid, j)
        return WallSample(j, mid, 1.0 - m1 - m2, m1, m2,
                          float("nan"), degenerate_strip=True)
    lo, hi = psi2, psi1
    flo = delta(lo, j)
    fhi = delta(hi, j)
    if not (flo <= 0.0 <= fhi):
        raise DomainError(
            f"pressure difference does not change sign on the strip at J={j}")
    while hi - lo > WALL_BISECTION_TOL:
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if delta(mid, j) <= 0.0:
            lo = mid
        else:
            hi = mid
    gamma = 0.5 * (lo + hi)
    m1, m2 = _extremal_pair(gamma, j)
    return WallSample(j, gamma, 1.0 - m1 - m2, m1, m2, delta(gamma, j))


def wall_table(j_min: float, j_max: float, steps: int) -> list[WallSample]:
    """Samples of the coexistence line on a geometric grid of couplings."""
    if not (J_C < j_min < j_max):
        raise DomainError(
            f"need J_C < j_min < j_max, got j_min={j_min}, j_max={j_max}")
    if steps < 2:
        raise DomainError(f"need at least 2 steps, got {steps}")
    return [wall(float(j)) for j in np.geomspace(j_min, j_max, steps)]
