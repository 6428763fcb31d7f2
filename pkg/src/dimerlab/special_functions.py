"""Closed-form building blocks for the monomer-dimer pressure.

Everything here is elementary: the monomer-density function ``g``, its
inverse and first three derivatives, the pure monomer-dimer pressure, and
the band of fields on which ``g'`` exceeds a given level.  All functions
accept either floats or numpy arrays; scalar inputs take a fast
``math``-only path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = [
    "J_C",
    "H_C",
    "M_C",
    "XI_C",
    "G1_MAX",
    "CriticalPoint",
    "critical_point",
    "g",
    "one_minus_g",
    "g_inverse",
    "g_derivatives",
    "pressure_md",
    "pressure_md_x",
    "f_of_x",
    "ThresholdBand",
    "g_prime_threshold",
]

_SQRT2 = math.sqrt(2.0)

#: Critical coupling of the attractive model, 1/(4(3-2*sqrt(2))) in the
#: rationalized form (3+2*sqrt(2))/4, which is exact to the last bit.
J_C = (3.0 + 2.0 * _SQRT2) / 4.0
#: Critical external field.
H_C = 0.5 * math.log(2.0 * _SQRT2 - 2.0) - 0.25
#: Critical monomer density.
M_C = 2.0 - _SQRT2
#: Effective field at the critical point, g(XI_C) = M_C.
XI_C = 0.5 * math.log(2.0 * _SQRT2 - 2.0)
#: Global maximum of g', attained only at XI_C.  Equals 6 - 4*sqrt(2).
G1_MAX = 1.0 / (2.0 * J_C)


@dataclass(frozen=True)
class CriticalPoint:
    j: float = J_C
    h: float = H_C
    m: float = M_C
    xi: float = XI_C


def critical_point() -> CriticalPoint:
    """Return the critical coupling, field, density and effective field."""
    return CriticalPoint()


def _g_scalar(h: float) -> float:
    if h >= 0.0:
        return 2.0 / (1.0 + math.sqrt(1.0 + 4.0 * math.exp(-2.0 * h)))
    t = math.exp(2.0 * h)
    return 0.5 * (math.sqrt(t * t + 4.0 * t) - t)


def _one_minus_g_scalar(h: float) -> float:
    if h >= 0.0:
        # 1 - g = 4 e^{-2h} / (1 + s)^2 with s = sqrt(1 + 4 e^{-2h}):
        # no cancellation even for very large h.
        e = math.exp(-2.0 * h)
        s = math.sqrt(1.0 + 4.0 * e)
        return 4.0 * e / ((1.0 + s) * (1.0 + s))
    return 1.0 - _g_scalar(h)


def g(h):
    """Monomer density of the pure model at effective field ``h``.

    Strictly increasing from 0 to 1; equals the positive root of
    m^2/(1-m) = e^{2h}.
    """
    if isinstance(h, np.ndarray):
        h = np.asarray(h, dtype=float)
        out = np.empty_like(h)
        pos = h >= 0.0
        e = np.exp(-2.0 * h[pos])
        out[pos] = 2.0 / (1.0 + np.sqrt(1.0 + 4.0 * e))
        t = np.exp(2.0 * h[~pos])
        out[~pos] = 0.5 * (np.sqrt(t * t + 4.0 * t) - t)
        return out
    return _g_scalar(float(h))


def one_minus_g(h):
    """Dimer-side complement 1 - g(h), computed without cancellation."""
    if isinstance(h, np.ndarray):
        h = np.asarray(h, dtype=float)
        out = np.empty_like(h)
        pos = h >= 0.0
        e = np.exp(-2.0 * h[pos])
        s = np.sqrt(1.0 + 4.0 * e)
        out[pos] = 4.0 * e / ((1.0 + s) ** 2)
        t = np.exp(2.0 * h[~pos])
        out[~pos] = 1.0 - 0.5 * (np.sqrt(t * t + 4.0 * t) - t)
        return out
    return _one_minus_g_scalar(float(h))


def g_inverse(k):
    """Field at which the monomer density equals ``k`` in (0, 1)."""
    karr = np.asarray(k, dtype=float)
    if np.any(karr <= 0.0) or np.any(karr >= 1.0):
        raise DomainError(f"g_inverse requires 0 < k < 1, got {k!r}")
    if isinstance(k, np.ndarray):
        return 0.5 * np.log(karr * karr / (1.0 - karr))
    k = float(k)
    return 0.5 * math.log(k * k / (1.0 - k))


def g_derivatives(h):
    """First three derivatives of ``g`` at ``h``.

    Uses the closed recursions
        g'   = 2 g (1-g) / (2-g),
        g''  = (2 g' (1-2g) + g'^2) / (2-g),
        g''' = (g'' (2 - 4g + 3 g') - 4 g'^2) / (2-g),
    which avoid differencing entirely.
    """
    gh = g(h)
    omg = one_minus_g(h)
    den = 1.0 + omg  # equals 2 - g without cancellation
    g1 = 2.0 * gh * omg / den
    g2 = (2.0 * g1 * (1.0 - 2.0 * gh) + g1 * g1) / den
    g3 = (g2 * (2.0 - 4.0 * gh + 3.0 * g1) - 4.0 * g1 * g1) / den
    return g1, g2, g3


def pressure_md(h):
    """Limiting pressure of the pure monomer-dimer model at field ``h``.

    Equals -(1-g)/2 - log(1-g)/2; tends to -1/2 as h -> -inf and to h
    as h -> +inf.
    """
    if isinstance(h, np.ndarray):
        h = np.asarray(h, dtype=float)
        out = np.empty_like(h)
        pos = h >= 0.0
        # Expand log(1-g) = log 4 - 2h - 2 log(1+s) so the h >= 0 branch
        # stays finite even when 1-g underflows.
        e = np.exp(-2.0 * h[pos])
        s = np.sqrt(1.0 + 4.0 * e)
        out[pos] = h[pos] + np.log(0.5 * (1.0 + s)) - 2.0 * e / ((1.0 + s) ** 2)
        gm = g(h[~pos])
        out[~pos] = -0.5 * (1.0 - gm) - 0.5 * np.log1p(-gm)
        return out
    h = float(h)
    if h >= 0.0:
        e = math.exp(-2.0 * h)
        s = math.sqrt(1.0 + 4.0 * e)
        return h + math.log(0.5 * (1.0 + s)) - 2.0 * e / ((1.0 + s) * (1.0 + s))
    gm = _g_scalar(h)
    return -0.5 * (1.0 - gm) - 0.5 * math.log1p(-gm)


def pressure_md_x(x):
    """Pure-model pressure in the monomer-activity variable ``x`` > 0."""
    xarr = np.asarray(x, dtype=float)
    if np.any(xarr <= 0.0):
        raise DomainError(f"pressure_md_x requires x > 0, got {x!r}")
    if isinstance(x, np.ndarray):
        return pressure_md(np.log(xarr))
    return pressure_md(math.log(float(x)))


def f_of_x(x):
    """Limiting dimer density at monomer activity ``x`` > 0; lies in (0, 1/2)."""
    xarr = np.asarray(x, dtype=float)
    if np.any(xarr <= 0.0):
        raise DomainError(f"f_of_x requires x > 0, got {x!r}")
    if isinstance(x, np.ndarray):
        return 0.5 * one_minus_g(np.log(xarr))
    return 0.5 * one_minus_g(math.log(float(x)))


@dataclass(frozen=True)
class ThresholdBand:
    """Open band of fields where g' exceeds a level ``c``.

    ``everywhere_below`` is True when the level exceeds the global maximum
    of g'; otherwise ``lower`` and ``upper`` bound the band (they coincide
    at the degenerate level c = G1_MAX).
    """

    level: float
    everywhere_below: bool
    lower: float | None = None
    upper: float | None = None


def _alpha_pair(c: float) -> tuple[float, float]:
    """Roots alpha_-(c) <= alpha_+(c) of the quadratic behind the g' band."""
    disc = c * c - 12.0 * c + 4.0
    if disc < 0.0:
        disc = 0.0
    root = (2.0 - c) * math.sqrt(disc)
    base = -(c * c + 8.0 * c - 4.0)
    return (base - root) / (4.0 * c), (base + root) / (4.0 * c)


def g_prime_threshold(c: float) -> ThresholdBand:
    """Describe where g'(h) > c for a positive level ``c``."""
    c = float(c)
    if c <= 0.0:
        raise DomainError(f"g_prime_threshold requires c > 0, got {c!r}")
    if c > G1_MAX:
        if c - G1_MAX <= 1e-14 * G1_MAX:
            return ThresholdBand(c, False, XI_C, XI_C)
        return ThresholdBand(c, True)
    if G1_MAX - c <= 1e-14 * G1_MAX:
        return ThresholdBand(c, False, XI_C, XI_C)
    a_lo, a_hi = _alpha_pair(c)
    return ThresholdBand(c, False, 0.5 * math.log(a_lo), 0.5 * math.log(a_hi))
