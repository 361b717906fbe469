"""Smooth compactly supported cutoffs shared by the decomposition and the
wave-packet construction.  All profiles derive from exp(-1/(1-s^2))."""

from __future__ import annotations

import functools

import numpy as np
from scipy.integrate import quad

_EDGE = 1.0 - 1e-9


def bump(s: np.ndarray | float) -> np.ndarray:
    """exp(-1/(1-s^2)) on |s| < 1, zero outside."""
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    m = np.abs(s) < _EDGE
    out[m] = np.exp(-1.0 / (1.0 - s[m] ** 2))
    return out


@functools.lru_cache(maxsize=1)
def bump_mass() -> float:
    """Integral of the unnormalized bump over its support."""
    val, _ = quad(lambda s: np.exp(-1.0 / (1.0 - s * s)), -1, 1, epsabs=1e-14)
    return val


def bump_normalized(s) -> np.ndarray:
    """Bump scaled to unit integral."""
    return bump(s) / bump_mass()


def bump_d1(s) -> np.ndarray:
    """First derivative of the normalized bump."""
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    m = np.abs(s) < _EDGE
    sm = s[m]
    q = 1.0 - sm**2
    out[m] = np.exp(-1.0 / q) * (-2.0 * sm / q**2)
    return out / bump_mass()


def bump_d2(s) -> np.ndarray:
    """Second derivative of the normalized bump."""
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    m = np.abs(s) < _EDGE
    sm = s[m]
    q = 1.0 - sm**2
    out[m] = np.exp(-1.0 / q) * (4 * sm**2 / q**4 - 2.0 / q**2 - 8 * sm**2 / q**3)
    return out / bump_mass()


def smooth_step(s) -> np.ndarray:
    """C^infinity monotone step: 0 for s <= 0, 1 for s >= 1."""
    s = np.asarray(s, dtype=float)
    lo = s <= 0
    hi = s >= 1
    mid = ~(lo | hi)
    out = np.zeros_like(s)
    out[hi] = 1.0
    a = np.exp(-1.0 / np.where(mid, s, 0.5))
    b = np.exp(-1.0 / np.where(mid, 1.0 - s, 0.5))
    out[mid] = (a / (a + b))[mid]
    return out


def plateau_cutoff(s) -> np.ndarray:
    """Smooth indicator: 1 on |s| <= 1, 0 on |s| >= 2, monotone in between."""
    return smooth_step(2.0 - np.abs(np.asarray(s, dtype=float)))
