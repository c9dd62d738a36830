"""Smooth compactly supported bump profiles.

All frequency cutoffs in the package are built from one C-infinity step
based on the exp(-1/t) mollifier, so that partition identities hold exactly
(the up and down transitions are algebraic complements) and all stated
support intervals are sharp.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "smooth_step_down",
    "smooth_step_down_prime",
    "phi_bump",
    "phi_bump_prime",
    "profile_a",
    "profile_b",
    "med_bump",
]


def _g(t: np.ndarray) -> np.ndarray:
    """exp(-1/t) for t > 0, zero otherwise."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    pos = t > 0
    with np.errstate(over="ignore", under="ignore", divide="ignore"):
        out[pos] = np.exp(-1.0 / t[pos])
    return out


def smooth_step_down(t):
    """C-infinity step: 1 for t <= 0, 0 for t >= 1, strictly decreasing between."""
    t = np.asarray(t, dtype=float)
    p = _g(t)
    q = _g(1.0 - t)
    denom = p + q
    # denom > 0 everywhere: at least one of p, q is positive for every t.
    out = np.empty_like(t)
    np.divide(q, denom, out=out, where=denom > 0)
    out[t <= 0] = 1.0
    out[t >= 1] = 0.0
    return out


def smooth_step_down_prime(t):
    """Derivative of smooth_step_down; vanishes outside (0, 1)."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    inside = (t > 0) & (t < 1)
    ti = t[inside]
    p = _g(ti)
    q = _g(1.0 - ti)
    with np.errstate(over="ignore", under="ignore"):
        out[inside] = -p * q * (1.0 / ti**2 + 1.0 / (1.0 - ti) ** 2) / (p + q) ** 2
    return out


def phi_bump(x):
    """Even bump: 1 on [-1, 1], supported on [-10/9, 10/9].

    This is the Littlewood-Paley profile shared by every dyadic and
    time-dependent cutoff in the package.
    """
    x = np.asarray(x, dtype=float)
    return smooth_step_down((np.abs(x) - 1.0) * 9.0)


def phi_bump_prime(x):
    """Derivative of phi_bump; supported on 1 < |x| < 10/9."""
    x = np.asarray(x, dtype=float)
    return np.sign(x) * 9.0 * smooth_step_down_prime((np.abs(x) - 1.0) * 9.0)


def profile_a(x, delta: float):
    """Even profile: 1 for |x| <= 1, 0 for |x| >= 1 + delta."""
    if not 0.0 < delta:
        raise ValueError("delta must be positive")
    x = np.asarray(x, dtype=float)
    return smooth_step_down((np.abs(x) - 1.0) / delta)


def profile_b(x):
    """Even profile: 1 for |x| <= 1/100, 0 for |x| >= 1/50.

    The 1/100 and 1/50 thresholds are fixed; they carry the closeness
    predicates of the sigma/eta/s frequency regions verbatim.
    """
    x = np.asarray(x, dtype=float)
    return smooth_step_down((np.abs(x) - 0.01) / 0.01)


def med_bump(r):
    """Bump in the radial variable r >= 0: supported on [9/10, 10/9], equal to 1 at r = 1.

    Used to realize the projection onto frequencies of size ~ s^{-1/2}.
    """
    r = np.asarray(r, dtype=float)
    up = smooth_step_down(1.0 - (r - 0.9) * 10.0)
    down = smooth_step_down((r - 1.0) * 9.0)
    return up * down
