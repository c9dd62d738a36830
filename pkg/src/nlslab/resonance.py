"""Frequency-space machinery: interaction phases, resonant sets, cutoff families.

Triples (xi1, xi2, xi3) are related to the integration variables (eta, sigma)
at total frequency xi by the bijection

    xi1 = xi - eta,   xi2 = eta - sigma,   xi3 = sigma,
    eta = xi2 + xi3,  sigma = xi3,         xi = xi1 + xi2 + xi3.

All symbols are stored in xi1-xi2-xi3 coordinates; eta/sigma derivatives are
taken through this chart (d_eta = d_{xi2} - d_{xi1}, d_sigma = d_{xi3} - d_{xi2},
d_xi = d_{xi1} at fixed eta, sigma).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bumps import profile_a, profile_b
from .errors import ValidationError

__all__ = [
    "PHASES",
    "phase_eval",
    "phase_gradients",
    "eta_sigma_of",
    "triple_of",
    "resonant_set_scan",
    "CutoffFamily",
    "build_cutoffs",
]

PHASES = ("phi", "psi", "omega")


def triple_of(xi: np.ndarray, eta: np.ndarray, sigma: np.ndarray):
    """(xi, eta, sigma) -> (xi1, xi2, xi3)."""
    return xi - eta, eta - sigma, sigma


def eta_sigma_of(xi1: np.ndarray, xi2: np.ndarray, xi3: np.ndarray):
    """(xi1, xi2, xi3) -> (xi, eta, sigma)."""
    return xi1 + xi2 + xi3, xi2 + xi3, xi3


def phase_eval(kind: str, xi1, xi2, xi3):
    """Closed-form interaction phase of the conj/plain cubic terms.

    phi   = (xi^2 + xi1^2 + xi2^2 + xi3^2)/2      (conj u cubed)
    psi   = xi1 xi2 + xi2 xi3 + xi3 xi1           (u cubed)
    omega = xi1^2 + xi2^2 + xi1 xi2 + xi2 xi3 + xi1 xi3   (|u|^2 conj u)
    """
    xi1 = np.asarray(xi1, dtype=float)
    xi2 = np.asarray(xi2, dtype=float)
    xi3 = np.asarray(xi3, dtype=float)
    if kind == "phi":
        xi = xi1 + xi2 + xi3
        return 0.5 * (xi**2 + xi1**2 + xi2**2 + xi3**2)
    if kind == "psi":
        return xi1 * xi2 + xi2 * xi3 + xi3 * xi1
    if kind == "omega":
        return xi1**2 + xi2**2 + xi1 * xi2 + xi2 * xi3 + xi1 * xi3
    raise ValidationError(f"unknown phase {kind!r}")


def phase_gradients(kind: str, xi1, xi2, xi3):
    """(d_eta, d_sigma, d_xi) of the phase at the triple, via the chart."""
    xi1 = np.asarray(xi1, dtype=float)
    xi2 = np.asarray(xi2, dtype=float)
    xi3 = np.asarray(xi3, dtype=float)
    xi = xi1 + xi2 + xi3
    if kind == "phi":
        return xi2 - xi1, xi3 - xi2, xi + xi1
    if kind == "psi":
        return xi1 - xi2, xi2 - xi3, xi2 + xi3
    if kind == "omega":
        return xi2 - xi1, -xi2 - xi3, xi + xi1
    raise ValidationError(f"unknown phase {kind!r}")


def resonant_set_scan(
    kind: str,
    axis: np.ndarray,
    tol_phase: float,
    tol_grad: float,
) -> np.ndarray:
    """All triples on the cubic lattice axis^3 where |phase| < tol_phase and
    both space gradients are < tol_grad in magnitude.

    Returns an (n, 3) array of triples; shrinks to a neighborhood of the
    origin as the tolerances shrink (the space-time resonant set).
    """
    if tol_phase <= 0 or tol_grad <= 0:
        raise ValidationError("tolerances must be positive")
    x1, x2, x3 = np.meshgrid(axis, axis, axis, indexing="ij")
    p = np.abs(phase_eval(kind, x1, x2, x3))
    de, ds, _ = phase_gradients(kind, x1, x2, x3)
    mask = (p < tol_phase) & (np.abs(de) < tol_grad) & (np.abs(ds) < tol_grad)
    return np.stack([x1[mask], x2[mask], x3[mask]], axis=-1)


def _ratio(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """x / y with the removable-singularity convention of the cutoff quotients.

    y = 0, x != 0 -> +inf (profiles evaluate to their |arg| -> inf limit);
    y = 0, x  = 0 -> 0    (profiles evaluate at 0), which keeps chi sums exact.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    out = np.full(np.broadcast(x, y).shape, np.inf)
    nz = y != 0
    np.divide(x, y, out=out, where=nz)
    out[(~nz) & (x == 0)] = 0.0
    return out


def _a_of(vals: np.ndarray, delta: float) -> np.ndarray:
    """profile a with a(inf) = 0."""
    out = np.zeros_like(vals)
    fin = np.isfinite(vals)
    out[fin] = profile_a(vals[fin], delta)
    return out


def _b_of(vals: np.ndarray) -> np.ndarray:
    out = np.zeros_like(vals)
    fin = np.isfinite(vals)
    out[fin] = profile_b(vals[fin])
    return out


@dataclass(frozen=True)
class CutoffFamily:
    """The smooth partitions 1 = chi1 + chi2 + chi3 and 1 = chi_eta + chi_sigma + chi_s.

    chi_j localizes to |xi_j| almost-maximal among the three frequencies; on
    the support of chi_j the constructive bound |xi_j| >= max_k |xi_k| / (1+delta)^2
    holds pointwise (the literal 9/10 constant requires delta <= sqrt(10/9)-1).

    The second partition refines chi2's region by the closeness of xi1 and
    xi3 (or -xi3, variant='omega') to xi2, with the 1/100 and 1/50 thresholds
    carried exactly by the profile b.
    """

    delta: float = 0.1
    variant: str = "psi"

    def __post_init__(self):
        if not (0.0 < self.delta <= 0.1):
            raise ValidationError("require 0 < delta <= 0.1")
        if self.variant not in ("psi", "omega"):
            raise ValidationError("variant must be 'psi' or 'omega'")

    # ---- max-frequency partition -------------------------------------
    def chi1(self, xi1, xi2, xi3):
        r12 = _ratio(xi1, xi2)
        r13 = _ratio(xi1, xi3)
        return (1.0 - _a_of(r12, self.delta)) * (1.0 - _a_of(r13, self.delta))

    def chi2(self, xi1, xi2, xi3):
        r12 = _ratio(xi1, xi2)
        r23 = _ratio(xi2, xi3)
        return _a_of(r12, self.delta) * (1.0 - _a_of(r23, self.delta))

    def chi3(self, xi1, xi2, xi3):
        r12 = _ratio(xi1, xi2)
        r13 = _ratio(xi1, xi3)
        r23 = _ratio(xi2, xi3)
        a12 = _a_of(r12, self.delta)
        return (1.0 - a12) * _a_of(r13, self.delta) + a12 * _a_of(r23, self.delta)

    # ---- closeness partition on the chi2 region ----------------------
    def _sigma_arg(self, xi2, xi3):
        # psi-phase regions compare xi3 to xi2; omega-phase regions compare -xi3.
        if self.variant == "psi":
            return _ratio(np.asarray(xi2) - np.asarray(xi3), xi2)
        return _ratio(np.asarray(xi2) + np.asarray(xi3), xi2)

    def chi_eta(self, xi1, xi2, xi3):
        return 1.0 - _b_of(_ratio(np.asarray(xi2) - np.asarray(xi1), xi2))

    def chi_sigma(self, xi1, xi2, xi3):
        b1 = _b_of(_ratio(np.asarray(xi2) - np.asarray(xi1), xi2))
        return b1 * (1.0 - _b_of(self._sigma_arg(xi2, xi3)))

    def chi_s(self, xi1, xi2, xi3):
        b1 = _b_of(_ratio(np.asarray(xi2) - np.asarray(xi1), xi2))
        return b1 * _b_of(self._sigma_arg(xi2, xi3))

    # ---- support slack -----------------------------------------------
    @property
    def max_slack(self) -> float:
        """Constructive support constant: |xi_j| >= slack * max|xi_k| on supp chi_j."""
        return 1.0 / (1.0 + self.delta) ** 2

    def all_chis(self, xi1, xi2, xi3) -> dict[str, np.ndarray]:
        return {
            "chi1": self.chi1(xi1, xi2, xi3),
            "chi2": self.chi2(xi1, xi2, xi3),
            "chi3": self.chi3(xi1, xi2, xi3),
            "chi_eta": self.chi_eta(xi1, xi2, xi3),
            "chi_sigma": self.chi_sigma(xi1, xi2, xi3),
            "chi_s": self.chi_s(xi1, xi2, xi3),
        }


def build_cutoffs(delta: float = 0.1, variant: str = "psi") -> CutoffFamily:
    """Construct the six-multiplier cutoff family with transition width delta."""
    return CutoffFamily(delta=delta, variant=variant)
