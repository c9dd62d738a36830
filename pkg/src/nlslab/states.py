"""Wave states: a field with absolute time, cached spectrum and profile.

The profile convention is f(t) = exp(-i t dxx / 2) u(t) with absolute time
(initial time t0 = 1), so fhat(t, xi) = exp(i t xi^2 / 2) uhat(t, xi).
This is the single place the convention lives; everything else consumes it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainEscapeError, ValidationError
from .grids import ComplexField, GridSpec, forward_transform, inverse_transform, tail_mass
from .operators import (
    derivative_wrt_xi,
    modulation_M,
    spectral_derivative,
)

__all__ = ["WaveState", "free_propagate", "profile_of", "apply_J", "j_all_routes"]

TAIL_CEILING_DEFAULT = 1e-8


@dataclass
class WaveState:
    """Solution sample at absolute time t >= 1 with cached transforms."""

    t: float
    u: ComplexField
    _spectrum: ComplexField | None = field(default=None, repr=False)
    _profile_hat: ComplexField | None = field(default=None, repr=False)

    def __post_init__(self):
        if not (np.isfinite(self.t) and self.t >= 1.0):
            raise ValidationError(f"state time must satisfy t >= 1, got {self.t}")
        if not self.u.is_physical:
            raise ValidationError("WaveState.u must be a physical-side field")

    @property
    def grid(self) -> GridSpec:
        return self.u.grid

    @property
    def spectrum(self) -> ComplexField:
        if self._spectrum is None:
            self._spectrum = forward_transform(self.u)
        return self._spectrum

    @property
    def profile_hat(self) -> ComplexField:
        """Cached fhat = exp(i t xi^2 / 2) uhat."""
        if self._profile_hat is None:
            phase = np.exp(0.5j * self.t * self.grid.xi**2)
            self._profile_hat = self.spectrum.with_samples(phase * self.spectrum.samples)
        return self._profile_hat

    @classmethod
    def from_profile_hat(cls, grid: GridSpec, fhat: np.ndarray, t: float) -> "WaveState":
        spec = ComplexField(grid, np.exp(-0.5j * t * grid.xi**2) * np.asarray(fhat), "spectral")
        state = cls(t=t, u=inverse_transform(spec))
        state._spectrum = spec
        state._profile_hat = ComplexField(grid, fhat, "spectral")
        return state

    def validate(self, tol: float = 1e-12) -> None:
        """Check cache consistency (relative round-trip error below tol)."""
        ref = forward_transform(self.u).samples
        err = np.linalg.norm(self.spectrum.samples - ref)
        scale = max(np.linalg.norm(ref), 1e-300)
        if err / scale > tol:
            raise ValidationError(f"spectrum cache inconsistent: {err / scale:.3e}")


def free_propagate(state: WaveState, dt: float) -> WaveState:
    """Advance by the free flow; fixes the profile and preserves L^2 exactly."""
    if not np.isfinite(dt):
        raise ValidationError("dt must be finite")
    if state.t + dt < 1.0:
        raise ValidationError("free propagation below t = 1 is outside the model window")
    return WaveState.from_profile_hat(state.grid, state.profile_hat.samples, state.t + dt)


def profile_of(state: WaveState) -> ComplexField:
    """Physical-side profile f(t) = exp(-i t dxx / 2) u(t)."""
    return inverse_transform(state.profile_hat)


def _guard_tail(state: WaveState, ceiling: float) -> None:
    tm = tail_mass(state.u)
    if tm > ceiling:
        raise DomainEscapeError(f"tail mass {tm:.3e} above ceiling {ceiling:.1e}")


def apply_J(state: WaveState, route: str = "direct", tail_ceiling: float = TAIL_CEILING_DEFAULT) -> ComplexField:
    """J(t) u = (x + i t d_x) u, by one of three equivalent routes.

    direct       x u + i t d_x u
    conjugation  free-flow conjugate of multiplication by x (acts on the profile)
    modulation   M(t) (i t d_x) conj(M(t)) u
    """
    _guard_tail(state, tail_ceiling)
    g = state.grid
    if route == "direct":
        du = spectral_derivative(state.u)
        return state.u.with_samples(g.x * state.u.samples + 1j * state.t * du.samples)
    if route == "conjugation":
        f = profile_of(state)
        xf = f.with_samples(g.x * f.samples)
        spec = forward_transform(xf)
        return inverse_transform(spec.with_samples(np.exp(-0.5j * state.t * g.xi**2) * spec.samples))
    if route == "modulation":
        inner = modulation_M(state.t, state.u, conjugate=True)
        dinner = spectral_derivative(inner)
        return modulation_M(state.t, dinner.with_samples(1j * state.t * dinner.samples))
    raise ValidationError(f"unknown J route {route!r}")


def j_all_routes(state: WaveState, tail_ceiling: float = TAIL_CEILING_DEFAULT) -> dict[str, ComplexField]:
    return {r: apply_J(state, r, tail_ceiling) for r in ("direct", "conjugation", "modulation")}


def j_norm_identities(state: WaveState, tail_ceiling: float = TAIL_CEILING_DEFAULT) -> dict[str, float]:
    """The three equal norms ||Ju||_2, ||x f||_2, ||d_xi fhat||_2."""
    _guard_tail(state, tail_ceiling)
    g = state.grid
    ju = apply_J(state, "direct", tail_ceiling)
    f = profile_of(state)
    xf = f.with_samples(g.x * f.samples)
    dxi = derivative_wrt_xi(state.profile_hat)
    return {"Ju_L2": ju.l2(), "xf_L2": xf.l2(), "dxi_fhat_L2": dxi.l2()}
