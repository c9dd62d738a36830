"""Time integration of the cubic NLS on the profile spectrum.

The equation (i d_t + (1/2) d_xx) u = N(u) with

    N(u) = l1 conj(u)^3 + l2 u^3 + l3 |u|^2 conj(u) + l4 |u|^2 u

is integrated as d_t fhat = -i exp(i t xi^2 / 2) F[N(u)] by a classical
4-stage integrating-factor Runge-Kutta scheme; the linear flow is exact by
construction.  Step control doubles steps (two halves vs one full) with a PI
controller.  A Strang splitting is available for the gauge-invariant case
(l1 = l2 = l3 = 0) as a cross-validation scheme.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import BlowUpError, QuadratureError, ValidationError
from .grids import ComplexField, GridSpec, forward_transform, inverse_transform, tail_mass
from .states import WaveState

__all__ = [
    "NLSParams",
    "SolveConfig",
    "Checkpoint",
    "Trajectory",
    "nonlinearity_eval",
    "step",
    "integrate_fixed",
    "solve",
    "duhamel_residual",
]

_SQRT_2PI = np.sqrt(2.0 * np.pi)


@dataclass(frozen=True)
class NLSParams:
    """The four complex coefficients of the cubic nonlinearity."""

    lambda1: complex = 0.0
    lambda2: complex = 0.0
    lambda3: complex = 0.0
    lambda4: complex = 0.0

    def __post_init__(self):
        for name in ("lambda1", "lambda2", "lambda3", "lambda4"):
            v = complex(getattr(self, name))
            if not (math.isfinite(v.real) and math.isfinite(v.imag)):
                raise ValidationError(f"{name} must be finite")
            object.__setattr__(self, name, v)

    @property
    def is_gauge_only(self) -> bool:
        """True when only the gauge-invariant |u|^2 u term is present."""
        return self.lambda1 == 0 and self.lambda2 == 0 and self.lambda3 == 0

    @property
    def is_zero(self) -> bool:
        return self.is_gauge_only and self.lambda4 == 0

    def as_tuple(self) -> tuple[complex, complex, complex, complex]:
        return (self.lambda1, self.lambda2, self.lambda3, self.lambda4)


@dataclass(frozen=True)
class SolveConfig:
    t_start: float = 1.0
    t_end: float = 10.0
    dt_initial: float = 1e-2
    dt_min: float = 1e-10
    local_error_target: float = 1e-9
    blowup_ceiling: float = 1e6
    tail_ceiling: float = 1e-8
    checkpoint_dlog: float = 0.02
    scheme: str = "ifrk4"
    fixed_dt: float | None = None
    safety: float = 0.9
    min_factor: float = 0.2
    max_factor: float = 5.0

    def __post_init__(self):
        if not (1.0 <= self.t_start < self.t_end):
            raise ValidationError("require 1 <= t_start < t_end")
        if self.dt_min <= 0 or self.dt_initial <= 0:
            raise ValidationError("time steps must be positive")
        if self.scheme not in ("ifrk4", "strang"):
            raise ValidationError(f"unknown scheme {self.scheme!r}")
        if self.checkpoint_dlog <= 0:
            raise ValidationError("checkpoint_dlog must be positive")


@dataclass(frozen=True)
class Checkpoint:
    t: float
    profile_hat: np.ndarray = field(repr=False)

    def state(self, grid: GridSpec) -> WaveState:
        return WaveState.from_profile_hat(grid, self.profile_hat, self.t)


@dataclass
class Trajectory:
    grid: GridSpec
    params: NLSParams
    config: SolveConfig
    checkpoints: list[Checkpoint]
    termination: str = ""
    n_steps: int = 0
    norms: object | None = None  # NormSeries attached by the diagnostics observer

    def __post_init__(self):
        times = self.times
        if len(times) > 1 and not np.all(np.diff(times) > 0):
            raise ValidationError("checkpoint times must be strictly increasing")

    @property
    def times(self) -> np.ndarray:
        return np.array([c.t for c in self.checkpoints])

    def state(self, i: int) -> WaveState:
        return self.checkpoints[i].state(self.grid)

    def final_state(self) -> WaveState:
        return self.state(-1)


def nonlinearity_eval(u: ComplexField, params: NLSParams) -> ComplexField:
    """Pointwise cubic combination N(u) on the physical side."""
    if not u.is_physical:
        raise ValidationError("nonlinearity_eval expects a physical-side field")
    return u.with_samples(_nonlin(u.samples, params))


def _nonlin(u: np.ndarray, params: NLSParams) -> np.ndarray:
    l1, l2, l3, l4 = params.as_tuple()
    out = np.zeros_like(u)
    if l1 != 0 or l3 != 0:
        ub = np.conj(u)
        if l1 != 0:
            out += l1 * ub**3
        if l3 != 0:
            out += l3 * np.abs(u) ** 2 * ub
    if l2 != 0:
        out += l2 * u**3
    if l4 != 0:
        out += l4 * np.abs(u) ** 2 * u
    return out


class _ProfileRHS:
    """d_t fhat = -i exp(i t xi^2/2) F[N(u)], on raw spectral arrays."""

    def __init__(self, grid: GridSpec, params: NLSParams):
        self.grid = grid
        self.params = params
        self.half_xi2 = 0.5 * grid.xi**2
        self._fwd_scale = grid.dx / _SQRT_2PI
        self._inv_scale = _SQRT_2PI / grid.dx
        self._sign = grid._sign

    def u_of(self, t: float, fhat: np.ndarray) -> np.ndarray:
        uhat = np.exp(-1j * t * self.half_xi2) * fhat
        return self._inv_scale * np.fft.ifft(np.fft.ifftshift(self._sign * uhat))

    def __call__(self, t: float, fhat: np.ndarray) -> np.ndarray:
        if self.params.is_zero:
            return np.zeros_like(fhat)
        u = self.u_of(t, fhat)
        nhat = self._fwd_scale * self._sign * np.fft.fftshift(np.fft.fft(_nonlin(u, self.params)))
        return -1j * np.exp(1j * t * self.half_xi2) * nhat


def _rk4(rhs: _ProfileRHS, t: float, y: np.ndarray, h: float) -> np.ndarray:
    k1 = rhs(t, y)
    k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1)
    k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2)
    k4 = rhs(t + h, y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _strang(rhs: _ProfileRHS, t: float, y: np.ndarray, h: float, params: NLSParams) -> np.ndarray:
    """Strang split step for the gauge-only nonlinearity, on the profile spectrum.

    The linear half-steps are identities on fhat (the profile already removes
    the free flow); the middle substep solves d_t u = -i l4 |u|^2 u exactly at
    frozen linear phase t + h/2.
    """
    tm = t + 0.5 * h
    u = rhs.u_of(tm, y)
    rho = np.abs(u) ** 2
    l4 = params.lambda4
    beta, gamma = l4.imag, l4.real
    if beta == 0.0:
        rho_int = rho * h
        u_new = u * np.exp(-1j * gamma * rho_int)
    else:
        denom = 1.0 - 2.0 * beta * rho * h
        if np.any(denom <= 0):
            raise BlowUpError("amplitude substep reached its blow-up time")
        rho_int = -np.log(denom) / (2.0 * beta)
        u_new = u * np.sqrt(1.0 / denom) * np.exp(-1j * gamma * rho_int)
    uhat = rhs._fwd_scale * rhs._sign * np.fft.fftshift(np.fft.fft(u_new))
    return np.exp(1j * tm * rhs.half_xi2) * uhat


def _advance(rhs: _ProfileRHS, t: float, y: np.ndarray, h: float, scheme: str, params: NLSParams) -> np.ndarray:
    if scheme == "strang":
        if not params.is_gauge_only:
            raise ValidationError("strang scheme supports the gauge-invariant term only")
        return _strang(rhs, t, y, h, params)
    return _rk4(rhs, t, y, h)


def step(state: WaveState, dt: float, params: NLSParams, scheme: str = "ifrk4") -> WaveState:
    """Advance one step of size dt (either sign; local error O(dt^5) for ifrk4)."""
    if dt == 0 or not np.isfinite(dt):
        raise ValidationError("dt must be nonzero and finite")
    rhs = _ProfileRHS(state.grid, params)
    y = _advance(rhs, state.t, state.profile_hat.samples, dt, scheme, params)
    if not np.all(np.isfinite(y.view(np.float64))):
        raise BlowUpError("non-finite values after step")
    return WaveState.from_profile_hat(state.grid, y, state.t + dt)


def integrate_fixed(
    state: WaveState, params: NLSParams, t_end: float, n_steps: int, scheme: str = "ifrk4"
) -> WaveState:
    """Fixed-step integration from state.t to t_end (order-measurement mode)."""
    if n_steps <= 0:
        raise ValidationError("n_steps must be positive")
    rhs = _ProfileRHS(state.grid, params)
    h = (t_end - state.t) / n_steps
    t, y = state.t, state.profile_hat.samples.copy()
    for _ in range(n_steps):
        y = _advance(rhs, t, y, h, scheme, params)
        t += h
    if not np.all(np.isfinite(y.view(np.float64))):
        raise BlowUpError("non-finite values during fixed integration")
    return WaveState.from_profile_hat(state.grid, y, t_end)


def _checkpoint_times(cfg: SolveConfig) -> np.ndarray:
    """Geometric times from t_start to t_end (uniform in log t)."""
    n = int(np.floor(np.log(cfg.t_end / cfg.t_start) / cfg.checkpoint_dlog))
    ts = cfg.t_start * np.exp(cfg.checkpoint_dlog * np.arange(n + 1))
    if ts[-1] < cfg.t_end * (1 - 1e-12):
        ts = np.append(ts, cfg.t_end)
    else:
        ts[-1] = cfg.t_end
    return ts


def solve(u1: ComplexField, params: NLSParams, config: SolveConfig, observers: tuple = ()) -> Trajectory:
    """Integrate from t_start with u(t_start) = u1 until t_end or early termination.

    Termination reasons: completed | blow-up | domain-escape | step-underflow.
    Observers are called with the WaveState at every checkpoint.
    """
    grid = u1.grid
    state0 = WaveState(t=config.t_start, u=u1)
    rhs = _ProfileRHS(grid, params)
    y = state0.profile_hat.samples.copy()
    t = config.t_start
    tol = config.local_error_target
    h = min(config.dt_initial, config.t_end - config.t_start)
    err_prev = tol

    checkpoints: list[Checkpoint] = []
    traj = Trajectory(grid, params, config, checkpoints)
    n_steps = 0

    def record(tc: float, yc: np.ndarray) -> str | None:
        ck = Checkpoint(tc, yc.copy())
        checkpoints.append(ck)
        st = ck.state(grid)
        if st.u.linf() > config.blowup_ceiling:
            return "blow-up"
        if tail_mass(st.u) > config.tail_ceiling:
            return "domain-escape"
        for obs in observers:
            obs(st)
        return None

    reason = record(t, y)
    if reason is not None:
        traj.termination = reason
        traj.n_steps = 0
        return traj

    targets = _checkpoint_times(config)[1:]
    peak_bound_ceiling = config.blowup_ceiling * _SQRT_2PI  # coarse |u|_inf bound trigger

    for target in targets:
        while t < target * (1 - 1e-14):
            if config.fixed_dt is not None:
                h_try = min(config.fixed_dt, target - t)
                y_new = _advance(rhs, t, y, h_try, config.scheme, params)
                if not np.all(np.isfinite(y_new.view(np.float64))):
                    traj.termination = "blow-up"
                    traj.n_steps = n_steps
                    return traj
                y, t = y_new, t + h_try
                n_steps += 1
                continue

            h_try = min(h, target - t)
            full = _advance(rhs, t, y, h_try, config.scheme, params)
            half = _advance(rhs, t, y, 0.5 * h_try, config.scheme, params)
            half = _advance(rhs, t + 0.5 * h_try, half, 0.5 * h_try, config.scheme, params)
            finite = np.all(np.isfinite(full.view(np.float64))) and np.all(
                np.isfinite(half.view(np.float64))
            )
            if not finite:
                if h_try <= 4 * config.dt_min:
                    traj.termination = "blow-up"
                    traj.n_steps = n_steps
                    return traj
                h = 0.25 * h_try
                continue

            scale = max(float(np.linalg.norm(y)), 1e-300)
            err = float(np.linalg.norm(half - full)) / scale
            if err <= tol:
                t += h_try
                y = half
                n_steps += 1
                if err == 0.0:
                    fac = config.max_factor
                else:
                    # PI controller (order 4 => exponent 1/5), Soederlind weights.
                    fac = config.safety * (tol / err) ** 0.14 * (tol / err_prev) ** 0.08
                    fac = min(config.max_factor, max(config.min_factor, fac))
                err_prev = max(err, 1e-300)
                h = max(h_try * fac, config.dt_min)
                # cheap amplitude tripwire; exact check happens per checkpoint
                if float(np.sum(np.abs(y))) * rhs.grid.dxi / _SQRT_2PI > peak_bound_ceiling:
                    u_now = rhs.u_of(t, y)
                    if float(np.max(np.abs(u_now))) > config.blowup_ceiling:
                        record(t, y)
                        traj.termination = "blow-up"
                        traj.n_steps = n_steps
                        return traj
            else:
                fac = max(config.min_factor, config.safety * (tol / err) ** 0.2)
                h_new = h_try * fac
                if h_new < config.dt_min:
                    traj.termination = "step-underflow"
                    traj.n_steps = n_steps
                    return traj
                h = h_new

        reason = record(t, y)
        if reason is not None:
            traj.termination = reason
            traj.n_steps = n_steps
            return traj

    traj.termination = "completed"
    traj.n_steps = n_steps
    return traj


def _simpson_nonuniform(xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Composite Simpson on non-uniform nodes; ys has shape (len(xs), ...)."""
    n = len(xs)
    if n < 2:
        raise QuadratureError("need at least two quadrature nodes")
    total = np.zeros_like(ys[0])
    i = 0
    while i + 2 <= n - 1:
        h0 = xs[i + 1] - xs[i]
        h1 = xs[i + 2] - xs[i + 1]
        hs = h0 + h1
        w0 = hs * (2.0 * h0 - h1) / (6.0 * h0)
        w1 = hs**3 / (6.0 * h0 * h1)
        w2 = hs * (2.0 * h1 - h0) / (6.0 * h1)
        total = total + w0 * ys[i] + w1 * ys[i + 1] + w2 * ys[i + 2]
        i += 2
    if i == n - 2:  # one interval left: trapezoid
        total = total + 0.5 * (xs[-1] - xs[-2]) * (ys[-2] + ys[-1])
    return total


def duhamel_residual(
    traj: Trajectory, params: NLSParams, sample_times: list[float], min_density: float = 32.0
) -> np.ndarray:
    """L^2 defect of the integral (Duhamel) form at the given sample times.

    For each T: || fhat(T) - fhat(t0) + i * Simpson_{t0}^{T} exp(i s xi^2/2) F[N(u(s))] ds ||_2,
    an independent validation of the stepper.  Requires at least `min_density`
    checkpoints per unit log-time on every sample window.
    """
    grid = traj.grid
    times = traj.times
    rhs = _ProfileRHS(grid, params)
    gs = []
    for ck in traj.checkpoints:
        u = rhs.u_of(ck.t, ck.profile_hat)
        nhat = rhs._fwd_scale * rhs._sign * np.fft.fftshift(np.fft.fft(_nonlin(u, params)))
        gs.append(np.exp(1j * ck.t * rhs.half_xi2) * nhat)
    gs = np.array(gs)
    fhat0 = traj.checkpoints[0].profile_hat

    out = []
    for T in sample_times:
        idx = int(np.argmin(np.abs(times - T)))
        if abs(times[idx] - T) > 1e-9 * max(1.0, T):
            raise QuadratureError(f"sample time {T} is not a checkpoint time")
        if idx < 2:
            raise QuadratureError("sample window contains too few checkpoints")
        logspan = np.log(times[idx] / times[0])
        if logspan > 0 and (idx + 1) / logspan < min_density:
            raise QuadratureError("checkpoints too sparse for Duhamel quadrature")
        integral = _simpson_nonuniform(times[: idx + 1], gs[: idx + 1])
        defect = traj.checkpoints[idx].profile_hat - fhat0 + 1j * integral
        out.append(float(np.sqrt(grid.dxi) * np.linalg.norm(defect)))
    return np.array(out)
