"""The amplitude-ODE growth mechanism for the model nonlinearity i |u|^2 u.

A(t, xi) = 2 |fhat(t, xi)|^2 obeys  d_t A = t^{-1} A^2 + t^{-1} R  along the
model flow.  Dropping R gives d_t B = t^{-1} B^2 with the closed form

    B(t) = A0 / (1 - A0 log(t / T_start)),

blowing up at T_start exp(1/A0).  The threshold time T_K (where B = 4K) and
the difference D = A - B quantify how far the true amplitude can be trusted
to follow the ODE.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .diagnostics import amplitude_A, remainder_R
from .errors import BeyondBlowupError, QuadratureError, ValidationError
from .solver import NLSParams, Trajectory
from .states import WaveState

__all__ = [
    "OdeParams",
    "B_eval",
    "blowup_horizon",
    "threshold_time",
    "select_xi0",
    "GrowthReport",
    "track_growth",
    "ode_residual",
    "difference_bound_check",
]

MODEL_PARAMS = NLSParams(lambda4=1j)


@dataclass(frozen=True)
class OdeParams:
    """Reference amplitude A0 at reference time T_start, with threshold K."""

    a0: float
    t_start: float = 1.0
    k: float = 1.0

    def __post_init__(self):
        if not (self.a0 > 0 and math.isfinite(self.a0)):
            raise ValidationError("A0 must be positive and finite")
        if not (self.t_start >= 1.0 and math.isfinite(self.t_start)):
            raise ValidationError("T_start must be >= 1")
        if not self.k > self.a0 / 4.0:
            raise ValidationError("require K > A0/4 so the threshold time exceeds T_start")


def B_eval(t, params: OdeParams):
    """Closed-form ODE solution B(t) = A0 / (1 - A0 log(t/T_start))."""
    t = np.asarray(t, dtype=float)
    horizon = blowup_horizon(params)
    if np.any(t < params.t_start) or np.any(t >= horizon):
        raise BeyondBlowupError(
            f"B defined on [{params.t_start}, {horizon}); got t outside"
        )
    out = params.a0 / (1.0 - params.a0 * np.log(t / params.t_start))
    return float(out) if out.ndim == 0 else out


def blowup_horizon(params: OdeParams) -> float:
    """T_start * exp(1/A0), where B blows up."""
    return params.t_start * math.exp(1.0 / params.a0)


def threshold_time(params: OdeParams) -> float:
    """T_K = T_start * exp(1/A0 - 1/(4K)), where B reaches 4K; always < horizon."""
    return params.t_start * math.exp(1.0 / params.a0 - 1.0 / (4.0 * params.k))


@dataclass(frozen=True)
class Xi0Selection:
    xi0: float
    index: int
    a0: float
    lower_bound_ok: bool


def select_xi0(state: WaveState, epsilon: float) -> Xi0Selection:
    """argmax of A(t, xi); ties resolved to the smallest |xi| (then the negative one).

    lower_bound_ok records A0 >= eps^2 / 5, the pointwise lower-bound
    hypothesis on the reference amplitude.
    """
    a = amplitude_A(state)
    xi = state.grid.xi
    amax = float(a.max())
    cand = np.flatnonzero(a >= amax * (1.0 - 1e-12))
    order = sorted(cand, key=lambda i: (abs(xi[i]), xi[i]))
    idx = int(order[0])
    a0 = float(a[idx])
    return Xi0Selection(float(xi[idx]), idx, a0, a0 >= epsilon**2 / 5.0)


@dataclass
class GrowthReport:
    """Aligned series A, B, D = A - B, sup|R|, sup|fhat| along a model run."""

    xi0: float
    xi0_index: int
    ode: OdeParams
    times: np.ndarray
    a_series: np.ndarray
    b_series: np.ndarray  # NaN past the blow-up horizon
    d_series: np.ndarray
    r_sup_series: np.ndarray
    fhat_sup_series: np.ndarray
    crossing_time: float | None
    termination: str
    model_valid: bool

    def to_csv(self, path) -> None:
        with open(path, "w", newline="\n") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["t", "A", "B", "D", "R_sup", "fhat_sup"])
            for row in zip(self.times, self.a_series, self.b_series, self.d_series,
                           self.r_sup_series, self.fhat_sup_series):
                w.writerow([f"{v:.17g}" for v in row])

    def to_json_dict(self) -> dict:
        return {
            "xi0": self.xi0,
            "a0": self.ode.a0,
            "t_start": self.ode.t_start,
            "k": self.ode.k,
            "blowup_horizon": blowup_horizon(self.ode),
            "threshold_time": threshold_time(self.ode),
            "crossing_time": self.crossing_time,
            "termination": self.termination,
            "model_valid": self.model_valid,
        }


def _is_model(params: NLSParams, tol: float = 1e-12) -> bool:
    return (
        abs(params.lambda1) <= tol
        and abs(params.lambda2) <= tol
        and abs(params.lambda3) <= tol
        and abs(params.lambda4 - 1j) <= tol
    )


def track_growth(
    traj: Trajectory,
    params: NLSParams,
    k: float | None = None,
    t_ref: float | None = None,
) -> GrowthReport:
    """Build the A/B/D series from a trajectory, anchored at t_ref.

    xi0 and A0 are measured at the first checkpoint >= t_ref (default: the
    first checkpoint).  k defaults to 4 * A0.  The B comparison is flagged
    invalid for non-model coefficient vectors but still reported.
    """
    times = traj.times
    if t_ref is None:
        i_ref = 0
    else:
        after = np.flatnonzero(times >= t_ref * (1 - 1e-12))
        if len(after) == 0:
            raise ValidationError("t_ref is past the trajectory end")
        i_ref = int(after[0])
    state_ref = traj.state(i_ref)
    sel = select_xi0(state_ref, epsilon=1.0)
    if k is None:
        k = 4.0 * sel.a0
    ode = OdeParams(a0=sel.a0, t_start=float(times[i_ref]), k=k)
    horizon = blowup_horizon(ode)

    sub = range(i_ref, len(times))
    ts, a_s, r_s, fh_s = [], [], [], []
    for i in sub:
        st = traj.state(i)
        a = amplitude_A(st)
        ts.append(times[i])
        a_s.append(float(a[sel.index]))
        r_s.append(float(np.max(np.abs(remainder_R(st)))))
        fh_s.append(float(st.profile_hat.linf()))
    ts = np.array(ts)
    a_s = np.array(a_s)
    b_s = np.full_like(ts, np.nan)
    inside = ts < horizon * (1 - 1e-12)
    b_s[inside] = ode.a0 / (1.0 - ode.a0 * np.log(ts[inside] / ode.t_start))
    d_s = a_s - b_s

    fh2 = np.array(fh_s) ** 2
    crossing = None
    above = np.flatnonzero(fh2 >= k)
    if len(above):
        j = int(above[0])
        if j == 0:
            crossing = float(ts[0])
        else:
            # interpolate the crossing in (log t, fhat^2)
            t0, t1 = ts[j - 1], ts[j]
            y0, y1 = fh2[j - 1], fh2[j]
            frac = (k - y0) / (y1 - y0)
            crossing = float(np.exp(np.log(t0) + frac * (np.log(t1) - np.log(t0))))

    return GrowthReport(
        xi0=sel.xi0,
        xi0_index=sel.index,
        ode=ode,
        times=ts,
        a_series=a_s,
        b_series=b_s,
        d_series=d_s,
        r_sup_series=np.array(r_s),
        fhat_sup_series=np.array(fh_s),
        crossing_time=crossing,
        termination=traj.termination,
        model_valid=_is_model(params),
    )


@dataclass(frozen=True)
class ResidualReport:
    times: np.ndarray
    xi: np.ndarray
    normalized: np.ndarray  # shape (len(times), len(xi))
    at_xi0: np.ndarray

    def median_over_window(self) -> np.ndarray:
        return np.median(self.normalized, axis=1)


def ode_residual(
    traj: Trajectory,
    xi_window: tuple[float, float],
    xi0: float | None = None,
    max_dlog: float = 0.05,
    floor: float = 1e-14,
) -> ResidualReport:
    """Normalized defect of d_t A = t^{-1}(A^2 + R) along a trajectory.

    d_t A is a centered difference in log t; the defect is normalized by
    t^{-1} A^2 + floor.  Requires checkpoint spacing <= max_dlog in log t.
    """
    times = traj.times
    if len(times) < 3:
        raise QuadratureError("need at least 3 checkpoints")
    dlog = np.diff(np.log(times))
    if np.max(dlog) > max_dlog * (1 + 1e-9):
        raise QuadratureError(
            f"checkpoint spacing {np.max(dlog):.3g} in log t exceeds {max_dlog}"
        )
    lo, hi = xi_window
    grid = traj.grid
    sel = (grid.xi >= lo) & (grid.xi <= hi)
    if not np.any(sel):
        raise ValidationError("empty frequency window")
    xi = grid.xi[sel]
    a_rows, rhs_rows = [], []
    for i in range(len(times)):
        st = traj.state(i)
        a = amplitude_A(st)[sel]
        r = remainder_R(st)[sel]
        a_rows.append(a)
        rhs_rows.append((a**2 + r) / times[i])
    a_rows = np.array(a_rows)
    rhs_rows = np.array(rhs_rows)

    tau = np.log(times)
    res = []
    for i in range(1, len(times) - 1):
        dadt = (a_rows[i + 1] - a_rows[i - 1]) / (tau[i + 1] - tau[i - 1]) / times[i]
        scale = a_rows[i] ** 2 / times[i] + floor
        res.append(np.abs(dadt - rhs_rows[i]) / scale)
    res = np.array(res)
    inner_times = times[1:-1]
    if xi0 is None:
        at0 = np.full(len(inner_times), np.nan)
    else:
        j = int(np.argmin(np.abs(xi - xi0)))
        at0 = res[:, j]
    return ResidualReport(inner_times, xi, res, at0)


@dataclass(frozen=True)
class DifferenceBound:
    lhs: float
    rhs_unit: float  # the bound evaluated with constant 1
    ratio: float
    c_fit: float  # max of |D|/rhs_unit over the run


def difference_bound_check(report: GrowthReport, mu: float) -> DifferenceBound:
    """Check |D(T)| against (1/A0)(T/T_start)^{2 mu^2} mu^4 T_start^{-1/10} B(T).

    mu must dominate sup ||fhat||_inf over the report window (checked); the
    fitted constant is the max of lhs over the unit-constant bound.
    """
    valid = ~np.isnan(report.b_series)
    if not np.any(valid):
        raise ValidationError("report has no points below the blow-up horizon")
    sup_fhat = float(np.max(report.fhat_sup_series[valid]))
    if mu < sup_fhat:
        raise ValidationError(f"mu = {mu} below the achieved sup |fhat| = {sup_fhat:.6g}")
    ode = report.ode
    ts = report.times[valid]
    lhs = np.abs(report.d_series[valid])
    rhs = (
        (1.0 / ode.a0)
        * (ts / ode.t_start) ** (2.0 * mu**2)
        * mu**4
        * ode.t_start**-0.1
        * report.b_series[valid]
    )
    with np.errstate(invalid="ignore", divide="ignore"):
        ratios = np.where(rhs > 0, lhs / rhs, 0.0)
    c_fit = float(np.max(ratios)) if len(ratios) else 0.0
    return DifferenceBound(float(lhs[-1]), float(rhs[-1]),
                           float(ratios[-1]) if len(ratios) else 0.0, c_fit)
