"""Norm and decay functionals sampled along trajectories.

Implements the weighted data norm Sigma = ||u||_2 + ||d_x u||_2 + ||x u||_2,
the bootstrap norm X(t) = (1/2)[||fhat||_inf + t^{-1/4} ||Ju||_2], the decay
quantities entering the main a-priori bounds, the squared-amplitude field
A(t, xi) = 2 |fhat|^2 with its ODE remainder R, and least-squares fits for
decay exponents and lifespan scaling.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .grids import ComplexField, forward_transform, inverse_transform, tail_mass
from .operators import modulation_M, spectral_derivative
from .states import TAIL_CEILING_DEFAULT, WaveState, apply_J, profile_of

__all__ = [
    "NORM_NAMES",
    "NormSeries",
    "DecayFit",
    "LifespanFit",
    "sigma_norm",
    "x_norm",
    "decay_quantities",
    "amplitude_A",
    "remainder_R",
    "fit_power_law",
    "fit_lifespan",
    "DiagnosticsObserver",
]

NORM_NAMES = (
    "sigma",
    "X",
    "L2",
    "Linf",
    "fhat_Linf",
    "Ju_L2",
    "xf_L2",
    "dxi_fhat_L2",
    "t_half_Linf",
    "A_at_xi0",
    "R_Linf",
)


@dataclass
class NormSeries:
    """Aligned time series of named diagnostic norms."""

    names: tuple[str, ...]
    times: list[float]
    values: dict[str, list[float]]

    @classmethod
    def empty(cls, names: tuple[str, ...]) -> "NormSeries":
        unknown = set(names) - set(NORM_NAMES)
        if unknown:
            raise ValidationError(f"unknown norm names: {sorted(unknown)}")
        return cls(tuple(names), [], {n: [] for n in names})

    def append(self, t: float, record: dict[str, float]) -> None:
        if self.times and t <= self.times[-1]:
            raise ValidationError("times must be strictly increasing")
        for n in self.names:
            v = float(record[n])
            if not (math.isfinite(v) and v >= 0):
                raise ValidationError(f"norm {n} must be finite and nonnegative, got {v}")
            self.values[n].append(v)
        self.times.append(float(t))

    def array(self, name: str) -> np.ndarray:
        return np.array(self.values[name])

    @property
    def t(self) -> np.ndarray:
        return np.array(self.times)

    def to_csv(self, path) -> None:
        """Column 1 't', then one column per norm; 17 significant digits, LF endings."""
        with open(path, "w", newline="\n") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(("t",) + self.names)
            for i, t in enumerate(self.times):
                w.writerow([f"{t:.17g}"] + [f"{self.values[n][i]:.17g}" for n in self.names])

    @classmethod
    def from_csv(cls, path) -> "NormSeries":
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        header = rows[0]
        if header[0] != "t":
            raise ValidationError("first CSV column must be 't'")
        names = tuple(header[1:])
        out = cls.empty(names)
        for row in rows[1:]:
            out.append(float(row[0]), dict(zip(names, map(float, row[1:]))))
        return out


def _guard(fld: ComplexField, ceiling: float) -> None:
    from .errors import DomainEscapeError

    tm = tail_mass(fld)
    if tm > ceiling:
        raise DomainEscapeError(f"tail mass {tm:.3e} above ceiling {ceiling:.1e}")


def sigma_norm(fld: ComplexField, tail_ceiling: float = TAIL_CEILING_DEFAULT) -> float:
    """||u||_2 + ||d_x u||_2 + ||x u||_2 (spectral derivative, nodal x-weight)."""
    if not fld.is_physical:
        raise ValidationError("sigma_norm expects a physical-side field")
    _guard(fld, tail_ceiling)
    du = spectral_derivative(fld)
    xu = fld.with_samples(fld.grid.x * fld.samples)
    return fld.l2() + du.l2() + xu.l2()


def x_norm(state: WaveState, tail_ceiling: float = TAIL_CEILING_DEFAULT) -> float:
    """X(t) = (1/2)[ ||fhat||_inf + t^{-1/4} ||Ju||_2 ]."""
    ju = apply_J(state, "direct", tail_ceiling)
    return 0.5 * (state.profile_hat.linf() + state.t**-0.25 * ju.l2())


def decay_quantities(state: WaveState, tail_ceiling: float = TAIL_CEILING_DEFAULT) -> dict[str, float]:
    """The scaled norms tracked by the decay and improved-bound estimates."""
    ju_l2 = apply_J(state, "direct", tail_ceiling).l2()
    t = state.t
    return {
        "fhat_Linf": state.profile_hat.linf(),
        "t_half_Linf": math.sqrt(t) * state.u.linf(),
        "t_quarter_Ju": t**-0.25 * ju_l2,
        "t_tenth_Ju": t**-0.1 * ju_l2,
        "t_tenth_L2": t**-0.1 * state.u.l2(),
    }


def amplitude_A(state: WaveState) -> np.ndarray:
    """A(t, xi) = 2 |fhat(t, xi)|^2 on the frequency grid."""
    return 2.0 * np.abs(state.profile_hat.samples) ** 2


def remainder_R(state: WaveState) -> np.ndarray:
    """Remainder R(t, xi) of the amplitude ODE  d_t A = t^{-1} A^2 + t^{-1} R.

    R = 4 Re{ conj(fhat) [ (F conj(M) F^{-1} - 1) G + G - |fhat|^2 fhat ] },
    G = |F M f|^2 F M f.  The first and middle G cancel, so only the
    modulated cube pulled back through conj(M) survives against |fhat|^2 fhat.
    Dilation-free: only F and the modulation M enter.
    """
    fhat = state.profile_hat
    f = inverse_transform(fhat)
    mf = modulation_M(state.t, f)
    g = forward_transform(mf).samples
    cube = np.abs(g) ** 2 * g
    back = inverse_transform(fhat.with_samples(cube))
    w = forward_transform(modulation_M(state.t, back, conjugate=True)).samples
    fh = fhat.samples
    return 4.0 * np.real(np.conj(fh) * (w - np.abs(fh) ** 2 * fh))


@dataclass(frozen=True)
class DecayFit:
    slope: float
    intercept: float
    residual_rms: float
    window: tuple[float, float]

    def __post_init__(self):
        lo, hi = self.window
        if not lo < hi:
            raise ValidationError("fit window must satisfy t_lo < t_hi")
        if self.residual_rms < 0:
            raise ValidationError("residual must be nonnegative")


def fit_power_law(times: np.ndarray, values: np.ndarray, window: tuple[float, float]) -> DecayFit:
    """Least-squares fit of log(value) against log(t) on the window."""
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    lo, hi = window
    mask = (times >= lo) & (times <= hi)
    if np.count_nonzero(mask) < 10:
        raise ValidationError("need at least 10 samples in the fit window")
    if np.any(values[mask] <= 0):
        raise ValidationError("power-law fit requires positive values")
    x = np.log(times[mask])
    y = np.log(values[mask])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    return DecayFit(float(slope), float(intercept), float(np.sqrt(np.mean(resid**2))), (lo, hi))


@dataclass(frozen=True)
class LifespanFit:
    slope: float
    c_fit: float
    intercept: float
    r_squared: float


def fit_lifespan(pairs: list[tuple[float, float]]) -> LifespanFit:
    """Fit log(T_cross) = slope * eps^{-2} + b; slope = 1/c in T = exp(1/(c eps^2))."""
    if len(pairs) < 4:
        raise ValidationError("need at least 4 (eps, T_cross) pairs")
    eps = np.array([p[0] for p in pairs], dtype=float)
    tc = np.array([p[1] for p in pairs], dtype=float)
    if np.any(tc <= 1.0):
        raise ValidationError("crossing times must exceed 1")
    x = eps**-2.0
    if np.std(x) < 1e-12 * max(1.0, np.mean(np.abs(x))):
        raise ValidationError("degenerate eps spread")
    y = np.log(tc)
    slope, intercept = np.polyfit(x, y, 1)
    pred = slope * x + intercept
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    if slope == 0:
        raise ValidationError("degenerate fit: zero slope")
    return LifespanFit(float(slope), float(1.0 / slope), float(intercept), float(r2))


class DiagnosticsObserver:
    """Collects a NormSeries along a trajectory (pass as a solve() observer).

    A_at_xi0 / R_Linf are recorded only when xi0 is given (growth scenarios).
    """

    def __init__(self, names: tuple[str, ...] | None = None, xi0: float | None = None,
                 tail_ceiling: float = 1.0):
        if names is None:
            names = ("sigma", "X", "L2", "Linf", "fhat_Linf", "Ju_L2", "xf_L2",
                     "dxi_fhat_L2", "t_half_Linf")
            if xi0 is not None:
                names = names + ("A_at_xi0", "R_Linf")
        self.series = NormSeries.empty(names)
        self.xi0 = xi0
        # norms remain well-defined past moderate spreading; the solver owns escape policy
        self.tail_ceiling = tail_ceiling

    def __call__(self, state: WaveState) -> None:
        from .states import j_norm_identities

        rec: dict[str, float] = {}
        need = set(self.series.names)
        if {"Ju_L2", "xf_L2", "dxi_fhat_L2"} & need:
            rec.update(j_norm_identities(state, self.tail_ceiling))
        if "sigma" in need:
            rec["sigma"] = sigma_norm(state.u, self.tail_ceiling)
        if "X" in need:
            rec["X"] = 0.5 * (state.profile_hat.linf() + state.t**-0.25 * rec.get("Ju_L2", apply_J(state, "direct", self.tail_ceiling).l2()))
        rec.setdefault("L2", state.u.l2())
        rec.setdefault("Linf", state.u.linf())
        rec.setdefault("fhat_Linf", state.profile_hat.linf())
        rec.setdefault("t_half_Linf", math.sqrt(state.t) * state.u.linf())
        if "A_at_xi0" in need:
            idx = int(np.argmin(np.abs(state.grid.xi - self.xi0)))
            rec["A_at_xi0"] = float(amplitude_A(state)[idx])
        if "R_Linf" in need:
            rec["R_Linf"] = float(np.max(np.abs(remainder_R(state))))
        self.series.append(state.t, rec)
