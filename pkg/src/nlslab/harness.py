"""Experiment harness: scenario presets, configuration, persistence, sweeps.

Config files are flat INI (key = value sections); every run writes an output
directory  <outdir>/<scenario>/<label>/  containing manifest.json, norms.csv,
checkpoints/, and for growth scenarios growth.csv + growth.json.  CSV output
is deterministic (17 significant digits, LF endings) so identical config and
seed give bitwise-identical files.
"""

from __future__ import annotations

import configparser
import json
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import __version__
from .diagnostics import DiagnosticsObserver, LifespanFit, fit_lifespan, fit_power_law, sigma_norm
from .errors import ValidationError
from .grids import ComplexField, GridSpec, forward_transform
from .growth import GrowthReport, select_xi0, track_growth
from .solver import NLSParams, SolveConfig, Trajectory, solve
from .states import WaveState

__all__ = [
    "DataSpec",
    "ExperimentConfig",
    "RunManifest",
    "scenario_presets",
    "make_initial_data",
    "load_config",
    "run_single",
    "sweep_epsilon",
    "SweepResult",
]

log = logging.getLogger("nlslab")


@dataclass(frozen=True)
class DataSpec:
    """Initial-data family: gaussian{amplitude, width} or fourier-plateau{height, width}."""

    family: str = "gaussian"
    amplitude: float = 0.5
    width: float = 1.0
    center: float = 0.0
    normalize_sigma: float | None = None  # if set, rescale so ||u1||_Sigma equals it

    def __post_init__(self):
        if self.family not in ("gaussian", "fourier-plateau"):
            raise ValidationError(f"unknown data family {self.family!r}")
        if self.width <= 0 or self.amplitude < 0:
            raise ValidationError("data width must be positive and amplitude nonnegative")


def make_initial_data(grid: GridSpec, spec: DataSpec) -> ComplexField:
    if spec.family == "gaussian":
        u = spec.amplitude * np.exp(-((grid.x - spec.center) ** 2) / (2.0 * spec.width**2))
        fld = ComplexField(grid, u.astype(np.complex128))
    else:  # fourier-plateau: flat spectral plateau of the bump shape
        from .bumps import phi_bump
        from .grids import inverse_transform

        spec_samples = spec.amplitude * phi_bump(grid.xi / spec.width)
        fld = inverse_transform(ComplexField(grid, spec_samples.astype(np.complex128), "spectral"))
        if spec.center != 0.0:
            fld = fld.with_samples(fld.samples * np.exp(1j * 0))  # plateau family is centered
    if spec.normalize_sigma is not None:
        s = sigma_norm(fld, tail_ceiling=1.0)
        if s == 0:
            raise ValidationError("cannot normalize a zero field")
        fld = fld.with_samples(fld.samples * (spec.normalize_sigma / s))
    return fld


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: str
    grid: GridSpec
    params: NLSParams
    data: DataSpec
    solve: SolveConfig
    outdir: str = "runs"
    label: str | None = None  # run-directory name; default: a timestamp
    seed: int = 0
    growth_t_ref: float = 1.5  # ODE reference (warm-up) time for growth tracking
    growth_k: float | None = None  # None -> 4 * A0 rule
    store_checkpoints: bool = True

    def run_dir(self) -> str:
        label = self.label or time.strftime("%Y%m%dT%H%M%S") + f"-{os.getpid()}"
        return os.path.join(self.outdir, self.scenario, label)


_PRESET_LAMBDAS = {
    "free": (0, 0, 0, 0),
    "decay": (0, 0, 0, 1),
    "growth": (0, 0, 0, 1j),
    "dissipative": (0, 0, 0, -1j),
    "nongauge-ubar3": (1, 0, 0, 0),
    "nongauge-u3": (0, 1, 0, 0),
    "nongauge-mixed": (1, 1, 1, 1),
}


def scenario_presets() -> dict[str, ExperimentConfig]:
    """Named scenario presets with documented coefficient vectors and grids.

    decay runs on a long box (the t^{-1/2} window [10, 1e3] needs spreading
    room ~ xi_max * t); growth and its relatives use the compact box where
    the amplitude mechanism lives at t <= 20.
    """
    presets: dict[str, ExperimentConfig] = {}

    def cfg(name, grid, data, solve, **kw):
        l1, l2, l3, l4 = _PRESET_LAMBDAS[name]
        presets[name] = ExperimentConfig(
            scenario=name,
            grid=grid,
            params=NLSParams(l1, l2, l3, l4),
            data=data,
            solve=solve,
            **kw,
        )

    small = GridSpec(2048, 200.0)
    standard = GridSpec(4096, 400.0)
    long_box = GridSpec(8192, 4500.0)

    cfg("free", small,
        DataSpec(amplitude=1.0, width=1.0),
        SolveConfig(t_end=10.0, local_error_target=1e-10))
    cfg("decay", long_box,
        DataSpec(amplitude=1.0, width=2.5, normalize_sigma=0.1),
        SolveConfig(t_end=1000.0, local_error_target=1e-10, checkpoint_dlog=0.02))
    cfg("growth", small,
        DataSpec(amplitude=0.5, width=1.0),
        SolveConfig(t_end=25.0, local_error_target=1e-10, checkpoint_dlog=0.01,
                    blowup_ceiling=50.0),
        growth_t_ref=1.5)
    cfg("dissipative", standard,
        DataSpec(amplitude=0.5, width=4.5),
        SolveConfig(t_end=100.0, local_error_target=1e-10, checkpoint_dlog=0.02))
    for name in ("nongauge-ubar3", "nongauge-u3", "nongauge-mixed"):
        cfg(name, small,
            DataSpec(amplitude=1.0, width=1.0, normalize_sigma=0.1),
            SolveConfig(t_end=100.0, local_error_target=1e-10))
    return presets


def _parse_complex(s: str) -> complex:
    try:
        return complex(s.replace(" ", ""))
    except ValueError as e:
        raise ValidationError(f"cannot parse complex number {s!r}") from e


def load_config(path: str) -> ExperimentConfig:
    """Parse an INI config file into an ExperimentConfig (preset + overrides)."""
    if not os.path.exists(path):
        raise FileNotFoundError(path)
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    cp.read(path)
    if "scenario" not in cp or "name" not in cp["scenario"]:
        raise ValidationError("config must have a [scenario] section with a name")
    name = cp["scenario"]["name"]
    presets = scenario_presets()
    if name not in presets:
        raise ValidationError(f"unknown scenario {name!r}; known: {sorted(presets)}")
    base = presets[name]

    grid = base.grid
    if "grid" in cp:
        g = cp["grid"]
        grid = GridSpec(g.getint("num_points", grid.num_points),
                        g.getfloat("domain_length", grid.domain_length))

    params = base.params
    if "params" in cp:
        p = cp["params"]
        params = NLSParams(
            _parse_complex(p.get("lambda1", str(params.lambda1))),
            _parse_complex(p.get("lambda2", str(params.lambda2))),
            _parse_complex(p.get("lambda3", str(params.lambda3))),
            _parse_complex(p.get("lambda4", str(params.lambda4))),
        )

    data = base.data
    if "data" in cp:
        d = cp["data"]
        norm = d.get("normalize_sigma", None)
        data = DataSpec(
            family=d.get("family", data.family),
            amplitude=d.getfloat("amplitude", data.amplitude),
            width=d.getfloat("width", data.width),
            center=d.getfloat("center", data.center),
            normalize_sigma=float(norm) if norm not in (None, "") else data.normalize_sigma,
        )

    sc = base.solve
    if "solve" in cp:
        s = cp["solve"]
        sc = SolveConfig(
            t_start=s.getfloat("t_start", sc.t_start),
            t_end=s.getfloat("t_end", sc.t_end),
            dt_initial=s.getfloat("dt_initial", sc.dt_initial),
            dt_min=s.getfloat("dt_min", sc.dt_min),
            local_error_target=s.getfloat("local_error_target", sc.local_error_target),
            blowup_ceiling=s.getfloat("blowup_ceiling", sc.blowup_ceiling),
            tail_ceiling=s.getfloat("tail_ceiling", sc.tail_ceiling),
            checkpoint_dlog=s.getfloat("checkpoint_dlog", sc.checkpoint_dlog),
            scheme=s.get("scheme", sc.scheme),
        )

    kw = {}
    if "scenario" in cp:
        sec = cp["scenario"]
        kw["outdir"] = sec.get("outdir", base.outdir)
        kw["label"] = sec.get("label", None) or None
        kw["seed"] = sec.getint("seed", base.seed)
    if "growth" in cp:
        gsec = cp["growth"]
        kw["growth_t_ref"] = gsec.getfloat("t_ref", base.growth_t_ref)
        kraw = gsec.get("k", None)
        kw["growth_k"] = float(kraw) if kraw not in (None, "") else None
    return replace(base, grid=grid, params=params, data=data, solve=sc, **kw)


@dataclass
class RunManifest:
    scenario: str
    termination: str
    run_dir: str
    files: list[str]
    flags: dict
    stats: dict
    config: dict

    def to_json_dict(self) -> dict:
        return {
            "version": __version__,
            "scenario": self.scenario,
            "termination": self.termination,
            "files": self.files,
            "flags": self.flags,
            "stats": self.stats,
            "config": self.config,
        }


def _atomic_write_text(path: str, text: str) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w", newline="\n") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _config_echo(config: ExperimentConfig) -> dict:
    return {
        "scenario": config.scenario,
        "grid": {"num_points": config.grid.num_points, "domain_length": config.grid.domain_length},
        "params": {f"lambda{i}": [v.real, v.imag] for i, v in enumerate(config.params.as_tuple(), 1)},
        "data": {
            "family": config.data.family,
            "amplitude": config.data.amplitude,
            "width": config.data.width,
            "center": config.data.center,
            "normalize_sigma": config.data.normalize_sigma,
        },
        "solve": {
            "t_start": config.solve.t_start,
            "t_end": config.solve.t_end,
            "local_error_target": config.solve.local_error_target,
            "blowup_ceiling": config.solve.blowup_ceiling,
            "tail_ceiling": config.solve.tail_ceiling,
            "checkpoint_dlog": config.solve.checkpoint_dlog,
            "scheme": config.solve.scheme,
        },
        "seed": config.seed,
        "growth_t_ref": config.growth_t_ref,
        "growth_k": config.growth_k,
    }


def _hypothesis_flags(u1: ComplexField, config: ExperimentConfig) -> dict:
    """Achieved data-hypothesis quantities: the Sigma size, the spectral-peak
    ratio (>= 1/2 hypothesis), and the reference-amplitude lower bound."""
    eps_sigma = sigma_norm(u1, tail_ceiling=1.0)
    uhat_peak = forward_transform(u1).linf()
    state = WaveState(t=config.solve.t_start, u=u1)
    sel = select_xi0(state, eps_sigma)
    return {
        "sigma_norm": eps_sigma,
        "uhat_peak": uhat_peak,
        "peak_ratio": uhat_peak / eps_sigma if eps_sigma > 0 else 0.0,
        "peak_ratio_ok": bool(eps_sigma > 0 and uhat_peak >= 0.5 * eps_sigma),
        "a0_at_start": sel.a0,
        "pw_lb_ratio": sel.a0 / eps_sigma**2 if eps_sigma > 0 else 0.0,
        "pw_lb_ok": bool(sel.lower_bound_ok),
        "xi0_at_start": sel.xi0,
    }


def run_single(config: ExperimentConfig) -> RunManifest:
    """Execute one scenario run and persist its outputs atomically.

    Early solver terminations are recorded in the manifest, not raised.
    """
    run_dir = config.run_dir()
    os.makedirs(run_dir, exist_ok=True)
    u1 = make_initial_data(config.grid, config.data)
    flags = _hypothesis_flags(u1, config)

    is_growth = config.params.lambda4.imag > 0 and config.params.is_gauge_only
    xi0 = flags["xi0_at_start"] if is_growth else None
    observer = DiagnosticsObserver(xi0=xi0)
    t0 = time.time()
    traj = solve(u1, config.params, config.solve, observers=(observer,))
    wall = time.time() - t0
    traj.norms = observer.series

    files = []
    norms_path = os.path.join(run_dir, "norms.csv")
    observer.series.to_csv(norms_path + ".tmp")
    os.replace(norms_path + ".tmp", norms_path)
    files.append("norms.csv")

    if config.store_checkpoints:
        ck_dir = os.path.join(run_dir, "checkpoints")
        os.makedirs(ck_dir, exist_ok=True)
        np.savez_compressed(
            os.path.join(ck_dir, "trajectory.npz"),
            times=traj.times,
            profile_hats=np.array([c.profile_hat for c in traj.checkpoints]),
            u1=u1.samples,
            num_points=config.grid.num_points,
            domain_length=config.grid.domain_length,
            lambdas=np.array(config.params.as_tuple()),
        )
        files.append("checkpoints/trajectory.npz")

    growth_summary = None
    if is_growth and traj.times[-1] > config.growth_t_ref:
        report = track_growth(traj, config.params, k=config.growth_k, t_ref=config.growth_t_ref)
        report.to_csv(os.path.join(run_dir, "growth.csv"))
        _atomic_write_text(
            os.path.join(run_dir, "growth.json"),
            json.dumps(report.to_json_dict(), indent=2, sort_keys=True) + "\n",
        )
        files += ["growth.csv", "growth.json"]
        growth_summary = report.to_json_dict()

    stats = {
        "wall_seconds": wall,
        "n_steps": traj.n_steps,
        "n_checkpoints": len(traj.checkpoints),
        "t_final": float(traj.times[-1]),
    }
    if config.scenario == "decay" and traj.termination == "completed":
        fit = fit_power_law(observer.series.t, observer.series.array("Linf"), (10.0, config.solve.t_end))
        stats["decay_slope"] = fit.slope
    if growth_summary is not None:
        stats["growth"] = growth_summary

    manifest = RunManifest(
        scenario=config.scenario,
        termination=traj.termination,
        run_dir=run_dir,
        files=files,
        flags=flags,
        stats=stats,
        config=_config_echo(config),
    )
    _atomic_write_text(
        os.path.join(run_dir, "manifest.json"),
        json.dumps(manifest.to_json_dict(), indent=2, sort_keys=True) + "\n",
    )
    log.info("run %s finished: %s (%.1fs)", run_dir, traj.termination, wall)
    return manifest


# ---------------------------------------------------------------------------
# epsilon sweeps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SweepEntry:
    eps: float
    crossing_time: float | None
    a0: float
    termination: str
    error: str | None = None


@dataclass
class SweepResult:
    entries: list[SweepEntry]
    fit: LifespanFit | None

    def crossing_pairs(self) -> list[tuple[float, float]]:
        return [(e.eps, e.crossing_time) for e in self.entries if e.crossing_time is not None]


def _default_growth_runner(args: tuple) -> dict:
    """Run one epsilon of a growth sweep; module-level for process pools."""
    config_echo, eps = args
    presets = scenario_presets()
    base = presets["growth"]
    cfg = replace(
        base,
        grid=GridSpec(config_echo["num_points"], config_echo["domain_length"]),
        data=replace(base.data, amplitude=eps),
        solve=replace(base.solve, t_end=config_echo["t_end"]),
        growth_t_ref=config_echo["t_ref"],
        growth_k=config_echo["k"],
        store_checkpoints=False,
        outdir=config_echo["outdir"],
        label=f"eps_{eps:g}",
    )
    m = run_single(cfg)
    g = m.stats.get("growth") or {}
    return {
        "eps": eps,
        "crossing_time": g.get("crossing_time"),
        "a0": g.get("a0", 0.0),
        "termination": m.termination,
    }


def sweep_epsilon(
    base_config: ExperimentConfig,
    eps_list: list[float],
    runner=None,
    max_workers: int | None = None,
) -> SweepResult:
    """Run the growth scenario per epsilon (concurrently), collect crossing times.

    A failing run is isolated into its entry; aggregation is sorted by eps.
    `runner` is injectable for testing; it receives (echo, eps) and returns a
    dict with eps / crossing_time / a0 / termination.
    """
    if not eps_list:
        raise ValidationError("eps_list must be nonempty")
    echo = {
        "num_points": base_config.grid.num_points,
        "domain_length": base_config.grid.domain_length,
        "t_end": base_config.solve.t_end,
        "t_ref": base_config.growth_t_ref,
        "k": base_config.growth_k,
        "outdir": base_config.outdir,
    }
    runner = runner or _default_growth_runner
    jobs = [(echo, float(e)) for e in eps_list]
    workers = max_workers if max_workers is not None else min(len(jobs), os.cpu_count() or 1)

    results: list[dict] = []
    if workers <= 1:
        for job in jobs:
            results.append(_guarded(runner, job))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_guard_wrapper, [(runner, j) for j in jobs]))

    entries = []
    for r in sorted(results, key=lambda r: r["eps"]):
        entries.append(
            SweepEntry(
                eps=r["eps"],
                crossing_time=r.get("crossing_time"),
                a0=r.get("a0", 0.0),
                termination=r.get("termination", "error"),
                error=r.get("error"),
            )
        )
    pairs = [(e.eps, e.crossing_time) for e in entries if e.crossing_time is not None]
    fit = fit_lifespan(pairs) if len(pairs) >= 4 else None
    return SweepResult(entries, fit)


def _guarded(runner, job) -> dict:
    try:
        return runner(job)
    except Exception as e:  # isolate per-run failures
        return {"eps": job[1], "termination": "error", "error": f"{type(e).__name__}: {e}"}


def _guard_wrapper(packed):
    runner, job = packed
    return _guarded(runner, job)


def write_sweep_csv(result: SweepResult, path: str) -> None:
    import csv as _csv

    with open(path, "w", newline="\n") as fh:
        w = _csv.writer(fh, lineterminator="\n")
        w.writerow(["eps", "crossing_time", "a0", "termination"])
        for e in result.entries:
            w.writerow([
                f"{e.eps:.17g}",
                "" if e.crossing_time is None else f"{e.crossing_time:.17g}",
                f"{e.a0:.17g}",
                e.termination,
            ])
