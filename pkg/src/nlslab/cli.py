"""Command-line surface.

Subcommands: simulate, sweep, resonance, trilinear, ode-compare, norms.
Exit codes: 0 success, 1 validation error, 2 runtime termination-with-reason,
3 IO failure.  Messages go to standard error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys

import numpy as np

from .errors import NlsLabError, ValidationError

log = logging.getLogger("nlslab")

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_TERMINATED = 2
EXIT_IO = 3


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nlslab", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run one scenario from a config file")
    sim.add_argument("--config", required=True)

    sw = sub.add_parser("sweep", help="epsilon sweep of the growth scenario")
    sw.add_argument("--config", required=True)
    sw.add_argument("--eps", required=True, help="comma-separated epsilon list")
    sw.add_argument("--workers", type=int, default=None)

    res = sub.add_parser("resonance", help="lattice scan of a phase's resonance score")
    res.add_argument("--phase", required=True, choices=["phi", "psi", "omega"])
    res.add_argument("--extent", type=float, required=True)
    res.add_argument("--n", type=int, required=True)
    res.add_argument("--out", default=None)

    tri = sub.add_parser("trilinear", help="empirical constants for the trilinear bounds")
    tri.add_argument("--check", required=True, choices=["triest1", "triest2", "triest3", "est0"])
    tri.add_argument("--trials", type=int, default=50)
    tri.add_argument("--bands", default="4,8,16")

    ode = sub.add_parser("ode-compare", help="recompute the growth report from a stored run")
    ode.add_argument("--run", required=True, help="run directory with checkpoints/")
    ode.add_argument("--t-ref", type=float, default=None)

    nrm = sub.add_parser("norms", help="recompute diagnostic norms from a stored run")
    nrm.add_argument("--run", required=True)
    nrm.add_argument("--out", default=None)
    return p


def _cmd_simulate(args) -> int:
    from .harness import load_config, run_single

    cfg = load_config(args.config)
    manifest = run_single(cfg)
    print(json.dumps(manifest.to_json_dict()["stats"], indent=2, sort_keys=True))
    print(f"run dir: {manifest.run_dir}", file=sys.stderr)
    return EXIT_OK if manifest.termination == "completed" else EXIT_TERMINATED


def _cmd_sweep(args) -> int:
    from .harness import load_config, sweep_epsilon, write_sweep_csv

    cfg = load_config(args.config)
    eps_list = [float(s) for s in args.eps.split(",") if s.strip()]
    result = sweep_epsilon(cfg, eps_list, max_workers=args.workers)
    os.makedirs(cfg.outdir, exist_ok=True)
    out = os.path.join(cfg.outdir, "sweep.csv")
    write_sweep_csv(result, out)
    summary = {
        "entries": [
            {"eps": e.eps, "crossing_time": e.crossing_time, "termination": e.termination, "error": e.error}
            for e in result.entries
        ],
        "fit": None
        if result.fit is None
        else {"slope": result.fit.slope, "c_fit": result.fit.c_fit, "r_squared": result.fit.r_squared},
        "csv": out,
    }
    print(json.dumps(summary, indent=2, sort_keys=True))
    failed = [e for e in result.entries if e.error is not None]
    return EXIT_TERMINATED if failed else EXIT_OK


def _cmd_resonance(args) -> int:
    from .resonance import phase_eval, phase_gradients

    if args.n < 2 or args.extent <= 0:
        raise ValidationError("need n >= 2 and positive extent")
    axis = np.linspace(-args.extent, args.extent, args.n)
    x1, x2, x3 = np.meshgrid(axis, axis, axis, indexing="ij")
    score = np.abs(phase_eval(args.phase, x1, x2, x3))
    de, ds, _ = phase_gradients(args.phase, x1, x2, x3)
    score = score + np.abs(de) + np.abs(ds)
    # summary rows: per (xi1, xi2), the xi3 minimizing the resonance score
    k = np.argmin(score, axis=2)
    ii, jj = np.meshgrid(np.arange(args.n), np.arange(args.n), indexing="ij")
    rows = np.stack([x1[ii, jj, k], x2[ii, jj, k], x3[ii, jj, k], score[ii, jj, k]], axis=-1)
    out = args.out or f"resonance_{args.phase}.csv"
    with open(out, "w", newline="\n") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["xi1", "xi2", "xi3", "value"])
        for row in rows.reshape(-1, 4):
            w.writerow([f"{v:.17g}" for v in row])
    print(f"wrote {args.n * args.n} summary rows of the {args.n}^3-lattice scan to {out}",
          file=sys.stderr)
    return EXIT_OK


def _cmd_trilinear(args) -> int:
    from .trilinear import tri_estimate_check

    name = {"triest1": "TriEst1", "triest2": "TriEst2", "triest3": "TriEst3", "est0": "est0"}[args.check]
    bands = [float(s) for s in args.bands.split(",") if s.strip()]
    out = {}
    for b in bands:
        rep = tri_estimate_check(name, b, trials=args.trials)
        out[str(b)] = rep
    print(json.dumps({"check": name, "constants": out}, indent=2, sort_keys=True))
    return EXIT_OK


def _load_trajectory(run_dir: str):
    from .grids import GridSpec
    from .solver import Checkpoint, NLSParams, SolveConfig, Trajectory

    path = os.path.join(run_dir, "checkpoints", "trajectory.npz")
    if not os.path.exists(path):
        raise FileNotFoundError(path)
    data = np.load(path)
    grid = GridSpec(int(data["num_points"]), float(data["domain_length"]))
    lam = data["lambdas"]
    params = NLSParams(*[complex(v) for v in lam])
    times = data["times"]
    cfg = SolveConfig(t_start=float(times[0]), t_end=float(times[-1]) + 1e-9)
    cks = [Checkpoint(float(t), fh) for t, fh in zip(times, data["profile_hats"])]
    return Trajectory(grid, params, cfg, cks, termination="loaded"), params


def _cmd_ode_compare(args) -> int:
    from .growth import track_growth

    traj, params = _load_trajectory(args.run)
    report = track_growth(traj, params, t_ref=args.t_ref)
    report.to_csv(os.path.join(args.run, "growth_recomputed.csv"))
    print(json.dumps(report.to_json_dict(), indent=2, sort_keys=True))
    return EXIT_OK


def _cmd_norms(args) -> int:
    from .diagnostics import DiagnosticsObserver

    traj, _ = _load_trajectory(args.run)
    obs = DiagnosticsObserver()
    for i in range(len(traj.checkpoints)):
        obs(traj.state(i))
    out = args.out or os.path.join(args.run, "norms_recomputed.csv")
    obs.series.to_csv(out)
    print(f"wrote {out}", file=sys.stderr)
    return EXIT_OK


_HANDLERS = {
    "simulate": _cmd_simulate,
    "sweep": _cmd_sweep,
    "resonance": _cmd_resonance,
    "trilinear": _cmd_trilinear,
    "ode-compare": _cmd_ode_compare,
    "norms": _cmd_norms,
}


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s",
                        stream=sys.stderr)
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_VALIDATION if (e.code or 0) != 0 else EXIT_OK
    try:
        return _HANDLERS[args.command](args)
    except (FileNotFoundError, OSError) as e:
        print(f"IO error: {e}", file=sys.stderr)
        return EXIT_IO
    except ValidationError as e:
        print(f"invalid input: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except NlsLabError as e:
        print(f"run terminated: {e}", file=sys.stderr)
        return EXIT_TERMINATED


if __name__ == "__main__":
    raise SystemExit(main())
