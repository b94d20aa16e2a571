"""Command-line front end.

Subcommands: phase | steady | evolve | kmc | meanfield | sweep | verify.
Scenario parameters come from an optional JSON config (--config) overridden
by flags; every command writes its outputs under --out together with a
manifest.json that pins parameters, seeds and versions, so re-running a
manifest reproduces the outputs bit-identically.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .continuum import PdeConfig, SolverError, SteadyConfig, pde_evolve, steady_solve
from .core import DensityProfile, ModelParams, ParameterError, Tolerance
from .lattice import KmcConfig, kmc_run, meanfield_steady
from .phase import classify, limit_profile, phase_sweep
from . import verify as verify_mod

_PARAM_KEYS = ("alpha", "beta", "omega_a", "omega_d", "epsilon")


def _add_param_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", type=Path, help="JSON scenario config")
    sub.add_argument("--alpha", type=float)
    sub.add_argument("--beta", type=float)
    sub.add_argument("--omega", type=float,
                     help="equal attachment/detachment rate (sets both)")
    sub.add_argument("--omega-a", type=float, dest="omega_a")
    sub.add_argument("--omega-d", type=float, dest="omega_d")
    sub.add_argument("--epsilon", type=float)
    sub.add_argument("--out", type=Path, default=None,
                     help="output directory (default out/<command>)")


def _merge_params(args) -> ModelParams:
    base: dict = {"alpha": 0.5, "beta": 0.5, "omega_a": 0.25,
                  "omega_d": 0.25, "epsilon": 0.01}
    if args.config:
        with open(args.config) as fh:
            cfg = json.load(fh)
        for k in _PARAM_KEYS:
            if k in cfg:
                base[k] = float(cfg[k])
    if getattr(args, "omega", None) is not None:
        base["omega_a"] = base["omega_d"] = args.omega
    for k in _PARAM_KEYS:
        v = getattr(args, k, None)
        if v is not None:
            base[k] = v
    return ModelParams(**base)


def _config_value(args, key, default):
    if args.config:
        with open(args.config) as fh:
            cfg = json.load(fh)
        if key in cfg:
            return cfg[key]
    return default


def _out_dir(args, command: str) -> Path:
    out = args.out or Path("out") / command
    out.mkdir(parents=True, exist_ok=True)
    return out


@dataclass(frozen=True)
class RunManifest:
    """Everything needed to reproduce a run bit-identically: the command
    and arguments, scenario parameters, solver/seed configuration, library
    versions, wall time and the produced files."""

    command: str
    argv: list
    params: dict | None
    config: dict
    versions: dict
    wall_time_s: float
    outputs: list = field(default_factory=list)

    def write(self, path: Path) -> None:
        with open(path, "w") as fh:
            json.dump(asdict(self), fh, indent=2, default=float)


def _write_manifest(out: Path, command: str, params: ModelParams | None,
                    extra: dict, outputs: list[str], t0: float) -> None:
    import numba
    import scipy

    manifest = RunManifest(
        command=command,
        argv=sys.argv[1:],
        params=None if params is None else {
            k: getattr(params, k) for k in _PARAM_KEYS
        },
        config=extra,
        versions={
            "taseplk": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "numba": numba.__version__,
            "python": sys.version.split()[0],
        },
        wall_time_s=time.time() - t0,
        outputs=outputs,
    )
    manifest.write(out / "manifest.json")


def _jobs(args) -> int:
    if getattr(args, "jobs", None):
        return args.jobs
    return int(os.environ.get("TASEPLK_JOBS", "1"))


# ---------------------------------------------------------------------------


def cmd_phase(args) -> int:
    t0 = time.time()
    params = _merge_params(args)
    out = _out_dir(args, "phase")
    label, feats = classify(params)
    result = {
        "regime": label.regime,
        "phase": label.index,
        "applied_symmetry": label.applied_symmetry,
        "on_boundary": label.on_boundary,
    }
    fd = feats.as_dict()
    if fd["x_d"] is not None:
        result["x_d"] = fd["x_d"]
    result["features"] = {k: v for k, v in fd.items() if v is not None}
    outputs = []
    if args.dump_profile:
        prof = limit_profile(params)
        path = out / "limit_profile.json"
        prof.to_json(path)
        outputs.append(str(path))
    print(json.dumps(result, default=float))
    _write_manifest(out, "phase", params, {}, outputs, t0)
    return 0


def cmd_steady(args) -> int:
    t0 = time.time()
    params = _merge_params(args)
    out = _out_dir(args, "steady")
    cfg = SteadyConfig(n_cells=args.n_cells) if args.n_cells else SteadyConfig()
    profile, info = steady_solve(params, cfg, with_info=True)
    csv_path = out / "steady.csv"
    profile.to_csv(csv_path)
    with open(out / "telemetry.json", "w") as fh:
        json.dump(info, fh, indent=2, default=float)
    _write_manifest(out, "steady", params,
                    {"n_cells": info["n_cells"]},
                    [str(csv_path), str(out / "telemetry.json")], t0)
    print(json.dumps({"n_cells": info["n_cells"],
                      "residual": info["stages"][-1]["residuals"][-1],
                      "output": str(csv_path)}))
    return 0


def cmd_evolve(args) -> int:
    t0 = time.time()
    params = _merge_params(args)
    out = _out_dir(args, "evolve")
    n_cells = args.n_cells or max(256, int(math.ceil(20.0 / params.epsilon)))
    grid = np.linspace(0.0, 1.0, n_cells + 1)
    if args.initial == "linear":
        vals = params.alpha + (params.beta_bar - params.alpha) * grid
    elif args.initial == "steady":
        vals = steady_solve(params, SteadyConfig(n_cells=n_cells)).values
    else:
        vals = DensityProfile.from_csv(Path(args.initial)).interp(grid)
        vals[0], vals[-1] = params.alpha, params.beta_bar
    sigma = DensityProfile(grid, vals)
    t_end = args.t_end if args.t_end else 10.0 / params.epsilon
    snaps = tuple(np.linspace(t_end / args.snapshots, t_end, args.snapshots))
    cfg = PdeConfig(n_cells=n_cells, t_end=t_end, scheme=args.scheme,
                    snapshot_times=snaps)
    series = pde_evolve(params, sigma, cfg)
    csv_path = out / "evolution.csv"
    with open(csv_path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "x", "rho"])
        for t, prof in series:
            for x, r in zip(prof.grid, prof.values):
                w.writerow([repr(float(t)), repr(float(x)), repr(float(r))])
    _write_manifest(out, "evolve", params,
                    {"n_cells": n_cells, "t_end": t_end, "scheme": args.scheme,
                     "snapshots": args.snapshots},
                    [str(csv_path)], t0)
    print(json.dumps({"snapshots": len(series), "output": str(csv_path)}))
    return 0


def cmd_kmc(args) -> int:
    t0 = time.time()
    params = _merge_params(args)
    out = _out_dir(args, "kmc")
    cfg = KmcConfig(seed=args.seed, t_burn=args.t_burn,
                    t_sample=args.t_sample, n_replicas=args.replicas)
    res = kmc_run(params, cfg)
    csv_path = out / "kmc.csv"
    res.to_csv(csv_path)
    _write_manifest(out, "kmc", params,
                    {"seed": cfg.seed, "t_burn": cfg.t_burn,
                     "t_sample": cfg.t_sample, "n_replicas": cfg.n_replicas},
                    [str(csv_path)], t0)
    print(json.dumps({"n_sites": params.n_sites,
                      "max_stderr": float(res.stderr.max()),
                      "output": str(csv_path)}))
    return 0


def cmd_meanfield(args) -> int:
    t0 = time.time()
    params = _merge_params(args)
    out = _out_dir(args, "meanfield")
    prof = meanfield_steady(params)
    csv_path = out / "meanfield.csv"
    prof.to_csv(csv_path)
    _write_manifest(out, "meanfield", params, {}, [str(csv_path)], t0)
    print(json.dumps({"n_sites": params.n_sites, "output": str(csv_path)}))
    return 0


def _steady_cell(job):
    alpha, beta, omega_a, omega_d, epsilon = job
    from .continuum import steady_solve as _solve
    from .core import ModelParams as _MP

    prof = _solve(_MP(alpha, beta, omega_a, omega_d, epsilon))
    mid = float(prof.interp(0.5))
    return alpha, beta, mid


def cmd_sweep(args) -> int:
    t0 = time.time()
    out = _out_dir(args, "sweep")
    if args.omega is not None:
        oa = od = args.omega
    else:
        oa = args.omega_a if args.omega_a is not None else 0.2
        od = args.omega_d if args.omega_d is not None else 0.1
    pm = phase_sweep(oa, od, args.res)
    map_path = out / "phase_map.csv"
    pm.to_csv(map_path)
    seg_path = out / "boundaries.csv"
    pm.segments_to_csv(seg_path)
    outputs = [str(map_path), str(seg_path)]
    extra = {"omega_a": oa, "omega_d": od, "resolution": args.res}
    if args.steady_grid:
        n = args.steady_grid
        eps = args.epsilon or 0.02
        jobs = _jobs(args)
        cells = [((i + 0.5) / n, (j + 0.5) / n, oa, od, eps)
                 for j in range(n) for i in range(n)]
        if jobs > 1:
            from concurrent.futures import ProcessPoolExecutor

            with ProcessPoolExecutor(max_workers=jobs) as pool:
                rows = list(pool.map(_steady_cell, cells))
        else:
            rows = [_steady_cell(c) for c in cells]
        grid_path = out / "steady_grid.csv"
        with open(grid_path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["alpha", "beta", "rho_mid"])
            for a, b, mid in rows:   # cell order fixed, pool or not
                w.writerow([repr(a), repr(b), repr(mid)])
        outputs.append(str(grid_path))
        extra.update({"steady_grid": n, "epsilon": eps, "jobs": jobs})
    _write_manifest(out, "sweep", None, extra, outputs, t0)
    print(json.dumps({"labels": sorted(pm.label_set()),
                      "output": str(map_path)}))
    return 0


_SUITES = {
    "symmetry": lambda args: verify_mod.check_symmetry(),
    "sweep": lambda args: verify_mod.check_sweep_labels(),
    "captions": lambda args: verify_mod.check_caption_phases(),
    "membership": lambda args: verify_mod.check_steady_membership(),
    "uniqueness": lambda args: verify_mod.check_uniqueness(),
    "attractivity": lambda args: verify_mod.check_attractivity(),
    "ordering": lambda args: verify_mod.check_monotone_ordering(),
    "layer": lambda args: verify_mod.check_layer_ode(),
    "bounds": lambda args: verify_mod.check_bounds(),
    "kmc": lambda args: verify_mod.check_kmc(),
}


def cmd_verify(args) -> int:
    t0 = time.time()
    out = _out_dir(args, "verify")
    suites = list(_SUITES) if args.suite == "all" else [args.suite]
    reports = {}
    ok = True
    for s in suites:
        rep = _SUITES[s](args)
        reports[s] = rep
        ok = ok and rep["ok"]
        print(f"[{'PASS' if rep['ok'] else 'FAIL'}] suite {s}")
    path = out / "verify_report.json"
    with open(path, "w") as fh:
        json.dump(reports, fh, indent=2, default=float)
    _write_manifest(out, "verify", None, {"suite": args.suite}, [str(path)], t0)
    return 0 if ok else 1


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="taseplk",
        description="Driven lattice gas with attachment/detachment kinetics: "
                    "stochastic, mean-field and continuum solvers plus the "
                    "sharp-interface phase machinery.",
    )
    ap.add_argument("--version", action="version", version=__version__)
    sp = ap.add_subparsers(dest="command", required=True)

    p = sp.add_parser("phase", help="classify a scenario and dump features")
    _add_param_flags(p)
    p.add_argument("--dump-profile", action="store_true",
                   help="also write the limit profile JSON")
    p.set_defaults(func=cmd_phase)

    p = sp.add_parser("steady", help="steady-state solve with continuation")
    _add_param_flags(p)
    p.add_argument("--n-cells", type=int)
    p.set_defaults(func=cmd_steady)

    p = sp.add_parser("evolve", help="time-dependent solve")
    _add_param_flags(p)
    p.add_argument("--n-cells", type=int)
    p.add_argument("--t-end", type=float)
    p.add_argument("--snapshots", type=int, default=10)
    p.add_argument("--scheme", choices=["imex", "explicit"], default="imex")
    p.add_argument("--initial", default="linear",
                   help="'linear', 'steady' or a CSV profile path")
    p.set_defaults(func=cmd_evolve)

    p = sp.add_parser("kmc", help="event-driven stochastic simulation")
    _add_param_flags(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--t-burn", type=float, default=200.0)
    p.add_argument("--t-sample", type=float, default=2000.0)
    p.add_argument("--replicas", type=int, default=4)
    p.set_defaults(func=cmd_kmc)

    p = sp.add_parser("meanfield", help="lattice mean-field fixed point")
    _add_param_flags(p)
    p.set_defaults(func=cmd_meanfield)

    p = sp.add_parser("sweep", help="phase diagram over (alpha, beta)")
    p.add_argument("--omega", type=float)
    p.add_argument("--omega-a", type=float, dest="omega_a")
    p.add_argument("--omega-d", type=float, dest="omega_d")
    p.add_argument("--res", type=int, default=200)
    p.add_argument("--steady-grid", type=int, default=0, dest="steady_grid",
                   help="also solve the steady problem on an NxN grid")
    p.add_argument("--epsilon", type=float)
    p.add_argument("--jobs", type=int)
    p.add_argument("--out", type=Path, default=None)
    p.add_argument("--config", type=Path)
    p.set_defaults(func=cmd_sweep)

    p = sp.add_parser("verify", help="run a verification suite")
    p.add_argument("--suite", default="symmetry",
                   choices=sorted(_SUITES) + ["all"])
    p.add_argument("--jobs", type=int)
    p.add_argument("--out", type=Path, default=None)
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (ParameterError, FileNotFoundError) as exc:
        print(json.dumps({"error": str(exc), "kind": "parameter"}),
              file=sys.stderr)
        return 2
    except SolverError as exc:
        print(json.dumps({"error": str(exc), "kind": "solver",
                          "residual": exc.residual}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
