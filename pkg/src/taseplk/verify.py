"""Cross-cutting verification suites.

Each ``check_*`` function runs one verification campaign and returns a JSON-
ready report dict with an ``ok`` flag and per-case details.  The CLI's
``verify`` subcommand and the acceptance test-suite both drive these, so the
command line and pytest always agree on what was checked.
"""

from __future__ import annotations

import math
from typing import Iterable

import numpy as np

from .bounds import (
    BoundaryLayer,
    UnsupportedConstructionError,
    build_bounds,
    verify_bound,
    w_limit,
)
from .continuum import PdeConfig, SteadyConfig, pde_evolve, steady_solve
from .core import (
    DensityProfile,
    ModelParams,
    in_neighborhood,
    particle_hole_transform,
    sup_distance,
    uniform_grid,
)
from .lattice import KmcConfig, kmc_run, meanfield_steady
from .phase import classify, limit_profile, phase_sweep

__all__ = [
    "SPECIAL_CAPTIONS",
    "GENERAL_CAPTIONS",
    "REPRESENTATIVE_PHASES",
    "BOUND_SCENARIOS",
    "check_sweep_labels",
    "check_caption_phases",
    "check_steady_membership",
    "check_uniqueness",
    "check_attractivity",
    "check_monotone_ordering",
    "check_layer_ode",
    "check_bounds",
    "check_kmc",
    "check_symmetry",
]

# Worked parameter sets: equal-rates profile panels (Omega = 1/4) with their
# phases, and unequal-rates panels (Omega_D = 0.1, K = 2).
SPECIAL_CAPTIONS = [
    ("special-a", 0.25, 0.125, 0.25, 0.25, 1),
    ("special-b", 0.4375, 0.125, 0.25, 0.25, 4),
    ("special-c", 0.8125, 0.125, 0.25, 0.25, 5),
    ("special-d", 0.3750, 0.3333, 0.25, 0.25, 1),
    ("special-e", 0.4583, 0.3333, 0.25, 0.25, 2),
    ("special-f", 0.75, 0.3333, 0.25, 0.25, 3),
    ("special-g", 0.75, 0.6667, 0.25, 0.25, 6),
]
GENERAL_CAPTIONS = [
    ("general-a", 0.0242, 0.2740, 0.2, 0.1, 1),
    ("general-b", 0.1124, 0.2740, 0.2, 0.1, 9),
    ("general-c", 0.1764, 0.2740, 0.2, 0.1, 9),
    ("general-d", 0.4022, 0.2740, 0.2, 0.1, 3),
    ("general-e", 0.8478, 0.2740, 0.2, 0.1, 4),
    ("general-f", 0.0718, 0.4167, 0.2, 0.1, 1),
    ("general-g", 0.1570, 0.4167, 0.2, 0.1, 10),
    ("general-h", 0.2503, 0.4167, 0.2, 0.1, 10),
    ("general-i", 0.4285, 0.4167, 0.2, 0.1, 5),
    ("general-j", 0.8215, 0.4167, 0.2, 0.1, 6),
    ("general-k", 0.0288, 0.7140, 0.2, 0.1, 1),
    ("general-l", 0.1124, 0.7140, 0.2, 0.1, 2),
    ("general-m", 0.2651, 0.7140, 0.2, 0.1, 11),
    ("general-n", 0.4316, 0.7140, 0.2, 0.1, 7),
    ("general-o", 0.8184, 0.7140, 0.2, 0.1, 8),
]

# Sweep panels and the region-label sets they must reproduce.
SWEEP_PANELS = [
    ("omega=0.25", 0.25, 0.25, {1, 2, 3, 4, 5, 6}),
    ("omega=0", 0.0, 0.0, {4, 5, 6}),
    ("omega=0.5", 0.5, 0.5, {1, 2, 3, 6}),
    ("omega=0.75", 0.75, 0.75, {1, 2, 3, 6}),
    ("omega=1", 1.0, 1.0, {2, 3, 6}),
    ("K=2", 0.2, 0.1, set(range(1, 12))),
    ("K=2.7", 0.27, 0.1, set(range(1, 12))),
    ("K=4", 0.4, 0.1, {3, 4, 5, 6, 7, 8, 9, 10, 11}),
]

# Six phases whose lattice and continuum steady states agree to 1e-3 at
# matched epsilon (profiles free of fronts crossing one half).
REPRESENTATIVE_PHASES = [
    ("special-2", 0.4583, 0.3333, 0.25, 0.25),
    ("special-3", 0.75, 0.3333, 0.25, 0.25),
    ("special-5", 0.8125, 0.125, 0.25, 0.25),
    ("special-6", 0.75, 0.6667, 0.25, 0.25),
    ("general-2", 0.1124, 0.7140, 0.2, 0.1),
    ("general-6", 0.8215, 0.4167, 0.2, 0.1),
]

# Envelope scenarios: the worked envelope-figure parameter sets where given,
# otherwise the profile-panel sets of the same phase.
BOUND_SCENARIOS = [
    ("S1", 1.0 / 32, 1.0 / 32, 5.0 / 8, 5.0 / 8),
    ("S2", 0.45, 0.45, 0.25, 0.25),
    ("S3", 0.75, 0.45, 0.25, 0.25),
    ("S4", 7.0 / 16, 1.0 / 8, 0.25, 0.25),
    ("S5", 3.0 / 4, 1.0 / 8, 0.25, 0.25),
    ("S6", 3.0 / 4, 3.0 / 4, 0.25, 0.25),
    ("G1", 0.03, 0.4502, 0.2, 0.1),
    ("G2", 0.06, 0.8074, 0.2, 0.1),
    ("G3", 0.4200, 0.1000, 0.2, 0.1),
    ("G4", 0.9323, 0.1500, 0.4, 0.2),
    ("G5", 0.4074, 0.2000, 0.4, 0.02),
    ("G6", 0.9762, 0.3000, 0.26, 0.013),
    ("G9", 0.1124, 0.2740, 0.2, 0.1),
    ("G10", 0.2503, 0.4167, 0.2, 0.1),
]

BOUND_LADDER = (0.05, 0.02, 0.01, 0.005, 0.002, 0.001, 0.0005, 0.0002, 0.0001)


def _params(a, b, oa, od, eps=0.01) -> ModelParams:
    return ModelParams(a, b, oa, od, eps)


# ---------------------------------------------------------------------------


def check_sweep_labels(resolution: int = 200) -> dict:
    """Phase-diagram panels: the region-label sets must match exactly."""
    cases = []
    for name, oa, od, want in SWEEP_PANELS:
        pm = phase_sweep(oa, od, resolution)
        got = pm.label_set()
        cases.append({"name": name, "want": sorted(want), "got": sorted(got),
                      "ok": got == want})
    return {"ok": all(c["ok"] for c in cases), "cases": cases}


def check_caption_phases() -> dict:
    """All 22 worked parameter sets classify to their stated phases."""
    cases = []
    for name, a, b, oa, od, want in SPECIAL_CAPTIONS + GENERAL_CAPTIONS:
        label, _ = classify(_params(a, b, oa, od))
        cases.append({"name": name, "want": want, "got": label.index,
                      "regime": label.regime, "ok": label.index == want})
    return {"ok": all(c["ok"] for c in cases), "cases": cases}


def check_steady_membership(
    eps_delta: Iterable[tuple[float, float]] = ((0.005, 0.05), (0.002, 0.03)),
) -> dict:
    """Steady solutions land in the band neighborhood of the limit profile."""
    cases = []
    for eps, delta in eps_delta:
        for name, a, b, oa, od, _ in SPECIAL_CAPTIONS + GENERAL_CAPTIONS:
            p = _params(a, b, oa, od, eps)
            prof = steady_solve(p)
            ok = in_neighborhood(prof, limit_profile(p), delta)
            cases.append({"name": name, "epsilon": eps, "delta": delta, "ok": ok})
    return {"ok": all(c["ok"] for c in cases), "cases": cases}


def _lattice_subsample(continuum: DensityProfile, n_sites: int) -> np.ndarray:
    """Continuum values at the lattice nodes (grid chosen as a multiple)."""
    mult = (continuum.grid.size - 1) // (n_sites + 1)
    return continuum.values[::mult]


def check_uniqueness(eps: float = 0.01, tol: float = 1e-3,
                     grid_multiple: int = 40) -> dict:
    """Cross-solver agreement: Newton steady state, long-time PDE limit and
    the lattice mean-field fixed point, pairwise within ``tol``."""
    cases = []
    for name, a, b, oa, od in REPRESENTATIVE_PHASES:
        p = _params(a, b, oa, od, eps)
        n_lat = p.n_sites + 1
        n_cells = grid_multiple * n_lat
        steady = steady_solve(p, SteadyConfig(n_cells=n_cells))
        sigma = DensityProfile(steady.grid,
                               p.alpha + (p.beta_bar - p.alpha) * steady.grid)
        horizon = 50.0 / eps
        pde = pde_evolve(p, sigma, PdeConfig(n_cells=n_cells, t_end=horizon))[-1][1]
        mf = meanfield_steady(p)
        d_sp = sup_distance(steady, pde)
        sv = _lattice_subsample(steady, p.n_sites)
        pv = _lattice_subsample(pde, p.n_sites)
        d_sm = float(np.max(np.abs(sv - mf.values)))
        d_pm = float(np.max(np.abs(pv - mf.values)))
        ok = max(d_sp, d_sm, d_pm) < tol
        cases.append({"name": name, "steady_vs_pde": d_sp,
                      "steady_vs_meanfield": d_sm, "pde_vs_meanfield": d_pm,
                      "ok": ok})
    return {"ok": all(c["ok"] for c in cases), "cases": cases}


def _initial_profiles(p: ModelParams, grid: np.ndarray, seed: int = 0):
    """Linear, clipped-constant and random-smooth initial data in X."""
    a, bb = p.alpha, p.beta_bar
    lin = a + (bb - a) * grid
    ramp = np.clip(np.minimum(grid / 0.02, (1.0 - grid) / 0.02), 0.0, 1.0)
    flat = lin * (1.0 - ramp) + 0.5 * ramp
    rng = np.random.default_rng(seed)
    bump = np.zeros_like(grid)
    for k in range(1, 5):
        bump += rng.uniform(-1.0, 1.0) / k * np.sin(np.pi * k * grid)
    smooth = np.clip(lin + 0.3 * bump * np.sin(np.pi * grid), 0.02, 0.98)
    smooth[0], smooth[-1] = a, bb
    return [("linear", lin), ("clipped-const", flat), ("random-smooth", smooth)]


def check_attractivity(eps: float = 0.01, tol: float = 1e-3) -> dict:
    """Every initial profile converges to the steady state, with the
    sup-distance non-increasing past the early transient."""
    cases = []
    for name, a, b, oa, od in REPRESENTATIVE_PHASES:
        p = _params(a, b, oa, od, eps)
        cfg_grid = SteadyConfig()
        steady = steady_solve(p, cfg_grid)
        grid = steady.grid
        snap = tuple(np.arange(1, 11) * 5.0 / eps)
        for pname, vals in _initial_profiles(p, grid):
            sigma = DensityProfile(grid, vals)
            snaps = pde_evolve(p, sigma, PdeConfig(n_cells=grid.size - 1,
                                                   t_end=snap[-1],
                                                   snapshot_times=snap))
            dists = [sup_distance(s[1], steady) for s in snaps]
            final_ok = dists[-1] < tol
            # distances bottom out at the time-stepper's 1e-11 noise floor,
            # below which ordering is meaningless
            mono_ok = all(d2 <= d1 + 1e-10 for d1, d2 in zip(dists, dists[1:]))
            cases.append({"phase": name, "initial": pname,
                          "final_distance": dists[-1], "distances": dists,
                          "ok": final_ok and mono_ok})
    return {"ok": all(c["ok"] for c in cases), "cases": cases}


def check_monotone_ordering(n_pairs: int = 20, eps: float = 0.02,
                            seed: int = 12345) -> dict:
    """Order preservation: evolve random ordered pairs, check every snapshot."""
    p = _params(0.4583, 0.3333, 0.25, 0.25, eps)
    n_cells = max(256, int(math.ceil(20.0 / eps)))
    grid = uniform_grid(n_cells)
    rng = np.random.default_rng(seed)
    snap = (1.0 / eps, 2.0 / eps, 5.0 / eps, 10.0 / eps)
    cfg = PdeConfig(n_cells=n_cells, t_end=snap[-1], snapshot_times=snap)
    cases = []
    a, bb = p.alpha, p.beta_bar
    for i in range(n_pairs):
        base = a + (bb - a) * grid
        wig = np.zeros_like(grid)
        for k in range(1, 4):
            wig += rng.uniform(-1, 1) / k * np.sin(np.pi * k * grid)
        lo_vals = np.clip(base + 0.25 * wig * np.sin(np.pi * grid), 0.02, 0.9)
        lo_vals[0], lo_vals[-1] = a, bb
        gap = rng.uniform(0.0, 0.08) * np.sin(np.pi * grid) ** 2
        hi_vals = np.clip(lo_vals + gap, 0.0, 0.98)
        hi_vals[0], hi_vals[-1] = a, bb
        hi_vals = np.maximum(hi_vals, lo_vals)
        lo_run = pde_evolve(p, DensityProfile(grid, lo_vals), cfg)
        hi_run = pde_evolve(p, DensityProfile(grid, hi_vals), cfg)
        worst = min(
            float(np.min(h[1].values - l[1].values))
            for h, l in zip(hi_run, lo_run)
        )
        cases.append({"pair": i, "worst_gap": worst, "ok": worst >= -1e-9})
    return {"ok": all(c["ok"] for c in cases), "cases": cases}


def _rk4_layer(layer: BoundaryLayer, x_target: float, step: float = 1e-6):
    """Independent fixed-step RK4 integration of the layer ODE."""
    w, x0 = layer.w0, layer.x0
    span = x_target - x0
    n = max(1, int(round(abs(span) / step)))
    h = span / n
    c = 2.0 * layer.slowdown / layer.epsilon
    a_lo, a_hi = layer.a_low, layer.a_high

    def f(w):
        return -c * (w - a_lo) * (w - a_hi)

    for _ in range(n):
        k1 = f(w)
        k2 = f(w + 0.5 * h * k1)
        k3 = f(w + 0.5 * h * k2)
        k4 = f(w + h * k3)
        w += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return w


def check_layer_ode(n_random: int = 10, seed: int = 2024,
                    rk4_step: float = 1e-6, tol: float = 1e-8) -> dict:
    """Closed-form layer vs RK4, plus the three sharp-interface limit cases."""
    rng = np.random.default_rng(seed)
    cases = []
    for i in range(n_random):
        a_lo = rng.uniform(0.05, 0.45)
        eps = rng.uniform(0.02, 0.1)
        w0 = rng.uniform(a_lo + 0.02, 1.0 - a_lo - 0.02)
        lay = BoundaryLayer(a_lo, 0.5, w0, eps)
        errs = []
        for xt in (0.35, 0.45, 0.55, 0.65):
            errs.append(abs(lay.value(xt) - _rk4_layer(lay, xt, rk4_step)))
        cases.append({"case": i, "A": a_lo, "w0": w0, "epsilon": eps,
                      "sup_error": max(errs), "ok": max(errs) < tol})
    # limit cases at eps = 1e-4 within the Delta = 0.02 band
    limit_cases = [
        ("decay-from-above", BoundaryLayer(0.25, 0.0, 0.9, 1e-4)),
        ("decay-from-below", BoundaryLayer(0.25, 1.0, 0.1, 1e-4)),
        ("interior-jump", BoundaryLayer(0.25, 0.5, 0.5, 1e-4)),
    ]
    grid = uniform_grid(400)
    for name, lay in limit_cases:
        prof = DensityProfile(grid, np.array([lay.value(float(x)) for x in grid]))
        ok = in_neighborhood(prof, w_limit(lay), 0.02)
        cases.append({"case": name, "ok": ok})
    return {"ok": all(c["ok"] for c in cases), "cases": cases}


def check_bounds(scenarios=None, ladder=BOUND_LADDER, delta: float = 0.05,
                 sandwich_slack: float = 1e-8) -> dict:
    """Envelope verification: for each supported phase, both sides must pass
    the weak-solution checks at some epsilon <= 0.05 of the ladder, and the
    steady solution must lie between them pointwise at that epsilon."""
    scenarios = scenarios or BOUND_SCENARIOS
    cases = []
    for name, a, b, oa, od in scenarios:
        entry = {"name": name, "passing_epsilon": None, "ok": False}
        for eps in ladder:
            p = _params(a, b, oa, od, eps)
            got = None
            for start in (0, 1, 2, 3):
                try:
                    up, lo = build_bounds(p, delta=delta, start_halvings=start)
                except UnsupportedConstructionError:
                    raise
                except Exception:
                    continue
                ru = verify_bound(up, p, max(1500, int(4.0 / eps)))
                rl = verify_bound(lo, p, max(1500, int(4.0 / eps)))
                if ru["status"] == "pass" and rl["status"] == "pass":
                    got = (up, lo, ru, rl)
                    break
            if got is None:
                continue
            up, lo, ru, rl = got
            steady = steady_solve(p)
            vu = up.value_many(steady.grid)
            vl = lo.value_many(steady.grid)
            between = bool(
                np.all(steady.values <= vu + sandwich_slack)
                and np.all(steady.values >= vl - sandwich_slack)
            )
            ordered = bool(np.all(vu - vl >= -sandwich_slack))
            entry.update({
                "passing_epsilon": eps,
                "free_params_upper": up.free_params,
                "free_params_lower": lo.free_params,
                "operator_margin_upper": ru["operator_margin"],
                "operator_margin_lower": rl["operator_margin"],
                "steady_between": between,
                "ordered": ordered,
                "ok": between and ordered and eps <= 0.05,
            })
            break
        cases.append(entry)
    return {"ok": all(c["ok"] for c in cases), "cases": cases}


def check_kmc(
    seed: int = 20240,
    n_sites: int = 1999,
    t_burn: float = 3000.0,
    t_sample: float = 48000.0,
    n_replicas: int = 8,
    stderr_target: float = 0.005,
    profile_tol: float = 0.02,
    window: float = 0.05,
) -> dict:
    """Stochastic consistency: the event-driven simulation at N = 1999 must
    track the limit profile within ``profile_tol`` away from the wall, with
    per-site standard errors below ``stderr_target``."""
    eps = 1.0 / (n_sites + 1)
    p = ModelParams(0.25, 0.125, 0.25, 0.25, eps)
    label, feats = classify(p)
    lim = limit_profile(p)
    grid = np.arange(n_sites + 2) / (n_sites + 1.0)
    init = DensityProfile(grid, np.clip(lim.evaluate_many(grid), 0.0, 1.0))
    cfg = KmcConfig(seed=seed, t_burn=t_burn, t_sample=t_sample,
                    n_replicas=n_replicas)
    res = kmc_run(p, cfg, init_profile=init)
    x_d = feats.x_d
    mask = (np.abs(res.profile.grid - x_d) > window)
    ref = lim.evaluate_many(res.profile.grid[mask])
    dev = np.abs(res.profile.values[mask] - ref)
    # the stderr requirement backs the profile tolerance, so it applies to
    # the compared sites; sites inside the wall window carry the slow wall
    # diffusion and are excluded from both checks
    max_stderr = float(res.stderr[mask].max())
    report = {
        "x_d": x_d,
        "max_stderr": max_stderr,
        "max_stderr_all_sites": float(res.stderr.max()),
        "max_deviation_outside_window": float(dev.max()),
        "argmax_x": float(res.profile.grid[mask][int(dev.argmax())]),
        "stderr_ok": max_stderr < stderr_target,
        "profile_ok": bool(dev.max() < profile_tol),
    }
    report["ok"] = report["stderr_ok"] and report["profile_ok"]
    return report


def check_symmetry(n_cases: int = 10, seed: int = 77, tol: float = 1e-6) -> dict:
    """Particle-hole involution plus transform-equivariance of the steady
    solver on random parameter sets."""
    rng = np.random.default_rng(seed)
    cases = []
    grid = uniform_grid(256)
    for i in range(n_cases):
        a = float(rng.uniform(0.05, 0.95))
        b = float(rng.uniform(0.05, 0.95))
        oa = float(rng.uniform(0.05, 0.6))
        od = float(rng.uniform(0.05, 0.6))
        eps = float(rng.choice([0.02, 0.05]))
        p = ModelParams(a, b, oa, od, eps)
        vals = rng.uniform(0.0, 1.0, grid.size)
        prof = DensityProfile(grid, vals)
        p2, prof2 = particle_hole_transform(p, prof)
        p3, prof3 = particle_hole_transform(p2, prof2)
        involution = (p3 == p) and bool(
            np.max(np.abs(prof3.values - prof.values)) < 1e-15
        )
        cfg = SteadyConfig(n_cells=max(256, int(math.ceil(20.0 / eps))))
        s1 = steady_solve(p, cfg)
        _, s1t = particle_hole_transform(p, s1)
        s2 = steady_solve(p.hole_transformed(), cfg)
        d = sup_distance(s1t, s2)
        cases.append({"case": i, "involution": involution,
                      "transform_distance": d,
                      "ok": involution and d < tol})
    return {"ok": all(c["ok"] for c in cases), "cases": cases}
