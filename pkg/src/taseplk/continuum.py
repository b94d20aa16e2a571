"""Continuum solvers on [0, 1] with Dirichlet data.

Time-dependent problem (outer time scale carries a factor epsilon):

    phi_t = eps * [ eps/2 phi_xx + (phi^2 - phi)_x + wA (1 - phi) - wD phi ]

and its steady operator

    L rho = eps/2 rho_xx + (rho^2 - rho)_x + wA (1 - rho) - wD rho.

The advection term is discretized in conservative form with a local
Lax-Friedrichs flux (the steady problem develops O(eps)-wide interior layers
and central advection oscillates); diffusion uses second-order central
differences.  The same discrete operator backs pde_evolve, steady_solve and
steady_residual, so the PDE's long-time limit and the Newton solution agree
to solver tolerance, not discretization error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from numba import njit
from scipy.linalg import solve_banded

from .core import DensityProfile, ModelParams, ParameterError, Tolerance, uniform_grid

__all__ = [
    "SolverError",
    "PdeConfig",
    "SteadyConfig",
    "pde_evolve",
    "steady_solve",
    "steady_residual",
    "default_n_cells",
]


class SolverError(RuntimeError):
    """Solver failed to converge; carries the last residual."""

    def __init__(self, msg: str, residual: float = math.nan):
        super().__init__(msg)
        self.residual = residual


def default_n_cells(epsilon: float) -> int:
    """Resolution rule: at least 256 cells and >= 10 cells per O(eps) layer."""
    return max(256, int(math.ceil(20.0 / epsilon)))


@dataclass(frozen=True)
class PdeConfig:
    n_cells: int = 256
    dt: float | str = "auto"
    t_end: float = 1.0
    scheme: str = "imex"
    snapshot_times: Optional[tuple[float, ...]] = None

    def __post_init__(self) -> None:
        if self.n_cells < 16:
            raise ParameterError("n_cells must be >= 16")
        if self.scheme not in ("imex", "explicit"):
            raise ParameterError(f"unknown scheme {self.scheme!r}")
        if self.dt != "auto" and not (isinstance(self.dt, (int, float)) and self.dt > 0):
            raise ParameterError("dt must be positive or 'auto'")
        if self.t_end <= 0:
            raise ParameterError("t_end must be > 0")
        if self.snapshot_times is not None:
            ts = tuple(float(t) for t in self.snapshot_times)
            if any(t <= 0 for t in ts) or list(ts) != sorted(ts):
                raise ParameterError("snapshot_times must be positive and sorted")
            object.__setattr__(self, "snapshot_times", ts)


@dataclass(frozen=True)
class SteadyConfig:
    continuation_eps_start: float = 0.08
    continuation_steps: int = 6
    newton_max_iter: int = 60
    damping_min: float = 1.0 / 4096.0
    n_cells: Optional[int] = None   # None -> default_n_cells(epsilon)

    def __post_init__(self) -> None:
        if self.continuation_eps_start <= 0 or self.continuation_steps < 1:
            raise ParameterError("bad continuation settings")
        if self.newton_max_iter < 1 or not (0 < self.damping_min <= 1):
            raise ParameterError("bad Newton settings")


# ---------------------------------------------------------------------------
# Discrete operator
# ---------------------------------------------------------------------------


def _llf_flux(rho: np.ndarray) -> np.ndarray:
    """Local Lax-Friedrichs interface fluxes of f(rho) = rho^2 - rho."""
    f = rho * rho - rho
    a = np.abs(2.0 * rho - 1.0)
    amax = np.maximum(a[:-1], a[1:])
    return 0.5 * (f[:-1] + f[1:]) - 0.5 * amax * (rho[1:] - rho[:-1])


def _operator_interior(rho: np.ndarray, params: ModelParams, eps: float,
                       h: float) -> np.ndarray:
    """L rho at interior nodes (length n-1)."""
    diff = (rho[:-2] - 2.0 * rho[1:-1] + rho[2:]) * (0.5 * eps / (h * h))
    flux = _llf_flux(rho)
    adv = (flux[1:] - flux[:-1]) / h
    react = params.omega_a * (1.0 - rho[1:-1]) - params.omega_d * rho[1:-1]
    return diff + adv + react


def steady_residual(profile: DensityProfile, params: ModelParams) -> float:
    """Sup-norm of the discrete steady operator over interior nodes."""
    h = profile.spacing
    r = _operator_interior(profile.values, params, params.epsilon, h)
    return float(np.max(np.abs(r)))


def _jacobian_bands(rho: np.ndarray, params: ModelParams, eps: float,
                    h: float) -> np.ndarray:
    """Tridiagonal Jacobian of the interior residual, Lax-Friedrichs speeds
    frozen (Picard linearization of the |2 rho - 1| factor)."""
    n1 = rho.size - 2
    fp = 2.0 * rho - 1.0
    a = np.abs(fp)
    amax = np.maximum(a[:-1], a[1:])          # interface speeds, length n
    d2 = eps / (2.0 * h * h)
    # dF_{j+1/2}/drho_j = (fp_j + amax_j)/2 ; dF_{j+1/2}/drho_{j+1} = (fp_{j+1} - amax_j)/2
    lower = d2 - 0.5 * (fp[:-2] + amax[:-1][: n1]) / h
    main = (
        -2.0 * d2
        + 0.5 * (amax[1:][:n1] + amax[:-1][:n1]) / h
        - (params.omega_a + params.omega_d)
    )
    upper = d2 + 0.5 * (fp[2:] - amax[1:][:n1]) / h
    ab = np.zeros((3, n1))
    ab[0, 1:] = upper[:-1]
    ab[1, :] = main
    ab[2, :-1] = lower[1:]
    return ab


def _newton_steady(
    rho: np.ndarray,
    params: ModelParams,
    eps: float,
    h: float,
    tol: float,
    max_iter: int,
    damping_min: float,
) -> tuple[np.ndarray, bool, dict]:
    """Damped Newton on the interior unknowns; returns (rho, converged, info)."""
    rho = rho.copy()
    res = _operator_interior(rho, params, eps, h)
    norm = float(np.max(np.abs(res)))
    history = [norm]
    dampings: list[float] = []
    for _ in range(max_iter):
        if norm < tol:
            return rho, True, {"iterations": len(history) - 1,
                               "residuals": history, "dampings": dampings}
        ab = _jacobian_bands(rho, params, eps, h)
        try:
            delta = solve_banded((1, 1), ab, -res, check_finite=False)
        except Exception:
            break
        lam = 1.0
        accepted = False
        while lam >= damping_min:
            trial = rho.copy()
            trial[1:-1] += lam * delta
            trial_res = _operator_interior(trial, params, eps, h)
            trial_norm = float(np.max(np.abs(trial_res)))
            if math.isfinite(trial_norm) and (
                trial_norm < (1.0 - 0.25 * lam) * norm or trial_norm < tol
            ):
                rho, res, norm = trial, trial_res, trial_norm
                history.append(norm)
                dampings.append(lam)
                accepted = True
                break
            lam *= 0.5
        if not accepted:
            break
    return rho, norm < tol, {"iterations": len(history) - 1,
                             "residuals": history, "dampings": dampings}


def steady_solve(
    params: ModelParams,
    config: SteadyConfig | None = None,
    tol: Tolerance | None = None,
    with_info: bool = False,
):
    """Steady profile by damped Newton with continuation in epsilon.

    The first solve runs at a large, diffusion-dominated epsilon from the
    linear interpolant of the boundary data; the converged profile seeds the
    next, geometrically smaller epsilon down to the target.  If Newton stalls
    at some rung, pseudo-time marching (the IMEX evolver) restarts it.
    """
    config = config or SteadyConfig()
    tol = tol or Tolerance()
    eps_target = params.epsilon
    n_cells = config.n_cells or default_n_cells(eps_target)
    grid = uniform_grid(n_cells)
    h = 1.0 / n_cells

    eps_start = max(config.continuation_eps_start, eps_target)
    if eps_start > eps_target:
        # keep rung ratios near 2^(2/3) even for very small targets
        rungs = max(config.continuation_steps,
                    int(math.ceil(2.2 * math.log(eps_start / eps_target))))
        ratios = np.linspace(0.0, 1.0, rungs + 1)
        ladder = eps_start * (eps_target / eps_start) ** ratios
        ladder[-1] = eps_target
    else:
        ladder = np.array([eps_target])

    rho = params.alpha + (params.beta_bar - params.alpha) * grid
    info: dict = {"n_cells": n_cells, "ladder": [float(e) for e in ladder],
                  "stages": []}
    # rounding floor of the discrete operator: machine eps amplified by the
    # eps/h^2 diffusion coefficient (only binds beyond the resolution rule)
    def floor_tol(eps: float) -> float:
        return 4e-16 * eps / (h * h)

    for i, eps in enumerate(ladder):
        # intermediate rungs only seed the next one and get a loose
        # tolerance; the rounding floor applies everywhere (large eps on the
        # final fine grid amplifies machine noise the most)
        if i == len(ladder) - 1:
            rung_tol = max(tol.eps_resid, floor_tol(float(eps)))
        else:
            rung_tol = max(tol.eps_resid, 1e-8, floor_tol(float(eps)))
        rho, ok, stage = _newton_steady(
            rho, params, float(eps), h, rung_tol,
            config.newton_max_iter, config.damping_min,
        )
        stage["epsilon"] = float(eps)
        stage["fallback"] = 0
        # Newton's basin can be tiny while an interior wall relocates, so
        # relax in pseudo-time for progressively longer horizons and retry
        for attempt in range(3):
            if ok:
                break
            rho = _march(rho, params, float(eps), h,
                         t_end=(10.0 * 4.0**attempt) / float(eps))
            rho, ok, stage = _newton_steady(
                rho, params, float(eps), h, rung_tol,
                config.newton_max_iter, config.damping_min,
            )
            stage["epsilon"] = float(eps)
            stage["fallback"] = attempt + 1
        if not ok:
            raise SolverError(
                f"steady solve failed at epsilon={eps}",
                residual=stage["residuals"][-1],
            )
        info["stages"].append(stage)
    if rho.min() > -1e-9 and rho.max() < 1.0 + 1e-9:
        rho = np.clip(rho, 0.0, 1.0)  # scrub rounding-level excursions only
    profile = DensityProfile(grid, rho)
    if with_info:
        return profile, info
    return profile


# ---------------------------------------------------------------------------
# Time integration
# ---------------------------------------------------------------------------


def _stable_dt(h: float, eps: float, hull: tuple[float, float],
               params: ModelParams, scheme: str) -> float:
    amax = max(abs(2.0 * hull[0] - 1.0), abs(2.0 * hull[1] - 1.0), 1e-12)
    dt = 0.4 * h / (eps * amax)
    react = eps * (params.omega_a + params.omega_d)
    if react > 0:
        dt = min(dt, 0.5 / react)
    if scheme == "explicit":
        dt = min(dt, 0.4 * h * h / (eps * eps))
    return dt


def _explicit_rhs(rho: np.ndarray, params: ModelParams, eps: float,
                  h: float) -> np.ndarray:
    out = np.zeros_like(rho)
    out[1:-1] = eps * _operator_interior(rho, params, eps, h)
    return out


def _march(rho: np.ndarray, params: ModelParams, eps: float, h: float,
           t_end: float) -> np.ndarray:
    """Pseudo-time relaxation used as the Newton fallback."""
    hull = (min(0.0, float(rho.min())), max(1.0, float(rho.max())))
    dt = _stable_dt(h, eps, hull, params, "imex")
    steps = int(math.ceil(t_end / dt))
    out = rho.copy()
    _imex_loop(out, params.omega_a, params.omega_d, eps, h, dt, steps)
    return out


@njit(cache=True)
def _imex_loop(rho, omega_a, omega_d, eps, h, dt, steps):
    """Backward-Euler diffusion / explicit LLF advection and reaction.

    The implicit tridiagonal (I - dt eps^2/2 D2) with pinned Dirichlet rows
    is constant, so its Thomas factorization is computed once.  ``rho`` is
    updated in place.
    """
    n = rho.size
    c = dt * eps * eps / (2.0 * h * h)
    # Thomas factorization of [lo, di, up]
    dp = np.empty(n)
    wf = np.empty(n)
    dp[0] = 1.0
    wf[0] = 0.0
    for i in range(1, n):
        lo_i = 0.0 if i == n - 1 else -c
        di_i = 1.0 if i == n - 1 else 1.0 + 2.0 * c
        up_prev = 0.0 if i - 1 == 0 else -c
        wf[i] = lo_i / dp[i - 1]
        dp[i] = di_i - wf[i] * up_prev
    flux = np.empty(n - 1)
    rhs = np.empty(n)
    for _ in range(steps):
        for j in range(n - 1):
            fl = rho[j] * rho[j] - rho[j]
            fr = rho[j + 1] * rho[j + 1] - rho[j + 1]
            al = abs(2.0 * rho[j] - 1.0)
            ar = abs(2.0 * rho[j + 1] - 1.0)
            a = al if al > ar else ar
            flux[j] = 0.5 * (fl + fr) - 0.5 * a * (rho[j + 1] - rho[j])
        rhs[0] = rho[0]
        rhs[n - 1] = rho[n - 1]
        for i in range(1, n - 1):
            adv = (flux[i] - flux[i - 1]) / h
            react = omega_a * (1.0 - rho[i]) - omega_d * rho[i]
            rhs[i] = rho[i] + dt * eps * (adv + react)
        # forward elimination / back substitution
        for i in range(1, n):
            rhs[i] -= wf[i] * rhs[i - 1]
        rho[n - 1] = rhs[n - 1] / dp[n - 1]
        for i in range(n - 2, 0, -1):
            up_i = 0.0 if i == 0 else -c
            rho[i] = (rhs[i] - up_i * rho[i + 1]) / dp[i]
        rho[0] = rhs[0] / dp[0]


def pde_evolve(
    params: ModelParams,
    sigma: DensityProfile,
    config: PdeConfig,
) -> list[tuple[float, DensityProfile]]:
    """Method-of-lines evolution from initial data ``sigma``.

    Returns (t, profile) snapshots at the requested times (default: t_end
    only).  Values obey the discrete maximum principle: they remain inside
    [min(sigma, 0), max(sigma, 1)] for the monotone step sizes used here.
    """
    eps = params.epsilon
    if abs(sigma.values[0] - params.alpha) > 1e-12 or (
        abs(sigma.values[-1] - params.beta_bar) > 1e-12
    ):
        raise ParameterError("initial data must match the boundary densities")
    n_cells = config.n_cells
    grid = uniform_grid(n_cells)
    if sigma.grid.size - 1 == n_cells:
        rho = sigma.values.copy()
    else:
        rho = np.interp(grid, sigma.grid, sigma.values)
        rho[0], rho[-1] = params.alpha, params.beta_bar
    h = 1.0 / n_cells
    hull = (min(0.0, float(rho.min())), max(1.0, float(rho.max())))

    times = list(config.snapshot_times or (config.t_end,))
    if times[-1] > config.t_end + 1e-12:
        raise ParameterError("snapshot beyond t_end")

    dt_cap = _stable_dt(h, eps, hull, params, config.scheme)
    if config.dt != "auto":
        dt_cap = min(dt_cap, float(config.dt))

    snapshots: list[tuple[float, DensityProfile]] = []
    t = 0.0
    for target in times:
        span = target - t
        if span <= 1e-15:
            snapshots.append((target, DensityProfile(grid, rho.copy())))
            continue
        steps = int(math.ceil(span / dt_cap))
        dt = span / steps
        if config.scheme == "imex":
            _imex_loop(rho, params.omega_a, params.omega_d, eps, h, dt, steps)
        else:
            for _ in range(steps):
                rho = rho + dt * _explicit_rhs(rho, params, eps, h)
        if not np.all(np.isfinite(rho)):
            raise SolverError(f"NaN in evolution at t~{target}")
        t = target
        snapshots.append((t, DensityProfile(grid, rho.copy())))
    return snapshots
