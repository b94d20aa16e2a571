"""Stochastic lattice dynamics and the mean-field lattice ODE.

The lattice has N bulk sites (1..N) flanked by reservoir slots 0 and N+1.
Particles hop right at unit rate under exclusion, enter site 1 at rate
``alpha`` when it is empty, leave site N at rate ``beta`` when it is
occupied, and attach/detach in the bulk at rates ``w_A = eps * Omega_A`` and
``w_D = eps * Omega_D``.  The mean-field closure of the occupancy
expectations gives the coupled ODE system

    d phi_i/dt = phi_{i-1}(1-phi_i) - phi_i(1-phi_{i+1})
               + w_A (1 - phi_i) - w_D phi_i,     phi_0 = alpha,
                                                  phi_{N+1} = 1 - beta.

The event-driven simulation is the direct (Gillespie) method with channels
grouped by rate category (hops, attachments, detachments, two boundary
channels); membership lists are updated in O(1) per event, and occupancies
are time-weighted between events, which is exact for the continuous-time
chain.  The inner loop is numba-compiled.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from numba import njit
from scipy.linalg import solve_banded

from .core import DensityProfile, ModelParams, ParameterError, Tolerance

__all__ = [
    "LatticeState",
    "KmcConfig",
    "KmcResult",
    "MeanFieldState",
    "kmc_run",
    "meanfield_rhs",
    "meanfield_evolve",
    "meanfield_steady",
]


@dataclass(frozen=True)
class LatticeState:
    """Occupancy of sites 0..N+1 (reservoir slots are placeholders handled
    by the boundary rule, never counted in bulk statistics)."""

    occupancy: np.ndarray
    time: float = 0.0

    def __post_init__(self) -> None:
        occ = np.ascontiguousarray(np.asarray(self.occupancy, dtype=np.int8))
        if occ.ndim != 1 or occ.size < 3:
            raise ParameterError("occupancy must be 1D with N+2 >= 3 slots")
        if not np.all((occ == 0) | (occ == 1)):
            raise ParameterError("occupancy entries must be 0 or 1")
        if self.time < 0:
            raise ParameterError("time must be >= 0")
        occ.setflags(write=False)
        object.__setattr__(self, "occupancy", occ)

    @property
    def n_sites(self) -> int:
        return self.occupancy.size - 2

    @staticmethod
    def random(params: ModelParams, rng: np.random.Generator,
               profile: Optional[DensityProfile] = None) -> "LatticeState":
        """Bernoulli occupancy from a density profile (isotherm default)."""
        n = params.n_sites
        x = np.arange(1, n + 1) / (n + 1.0)
        p = profile.interp(x) if profile is not None else np.full(n, params.isotherm)
        occ = np.zeros(n + 2, dtype=np.int8)
        occ[1:-1] = (rng.random(n) < p).astype(np.int8)
        return LatticeState(occ)


@dataclass(frozen=True)
class KmcConfig:
    seed: int = 0
    t_burn: float = 100.0
    t_sample: float = 1000.0
    n_replicas: int = 4

    def __post_init__(self) -> None:
        if self.t_burn <= 0 or self.t_sample <= 0:
            raise ParameterError("t_burn and t_sample must be > 0")
        if self.n_replicas < 1:
            raise ParameterError("n_replicas must be >= 1")


@dataclass(frozen=True)
class KmcResult:
    """Replica-averaged site densities with their standard errors."""

    profile: DensityProfile
    stderr: np.ndarray
    replica_means: np.ndarray   # shape (n_replicas, N)

    def to_csv(self, path) -> None:
        import csv

        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x", "rho_mean", "rho_stderr"])
            for x, r, s in zip(self.profile.grid, self.profile.values, self.stderr):
                w.writerow([repr(float(x)), repr(float(r)), repr(float(s))])


@njit(cache=True, inline="always")
def _set_add(lst, pos, n, key):
    if pos[key] >= 0:
        return n
    lst[n] = key
    pos[key] = n
    return n + 1


@njit(cache=True, inline="always")
def _set_remove(lst, pos, n, key):
    p = pos[key]
    if p < 0:
        return n
    last = lst[n - 1]
    lst[p] = last
    pos[last] = p
    pos[key] = -1
    return n - 1


@njit(cache=True)
def _kmc_kernel(occ, alpha, beta, w_a, w_d, hop_rate, couple,
                t_burn, t_sample, seed):
    """One replica: returns time-averaged bulk occupancies over the sampling
    window.  Deterministic given ``seed``."""
    np.random.seed(seed)
    n = occ.size - 2
    # category membership: hoppable pairs (j, j+1), empty bulk, occupied bulk
    hop_lst = np.empty(n, np.int64)
    hop_pos = np.full(n + 2, -1, np.int64)
    n_hop = 0
    emp_lst = np.empty(n, np.int64)
    emp_pos = np.full(n + 2, -1, np.int64)
    n_emp = 0
    occ_lst = np.empty(n, np.int64)
    occ_pos = np.full(n + 2, -1, np.int64)
    n_occ = 0
    for i in range(1, n + 1):
        if occ[i] == 1:
            n_occ = _set_add(occ_lst, occ_pos, n_occ, i)
        else:
            n_emp = _set_add(emp_lst, emp_pos, n_emp, i)
    for j in range(1, n):
        if occ[j] == 1 and occ[j + 1] == 0:
            n_hop = _set_add(hop_lst, hop_pos, n_hop, j)

    acc = np.zeros(n + 2)
    since = np.zeros(n + 2)
    t_end = t_burn + t_sample
    t = 0.0
    sampling = t_burn <= 0.0

    while True:
        r_in = alpha if (couple and occ[1] == 0) else 0.0
        r_out = beta if (couple and occ[n] == 1) else 0.0
        r_hop = hop_rate * n_hop
        r_att = w_a * n_emp
        r_det = w_d * n_occ
        total = r_in + r_out + r_hop + r_att + r_det
        if total <= 0.0:
            break  # frozen configuration; occupancies hold to t_end
        dt = -np.log(np.random.random()) / total
        t_next = t + dt
        if not sampling and t_next >= t_burn:
            for i in range(1, n + 1):
                since[i] = t_burn
            sampling = True
        if t_next >= t_end:
            break
        t = t_next

        u = np.random.random() * total
        flip_on = -1
        flip_off = -1
        if u < r_in:
            flip_on = 1
        elif u < r_in + r_out:
            flip_off = n
        elif u < r_in + r_out + r_hop:
            k = int(np.random.random() * n_hop)
            if k >= n_hop:
                k = n_hop - 1
            j = hop_lst[k]
            flip_off = j
            flip_on = j + 1
        elif u < r_in + r_out + r_hop + r_att:
            k = int(np.random.random() * n_emp)
            if k >= n_emp:
                k = n_emp - 1
            flip_on = emp_lst[k]
        else:
            k = int(np.random.random() * n_occ)
            if k >= n_occ:
                k = n_occ - 1
            flip_off = occ_lst[k]

        if flip_off > 0:
            occ[flip_off] = 0
            n_occ = _set_remove(occ_lst, occ_pos, n_occ, flip_off)
            n_emp = _set_add(emp_lst, emp_pos, n_emp, flip_off)
            if sampling:
                acc[flip_off] += t - since[flip_off]
        if flip_on > 0:
            occ[flip_on] = 1
            n_emp = _set_remove(emp_lst, emp_pos, n_emp, flip_on)
            n_occ = _set_add(occ_lst, occ_pos, n_occ, flip_on)
            if sampling:
                since[flip_on] = t
        # refresh hop-pair membership around the flipped sites
        lo = flip_off if flip_off > 0 else flip_on
        hi = flip_on if flip_on > 0 else flip_off
        for j in range(min(lo, hi) - 1, max(lo, hi) + 1):
            if 1 <= j <= n - 1:
                want = occ[j] == 1 and occ[j + 1] == 0
                if want:
                    n_hop = _set_add(hop_lst, hop_pos, n_hop, j)
                else:
                    n_hop = _set_remove(hop_lst, hop_pos, n_hop, j)

    if not sampling:
        for i in range(1, n + 1):
            since[i] = t_burn
    for i in range(1, n + 1):
        if occ[i] == 1:
            acc[i] += t_end - since[i]
    return acc[1 : n + 1] / t_sample


def kmc_run(
    params: ModelParams,
    config: KmcConfig,
    hop_rate: float = 1.0,
    couple_boundaries: bool = True,
    init_profile: Optional[DensityProfile] = None,
) -> KmcResult:
    """Replica-averaged stationary density from the event-driven simulation.

    Bulk rates are w_A = eps * Omega_A and w_D = eps * Omega_D.  Replica r
    draws its RNG stream and initial Bernoulli occupancy from the r-th child
    of ``SeedSequence(config.seed)``; the reduction over replicas is ordered
    by replica index, so results are bit-reproducible for a given seed.

    ``hop_rate`` and ``couple_boundaries`` are diagnostic switches (setting
    hop_rate=0 and couple_boundaries=False isolates the pure
    attachment/detachment kinetics).
    """
    n = params.n_sites
    eps = params.epsilon
    w_a = eps * params.omega_a
    w_d = eps * params.omega_d
    children = np.random.SeedSequence(config.seed).spawn(config.n_replicas)
    means = np.empty((config.n_replicas, n))
    for r, child in enumerate(children):
        rng = np.random.default_rng(child)
        state = LatticeState.random(params, rng, init_profile)
        kernel_seed = int(child.generate_state(1, dtype=np.uint32)[0])
        occ = state.occupancy.copy()
        means[r] = _kmc_kernel(
            occ, params.alpha, params.beta, w_a, w_d, float(hop_rate),
            couple_boundaries, config.t_burn, config.t_sample, kernel_seed,
        )
    mean = means.mean(axis=0)
    if config.n_replicas > 1:
        stderr = means.std(axis=0, ddof=1) / np.sqrt(config.n_replicas)
    else:
        stderr = np.zeros(n)
    grid = np.arange(n + 2) / (n + 1.0)
    grid[0], grid[-1] = 0.0, 1.0
    values = np.concatenate(([params.alpha], mean, [params.beta_bar]))
    stderr_full = np.concatenate(([0.0], stderr, [0.0]))
    return KmcResult(DensityProfile(grid, values), stderr_full, means)


# ---------------------------------------------------------------------------
# Mean-field lattice ODE
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MeanFieldState:
    """Bulk densities phi_1..phi_N at a given time."""

    phi: np.ndarray
    time: float = 0.0

    def __post_init__(self) -> None:
        phi = np.ascontiguousarray(np.asarray(self.phi, dtype=float))
        if phi.ndim != 1 or phi.size < 1:
            raise ParameterError("phi must be a nonempty 1D array")
        if phi.min() < -1e-12 or phi.max() > 1.0 + 1e-12:
            raise ParameterError("phi must lie in [0, 1]")
        phi.setflags(write=False)
        object.__setattr__(self, "phi", phi)


def _mf_rhs(phi: np.ndarray, alpha: float, beta_bar: float,
            w_a: float, w_d: float) -> np.ndarray:
    left = np.concatenate(([alpha], phi[:-1]))
    right = np.concatenate((phi[1:], [beta_bar]))
    return left * (1.0 - phi) - phi * (1.0 - right) + w_a * (1.0 - phi) - w_d * phi


def meanfield_rhs(state: MeanFieldState, params: ModelParams) -> np.ndarray:
    """Time derivative of the bulk densities with the reservoir densities
    substituted at the edges."""
    if state.phi.size != params.n_sites:
        raise ParameterError(
            f"state has {state.phi.size} sites, params expect {params.n_sites}"
        )
    return _mf_rhs(state.phi, params.alpha, params.beta_bar,
                   params.epsilon * params.omega_a, params.epsilon * params.omega_d)


def meanfield_evolve(
    params: ModelParams,
    state: MeanFieldState,
    t_end: float,
    dt: Optional[float] = None,
) -> MeanFieldState:
    """RK4 integration of the (non-stiff) lattice ODE."""
    w_a = params.epsilon * params.omega_a
    w_d = params.epsilon * params.omega_d
    if dt is None:
        dt = min(0.1, 0.5 / (2.0 + w_a + w_d))
    phi = state.phi.copy()
    a, bb = params.alpha, params.beta_bar
    steps = int(np.ceil((t_end - state.time) / dt))
    h = (t_end - state.time) / steps if steps else 0.0
    for _ in range(steps):
        k1 = _mf_rhs(phi, a, bb, w_a, w_d)
        k2 = _mf_rhs(phi + 0.5 * h * k1, a, bb, w_a, w_d)
        k3 = _mf_rhs(phi + 0.5 * h * k2, a, bb, w_a, w_d)
        k4 = _mf_rhs(phi + h * k3, a, bb, w_a, w_d)
        phi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return MeanFieldState(np.clip(phi, 0.0, 1.0), t_end)


def _mf_jacobian_bands(phi: np.ndarray, alpha: float, beta_bar: float,
                       w_a: float, w_d: float) -> np.ndarray:
    n = phi.size
    left = np.concatenate(([alpha], phi[:-1]))
    right = np.concatenate((phi[1:], [beta_bar]))
    main = -left - (1.0 - right) - w_a - w_d
    lower = 1.0 - phi[1:]    # dG_i/dphi_{i-1}
    upper = phi[:-1]         # dG_i/dphi_{i+1}
    ab = np.zeros((3, n))
    ab[0, 1:] = upper
    ab[1, :] = main
    ab[2, :-1] = lower
    return ab


def meanfield_steady(
    params: ModelParams,
    tol: Tolerance | None = None,
    max_iter: int = 80,
    damping_min: float = 1.0 / 4096.0,
) -> DensityProfile:
    """Stationary bulk densities by damped Newton, seeded by the linear
    interpolant and rescued by pseudo-time marching when Newton stalls."""
    from .continuum import SolverError

    tol = tol or Tolerance()
    n = params.n_sites
    w_a = params.epsilon * params.omega_a
    w_d = params.epsilon * params.omega_d
    a, bb = params.alpha, params.beta_bar
    x = np.arange(1, n + 1) / (n + 1.0)
    phi = a + (bb - a) * x

    def newton(phi: np.ndarray) -> tuple[np.ndarray, bool]:
        res = _mf_rhs(phi, a, bb, w_a, w_d)
        norm = float(np.max(np.abs(res)))
        for _ in range(max_iter):
            if norm < tol.eps_resid:
                return phi, True
            ab = _mf_jacobian_bands(phi, a, bb, w_a, w_d)
            delta = solve_banded((1, 1), ab, -res, check_finite=False)
            lam, accepted = 1.0, False
            while lam >= damping_min:
                trial = phi + lam * delta
                trial_res = _mf_rhs(trial, a, bb, w_a, w_d)
                trial_norm = float(np.max(np.abs(trial_res)))
                if np.isfinite(trial_norm) and (
                    trial_norm < (1.0 - 0.25 * lam) * norm
                    or trial_norm < tol.eps_resid
                ):
                    phi, res, norm = trial, trial_res, trial_norm
                    accepted = True
                    break
                lam *= 0.5
            if not accepted:
                return phi, norm < tol.eps_resid
        return phi, norm < tol.eps_resid

    phi, ok = newton(phi)
    if not ok:
        # relaxation time of the slow kinetic mode is ~1/(w_a + w_d)
        horizon = 20.0 / max(w_a + w_d, 1e-6)
        state = meanfield_evolve(params, MeanFieldState(np.clip(phi, 0, 1)),
                                 min(horizon, 2e5))
        phi, ok = newton(state.phi.copy())
        if not ok:
            res = float(np.max(np.abs(_mf_rhs(phi, a, bb, w_a, w_d))))
            raise SolverError("mean-field steady solve failed", residual=res)
    grid = np.arange(n + 2) / (n + 1.0)
    grid[0], grid[-1] = 0.0, 1.0
    values = np.concatenate(([a], phi, [bb]))
    return DensityProfile(grid, values)
