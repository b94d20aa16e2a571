import numpy as np
import pytest

from taseplk.continuum import (
    PdeConfig,
    SteadyConfig,
    default_n_cells,
    pde_evolve,
    steady_residual,
    steady_solve,
)
from taseplk.core import (
    DensityProfile,
    ModelParams,
    ParameterError,
    in_neighborhood,
    sup_distance,
    uniform_grid,
)
from taseplk.lattice import meanfield_steady
from taseplk.phase import limit_profile


def linear_initial(p, n_cells):
    g = uniform_grid(n_cells)
    return DensityProfile(g, p.alpha + (p.beta_bar - p.alpha) * g)


class TestSteadySolve:
    def test_flat_case_exact(self):
        p = ModelParams(0.5, 0.5, 0.25, 0.25, 0.1)
        prof, info = steady_solve(p, with_info=True)
        assert np.max(np.abs(prof.values - 0.5)) == 0.0
        assert info["stages"][0]["iterations"] == 0

    def test_phase1_ramp_jump_ramp(self):
        p = ModelParams(0.25, 0.125, 0.25, 0.25, 0.01)
        prof = steady_solve(p)
        assert prof.values[0] == 0.25 and prof.values[-1] == 0.875
        # increasing ramp, wall near 0.25, ramp to the right density
        assert in_neighborhood(prof, limit_profile(p), 0.05)
        mid = prof.interp(0.6)
        assert mid == pytest.approx(limit_profile(p).evaluate(0.6), abs=0.01)

    def test_residual_postcondition(self):
        p = ModelParams(0.4316, 0.7140, 0.2, 0.1, 0.01)
        prof = steady_solve(p)
        assert steady_residual(prof, p) < 1e-10

    def test_residual_flat(self):
        p = ModelParams(0.5, 0.5, 0.3, 0.3, 0.05)
        g = uniform_grid(400)
        prof = DensityProfile(g, np.full(g.size, 0.5))
        assert steady_residual(prof, p) < 1e-15

    def test_limit_profile_not_a_solution(self):
        # the sharp-interface profile has order-1/eps residual in the wall
        p = ModelParams(0.25, 0.125, 0.25, 0.25, 0.01)
        lim = limit_profile(p)
        g = uniform_grid(default_n_cells(p.epsilon))
        prof = DensityProfile(g, np.clip(lim.evaluate_many(g), 0, 1))
        x_d = 0.25
        h = g[1] - g[0]
        from taseplk.continuum import _operator_interior

        r = np.abs(_operator_interior(prof.values, p, p.epsilon, h))
        interior_x = g[1:-1]
        near = np.abs(interior_x - x_d) < 0.01
        far = np.abs(interior_x - x_d) > 0.1
        assert r[near].max() > 1.0 / p.epsilon
        assert r[far].max() < 1.0

    def test_continuation_reaches_small_epsilon(self):
        p = ModelParams(0.1124, 0.2740, 0.2, 0.1, 0.002)
        prof = steady_solve(p)
        assert in_neighborhood(prof, limit_profile(p), 0.03)


class TestPdeEvolve:
    def test_steady_is_fixed_point(self):
        p = ModelParams(0.4583, 0.3333, 0.25, 0.25, 0.02)
        prof = steady_solve(p)
        cfg = PdeConfig(n_cells=prof.grid.size - 1, t_end=10.0)
        out = pde_evolve(p, prof, cfg)[-1][1]
        assert sup_distance(out, prof) < 1e-8

    def test_boundary_mismatch_rejected(self):
        p = ModelParams(0.3, 0.3, 0.25, 0.25, 0.05)
        g = uniform_grid(64)
        bad = DensityProfile(g, np.full(g.size, 0.5))
        with pytest.raises(ParameterError):
            pde_evolve(p, bad, PdeConfig(n_cells=64, t_end=1.0))

    def test_maximum_principle(self):
        rng = np.random.default_rng(1)
        p = ModelParams(0.3, 0.4, 0.25, 0.25, 0.02)
        n = 512
        g = uniform_grid(n)
        vals = np.clip(
            p.alpha + (p.beta_bar - p.alpha) * g
            + 0.4 * rng.standard_normal(g.size) * np.sin(np.pi * g), 0, 1
        )
        vals[0], vals[-1] = p.alpha, p.beta_bar
        sigma = DensityProfile(g, vals)
        lo, hi = min(0.0, vals.min()), max(1.0, vals.max())
        snaps = pde_evolve(p, sigma, PdeConfig(
            n_cells=n, t_end=100.0, snapshot_times=(1.0, 10.0, 100.0)))
        for _, prof in snaps:
            assert prof.values.min() >= lo - 1e-12
            assert prof.values.max() <= hi + 1e-12

    def test_order_preservation(self):
        rng = np.random.default_rng(2)
        p = ModelParams(0.4583, 0.3333, 0.25, 0.25, 0.05)
        n = 400
        g = uniform_grid(n)
        base = p.alpha + (p.beta_bar - p.alpha) * g
        lo_vals = np.clip(base - 0.2 * np.sin(np.pi * g) ** 2, 0, 1)
        hi_vals = np.clip(
            lo_vals + rng.uniform(0, 0.15) * np.sin(np.pi * g) ** 2, 0, 1
        )
        lo_vals[0] = hi_vals[0] = p.alpha
        lo_vals[-1] = hi_vals[-1] = p.beta_bar
        cfg = PdeConfig(n_cells=n, t_end=10.0 / p.epsilon,
                        snapshot_times=(1.0 / p.epsilon, 10.0 / p.epsilon))
        lo_run = pde_evolve(p, DensityProfile(g, lo_vals), cfg)
        hi_run = pde_evolve(p, DensityProfile(g, hi_vals), cfg)
        for (t1, lo_p), (t2, hi_p) in zip(lo_run, hi_run):
            assert np.all(hi_p.values - lo_p.values >= -1e-12)

    def test_attractivity_flat_case(self):
        p = ModelParams(0.5, 0.5, 0.25, 0.25, 0.05)
        n = 400
        g = uniform_grid(n)
        vals = 0.5 + 0.3 * np.sin(np.pi * g) ** 2
        vals[0] = vals[-1] = 0.5
        snaps = pde_evolve(p, DensityProfile(g, vals),
                           PdeConfig(n_cells=n, t_end=20.0 / p.epsilon))
        assert np.max(np.abs(snaps[-1][1].values - 0.5)) < 1e-4

    def test_explicit_scheme_agrees(self):
        p = ModelParams(0.4, 0.45, 0.25, 0.25, 0.05)
        n = 256
        sig = linear_initial(p, n)
        a = pde_evolve(p, sig, PdeConfig(n_cells=n, t_end=5.0))[-1][1]
        b = pde_evolve(p, sig, PdeConfig(n_cells=n, t_end=5.0,
                                         scheme="explicit"))[-1][1]
        assert sup_distance(a, b) < 1e-5


class TestGridConvergence:
    def test_grid_convergence_away_from_layers(self):
        # the monotone flux carries O(h) viscosity wherever the profile has
        # slope, so smooth-region convergence is clean first order: halving
        # h halves the error against a much finer reference
        p = ModelParams(0.4583, 0.3333, 0.25, 0.25, 0.05)
        fine = steady_solve(p, SteadyConfig(n_cells=8192))
        errs = []
        for n in (512, 1024, 2048):
            sol = steady_solve(p, SteadyConfig(n_cells=n))
            step = 8192 // n
            diff = np.abs(fine.values[::step] - sol.values)
            mask = (sol.grid > 0.05) & (sol.grid < 0.95)
            errs.append(diff[mask].max())
        assert errs[0] > errs[1] > errs[2]
        for big, small in zip(errs, errs[1:]):
            assert 1.7 < big / small < 3.2

    def test_cross_solver_uniqueness_small_case(self):
        p = ModelParams(0.75, 0.6667, 0.25, 0.25, 0.02)
        n_lat = p.n_sites + 1
        steady = steady_solve(p, SteadyConfig(n_cells=40 * n_lat))
        sigma = linear_initial(p, 40 * n_lat)
        pde = pde_evolve(p, sigma, PdeConfig(n_cells=40 * n_lat,
                                             t_end=50.0 / p.epsilon))[-1][1]
        assert sup_distance(steady, pde) < 1e-6
        mf = meanfield_steady(p)
        sv = steady.values[::40]
        assert np.max(np.abs(sv - mf.values)) < 2e-3
