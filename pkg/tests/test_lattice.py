import numpy as np
import pytest

from taseplk.continuum import SteadyConfig, steady_solve
from taseplk.core import ModelParams, ParameterError, Tolerance
from taseplk.lattice import (
    KmcConfig,
    LatticeState,
    MeanFieldState,
    kmc_run,
    meanfield_evolve,
    meanfield_rhs,
    meanfield_steady,
)


class TestMeanFieldRhs:
    def test_balanced_constant_is_stationary(self):
        # alpha = c = 1 - beta with the kinetics balanced at c
        p = ModelParams(0.4, 0.6, 0.2 * 2.0 / 3.0, 0.2, 0.05)
        # omega_a (1 - c) = omega_d c at c = 0.4: omega_a = omega_d * 2/3
        st = MeanFieldState(np.full(p.n_sites, 0.4))
        assert np.max(np.abs(meanfield_rhs(st, p))) < 1e-15

    def test_half_constant_equal_rates(self):
        p = ModelParams(0.5, 0.5, 0.25, 0.25, 0.05)
        st = MeanFieldState(np.full(p.n_sites, 0.5))
        assert np.max(np.abs(meanfield_rhs(st, p))) == 0.0

    def test_three_site_hand_expansion(self):
        p = ModelParams(0.3, 0.2, 0.4, 0.1, 0.25)  # N = 3
        assert p.n_sites == 3
        phi = np.array([0.11, 0.57, 0.83])
        wa, wd = p.epsilon * p.omega_a, p.epsilon * p.omega_d
        a, bb = 0.3, 0.8
        expected = np.array([
            a * (1 - phi[0]) - phi[0] * (1 - phi[1])
            + wa * (1 - phi[0]) - wd * phi[0],
            phi[0] * (1 - phi[1]) - phi[1] * (1 - phi[2])
            + wa * (1 - phi[1]) - wd * phi[1],
            phi[1] * (1 - phi[2]) - phi[2] * (1 - bb)
            + wa * (1 - phi[2]) - wd * phi[2],
        ])
        got = meanfield_rhs(MeanFieldState(phi), p)
        assert np.max(np.abs(got - expected)) < 1e-16

    def test_inward_pointing_at_edges(self):
        p = ModelParams(0.3, 0.4, 0.2, 0.1, 0.1)
        zeros = MeanFieldState(np.zeros(p.n_sites))
        assert np.all(meanfield_rhs(zeros, p) >= 0.0)
        ones = MeanFieldState(np.ones(p.n_sites))
        assert np.all(meanfield_rhs(ones, p) <= 0.0)


class TestMeanFieldSteady:
    def test_flat_solution(self):
        p = ModelParams(0.5, 0.5, 0.25, 0.25, 0.05)
        prof = meanfield_steady(p)
        assert np.max(np.abs(prof.values - 0.5)) < 1e-12

    def test_matches_long_time_integration(self):
        p = ModelParams(0.25, 0.125, 0.25, 0.25, 0.05)  # N = 19
        steady = meanfield_steady(p)
        x = np.arange(1, p.n_sites + 1) / (p.n_sites + 1.0)
        state = MeanFieldState(p.alpha + (p.beta_bar - p.alpha) * x)
        final = meanfield_evolve(p, state, t_end=1e4)
        assert np.max(np.abs(final.phi - steady.values[1:-1])) < 1e-8

    def test_residual_below_tolerance(self):
        p = ModelParams(0.4022, 0.2740, 0.2, 0.1, 0.02)
        prof = meanfield_steady(p, Tolerance())
        st = MeanFieldState(prof.values[1:-1])
        assert np.max(np.abs(meanfield_rhs(st, p))) < 1e-10

    def test_bulk_consistency_with_continuum(self):
        # away from boundary layers the lattice fixed point approaches the
        # continuum solution at first order in the spacing (ratio ~2 per
        # halving); inside layers the gap is epsilon-independent
        diffs = []
        for eps in (0.02, 0.01, 0.005):
            p = ModelParams(0.8125, 0.125, 0.25, 0.25, eps)
            mf = meanfield_steady(p)
            mult = 80
            ct = steady_solve(p, SteadyConfig(n_cells=mult * (p.n_sites + 1)))
            cv = ct.values[::mult]
            mask = mf.grid > 0.2  # left boundary layer excluded
            diffs.append(float(np.max(np.abs(mf.values - cv)[mask])))
        assert diffs[0] > diffs[1] > diffs[2]
        assert 1.4 < diffs[1] / diffs[2] < 2.8
        assert diffs[2] < 1e-5


class TestLatticeState:
    def test_validation(self):
        LatticeState(np.zeros(12, dtype=np.int8))
        with pytest.raises(ParameterError):
            LatticeState(np.array([0, 2, 0]))
        with pytest.raises(ParameterError):
            LatticeState(np.zeros(12), time=-1.0)

    def test_random_respects_profile(self):
        p = ModelParams(0.25, 0.125, 0.25, 0.25, 0.01)
        rng = np.random.default_rng(0)
        st = LatticeState.random(p, rng)
        assert st.occupancy.size == p.n_sites + 2
        assert set(np.unique(st.occupancy)) <= {0, 1}


class TestKmc:
    def test_determinism(self):
        p = ModelParams(0.25, 0.125, 0.25, 0.25, 1.0 / 101)
        cfg = KmcConfig(seed=42, t_burn=50.0, t_sample=200.0, n_replicas=2)
        r1 = kmc_run(p, cfg)
        r2 = kmc_run(p, cfg)
        assert np.array_equal(r1.profile.values, r2.profile.values)
        assert np.array_equal(r1.stderr, r2.stderr)
        r3 = kmc_run(p, KmcConfig(seed=43, t_burn=50.0, t_sample=200.0,
                                  n_replicas=2))
        assert not np.array_equal(r1.profile.values, r3.profile.values)

    def test_pure_kinetics_reaches_isotherm(self):
        # hopping and boundaries off: every site relaxes to K/(K+1)
        p = ModelParams(0.3, 0.3, 0.5, 0.25, 1.0 / 101)  # K = 2
        cfg = KmcConfig(seed=7, t_burn=3000.0, t_sample=30000.0, n_replicas=6)
        res = kmc_run(p, cfg, hop_rate=0.0, couple_boundaries=False)
        bulk = res.profile.values[1:-1]
        mean = bulk.mean()
        # replica scatter of the global mean
        sem = res.replica_means.mean(axis=1).std(ddof=1) / np.sqrt(6)
        assert abs(mean - p.isotherm) < 3.0 * max(sem, 1e-4)

    def test_profile_tracks_meanfield(self):
        p = ModelParams(0.25, 0.125, 0.25, 0.25, 1.0 / 201)
        mf = meanfield_steady(p)
        cfg = KmcConfig(seed=11, t_burn=1500.0, t_sample=6000.0, n_replicas=6)
        res = kmc_run(p, cfg, init_profile=mf)
        # the stochastic wall wanders over a region that shrinks with the
        # spacing; at N = 200 it is still wide, so exclude generously
        mask = np.abs(res.profile.grid - 0.25) > 0.15
        dev = np.abs(res.profile.values - mf.values)[mask]
        assert dev.max() < 0.05

    def test_hole_symmetry_statistical(self):
        p = ModelParams(0.3, 0.15, 0.3, 0.15, 1.0 / 101)
        cfg = KmcConfig(seed=5, t_burn=1000.0, t_sample=8000.0, n_replicas=8)
        res = kmc_run(p, cfg)
        res_t = kmc_run(p.hole_transformed(), cfg)
        mirrored = 1.0 - res_t.profile.values[::-1]
        sigma = np.sqrt(res.stderr**2 + res_t.stderr[::-1] ** 2)
        diff = np.abs(res.profile.values - mirrored)
        # interior sites within 3 sigma except a small tolerated fraction
        inner = slice(1, -1)
        frac_bad = np.mean(diff[inner] > 3.0 * np.maximum(sigma[inner], 1e-4))
        assert frac_bad < 0.02
