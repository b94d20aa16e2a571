import math

import numpy as np
import pytest

from taseplk.core import ModelParams
from taseplk.phase import (
    CharacteristicCurve,
    ClassificationError,
    CurveRangeError,
    characteristic_eval,
    classify,
    domain_wall,
    limit_profile,
    phase_sweep,
    singular_point,
)


def rk4_curve(omega_d, k, x0, y0, x1, n=100000):
    """Fixed-step RK4 oracle for the characteristic ODE."""
    rbar = k / (k + 1.0)

    def f(r):
        return (k + 1.0) * omega_d * (r - rbar) / (2.0 * (r - 0.5))

    h = (x1 - x0) / n
    r = y0
    for _ in range(n):
        k1 = f(r)
        k2 = f(r + 0.5 * h * k1)
        k3 = f(r + 0.5 * h * k2)
        k4 = f(r + h * k3)
        r += (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return r


class TestCharacteristicCurve:
    def test_isotherm_anchor_is_constant(self):
        cur = CharacteristicCurve(0.1, 2.0, 0.3, 2.0 / 3.0)
        for x in (0.0, 0.5, 1.0):
            assert characteristic_eval(cur, x) == pytest.approx(2.0 / 3.0)

    def test_equal_rates_degenerate_affine(self):
        # right-anchored curve of the equal-rates family is a straight ramp
        beta, om = 0.125, 0.25
        cur = CharacteristicCurve(om, 1.0, 1.0, 1.0 - beta)
        for x in (0.0, 0.3, 1.0):
            assert cur.value(x) == pytest.approx(1.0 - beta - om + om * x)

    def test_against_rk4_backward(self):
        cur = CharacteristicCurve(0.1, 2.0, 1.0, 0.726)
        want = rk4_curve(0.1, 2.0, 1.0, 0.726, 0.0)
        assert cur.value(0.0) == pytest.approx(want, abs=1e-8)

    def test_against_rk4_low_branch(self):
        cur = CharacteristicCurve(0.1, 2.0, 0.0, 0.1124)
        want = rk4_curve(0.1, 2.0, 0.0, 0.1124, 0.8)
        assert cur.value(0.8) == pytest.approx(want, abs=1e-8)

    def test_first_integral_invariant(self):
        from taseplk.phase import _first_integral

        cur = CharacteristicCurve(0.1, 2.7, 1.0, 0.85)
        vals = [_first_integral(cur.value(x), 0.1, 2.7) - x
                for x in np.linspace(0, 1, 17)]
        assert max(vals) - min(vals) < 1e-10

    def test_ode_consistency_finite_difference(self):
        cur = CharacteristicCurve(0.1, 2.0, 0.0, 0.2)
        h = 1e-6
        for x in (0.1, 0.4, 0.7):
            fd = (cur.value(x + h) - cur.value(x - h)) / (2 * h)
            assert fd == pytest.approx(cur.slope_of(cur.value(x)), abs=1e-6)

    def test_hole_transform_of_curve(self):
        cur = CharacteristicCurve(0.1, 2.0, 1.0, 0.726)
        img = cur.hole_transformed()
        assert img.k == pytest.approx(0.5)
        assert img.omega_d == pytest.approx(0.2)
        for x in (0.1, 0.6, 0.9):
            assert img.value(1.0 - x) == pytest.approx(1.0 - cur.value(x),
                                                       abs=1e-12)


class TestSingularPoint:
    def test_equal_rates_left(self):
        # x_p = (1/2 - alpha) / Omega
        cur = CharacteristicCurve(0.25, 1.0, 0.0, 0.4583)
        assert singular_point(cur) == pytest.approx(0.1668)

    def test_equal_rates_right(self):
        # x_q = 1 - (1/2 - beta) / Omega read off the right-anchored ramp
        cur = CharacteristicCurve(0.25, 1.0, 1.0, 1.0 - 0.3333)
        x_q = 1.0 - (0.5 - 0.3333) / 0.25
        # the ramp crosses 1/2 going backward
        assert singular_point(cur) == pytest.approx(x_q)

    def test_anchor_on_half(self):
        cur = CharacteristicCurve(0.1, 2.0, 0.37, 0.5, region="mid")
        assert singular_point(cur) == pytest.approx(0.37)

    def test_repelled_branch_errors(self):
        cur = CharacteristicCurve(0.1, 2.0, 1.0, 0.9)  # above the isotherm
        with pytest.raises(ClassificationError):
            singular_point(cur)

    def test_beyond_validity_raises_with_boundary(self):
        cur = CharacteristicCurve(0.1, 2.0, 0.0, 0.1124)
        x_star = singular_point(cur)
        with pytest.raises(CurveRangeError) as err:
            cur.value(x_star + 0.05)
        assert err.value.boundary == pytest.approx(x_star)


class TestDomainWall:
    def test_equal_rates_closed_form(self):
        a = CharacteristicCurve(0.25, 1.0, 0.0, 0.25)
        b = CharacteristicCurve(0.25, 1.0, 1.0, 0.875)
        assert domain_wall(a, b) == pytest.approx(0.25, abs=1e-12)

    def test_symmetric_case_gives_half(self):
        a = CharacteristicCurve(0.25, 1.0, 0.0, 0.2)
        b = CharacteristicCurve(0.25, 1.0, 1.0, 0.8)
        assert domain_wall(a, b) == pytest.approx(0.5, abs=1e-12)

    def test_general_case_scan_oracle(self):
        om, k = 0.1, 2.0
        a = CharacteristicCurve(om, k, 0.0, 0.1124)
        b = CharacteristicCurve(om, k, 1.0, 0.7260)
        x_d = domain_wall(a, b)
        assert abs(a.value(x_d) + b.value(x_d) - 1.0) < 1e-10
        xs = np.linspace(0, 1, 20001)
        g = np.array([a.value(x) + b.value(x) - 1.0 for x in xs[::20]])
        dense = xs[::20]
        assert abs(dense[np.argmin(np.abs(g))] - x_d) < 2e-3

    def test_no_wall_raises(self):
        a = CharacteristicCurve(0.25, 1.0, 0.0, 0.1)
        b = CharacteristicCurve(0.25, 1.0, 1.0, 0.3)  # sum stays below 1
        with pytest.raises(ClassificationError):
            domain_wall(a, b)


class TestClassify:
    def test_spec_examples(self):
        lab, feats = classify(ModelParams(0.25, 0.125, 0.25, 0.25, 0.01))
        assert (lab.regime, lab.index) == ("special", 1)
        assert feats.x_d == pytest.approx(0.25)
        lab, _ = classify(ModelParams(0.75, 0.6667, 0.25, 0.25, 0.01))
        assert (lab.regime, lab.index) == ("special", 6)
        lab, _ = classify(ModelParams(0.8184, 0.7140, 0.2, 0.1, 0.01))
        assert (lab.regime, lab.index) == ("general", 8)

    def test_symmetry_reduction(self):
        # alpha < beta with equal rates goes through the hole transform
        lab, _ = classify(ModelParams(0.125, 0.25, 0.25, 0.25, 0.01))
        assert lab.applied_symmetry and lab.index == 1
        # K < 1 likewise
        lab2, _ = classify(ModelParams(0.7140, 0.8184, 0.1, 0.2, 0.01))
        assert lab2.applied_symmetry and (lab2.regime, lab2.index) == ("general", 8)

    def test_boundary_tie_flag(self):
        lab, _ = classify(ModelParams(1.0 / 32, 1.0 / 32, 5.0 / 8, 5.0 / 8, 0.01))
        assert lab.index == 1   # lower index wins on the tie
        lab2, _ = classify(ModelParams(0.5, 0.25, 0.25, 0.25, 0.01))
        assert lab2.on_boundary  # alpha exactly on the 1/2 line

    def test_xp_beyond_domain_flagging(self):
        _, feats = classify(ModelParams(0.0242, 0.2740, 0.2, 0.1, 0.01))
        assert feats.x_p_beyond_domain and feats.y_a_defined
        _, feats2 = classify(ModelParams(0.1764, 0.2740, 0.2, 0.1, 0.01))
        assert not feats2.x_p_beyond_domain and feats2.y_a is None


class TestLimitProfile:
    def test_phase1_values(self):
        p = ModelParams(0.25, 0.125, 0.25, 0.25, 0.01)
        prof = limit_profile(p)
        assert prof.evaluate(0.0) == pytest.approx(0.25)
        assert prof.evaluate(0.25) == pytest.approx(0.3125)
        assert prof.evaluate(0.25 + 1e-13) == pytest.approx(0.6875)
        assert prof.evaluate(1.0) == pytest.approx(0.875)
        (bp,) = prof.breakpoints
        assert bp.tag == "domain-wall"
        assert bp.left_value + bp.right_value == pytest.approx(1.0, abs=1e-10)

    def test_phase6_shape(self):
        p = ModelParams(0.75, 0.6667, 0.25, 0.25, 0.01)
        prof = limit_profile(p)
        assert prof.evaluate(0.0) == pytest.approx(0.75)
        assert prof.evaluate(0.5) == pytest.approx(0.5)
        assert prof.evaluate(1.0) == pytest.approx(1.0 - 0.6667)
        tags = {b.tag for b in prof.breakpoints}
        assert tags == {"left-boundary-layer", "right-boundary-layer"}

    def test_wall_jump_consistency_general(self):
        p = ModelParams(0.1124, 0.2740, 0.2, 0.1, 0.01)
        prof = limit_profile(p)
        wall = [b for b in prof.breakpoints if b.tag == "domain-wall"]
        assert len(wall) == 1
        assert wall[0].left_value + wall[0].right_value == pytest.approx(
            1.0, abs=1e-10
        )
        assert wall[0].jump >= 0.0

    def test_pieces_monotone_and_physical(self):
        for a, b, oa, od in [(0.25, 0.125, 0.25, 0.25),
                             (0.2651, 0.7140, 0.2, 0.1),
                             (0.4316, 0.7140, 0.2, 0.1)]:
            prof = limit_profile(ModelParams(a, b, oa, od, 0.01))
            xs = np.linspace(0, 1, 501)
            vals = prof.evaluate_many(xs)
            assert vals.min() >= -1e-12 and vals.max() <= 1 + 1e-12

    def test_hole_transform_consistency_sampled(self):
        # classify+assemble of transformed parameters equals the transformed
        # assembly, on a random parameter sample
        rng = np.random.default_rng(3)
        n_checked = 0
        for _ in range(300):
            a, b = rng.uniform(0.05, 0.95, 2)
            oa = float(rng.choice([0.25, 0.2, 0.3]))
            od = float(rng.choice([0.25, 0.1, 0.15]))
            p = ModelParams(a, b, oa, od, 0.01)
            lab, _ = classify(p)
            if lab.on_boundary:
                continue
            prof = limit_profile(p)
            prof_t = limit_profile(p.hole_transformed())
            xs = rng.uniform(0, 1, 40)
            v = prof.evaluate_many(xs)
            vt = prof_t.evaluate_many(1.0 - xs)
            assert np.max(np.abs(v - (1.0 - vt))) < 1e-10
            n_checked += 1
        assert n_checked > 200


class TestSweep:
    def test_equal_rates_panel(self):
        pm = phase_sweep(0.25, 0.25, 80)
        assert pm.label_set() == {1, 2, 3, 4, 5, 6}

    def test_large_omega_drops_low_phases(self):
        pm = phase_sweep(1.0, 1.0, 80)
        assert pm.label_set() == {2, 3, 6}

    def test_unequal_rates_panel(self):
        pm = phase_sweep(0.2, 0.1, 100)
        assert pm.label_set() == set(range(1, 12))

    def test_sweep_matches_pointwise_classify(self):
        pm = phase_sweep(0.2, 0.1, 60)
        rng = np.random.default_rng(5)
        for _ in range(30):
            i = rng.integers(0, 60)
            j = rng.integers(0, 60)
            p = ModelParams(pm.alphas[i], pm.betas[j], 0.2, 0.1, 0.01)
            lab, _ = classify(p)
            assert lab.index == pm.labels[j, i]

    def test_csv_and_segments(self, tmp_path):
        pm = phase_sweep(0.25, 0.25, 50)
        pm.to_csv(tmp_path / "map.csv")
        pm.segments_to_csv(tmp_path / "seg.csv")
        header = (tmp_path / "map.csv").read_text().splitlines()[0]
        assert header == "alpha,beta,phase_index,boundary_flag"
        assert len(pm.boundary_segments()) > 0
