import math

import numpy as np
import pytest

from taseplk.bounds import (
    BoundaryLayer,
    LayerDomainError,
    UnsupportedConstructionError,
    build_bounds,
    verify_bound,
    w_closed_form,
    w_limit,
)
from taseplk.core import DensityProfile, ModelParams, in_neighborhood, uniform_grid
from taseplk.phase import classify, limit_profile


def rk4_layer(layer, x_target, step=1e-6):
    w = layer.w0
    span = x_target - layer.x0
    n = max(1, int(round(abs(span) / step)))
    h = span / n
    c = 2.0 * layer.slowdown / layer.epsilon

    def f(w):
        return -c * (w - layer.a_low) * (w - layer.a_high)

    for _ in range(n):
        k1 = f(w)
        k2 = f(w + 0.5 * h * k1)
        k3 = f(w + 0.5 * h * k2)
        k4 = f(w + h * k3)
        w += (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return w


class TestLayerClosedForm:
    def test_anchor_condition(self):
        lay = BoundaryLayer(0.2, 0.37, 0.66, 0.03)
        assert lay.value(0.37) == pytest.approx(0.66, abs=1e-15)

    def test_equilibria(self):
        up = BoundaryLayer(0.25, 0.0, 0.75, 0.01)
        lo = BoundaryLayer(0.25, 0.0, 0.25, 0.01)
        for x in (0.2, 0.9):
            assert up.value(x) == 0.75
            assert lo.value(x) == 0.25

    def test_rk4_oracle_interior(self):
        lay = BoundaryLayer(0.25, 0.5, 0.5, 0.05)
        for xt in (0.4, 0.6):
            assert abs(lay.value(xt) - rk4_layer(lay, xt)) < 1e-9

    def test_rk4_oracle_slowdown(self):
        lay = BoundaryLayer(0.3, 0.5, 0.45, 0.04, slowdown=0.6)
        for xt in (0.42, 0.58):
            assert abs(lay.value(xt) - rk4_layer(lay, xt)) < 1e-9

    def test_degenerate_algebraic(self):
        lay = BoundaryLayer(0.5, 0.0, 0.8, 0.02)
        for xt in (0.05, 0.3):
            assert abs(lay.value(xt) - rk4_layer(lay, xt)) < 1e-9

    def test_ode_residual_property(self):
        rng = np.random.default_rng(9)
        for _ in range(20):
            a = rng.uniform(0.05, 0.45)
            eps = rng.uniform(0.01, 0.1)
            w0 = rng.uniform(a + 0.01, 1 - a - 0.01)
            lay = BoundaryLayer(a, 0.5, w0, eps)
            xs = rng.uniform(0.3, 0.7, 50)
            h = 1e-7
            for x in xs:
                fd = (lay.value(x + h) - lay.value(x - h)) / (2 * h)
                assert abs(fd - lay.dx(x)) < 1e-6 / eps

    def test_monotonicity_signs(self):
        interior = BoundaryLayer(0.25, 0.5, 0.5, 0.02)
        above = BoundaryLayer(0.25, 0.0, 0.9, 0.02)
        assert interior.dx(0.5) > 0.0
        assert above.dx(0.1) < 0.0

    def test_blowup_reported(self):
        lay = BoundaryLayer(0.3, 0.5, 0.1, 0.02)  # below the lower plateau
        pole = lay.blowup_position()
        assert pole > 0.5
        with pytest.raises(LayerDomainError):
            lay.value(pole + 0.05)


class TestLayerLimit:
    def test_three_cases(self):
        hi = w_limit(BoundaryLayer(0.25, 0.0, 0.9, 1e-4))
        assert hi.evaluate(0.0) == 0.9
        assert hi.evaluate(0.5) == 0.75
        lo = w_limit(BoundaryLayer(0.25, 1.0, 0.1, 1e-4))
        assert lo.evaluate(1.0) == 0.1
        assert lo.evaluate(0.5) == 0.25
        mid = w_limit(BoundaryLayer(0.25, 0.5, 0.5, 1e-4))
        assert mid.evaluate(0.2) == 0.25
        assert mid.evaluate(0.5) == 0.5
        assert mid.evaluate(0.8) == 0.75

    def test_plateau_anchor_no_jump(self):
        lim = w_limit(BoundaryLayer(0.25, 0.0, 0.75, 1e-4))
        assert lim.breakpoints == ()
        assert lim.evaluate(0.7) == 0.75

    def test_self_consistency_small_epsilon(self):
        lay = BoundaryLayer(0.25, 0.5, 0.5, 1e-4)
        grid = uniform_grid(500)
        prof = DensityProfile(grid, np.array([lay.value(float(x))
                                              for x in grid]))
        assert in_neighborhood(prof, w_limit(lay), 0.02)


class TestConstructions:
    def test_s1_reproduces_worked_example(self):
        # equal rates 5/8, both densities 1/32: the shifted-wall envelopes
        p = ModelParams(1.0 / 32, 1.0 / 32, 5.0 / 8, 5.0 / 8, 0.005)
        up, lo = build_bounds(p, delta=0.05)
        lim = limit_profile(p)
        xs = np.linspace(0, 1, 801)
        vu = up.value_many(xs)
        vl = lo.value_many(xs)
        vh = lim.evaluate_many(xs)
        assert np.all(vl <= vh + 1e-9) and np.all(vh <= vu + 1e-9)
        ru, rl = verify_bound(up, p), verify_bound(lo, p)
        assert ru["status"] == "pass" and rl["status"] == "pass"

    def test_s6_margin_scales_with_delta(self):
        p = ModelParams(0.75, 0.75, 0.25, 0.25, 0.02)
        up, lo = build_bounds(p, delta=0.05)
        ru = verify_bound(up, p)
        du = up.free_params["delta_u"]
        # interior operator margin of the pure-layer envelope is 2 Omega du
        assert ru["operator_margin"] >= 2.0 * 0.25 * du - 1e-9

    def test_s3_lower_piecewise_operator(self):
        p = ModelParams(0.75, 0.3333, 0.25, 0.25, 0.0001)
        up, lo = build_bounds(p, delta=0.05)
        dl = lo.free_params["delta_l"]
        x_q = 1.0 - (0.5 - p.beta) / 0.25
        # flat part: L = 2 Omega delta_l; ramp part: L = 0; cusp slopes 0 < Omega
        piece_flat, piece_ramp = lo.pieces
        from taseplk.bounds import _operator_at

        for x in (0.1, 0.3):
            L = _operator_at(p, p.epsilon, piece_flat.value(x),
                             piece_flat.dx(x), piece_flat.dxx(x))
            assert L == pytest.approx(2 * 0.25 * dl, abs=1e-12)
        for x in (0.8, 0.95):
            L = _operator_at(p, p.epsilon, piece_ramp.value(x),
                             piece_ramp.dx(x), piece_ramp.dxx(x))
            assert L == pytest.approx(0.0, abs=1e-12)
        rl = verify_bound(lo, p)
        (cusp,) = rl["cusps"]
        assert cusp["x"] == pytest.approx(x_q)
        assert cusp["left_slope"] == pytest.approx(0.0)
        assert cusp["right_slope"] == pytest.approx(0.25)

    def test_s4_lower_is_layer_plus_ramp(self):
        p = ModelParams(7.0 / 16, 1.0 / 8, 0.25, 0.25, 0.01)
        up, lo = build_bounds(p, delta=0.05)
        assert len(lo.pieces) == 1
        kinds = {type(t).__name__ for t in lo.pieces[0].terms}
        assert kinds == {"_Layer", "_Affine"}
        # anchored at the left boundary value
        assert lo.value(0.0) == pytest.approx(p.alpha, abs=1e-12)

    def test_unsupported_general_phases(self):
        for a, b in [(0.4316, 0.7140), (0.8184, 0.7140), (0.2651, 0.7140)]:
            p = ModelParams(a, b, 0.2, 0.1, 0.01)
            with pytest.raises(UnsupportedConstructionError):
                build_bounds(p)

    def test_upper_dominates_lower_everywhere(self):
        for (a, b, oa, od, eps) in [
            (0.25, 0.125, 0.25, 0.25, 0.005),
            (0.75, 0.6667, 0.25, 0.25, 0.02),
            (0.4022, 0.2740, 0.2, 0.1, 0.02),
        ]:
            p = ModelParams(a, b, oa, od, eps)
            up, lo = build_bounds(p, delta=0.05)
            xs = np.linspace(0, 1, 501)
            assert np.all(up.value_many(xs) - lo.value_many(xs) >= -1e-9)

    def test_g9_wall_envelopes(self):
        p = ModelParams(0.1124, 0.2740, 0.2, 0.1, 0.001)
        up, lo = build_bounds(p, delta=0.05)
        ru, rl = verify_bound(up, p, 3000), verify_bound(lo, p, 3000)
        assert ru["status"] == "pass" and rl["status"] == "pass"
        _, feats = classify(p)
        # shifted walls bracket the true wall position
        assert up.cusps[0] < feats.x_d < lo.cusps[0]

    def test_verify_reports_failure_as_data(self):
        # at a too-large epsilon the sign checks fail but nothing raises
        p = ModelParams(0.25, 0.125, 0.25, 0.25, 0.05)
        up, lo = build_bounds(p, delta=0.05)
        rep = verify_bound(up, p)
        assert rep["status"] in ("pass", "fail")
        assert "operator_margin" in rep
