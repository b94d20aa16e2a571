"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
summary.  The heavy criteria (3, 4, 5, 7, 8) carry the `slow` marker so that
`pytest -m "not slow"` gives a quick signal, but all of them run by default.
"""

import numpy as np
import pytest

from taseplk import verify


def _announce(num: int, title: str, report: dict) -> None:
    print(f"[{'PASS' if report['ok'] else 'FAIL'}] criterion {num}: {title}")


def _failing(report: dict) -> list:
    return [c for c in report.get("cases", []) if not c.get("ok", True)]


def test_criterion_1_phase_diagram_reproduction():
    report = verify.check_sweep_labels(resolution=200)
    _announce(1, "phase-diagram label sets at 200x200", report)
    assert report["ok"], _failing(report)


def test_criterion_2_caption_spot_checks():
    report = verify.check_caption_phases()
    n_ok = sum(c["ok"] for c in report["cases"])
    _announce(2, f"classification of worked parameter sets ({n_ok}/22)", report)
    assert report["ok"], _failing(report)


@pytest.mark.slow
def test_criterion_3_steady_convergence_to_limit_profile():
    report = verify.check_steady_membership()
    n_ok = sum(c["ok"] for c in report["cases"])
    _announce(3, f"steady solutions in the limit band ({n_ok}/44 sub-checks)",
              report)
    for c in _failing(report):
        print(f"       failing sub-check: {c['name']} at eps={c['epsilon']}, "
              f"delta={c['delta']}")
    assert report["ok"], _failing(report)


@pytest.mark.slow
def test_criterion_4_cross_solver_uniqueness():
    report = verify.check_uniqueness(eps=0.01, tol=1e-3)
    _announce(4, "steady/PDE/mean-field pairwise within 1e-3", report)
    for c in report["cases"]:
        print(f"       {c['name']}: s-p {c['steady_vs_pde']:.1e}, "
              f"s-m {c['steady_vs_meanfield']:.1e}, "
              f"p-m {c['pde_vs_meanfield']:.1e}")
    assert report["ok"], _failing(report)


@pytest.mark.slow
def test_criterion_5_global_attractivity_and_ordering():
    report = verify.check_attractivity(eps=0.01, tol=1e-3)
    _announce(5, "attractivity from 3 initial profiles per phase", report)
    assert report["ok"], _failing(report)
    ordering = verify.check_monotone_ordering(n_pairs=20)
    _announce(5, "monotone ordering on 20 random ordered pairs", ordering)
    assert ordering["ok"], _failing(ordering)


def test_criterion_6_boundary_layer_ode():
    report = verify.check_layer_ode(n_random=10)
    _announce(6, "layer closed form vs RK4 and its sharp limit", report)
    assert report["ok"], _failing(report)


@pytest.mark.slow
def test_criterion_7_upper_lower_verification():
    report = verify.check_bounds()
    _announce(7, "two-sided envelopes verified, steady state between", report)
    for c in report["cases"]:
        print(f"       {c['name']}: passing eps = {c['passing_epsilon']}")
    assert report["ok"], _failing(report)


@pytest.mark.slow
def test_criterion_8_stochastic_consistency():
    report = verify.check_kmc()
    _announce(8, "event-driven run at N=1999 tracks the limit profile", report)
    print(f"       max stderr {report['max_stderr']:.4f}, max deviation "
          f"{report['max_deviation_outside_window']:.4f} at "
          f"x={report['argmax_x']:.3f}")
    assert report["ok"], report


def test_criterion_9_symmetry_suite():
    report = verify.check_symmetry(n_cases=10)
    _announce(9, "particle-hole involution and solver equivariance", report)
    assert report["ok"], _failing(report)
