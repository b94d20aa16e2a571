"""Two-sided envelopes for the steady problem.

Each supported phase gets an explicit upper and lower profile built from
three ingredients: characteristic curves with slightly shifted boundary data
and kinetic rates, affine/parabolic correction pieces, and the boundary-layer
ODE

    (eps/2) w' = -e (w - A)(w - A_bar),      A_bar = 1 - A >= 1/2,

whose logistic closed form (and algebraic form when A = A_bar = 1/2) is
evaluated exactly, including its sharp-interface limit.  A construction is a
piecewise-C^2 function; the verifier checks, with exact piece derivatives,
the three defining inequalities of a weak upper (lower) solution: boundary
dominance, the sign of the steady operator on every smooth piece, and the
slope drop (rise) across each cusp.  Failures are data, not exceptions: the
conditions only have to hold for small enough eps, and the report records
the margins and the largest passing eps of a ladder.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .core import (
    Breakpoint,
    DensityProfile,
    ModelParams,
    ParameterError,
    Piece,
    PiecewiseLimitProfile,
    in_neighborhood,
)
from .phase import CharacteristicCurve, PhaseLabel, classify

__all__ = [
    "BoundaryLayer",
    "dump_envelope_csv",
    "LayerDomainError",
    "UnsupportedConstructionError",
    "ConstructionInfeasible",
    "BoundConstruction",
    "BoundPiece",
    "w_closed_form",
    "w_limit",
    "build_bounds",
    "verify_bound",
    "verify_ladder",
    "SUPPORTED_SPECIAL",
    "SUPPORTED_GENERAL",
]

SUPPORTED_SPECIAL = (1, 2, 3, 4, 5, 6)
SUPPORTED_GENERAL = (1, 2, 3, 4, 5, 6, 9, 10)

_SLACK = 1e-9   # numerical slack on weak inequalities


class LayerDomainError(ValueError):
    """Layer evaluated beyond its finite blow-up position."""

    def __init__(self, msg: str, boundary: float):
        super().__init__(msg)
        self.boundary = boundary


class UnsupportedConstructionError(NotImplementedError):
    """Phases whose envelope needs the sqrt(eps)-matched interior curve."""


class ConstructionInfeasible(RuntimeError):
    """No admissible free parameters found by the halving search."""


@dataclass(frozen=True)
class BoundaryLayer:
    """Exact solution of the layer ODE through (x0, w0).

    ``a_low`` is the lower plateau A (the upper one is 1 - A); ``slowdown``
    multiplies the right-hand side, slowing the transition without moving
    the plateaus.
    """

    a_low: float
    x0: float
    w0: float
    epsilon: float
    slowdown: float = 1.0

    def __post_init__(self) -> None:
        if self.a_low > 0.5 + 1e-14:
            raise ParameterError("layer needs A <= 1/2 (so that 1 - A >= 1/2)")
        if not (0.0 < self.slowdown <= 1.0):
            raise ParameterError("slowdown factor must be in (0, 1]")
        if self.epsilon <= 0:
            raise ParameterError("epsilon must be > 0")

    @property
    def a_high(self) -> float:
        return 1.0 - self.a_low

    @property
    def degenerate(self) -> bool:
        return abs(self.a_high - self.a_low) <= 1e-14

    @property
    def rate(self) -> float:
        """Exponential rate 2 e (A_bar - A) / eps of the non-degenerate layer."""
        return 2.0 * self.slowdown * (self.a_high - self.a_low) / self.epsilon

    def blowup_position(self) -> float:
        """Finite pole position, or +-inf when the solution is global."""
        a, ab, w0 = self.a_low, self.a_high, self.w0
        if self.degenerate:
            u0 = w0 - 0.5
            if abs(u0) <= 1e-15:
                return math.inf
            # denominator 1 + (2e/eps) u0 (x - x0) vanishes at:
            pole = self.x0 - self.epsilon / (2.0 * self.slowdown * u0)
            return pole
        if a + 1e-15 < w0 < ab - 1e-15 or abs(w0 - a) <= 1e-15 or abs(w0 - ab) <= 1e-15:
            return math.inf if w0 >= 0.5 else -math.inf
        r0 = (w0 - a) / (w0 - ab)
        # r(x) = r0 exp(rate (x - x0)) reaches 1 at the pole
        return self.x0 - math.log(r0) / self.rate

    def value(self, x: float) -> float:
        a, ab, w0 = self.a_low, self.a_high, self.w0
        if self.degenerate:
            u0 = w0 - 0.5
            if abs(u0) <= 1e-15:
                return 0.5
            den = 1.0 + (2.0 * self.slowdown / self.epsilon) * u0 * (x - self.x0)
            if den <= 0.0:
                raise LayerDomainError(
                    f"algebraic layer pole before x={x}", self.blowup_position()
                )
            return 0.5 + u0 / den
        if abs(w0 - a) <= 1e-15:
            return a
        if abs(w0 - ab) <= 1e-15:
            return ab
        r0 = (w0 - a) / (w0 - ab)
        s = self.rate * (x - self.x0)
        # w = (A - A_bar r)/(1 - r) with r = r0 exp(s), written overflow-free;
        # exterior branches (r0 > 0) blow up where r reaches 1
        if s >= 0.0:
            es = math.exp(-s)
            den = es - r0
            if w0 < a and den <= 1e-300:
                raise LayerDomainError(
                    f"layer pole at or before x={x}", self.blowup_position()
                )
            return (a * es - ab * r0) / den
        es = math.exp(s)
        den = 1.0 - r0 * es
        if r0 > 1.0 and den >= -1e-300:
            raise LayerDomainError(f"layer pole before x={x}", self.blowup_position())
        return (a - ab * r0 * es) / den

    def dx(self, x: float) -> float:
        w = self.value(x)
        return -(2.0 * self.slowdown / self.epsilon) * (w - self.a_low) * (
            w - self.a_high
        )

    def dxx(self, x: float) -> float:
        w = self.value(x)
        wx = -(2.0 * self.slowdown / self.epsilon) * (w - self.a_low) * (w - self.a_high)
        return -(2.0 * self.slowdown / self.epsilon) * (2.0 * w - 1.0) * wx

    def limit(self) -> PiecewiseLimitProfile:
        """Sharp-interface limit, on the sub-domain where the solution family
        stays bounded: [x0, 1] when w0 >= A_bar, [0, x0] when w0 <= A, all of
        [0, 1] for an interior transition."""
        a, ab, w0, x0 = self.a_low, self.a_high, self.w0, self.x0
        pieces: list[Piece] = []
        bps: list[Breakpoint] = []

        def tag_for(pos: float) -> str:
            if pos <= 1e-12:
                return "left-boundary-layer"
            if pos >= 1.0 - 1e-12:
                return "right-boundary-layer"
            return "domain-wall"

        if w0 >= ab - 1e-15:
            if x0 >= 1.0 - 1e-15:
                raise ParameterError("decaying layer anchored at the right edge")
            pieces.append(Piece(x0, x0, True, True, "point", c0=w0))
            pieces.append(Piece(x0, 1.0, False, True, "constant", c0=ab))
            if abs(w0 - ab) > 1e-10:
                bps.append(Breakpoint(x0, tag_for(x0), w0, ab))
            return PiecewiseLimitProfile(tuple(pieces), tuple(bps), x_min=x0)
        if w0 <= a + 1e-15:
            if x0 <= 1e-15:
                raise ParameterError("backward-decaying layer anchored at the left edge")
            pieces.append(Piece(0.0, x0, True, False, "constant", c0=a))
            pieces.append(Piece(x0, x0, True, True, "point", c0=w0))
            if abs(w0 - a) > 1e-10:
                bps.append(Breakpoint(x0, tag_for(x0), a, w0))
            return PiecewiseLimitProfile(tuple(pieces), tuple(bps), x_max=x0)
        if x0 <= 1e-15:
            pieces.append(Piece(0.0, 0.0, True, True, "point", c0=w0))
            pieces.append(Piece(0.0, 1.0, False, True, "constant", c0=ab))
            bps.append(Breakpoint(0.0, "left-boundary-layer", w0, ab))
        elif x0 >= 1.0 - 1e-15:
            pieces.append(Piece(0.0, 1.0, True, False, "constant", c0=a))
            pieces.append(Piece(1.0, 1.0, True, True, "point", c0=w0))
            bps.append(Breakpoint(1.0, "right-boundary-layer", a, w0))
        else:
            pieces.append(Piece(0.0, x0, True, False, "constant", c0=a))
            pieces.append(Piece(x0, x0, True, True, "point", c0=w0))
            pieces.append(Piece(x0, 1.0, False, True, "constant", c0=ab))
            bps.append(Breakpoint(x0, "domain-wall", a, ab))
        return PiecewiseLimitProfile(tuple(pieces), tuple(bps))


def w_closed_form(layer: BoundaryLayer, x: float) -> float:
    return layer.value(x)


def w_limit(layer: BoundaryLayer) -> PiecewiseLimitProfile:
    return layer.limit()


# ---------------------------------------------------------------------------
# Construction terms and pieces
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _Affine:
    c0: float
    c1: float = 0.0

    def value(self, x):
        return self.c0 + self.c1 * x

    def dx(self, x):
        return self.c1

    def dxx(self, x):
        return 0.0


@dataclass(frozen=True)
class _Parabola:
    z: float
    coef: float
    vertex: float

    def value(self, x):
        return self.z + self.coef * (x - self.vertex) ** 2

    def dx(self, x):
        return 2.0 * self.coef * (x - self.vertex)

    def dxx(self, x):
        return 2.0 * self.coef


@dataclass(frozen=True)
class _Curve:
    curve: CharacteristicCurve

    def value(self, x):
        return self.curve.value(x)

    def dx(self, x):
        return self.curve.slope_of(self.curve.value(x))

    def dxx(self, x):
        return self.curve.curvature_of(self.curve.value(x))


@dataclass(frozen=True)
class _Layer:
    layer: BoundaryLayer

    def value(self, x):
        return self.layer.value(x)

    def dx(self, x):
        return self.layer.dx(x)

    def dxx(self, x):
        return self.layer.dxx(x)


@dataclass(frozen=True)
class BoundPiece:
    x_lo: float
    x_hi: float
    terms: tuple

    def value(self, x: float) -> float:
        return sum(t.value(x) for t in self.terms)

    def dx(self, x: float) -> float:
        return sum(t.dx(x) for t in self.terms)

    def dxx(self, x: float) -> float:
        return sum(t.dxx(x) for t in self.terms)


@dataclass(frozen=True)
class BoundConstruction:
    """A candidate weak upper or lower solution at a fixed epsilon."""

    kind: str                       # "upper" | "lower"
    label: PhaseLabel
    epsilon: float
    pieces: tuple[BoundPiece, ...]
    free_params: dict
    limit: PiecewiseLimitProfile    # its sharp-interface limit

    def __post_init__(self) -> None:
        if self.kind not in ("upper", "lower"):
            raise ParameterError("kind must be 'upper' or 'lower'")
        pos = 0.0
        for p in self.pieces:
            if abs(p.x_lo - pos) > 1e-12:
                raise ParameterError("construction pieces must tile [0,1]")
            pos = p.x_hi
        if abs(pos - 1.0) > 1e-12:
            raise ParameterError("construction pieces must end at 1")

    @property
    def cusps(self) -> tuple[float, ...]:
        return tuple(p.x_hi for p in self.pieces[:-1])

    def value(self, x: float) -> float:
        for p in self.pieces:
            if p.x_lo <= x <= p.x_hi:
                return p.value(x)
        raise ParameterError(f"x={x} outside [0,1]")

    def value_many(self, xs) -> np.ndarray:
        """Vectorized evaluation; characteristic terms go through a cubic
        spline fitted to exact values (interpolation error ~1e-12, far below
        the 1e-8 sandwich slack this feeds)."""
        xs = np.atleast_1d(np.asarray(xs, dtype=float))
        out = np.empty(xs.size)
        order = np.argsort(xs)
        xs_sorted = xs[order]
        pos = 0
        vals = np.empty(xs.size)
        for p in self.pieces:
            hi = np.searchsorted(xs_sorted, p.x_hi, side="right")
            if p is self.pieces[-1]:
                hi = xs_sorted.size
            seg = xs_sorted[pos:hi]
            if seg.size:
                vals[pos:hi] = _piece_values(p, seg)
            pos = hi
        out[order] = vals
        return out




def _piece_values(piece: BoundPiece, xs: np.ndarray) -> np.ndarray:
    from scipy.interpolate import CubicSpline

    total = np.zeros(xs.size)
    for t in piece.terms:
        if isinstance(t, _Affine):
            total += t.c0 + t.c1 * xs
        elif isinstance(t, _Parabola):
            total += t.z + t.coef * (xs - t.vertex) ** 2
        elif isinstance(t, _Layer):
            total += np.array([t.value(float(x)) for x in xs]) if xs.size < 64 \
                else _layer_values(t.layer, xs)
        else:
            if xs.size <= 64:
                total += np.array([t.value(float(x)) for x in xs])
            else:
                knots = np.linspace(piece.x_lo, piece.x_hi, 801)
                exact = np.array([t.value(float(x)) for x in knots])
                total += CubicSpline(knots, exact)(xs)
    return total


def _layer_values(layer: BoundaryLayer, xs: np.ndarray) -> np.ndarray:
    a, ab, w0 = layer.a_low, layer.a_high, layer.w0
    if layer.degenerate:
        u0 = w0 - 0.5
        if abs(u0) <= 1e-15:
            return np.full(xs.size, 0.5)
        den = 1.0 + (2.0 * layer.slowdown / layer.epsilon) * u0 * (xs - layer.x0)
        if np.any(den <= 0.0):
            raise LayerDomainError("algebraic layer pole inside the range",
                                   layer.blowup_position())
        return 0.5 + u0 / den
    if abs(w0 - a) <= 1e-15:
        return np.full(xs.size, a)
    if abs(w0 - ab) <= 1e-15:
        return np.full(xs.size, ab)
    r0 = (w0 - a) / (w0 - ab)
    s = layer.rate * (xs - layer.x0)
    out = np.empty(xs.size)
    pos_mask = s >= 0.0
    es = np.exp(-s[pos_mask])
    den = es - r0
    out[pos_mask] = (a * es - ab * r0) / den
    es2 = np.exp(s[~pos_mask])
    out[~pos_mask] = (a - ab * r0 * es2) / (1.0 - r0 * es2)
    pole = layer.blowup_position()
    if np.isfinite(pole) and np.any((xs - layer.x0) * np.sign(pole - layer.x0)
                                    >= abs(pole - layer.x0) - 1e-300):
        bad = (xs >= pole) if pole > layer.x0 else (xs <= pole)
        if np.any(bad):
            raise LayerDomainError("layer pole inside the range", pole)
    return out


# ---------------------------------------------------------------------------
# Verification
# ---------------------------------------------------------------------------




def _piece_profile(piece: BoundPiece, xs: np.ndarray):
    """Vectorized (rho, rho_x, rho_xx) on xs; characteristic terms are
    spline-interpolated in value (exact at 2001 knots) with derivatives from
    the closed-form slope/curvature expressions in the value."""
    from scipy.interpolate import CubicSpline

    v = np.zeros(xs.size)
    dx = np.zeros(xs.size)
    dxx = np.zeros(xs.size)
    for t in piece.terms:
        if isinstance(t, _Affine):
            v += t.c0 + t.c1 * xs
            dx += t.c1
        elif isinstance(t, _Parabola):
            v += t.z + t.coef * (xs - t.vertex) ** 2
            dx += 2.0 * t.coef * (xs - t.vertex)
            dxx += 2.0 * t.coef
        elif isinstance(t, _Layer):
            lay = t.layer
            w = _layer_values(lay, xs)
            c = 2.0 * lay.slowdown / lay.epsilon
            wx = -c * (w - lay.a_low) * (w - lay.a_high)
            v += w
            dx += wx
            dxx += -c * (2.0 * w - 1.0) * wx
        else:
            cur = t.curve
            if xs.size <= 32:
                vals = np.array([cur.value(float(x)) for x in xs])
            else:
                knots = np.linspace(piece.x_lo, piece.x_hi, 2001)
                exact = np.array([cur.value(float(x)) for x in knots])
                vals = CubicSpline(knots, exact)(xs)
            v += vals
            dx += _curve_slopes(cur, vals)
            dxx += _curve_curvatures(cur, vals)
    return v, dx, dxx


def _curve_slopes(cur, vals: np.ndarray) -> np.ndarray:
    if cur.region == "constant":
        return np.zeros(vals.size)
    if cur.region == "affine":
        return np.full(vals.size, cur.omega_d)
    rbar = cur.rbar
    return (cur.k + 1.0) * cur.omega_d * (vals - rbar) / (2.0 * (vals - 0.5))


def _curve_curvatures(cur, vals: np.ndarray) -> np.ndarray:
    if cur.region in ("constant", "affine"):
        return np.zeros(vals.size)
    rbar = cur.rbar
    return (cur.k ** 2 - 1.0) * cur.omega_d ** 2 * (vals - rbar) / (
        8.0 * (vals - 0.5) ** 3
    )


def _operator_at(params: ModelParams, eps: float, rho, rho_x, rho_xx) -> float:
    return (
        0.5 * eps * rho_xx
        + (2.0 * rho - 1.0) * rho_x
        + params.omega_a * (1.0 - rho)
        - params.omega_d * rho
    )


def verify_bound(
    construction: BoundConstruction,
    params: ModelParams,
    grid: int = 2000,
) -> dict:
    """Check the weak upper/lower-solution inequalities numerically.

    Per smooth piece, the steady operator is evaluated with exact analytic
    derivatives at ~``grid`` interior points; cusp slopes use one-sided
    analytic derivatives.  Returns a report dict with status "pass"/"fail"
    (or "undefined" when a piece cannot be evaluated at this epsilon) and
    worst-case margins; failures are recorded, never raised.
    """
    eps = construction.epsilon
    upper = construction.kind == "upper"
    sign = -1.0 if upper else 1.0      # require sign * L >= -slack
    report: dict = {
        "kind": construction.kind,
        "phase": {"regime": construction.label.regime,
                  "index": construction.label.index},
        "epsilon": eps,
        "free_params": dict(construction.free_params),
        "pieces": [],
        "cusps": [],
        "boundary": {},
        "status": "pass",
    }

    def fail(reason: str) -> None:
        report["status"] = "fail"
        report.setdefault("reasons", []).append(reason)

    try:
        v0 = construction.value(0.0)
        v1 = construction.value(1.0)
    except Exception as exc:  # noqa: BLE001  (any piece failure is data)
        report["status"] = "undefined"
        report["reasons"] = [f"evaluation failed: {exc}"]
        return report
    b0 = v0 - params.alpha
    b1 = v1 - params.beta_bar
    report["boundary"] = {"left_margin": b0 if upper else -b0,
                          "right_margin": b1 if upper else -b1}
    if upper and (b0 < -_SLACK or b1 < -_SLACK):
        fail("boundary inequality violated")
    if not upper and (b0 > _SLACK or b1 > _SLACK):
        fail("boundary inequality violated")

    worst = math.inf
    for p in construction.pieces:
        npts = max(8, int(round(grid * (p.x_hi - p.x_lo))))
        xs = np.linspace(p.x_lo, p.x_hi, npts + 2)[1:-1]
        try:
            rho, rho_x, rho_xx = _piece_profile(p, xs)
        except LayerDomainError as exc:
            report["status"] = "undefined"
            report.setdefault("reasons", []).append(
                f"piece [{p.x_lo},{p.x_hi}] undefined at eps={eps}: {exc}"
            )
            return report
        margins = sign * (
            0.5 * eps * rho_xx
            + (2.0 * rho - 1.0) * rho_x
            + params.omega_a * (1.0 - rho)
            - params.omega_d * rho
        )
        m = float(margins.min())
        worst = min(worst, m)
        report["pieces"].append(
            {"interval": [p.x_lo, p.x_hi], "min_margin": m,
             "argmin_x": float(xs[int(margins.argmin())])}
        )
        if m < -_SLACK:
            fail(f"operator sign violated on [{p.x_lo:.4g},{p.x_hi:.4g}]")
    report["operator_margin"] = worst

    for left, right in zip(construction.pieces[:-1], construction.pieces[1:]):
        xc = left.x_hi
        try:
            sl, sr = left.dx(xc), right.dx(xc)
        except LayerDomainError as exc:
            report["status"] = "undefined"
            report.setdefault("reasons", []).append(f"cusp at {xc}: {exc}")
            return report
        drop = (sl - sr) if upper else (sr - sl)
        report["cusps"].append({"x": xc, "left_slope": sl, "right_slope": sr,
                                "margin": drop})
        if drop < -_SLACK:
            fail(f"cusp slope inequality violated at x={xc:.6g}")
    return report


def verify_ladder(
    params: ModelParams,
    delta: float = 0.05,
    ladder: tuple[float, ...] = (0.1, 0.05, 0.02, 0.01, 0.005),
    grid: int = 2000,
) -> dict:
    """Build and verify both envelopes at every epsilon of the ladder.

    "Small enough eps" is operationalized as the largest ladder entry at
    which all sign checks pass for both sides; the report also carries the
    pointwise ordering of the two envelopes.
    """
    out: dict = {"ladder": list(ladder), "entries": [], "largest_passing": None}
    for eps in ladder:
        p_eps = params.with_epsilon(eps)
        entry: dict = {"epsilon": eps}
        best = None
        for start in (0, 1, 2, 3):
            try:
                upper, lower = build_bounds(p_eps, delta=delta,
                                            start_halvings=start)
            except (ConstructionInfeasible, UnsupportedConstructionError) as exc:
                if best is None:
                    entry["status"] = "infeasible"
                    entry["reason"] = str(exc)
                continue
            ru = verify_bound(upper, p_eps, grid)
            rl = verify_bound(lower, p_eps, grid)
            xs = np.linspace(0.0, 1.0, grid + 1)
            try:
                gap = upper.value_many(xs) - lower.value_many(xs)
                ordered = bool(gap.min() > -1e-9)
            except LayerDomainError:
                ordered = False
            status = (
                "pass" if ru["status"] == "pass" and rl["status"] == "pass"
                and ordered else "fail"
            )
            cand = {"epsilon": eps, "halvings": start, "upper": ru,
                    "lower": rl, "ordered": ordered, "status": status}
            if best is None or (status == "pass" and best["status"] != "pass"):
                best = cand
            if status == "pass":
                break
        if best is not None:
            entry = best
        out["entries"].append(entry)
        if entry.get("status") == "pass" and out["largest_passing"] is None:
            out["largest_passing"] = eps
    return out


def report_to_json(report: dict, path) -> None:
    with open(path, "w") as fh:
        json.dump(report, fh, indent=2, default=float)


def dump_envelope_csv(path, upper: BoundConstruction, lower: BoundConstruction,
                      profile: DensityProfile) -> None:
    """Plot-ready dump of (x, rho_lower, rho, rho_upper) on the profile grid."""
    import csv

    vu = upper.value_many(profile.grid)
    vl = lower.value_many(profile.grid)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "rho_lower", "rho", "rho_upper"])
        for x, lo_v, r, hi_v in zip(profile.grid, vl, profile.values, vu):
            w.writerow([repr(float(x)), repr(float(lo_v)), repr(float(r)),
                        repr(float(hi_v))])


# ---------------------------------------------------------------------------
# Per-phase builders
# ---------------------------------------------------------------------------
#
# Free parameters start at magnitudes taken from worked examples and are
# halved together until (i) the structural inequalities of the recipe hold,
# (ii) both limits are in O(rho_hat, delta), and (iii) the limits sandwich
# rho_hat pointwise with distinct jump locations (strict separation).


def _limit_from_segments(segments, points, bps=None) -> PiecewiseLimitProfile:
    """segments: list of (x_lo, x_hi, inc_lo, inc_hi, shape) where shape is
    (c0, c1) for an affine/constant stretch, a parabola, or a curve object;
    points: list of (x, value) isolated points."""
    pieces = []
    for seg in segments:
        x_lo, x_hi, inc_lo, inc_hi, shape = seg
        if x_hi - x_lo <= 1e-12:
            continue
        if isinstance(shape, tuple):
            c0, c1 = shape
            kind = "constant" if c1 == 0.0 else "affine"
            pieces.append(Piece(x_lo, x_hi, inc_lo, inc_hi, kind, c0=c0, c1=c1))
        elif isinstance(shape, _Parabola):
            # split at the vertex so every stored piece is monotone
            if x_lo < shape.vertex < x_hi:
                pieces.append(Piece(x_lo, shape.vertex, inc_lo, True,
                                    "characteristic-segment", curve=_ParabArc(shape)))
                pieces.append(Piece(shape.vertex, x_hi, False, inc_hi,
                                    "characteristic-segment", curve=_ParabArc(shape)))
            else:
                pieces.append(Piece(x_lo, x_hi, inc_lo, inc_hi,
                                    "characteristic-segment", curve=_ParabArc(shape)))
        else:
            pieces.append(Piece(x_lo, x_hi, inc_lo, inc_hi,
                                "characteristic-segment", curve=shape))
    for (x, v) in points:
        pieces.append(Piece(x, x, True, True, "point", c0=v))
    return PiecewiseLimitProfile(tuple(pieces), tuple(bps or ()))


class _ParabArc:
    """Monotone parabola arc exposed through the curve piece protocol."""

    def __init__(self, par: _Parabola):
        self._p = par

    def value(self, x: float) -> float:
        return self._p.value(x)

    def params(self) -> dict:
        return {"parabola": [self._p.z, self._p.coef, self._p.vertex]}

    def hole_transformed(self):
        raise ParameterError("parabola arcs do not support the hole transform")


def _scaled(seed: dict, k: int) -> dict:
    """Halve delta/omega-shift magnitudes k times; double curvatures."""
    s = 0.5 ** k
    out = {}
    for key, val in seed.items():
        if key.startswith("C_"):
            out[key] = val / s
        else:
            out[key] = val * s
    return out


def _check_membership(
    upper_lim: PiecewiseLimitProfile,
    lower_lim: PiecewiseLimitProfile,
    rho_hat: PiecewiseLimitProfile,
    delta: float,
    n_check: int = 800,
) -> bool:
    xs = np.linspace(0.0, 1.0, n_check + 1)
    try:
        vu = upper_lim.evaluate_many(xs)
        vl = lower_lim.evaluate_many(xs)
        vh = rho_hat.evaluate_many(xs)
    except ParameterError:
        return False
    if np.any(vu < vh - 1e-9) or np.any(vl > vh + 1e-9):
        return False
    grid = np.linspace(0.0, 1.0, n_check + 1)
    pu = DensityProfile(grid, np.clip(vu, -0.05, 1.05))
    pl = DensityProfile(grid, np.clip(vl, -0.05, 1.05))
    if not in_neighborhood(pu, rho_hat, delta):
        return False
    if not in_neighborhood(pl, rho_hat, delta):
        return False
    # strict separation needs jump sets to stay apart
    ju = [b.position for b in upper_lim.breakpoints]
    jl = [b.position for b in lower_lim.breakpoints]
    for a in ju:
        for b in jl:
            if abs(a - b) < 1e-9:
                return False
    return True


def build_bounds(
    params: ModelParams,
    label: Optional[PhaseLabel] = None,
    delta: float = 0.05,
    max_halvings: int = 12,
    start_halvings: int = 0,
) -> tuple[BoundConstruction, BoundConstruction]:
    """Instantiate the phase's two-sided construction at ``params.epsilon``.

    Free parameters are auto-selected: starting from worked-example
    magnitudes they are halved until the structural constraints hold and the
    two limits are delta-close to the limit profile while sandwiching it.
    Raises UnsupportedConstructionError for general phases 7, 8 and 11 and
    ConstructionInfeasible when no admissible scale exists.
    """
    got_label, feats = classify(params)
    if label is None:
        label = got_label
    if label.applied_symmetry or got_label.applied_symmetry:
        raise UnsupportedConstructionError(
            "constructions are built in the symmetry-reduced frame; "
            "transform the parameters first"
        )
    if label.regime == "general" and label.index in (7, 8, 11):
        raise UnsupportedConstructionError(
            f"general phase {label.index} has no closed-form envelope here "
            "(needs the sqrt(eps)-matched interior curve); verified via the "
            "steady-solver convergence checks instead"
        )
    if label.regime == "special":
        builder = _SPECIAL_BUILDERS[label.index]
    else:
        builder = _GENERAL_BUILDERS[label.index]
    from .phase import limit_profile as _lp

    rho_hat = _lp(params)
    last_error = "no admissible parameters"
    for k in range(start_halvings, max_halvings):
        try:
            upper, lower = builder(params, label, k)
        except (_Skip, ParameterError, LayerDomainError) as exc:
            last_error = str(exc)
            continue
        if _check_membership(upper.limit, lower.limit, rho_hat, delta):
            return upper, lower
        last_error = f"limits not within delta={delta} at scale 2^-{k}"
    raise ConstructionInfeasible(
        f"{label.regime} phase {label.index}: {last_error}"
    )


class _Skip(Exception):
    """Structural constraint violated at this scale; try a smaller one."""


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise _Skip(msg)


# -- special (equal-rates) builders -----------------------------------------


def _s1(params: ModelParams, label: PhaseLabel, k: int):
    om, eps = params.omega_d, params.epsilon
    a, b = params.alpha, params.beta
    fp = _scaled({"delta_u": 0.1, "delta_l": 0.1}, k)
    du, dl = fp["delta_u"], fp["delta_l"]
    x_d = (om + b - a) / (2.0 * om)
    y_d = (om + b + a) / 2.0
    _require(y_d < 0.5, "wall value must sit below one half")
    # the flattened outer ramps must still dominate rho_hat at the far
    # boundary: domega * span <= omega_side * delta / 2, with margin
    dom_u = 0.8 * om * du / (2.0 * (1.0 - x_d) + du)
    dom_l = 0.8 * om * dl / (2.0 * x_d + dl)
    om_u = om - dom_u
    om_l = om - dom_l
    _require(om_u > 0 and om_l > 0, "ramp rates must stay positive")
    xdu, xtu = x_d - du, x_d - du / 2.0
    xdl, xtl = x_d + dl, x_d + dl / 2.0
    _require(xdu > 0.0 and xdl < 1.0, "shifted wall must stay inside (0,1)")
    lay_u = BoundaryLayer(y_d, xdu, 0.5, eps)
    lay_l = BoundaryLayer(y_d, xdl, 0.5, eps)
    up = BoundConstruction(
        "upper", label, eps,
        (
            BoundPiece(0.0, xtu, (_Layer(lay_u), _Affine(-om * xtu, om))),
            BoundPiece(xtu, 1.0, (_Layer(lay_u), _Affine(-om_u * xtu, om_u))),
        ),
        {"delta_u": du, "omega_u": om_u},
        _limit_from_segments(
            [
                (0.0, xdu, True, False, (y_d - om * xtu, om)),
                (xdu, xtu, False, True, (1.0 - y_d - om * xtu, om)),
                (xtu, 1.0, False, True, (1.0 - y_d - om_u * xtu, om_u)),
            ],
            [(xdu, 0.5 - om * du / 2.0)],
        ),
    )
    lo = BoundConstruction(
        "lower", label, eps,
        (
            BoundPiece(0.0, xtl, (_Layer(lay_l), _Affine(-om_l * xtl, om_l))),
            BoundPiece(xtl, 1.0, (_Layer(lay_l), _Affine(-om * xtl, om))),
        ),
        {"delta_l": dl, "omega_l": om_l},
        _limit_from_segments(
            [
                (0.0, xtl, True, True, (y_d - om_l * xtl, om_l)),
                (xtl, xdl, False, False, (y_d - om * xtl, om)),
                (xdl, 1.0, False, True, (1.0 - y_d - om * xtl, om)),
            ],
            [(xdl, 0.5 + om * dl / 2.0)],
        ),
    )
    return up, lo


def _s2(params: ModelParams, label: PhaseLabel, k: int):
    om, eps = params.omega_d, params.epsilon
    a, b = params.alpha, params.beta
    fp = _scaled({"delta_u": 0.04, "delta_l": 0.04}, k)
    du, dl = fp["delta_u"], fp["delta_l"]
    x_p = (0.5 - a) / om
    x_q = 1.0 - (0.5 - b) / om
    _require(x_q > x_p > 0.0, "plateau must be nonempty")

    def cap_params(delta, span_ramp, span_knot):
        """Curvature window: the cap must dominate the outer ramp locally
        and at the far boundary, fit between the knots, and keep eps * C
        below the plateau sign margin."""
        dom = 0.6 * delta / (2.0 * span_ramp)
        dom = min(dom, 0.5 * om)
        om_s = om - dom
        c_lo = max(om_s * (2.0 * om - om_s) / (2.0 * delta),
                   1.05 * delta / (2.0 * span_knot ** 2),
                   1.05 * om_s * om_s / (0.8 * delta))
        c_hi = 0.7 * delta * dom / eps
        _require(c_lo < c_hi, "no admissible cap curvature at this epsilon")
        return dom, om_s, math.sqrt(c_lo * c_hi)

    dom_u, om_u, cu = cap_params(du, 1.0 - x_q, x_q - x_p)
    y_u, z_u = 0.5 + du, 0.5 + du / 2.0
    x1u = x_q - math.sqrt(du / (2.0 * cu))
    x2u = x_q + om_u / (2.0 * cu)
    _require(0.0 < x_p < x1u < x_q < x2u < 1.0, "upper knots must be ordered")
    qu = _Parabola(z_u, cu, x_q)
    up_end_c0 = qu.value(x2u) - om_u * x2u
    _require(up_end_c0 + om_u <= 1.0, "upper profile must stay below one")
    up = BoundConstruction(
        "upper", label, eps,
        (
            BoundPiece(0.0, x_p, (_Affine(y_u - om * x_p, om),)),
            BoundPiece(x_p, x1u, (_Affine(y_u),)),
            BoundPiece(x1u, x2u, (qu,)),
            BoundPiece(x2u, 1.0, (_Affine(up_end_c0, om_u),)),
        ),
        {"delta_u": du, "C_u": cu, "omega_u": om_u},
        _limit_from_segments(
            [
                (0.0, x_p, True, True, (y_u - om * x_p, om)),
                (x_p, x1u, False, True, (y_u, 0.0)),
                (x1u, x2u, False, True, qu),
                (x2u, 1.0, False, True, (up_end_c0, om_u)),
            ],
            [],
        ),
    )
    dom_l, om_l, cl = cap_params(dl, x_p, x_q - x_p)
    y_l, z_l = 0.5 - dl, 0.5 - dl / 2.0
    x1l = x_p + math.sqrt(dl / (2.0 * cl))
    x2l = x_p - om_l / (2.0 * cl)
    _require(0.0 < x2l < x_p < x1l < x_q < 1.0, "lower knots must be ordered")
    ql = _Parabola(z_l, -cl, x_p)
    lo_start_c0 = ql.value(x2l) - om_l * x2l
    _require(lo_start_c0 >= 0.0, "lower profile must stay above zero")
    lo = BoundConstruction(
        "lower", label, eps,
        (
            BoundPiece(0.0, x2l, (_Affine(lo_start_c0, om_l),)),
            BoundPiece(x2l, x1l, (ql,)),
            BoundPiece(x1l, x_q, (_Affine(y_l),)),
            BoundPiece(x_q, 1.0, (_Affine(y_l - om * x_q, om),)),
        ),
        {"delta_l": dl, "C_l": cl, "omega_l": om_l},
        _limit_from_segments(
            [
                (0.0, x2l, True, True, (lo_start_c0, om_l)),
                (x2l, x1l, False, True, ql),
                (x1l, x_q, False, True, (y_l, 0.0)),
                (x_q, 1.0, False, True, (y_l - om * x_q, om)),
            ],
            [],
        ),
    )
    return up, lo


def _s3(params: ModelParams, label: PhaseLabel, k: int):
    om, eps = params.omega_d, params.epsilon
    a, b = params.alpha, params.beta
    fp = _scaled({"delta_u": 0.04, "delta_l": 0.04}, k)
    du, dl = fp["delta_u"], fp["delta_l"]
    _require(du < 0.9 * (a - 0.5), "delta_u must stay below alpha - 1/2")
    x_q = 1.0 - (0.5 - b) / om
    _require(x_q > 0.0, "plateau must be nonempty")
    dom_u = min(0.6 * du / (2.0 * (1.0 - x_q)), 0.5 * om)
    om_u = om - dom_u
    # the parabola must start above alpha, else the boundary layer crosses
    # it spuriously right at x=0
    c_lo = max(om_u * (2.0 * om - om_u) / (2.0 * du),
               1.05 * du / (2.0 * x_q ** 2),
               1.1 * (a - (0.5 + du / 2.0)) / x_q ** 2,
               1.05 * om_u * om_u / (0.8 * du))
    c_hi = 0.7 * du * dom_u / eps
    _require(c_lo < c_hi, "no admissible cap curvature at this epsilon")
    cu = math.sqrt(c_lo * c_hi)
    y_u, z_u = 0.5 + du, 0.5 + du / 2.0
    x1u = x_q - math.sqrt(du / (2.0 * cu))
    x2u = x_q + om_u / (2.0 * cu)
    _require(0.0 < x1u < x_q < x2u < 1.0, "upper knots must be ordered")
    lay_u = BoundaryLayer(0.5 - du, 0.0, a, eps)
    qu = _Parabola(z_u, cu, x_q)
    # eps-dependent cusp: smaller root of w(x) = q_u(x)
    x1e = _layer_parabola_crossing(lay_u, qu, 0.0, x_q)
    _require(x1e is not None, "no layer/parabola intersection at this eps")
    _require(x1e < x2u, "intersection must precede the tangency knot")
    up_end_c0 = qu.value(x2u) - om_u * x2u
    _require(up_end_c0 + om_u <= 1.0, "upper profile must stay below one")
    up = BoundConstruction(
        "upper", label, eps,
        (
            BoundPiece(0.0, x1e, (_Layer(lay_u),)),
            BoundPiece(x1e, x2u, (qu,)),
            BoundPiece(x2u, 1.0, (_Affine(up_end_c0, om_u),)),
        ),
        {"delta_u": du, "C_u": cu, "omega_u": om_u, "x1_eps": x1e},
        _limit_from_segments(
            [
                (0.0, x1u, True, True, (y_u, 0.0)),
                (x1u, x2u, False, True, qu),
                (x2u, 1.0, False, True, (up_end_c0, om_u)),
            ],
            [(0.0, a)],
            [Breakpoint(0.0, "left-boundary-layer", a, y_u)],
        ),
    )
    y_l = 0.5 - dl
    lo = BoundConstruction(
        "lower", label, eps,
        (
            BoundPiece(0.0, x_q, (_Affine(y_l),)),
            BoundPiece(x_q, 1.0, (_Affine(y_l - om * x_q, om),)),
        ),
        {"delta_l": dl},
        _limit_from_segments(
            [
                (0.0, x_q, True, True, (y_l, 0.0)),
                (x_q, 1.0, False, True, (y_l - om * x_q, om)),
            ],
            [],
        ),
    )
    return up, lo


def _layer_parabola_crossing(lay: BoundaryLayer, par: _Parabola,
                             lo: float, hi: float) -> Optional[float]:
    """Smallest root of w(x) - q(x) on [lo, hi], or None."""
    xs = np.linspace(lo, hi, 400)
    try:
        g = np.array([lay.value(float(x)) - par.value(float(x)) for x in xs])
    except LayerDomainError:
        return None
    sign_change = np.where((g[:-1] < 0.0) & (g[1:] >= 0.0) |
                           (g[:-1] > 0.0) & (g[1:] <= 0.0))[0]
    if g[0] == 0.0:
        return float(xs[0])
    if sign_change.size == 0:
        return None
    i = int(sign_change[0])
    a_x, b_x = float(xs[i]), float(xs[i + 1])
    for _ in range(80):
        m = 0.5 * (a_x + b_x)
        gm = lay.value(m) - par.value(m)
        if (gm > 0.0) == (g[i] > 0.0):
            a_x = m
        else:
            b_x = m
        if b_x - a_x < 1e-14:
            break
    return 0.5 * (a_x + b_x)


def _s4(params: ModelParams, label: PhaseLabel, k: int):
    om, eps = params.omega_d, params.epsilon
    a, b = params.alpha, params.beta
    bb = params.beta_bar
    fp = _scaled({"delta_u": 1.0 / 16}, k)
    du = fp["delta_u"]
    y_b = b + om
    _require(y_b < a < 1.0 - y_b, "alpha must sit between the layer plateaus")
    up = BoundConstruction(
        "upper", label, eps,
        (BoundPiece(0.0, 1.0, (_Affine(bb + du - om, om),)),),
        {"delta_u": du},
        _limit_from_segments([(0.0, 1.0, True, True, (bb + du - om, om))], []),
    )
    lay_l = BoundaryLayer(y_b, 0.0, a, eps)
    lo = BoundConstruction(
        "lower", label, eps,
        (BoundPiece(0.0, 1.0, (_Layer(lay_l), _Affine(0.0, om))),),
        {},
        _limit_from_segments(
            [(0.0, 1.0, False, True, (bb - om, om))],
            [(0.0, a)],
            [Breakpoint(0.0, "left-boundary-layer", a, bb - om)],
        ),
    )
    return up, lo


def _s5(params: ModelParams, label: PhaseLabel, k: int):
    om, eps = params.omega_d, params.epsilon
    a, b = params.alpha, params.beta
    bb = params.beta_bar
    fp = _scaled({"delta_l": 1.0 / 16}, k)
    dl = fp["delta_l"]
    y_b = b + om
    _require(a > 1.0 - y_b, "alpha must sit above the upper plateau")
    _require(bb - dl - om >= 0.0, "lower profile must stay above zero")
    lay_u = BoundaryLayer(y_b, 0.0, a, eps)
    up = BoundConstruction(
        "upper", label, eps,
        (BoundPiece(0.0, 1.0, (_Layer(lay_u), _Affine(0.0, om))),),
        {},
        _limit_from_segments(
            [(0.0, 1.0, False, True, (bb - om, om))],
            [(0.0, a)],
            [Breakpoint(0.0, "left-boundary-layer", a, bb - om)],
        ),
    )
    lo = BoundConstruction(
        "lower", label, eps,
        (BoundPiece(0.0, 1.0, (_Affine(bb - dl - om, om),)),),
        {"delta_l": dl},
        _limit_from_segments([(0.0, 1.0, True, True, (bb - dl - om, om))], []),
    )
    return up, lo


def _s6(params: ModelParams, label: PhaseLabel, k: int):
    om, eps = params.omega_d, params.epsilon
    a, b = params.alpha, params.beta
    bb = params.beta_bar
    fp = _scaled({"delta_u": 1.0 / 16, "delta_l": 1.0 / 16}, k)
    du, dl = fp["delta_u"], fp["delta_l"]
    _require(du < a - 0.5, "delta_u must stay below alpha - 1/2")
    _require(dl < b - 0.5, "delta_l must stay below beta - 1/2")
    lay_u = BoundaryLayer(0.5 - du, 0.0, a, eps)
    lay_l = BoundaryLayer(0.5 - dl, 1.0, bb, eps)
    up = BoundConstruction(
        "upper", label, eps,
        (BoundPiece(0.0, 1.0, (_Layer(lay_u),)),),
        {"delta_u": du},
        _limit_from_segments(
            [(0.0, 1.0, False, True, (0.5 + du, 0.0))],
            [(0.0, a)],
            [Breakpoint(0.0, "left-boundary-layer", a, 0.5 + du)],
        ),
    )
    lo = BoundConstruction(
        "lower", label, eps,
        (BoundPiece(0.0, 1.0, (_Layer(lay_l),)),),
        {"delta_l": dl},
        _limit_from_segments(
            [(0.0, 1.0, True, False, (0.5 - dl, 0.0))],
            [(1.0, bb)],
            [Breakpoint(1.0, "right-boundary-layer", 0.5 - dl, bb)],
        ),
    )
    return up, lo


_SPECIAL_BUILDERS: dict[int, Callable] = {
    1: _s1, 2: _s2, 3: _s3, 4: _s4, 5: _s5, 6: _s6,
}


# -- general (unequal-rates) builders ----------------------------------------


def _curve(om_d: float, k: float, x0: float, y0: float,
           region: str = "") -> CharacteristicCurve:
    return CharacteristicCurve(om_d, k, x0, y0, region)


def _g1(params: ModelParams, label: PhaseLabel, kk: int):
    om, K, eps = params.omega_d, params.binding_ratio, params.epsilon
    a, b, bb = params.alpha, params.beta, params.beta_bar
    fp = _scaled({"delta_u": 0.0249, "delta_l": 0.0249,
                  "domega_u": 0.01, "delta_u1": 0.0498}, kk)
    du, dl, domu, du1 = fp["delta_u"], fp["delta_l"], fp["domega_u"], fp["delta_u1"]
    a_u, b_u = a + du, b - du1
    bb_u = 1.0 - b_u
    _require(0.0 < b_u, "shifted beta must stay positive")
    _require(a_u < 0.5, "shifted alpha must stay on the low branch")
    rho_ua = _curve(om + domu, K, 0.0, a_u, "low")
    try:
        y_au = rho_ua.value(1.0)
    except Exception as exc:  # singular crossing before x=1
        raise _Skip(f"upper curve leaves the branch: {exc}")
    _require(y_au < min(b_u, bb_u), "upper curve end must stay below beta_u")
    # delta_u2 (gap - 2 delta_u2) is the layer-slope budget that beats the
    # O(1) cross term; the product is maximal at gap/4
    du2 = 0.25 * (min(b_u, bb_u) - y_au)
    A = y_au + du2
    _require(A < 0.5, "layer plateau must stay below one half")
    _require(A < bb_u + du2 < 1.0 - A, "layer anchor must sit between plateaus")
    lay_u = BoundaryLayer(A, 1.0, bb_u + du2, eps)
    up = BoundConstruction(
        "upper", label, eps,
        (BoundPiece(0.0, 1.0, (_Curve(rho_ua), _Layer(lay_u), _Affine(-A))),),
        {"delta_u": du, "domega_u": domu, "delta_u1": du1, "delta_u2": du2},
        _limit_from_segments(
            [(0.0, 1.0, True, False, rho_ua)],
            [(1.0, bb_u)],
            [Breakpoint(1.0, "right-boundary-layer", y_au, bb_u)],
        ),
    )
    a_l = a - dl
    _require(a_l > 0.0, "shifted alpha must stay positive")
    rho_la = _curve(om, K, 0.0, a_l, "low")
    try:
        rho_la.value(1.0)
    except Exception as exc:
        raise _Skip(f"lower curve leaves the branch: {exc}")
    lo = BoundConstruction(
        "lower", label, eps,
        (BoundPiece(0.0, 1.0, (_Curve(rho_la),)),),
        {"delta_l": dl},
        _limit_from_segments([(0.0, 1.0, True, True, rho_la)], []),
    )
    return up, lo


def _g2(params: ModelParams, label: PhaseLabel, kk: int):
    om, K, eps = params.omega_d, params.binding_ratio, params.epsilon
    a, bb = params.alpha, params.beta_bar
    fp = _scaled({"delta_u": 0.0422, "delta_l": 0.0422,
                  "domega_u": 0.01, "delta_l1": 0.0396}, kk)
    du, dl, domu, dl1 = fp["delta_u"], fp["delta_l"], fp["domega_u"], fp["delta_l1"]
    a_u = a + du
    _require(a_u < 0.5, "shifted alpha must stay on the low branch")
    rho_ua = _curve(om + domu, K, 0.0, a_u, "low")
    try:
        rho_ua.value(1.0)
    except Exception as exc:
        raise _Skip(f"upper curve leaves the branch: {exc}")
    up = BoundConstruction(
        "upper", label, eps,
        (BoundPiece(0.0, 1.0, (_Curve(rho_ua),)),),
        {"delta_u": du, "domega_u": domu},
        _limit_from_segments([(0.0, 1.0, True, True, rho_ua)], []),
    )
    a_l = a - dl
    _require(a_l > 0.0, "shifted alpha must stay positive")
    rho_la = _curve(om, K, 0.0, a_l, "low")
    try:
        y_al = rho_la.value(1.0)
        y_a = _curve(om, K, 0.0, a, "low").value(1.0)
    except Exception as exc:
        raise _Skip(f"lower curve leaves the branch: {exc}")
    _require(y_al > bb, "lower curve must end above the right density")
    _require(dl1 < y_a - y_al, "delta_l1 must stay below the curve gap")
    A = y_al + dl1
    _require(A < 0.5, "layer plateau must stay below one half")
    _require(bb < A, "layer anchor must start below the lower plateau")
    lay_l = BoundaryLayer(A, 1.0, bb, eps)
    lo = BoundConstruction(
        "lower", label, eps,
        (BoundPiece(0.0, 1.0, (_Curve(rho_la), _Layer(lay_l), _Affine(-A))),),
        {"delta_l": dl, "delta_l1": dl1},
        _limit_from_segments(
            [(0.0, 1.0, True, False, rho_la)],
            [(1.0, bb - dl1)],
            [Breakpoint(1.0, "right-boundary-layer", y_al, bb - dl1)],
        ),
    )
    return up, lo


def _g_right_anchored(params, label, kk, *, seeds, upper_plain, lower_plain,
                      mid_branch):
    """Shared machinery of the four right-anchored general phases 3..6.

    ``upper_plain`` (``lower_plain``) means that side is a bare shifted
    curve; otherwise it carries the left boundary layer gluing the curve to
    alpha.
    """
    om, K, eps = params.omega_d, params.binding_ratio, params.epsilon
    a, bb = params.alpha, params.beta_bar
    fp = _scaled(seeds, kk)
    du, dl = fp["delta_u"], fp["delta_l"]
    region = "mid" if mid_branch else "high"
    rbar = params.isotherm

    bb_u = bb + du
    if mid_branch:
        _require(bb_u < rbar, "shifted right density must stay on the branch")
    om_u = om - fp.get("domega_u", 0.0)
    _require(om_u > 0, "upper rate must stay positive")
    rho_ub = _curve(om_u, K, 1.0, bb_u, region)
    ybar_bu = rho_ub.value(0.0)

    bb_l = bb - dl
    _require(bb_l > (0.5 if mid_branch else rbar), "lower anchor leaves branch")
    dom_l = fp.get("domega_l", 0.0)
    if dom_l > 0.0 and mid_branch:
        # the mid-branch curvature term eps/2 rho_xx ~ -(K^2-1) om^2
        # (rbar - bb_l) / (8 (bb_l - 1/2)^3) must be beaten by the rate-shift
        # margin dom (K+1)(rbar - rho); divides out to an eps-scaled floor
        K = params.binding_ratio
        floor = 1.3 * eps * (K - 1.0) * om * om / (16.0 * (bb_l - 0.5) ** 3)
        dom_l = max(dom_l, floor)
        _require(dom_l < 0.6 * om, "curvature floor exceeds the rate budget")
    om_l = om - dom_l
    _require(om_l > 0, "lower rate must stay positive")
    rho_lb = _curve(om_l, K, 1.0, bb_l, region)
    ybar_bl = rho_lb.value(0.0)

    if upper_plain:
        _require(ybar_bu > a, "upper curve must dominate alpha at x=0")
        up = BoundConstruction(
            "upper", label, eps,
            (BoundPiece(0.0, 1.0, (_Curve(rho_ub),)),),
            {"delta_u": du, "omega_u": om_u},
            _limit_from_segments([(0.0, 1.0, True, True, rho_ub)], []),
        )
    else:
        if label.index == 4:
            # layer from alpha down onto the curve start
            du1 = fp["delta_u1"]
            A = (1.0 - ybar_bu) + du1
            _require(A < 0.5, "layer plateau must stay below one half")
            _require(a > 1.0 - A, "alpha must sit above the upper plateau")
            lay = BoundaryLayer(A, 0.0, a, eps)
            limit_pts = [(0.0, a + du1)]
            bp = [Breakpoint(0.0, "left-boundary-layer", a + du1, ybar_bu)]
            extra = {"delta_u1": du1}
        else:
            # phase 6: anchor chosen so the boundary value is alpha exactly
            A = 1.0 - bb
            _require(A < 0.5, "layer plateau must stay below one half")
            _require(ybar_bu < a, "alpha must dominate the curve start")
            lay = BoundaryLayer(A, 0.0, bb + a - ybar_bu, eps)
            limit_pts = [(0.0, a)]
            bp = [Breakpoint(0.0, "left-boundary-layer", a, ybar_bu)]
            extra = {}
        up = BoundConstruction(
            "upper", label, eps,
            (BoundPiece(0.0, 1.0, (_Curve(rho_ub), _Layer(lay),
                                   _Affine(-lay.a_high))),),
            {"delta_u": du, "omega_u": om_u, **extra},
            _limit_from_segments(
                [(0.0, 1.0, False, True, rho_ub)], limit_pts, bp
            ),
        )

    if lower_plain:
        _require(ybar_bl < a, "alpha must dominate the lower curve at x=0")
        lo = BoundConstruction(
            "lower", label, eps,
            (BoundPiece(0.0, 1.0, (_Curve(rho_lb),)),),
            {"delta_l": dl, "omega_l": om_l},
            _limit_from_segments([(0.0, 1.0, True, True, rho_lb)], []),
        )
    else:
        dl1 = fp["delta_l1"]
        a_l = a - dl1
        y_bl = 1.0 - ybar_bl
        _require(y_bl < a_l < ybar_bl, "alpha_l must sit between the plateaus")
        dl2 = 0.45 * (a_l - y_bl)
        A = y_bl + dl2
        lay = BoundaryLayer(A, 0.0, a_l - dl2, eps)
        lo = BoundConstruction(
            "lower", label, eps,
            (BoundPiece(0.0, 1.0, (_Curve(rho_lb), _Layer(lay),
                                   _Affine(-lay.a_high))),),
            {"delta_l": dl, "omega_l": om_l, "delta_l1": dl1, "delta_l2": dl2},
            _limit_from_segments(
                [(0.0, 1.0, False, True, rho_lb)],
                [(0.0, a_l)],
                [Breakpoint(0.0, "left-boundary-layer", a_l, ybar_bl)],
            ),
        )
    return up, lo


def _g3(params, label, kk):
    return _g_right_anchored(
        params, label, kk,
        seeds={"delta_u": 0.0457, "delta_l": 0.0457,
               "domega_u": 0.01, "delta_l1": 0.0407},
        upper_plain=True, lower_plain=False, mid_branch=False,
    )


def _g4(params, label, kk):
    return _g_right_anchored(
        params, label, kk,
        seeds={"delta_u": 0.0451, "delta_l": 0.0451,
               "domega_u": 0.01, "delta_u1": 0.0305},
        upper_plain=False, lower_plain=True, mid_branch=False,
    )


def _g5(params, label, kk):
    return _g_right_anchored(
        params, label, kk,
        seeds={"delta_u": 0.0926, "delta_l": 0.0926,
               "domega_l": 0.005, "delta_l1": 0.0488},
        upper_plain=True, lower_plain=False, mid_branch=True,
    )


def _g6(params, label, kk):
    return _g_right_anchored(
        params, label, kk,
        seeds={"delta_u": 0.0653, "delta_l": 0.0653, "domega_l": 0.001},
        upper_plain=False, lower_plain=True, mid_branch=True,
    )


def _g_wall(params, label, kk, *, seeds):
    """Domain-wall phases 9 and 10: shifted-wall envelopes glued by an
    interior layer anchored at one half; the lower transition is slowed by
    ``e`` so its cusp opens the right way."""
    om, K, eps = params.omega_d, params.binding_ratio, params.epsilon
    a, bb = params.alpha, params.beta_bar
    rbar = params.isotherm
    mid = bb < rbar
    region_b = "mid" if mid else "high"
    fp = _scaled(seeds, kk)
    du, dl = fp["delta_u"], fp["delta_l"]

    from .phase import domain_wall

    curve_a = _curve(om, K, 0.0, a, "low")
    curve_b = _curve(om, K, 1.0, bb, region_b)
    x_d = domain_wall(curve_a, curve_b)
    x_sing = curve_a.singular_position()

    xdu = x_d - du
    _require(xdu > 0.0, "shifted wall must stay inside (0,1)")
    gap_u = 1.0 - (curve_a.value(xdu) + curve_b.value(xdu))
    _require(gap_u > 0.0, "shifted wall must precede the true wall")
    du1 = min(fp["delta_u1"], 0.3 * gap_u / 2.0)
    y_dua = curve_a.value(xdu) + du1
    ybar_dub = curve_b.value(xdu) + du1
    _require(y_dua < 0.5, "upper left anchor must stay on the low branch")
    _require(y_dua + ybar_dub < 1.0, "upper anchors must leave a positive gap")
    if mid:
        _require(0.5 < ybar_dub < rbar, "upper right anchor leaves the branch")
    # rate shifts move the curve at the far boundary by about
    # (domega/omega) * rise; keep that inside half the anchor lift so the
    # shifted curves still dominate rho_hat there
    rise_a = max(curve_a.value(xdu) - params.alpha, 1e-9)
    rise_b = max(abs(bb - curve_b.value(xdu)), 1e-9)
    om_ua = om + min(fp["domega_ua"], 0.5 * du1 * om / rise_a)
    om_ub = om - min(fp.get("domega_ub", 0.0), 0.5 * du1 * om / rise_b)
    _require(om_ub > 0, "upper right rate must stay positive")
    rho_ua = _curve(om_ua, K, xdu, y_dua, "low")
    rho_ub = _curve(om_ub, K, xdu, ybar_dub, region_b)
    try:
        rho_ua.value(0.0)
        ub1 = rho_ub.value(1.0)
    except Exception as exc:
        raise _Skip(f"upper wall curves leave their branches: {exc}")
    _require(ub1 > bb, "upper right curve must dominate the right density")
    A_u = 0.5 * (y_dua + 1.0 - ybar_dub)
    lay_u = BoundaryLayer(A_u, xdu, 0.5, eps)
    up = BoundConstruction(
        "upper", label, eps,
        (
            BoundPiece(0.0, xdu, (_Curve(rho_ua), _Layer(lay_u), _Affine(-A_u))),
            BoundPiece(xdu, 1.0, (_Curve(rho_ub), _Layer(lay_u),
                                  _Affine(-(1.0 - A_u)))),
        ),
        {"delta_u": du, "delta_u1": du1, "omega_ua": om_ua, "omega_ub": om_ub},
        _limit_from_segments(
            [(0.0, xdu, True, True, rho_ua), (xdu, 1.0, False, True, rho_ub)],
            [],
            [Breakpoint(xdu, "domain-wall", y_dua, ybar_dub)],
        ),
    )

    xdl = x_d + dl
    _require(xdl < min(1.0, x_sing), "shifted wall must precede the singular point")
    gap_l = (curve_a.value(xdl) + curve_b.value(xdl)) - 1.0
    _require(gap_l > 0.0, "shifted wall must follow the true wall")
    dl1 = min(fp["delta_l1"], 0.3 * gap_l / 2.0)
    y_dla = curve_a.value(xdl) - dl1
    ybar_dlb = curve_b.value(xdl) - dl1
    rise_la = max(curve_a.value(xdl) - params.alpha, 1e-9)
    rise_lb = max(abs(bb - curve_b.value(xdl)), 1e-9)
    _require(y_dla > 0.0, "lower left anchor must stay positive")
    _require(curve_a.value(xdl) + curve_b.value(xdl) < 2.0 * rbar,
             "wall anchors must stay below the isotherm pair")
    _require(y_dla + ybar_dlb > 1.0, "lower anchors must overlap")
    if mid:
        _require(0.5 < ybar_dlb, "lower right anchor leaves the branch")
    else:
        _require(ybar_dlb > rbar, "lower right anchor leaves the branch")
    om_la = om - min(fp["domega_la"], 0.5 * dl1 * om / rise_la)
    om_lb = om - min(fp.get("domega_lb", 0.0), 0.5 * dl1 * om / rise_lb)
    _require(om_la > 0 and om_lb > 0, "lower rates must stay positive")
    rho_la = _curve(om_la, K, xdl, y_dla, "low")
    rho_lb = _curve(om_lb, K, xdl, ybar_dlb, region_b)
    try:
        rho_la.value(0.0)
        rho_lb.value(1.0)
    except Exception as exc:
        raise _Skip(f"lower wall curves leave their branches: {exc}")
    A_l = 0.5 * (y_dla + 1.0 - ybar_dlb)
    dl2 = y_dla - A_l
    _require(dl2 > 0.0, "lower anchors must leave a positive gap")
    slow = 1.0 - 0.9 * dl2 / (4.0 * (0.5 - A_l))
    _require(0.0 < slow < 1.0, "slowdown factor must land in (0,1)")
    lay_la = BoundaryLayer(A_l, xdl, 0.5, eps, slowdown=slow)
    lay_lb = BoundaryLayer(A_l, xdl, 0.5, eps)
    lo = BoundConstruction(
        "lower", label, eps,
        (
            BoundPiece(0.0, xdl, (_Curve(rho_la), _Layer(lay_la), _Affine(-A_l))),
            BoundPiece(xdl, 1.0, (_Curve(rho_lb), _Layer(lay_lb),
                                  _Affine(-(1.0 - A_l)))),
        ),
        {"delta_l": dl, "delta_l1": dl1, "omega_la": om_la, "omega_lb": om_lb,
         "slowdown": slow},
        _limit_from_segments(
            [(0.0, xdl, True, True, rho_la), (xdl, 1.0, False, True, rho_lb)],
            [],
            [Breakpoint(xdl, "domain-wall", y_dla, ybar_dlb)],
        ),
    )
    return up, lo


def _g9(params, label, kk):
    return _g_wall(
        params, label, kk,
        seeds={"delta_u": 0.15, "delta_l": 0.15, "domega_ua": 0.03,
               "domega_ub": 0.05, "domega_la": 0.02,
               "delta_u1": 0.0481, "delta_l1": 0.0562},
    )


def _g10(params, label, kk):
    return _g_wall(
        params, label, kk,
        seeds={"delta_u": 0.15, "delta_l": 0.15, "domega_ua": 0.006,
               "domega_la": 0.004, "domega_lb": 0.02,
               "delta_u1": 0.0310, "delta_l1": 0.0398},
    )


_GENERAL_BUILDERS: dict[int, Callable] = {
    1: _g1, 2: _g2, 3: _g3, 4: _g4, 5: _g5, 6: _g6, 9: _g9, 10: _g10,
}
