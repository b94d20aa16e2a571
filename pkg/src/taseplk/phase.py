"""Sharp-interface (epsilon -> 0) machinery: characteristic curves of the
first-order limit equation, phase classification, limit-profile assembly,
and phase-diagram sweeps.

The limit equation away from interfaces is

    rho_x = (K+1) * Omega_D * (rho - rbar) / (2 * (rho - 0.5)),

with ``rbar = K/(K+1)``, singular on the line rho = 0.5 and stationary on
rho = rbar.  Along any solution the first integral

    F(rho) = 2 rho / ((K+1) Omega_D)
           + (K-1) / ((K+1)^2 Omega_D) * log|(K+1) Omega_D rho - K Omega_D|

satisfies F(rho(x)) = x + C, so curves are evaluated by inverting F on the
correct monotone branch instead of stepping the singular ODE.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from .core import (
    Breakpoint,
    ModelParams,
    ParameterError,
    Piece,
    PiecewiseLimitProfile,
)

__all__ = [
    "CurveRangeError",
    "ClassificationError",
    "CharacteristicCurve",
    "PhaseFeatures",
    "PhaseLabel",
    "characteristic_eval",
    "singular_point",
    "domain_wall",
    "classify",
    "limit_profile",
    "phase_sweep",
    "PhaseMap",
]

_TIE = 1e-12          # width of a phase-boundary tie
_K_EQUAL = 1e-12      # |K-1| below this is the affine degenerate family
_JUMP_MIN = 1e-10     # smaller jumps are not tagged as breakpoints


class CurveRangeError(ValueError):
    """Requested position is beyond the curve's validity interval."""

    def __init__(self, msg: str, boundary: float):
        super().__init__(msg)
        self.boundary = boundary


class ClassificationError(RuntimeError):
    """Phase predicates and curve geometry disagree (caller picked the
    wrong phase, or parameters sit on a degenerate boundary)."""


def _first_integral(rho: float, omega_d: float, k: float) -> float:
    c1 = (k + 1.0) * omega_d
    return 2.0 * rho / c1 + (k - 1.0) / (c1 * (k + 1.0)) * math.log(
        abs(c1 * rho - k * omega_d)
    )


def _integral_slope(rho: float, omega_d: float, k: float) -> float:
    """dF/drho = 1 / rho_x."""
    rbar = k / (k + 1.0)
    return 2.0 * (rho - 0.5) / ((k + 1.0) * omega_d * (rho - rbar))


@dataclass(frozen=True)
class CharacteristicCurve:
    """A solution branch of the limit ODE, anchored at (x0, y0).

    ``region`` names the monotone branch of F the curve lives on:
    ``"low"`` (rho below both 0.5 and rbar), ``"mid"`` (between them) or
    ``"high"`` (above both).  For K = 1 the ODE degenerates to the affine
    curve rho = y0 + Omega_D (x - x0) and F is not used.  A curve anchored
    exactly on the isotherm is the constant solution.
    """

    omega_d: float
    k: float
    x0: float
    y0: float
    region: str = ""

    def __post_init__(self) -> None:
        if self.omega_d < 0.0 or self.k < 0.0:
            raise ParameterError("omega_d and k must be nonnegative")
        region = self.region
        if not region:
            region = self._infer_region()
            object.__setattr__(self, "region", region)
        if region not in ("low", "mid", "high", "affine", "constant"):
            raise ParameterError(f"unknown region {region!r}")

    def _infer_region(self) -> str:
        if abs(self.k - 1.0) <= _K_EQUAL:
            return "affine"
        if abs(self.y0 - self.rbar) <= 1e-14:
            return "constant"
        lo, hi = sorted((0.5, self.rbar))
        if self.y0 < lo:
            return "low"
        if self.y0 > hi:
            return "high"
        if self.y0 in (lo, hi):
            raise ParameterError(
                f"anchor value {self.y0} sits on a branch boundary; "
                "pass region explicitly"
            )
        return "mid"

    @property
    def rbar(self) -> float:
        return self.k / (self.k + 1.0)

    @property
    def branch(self) -> str:
        """Coarse branch tag: below-half or above-half."""
        return "below-half" if self.y0 < 0.5 else "above-half"

    @property
    def constant_c(self) -> float:
        """Implicit constant C with F(rho(x)) = x + C."""
        if self.region in ("affine", "constant"):
            return math.nan
        return _first_integral(self.y0, self.omega_d, self.k) - self.x0

    def value(self, x: float) -> float:
        """rho(x) by safeguarded inversion of the first integral.

        Each branch interval has at most one endpoint on the singular line
        rho = 0.5, where F has a finite extremum (a target beyond it means x
        left the validity interval), and at most one on the isotherm, where
        |F| -> inf (approached geometrically to bracket the root).
        """
        if self.region == "constant":
            return self.y0
        if self.region == "affine":
            return self.y0 + self.omega_d * (x - self.x0)
        target = x + self.constant_c
        om, k = self.omega_d, self.k

        def g(rho: float) -> float:
            return _first_integral(rho, om, k) - target

        def past_half(gv: float) -> float:
            """Handle a target at/beyond the extremum F(0.5)."""
            if abs(gv) > 1e-9:
                x_sing = self.singular_position()
                raise CurveRangeError(
                    f"x={x} beyond the singular point x*={x_sing:.12g}", x_sing
                )
            return 0.5

        def approach_isotherm(sgn: float, want_pos: bool, span: float) -> float:
            eta = 0.5 * span
            for _ in range(4000):
                rho = self.rbar + sgn * eta
                gv = g(rho)
                if gv == 0.0 or (gv > 0.0) == want_pos:
                    return rho
                eta *= 0.5
            raise CurveRangeError(f"no bracket near the isotherm at x={x}", self.x0)

        def march(start: float, step: float, want_pos: bool) -> float:
            rho = start
            for _ in range(200):
                gv = g(rho)
                if gv == 0.0 or (gv > 0.0) == want_pos:
                    return rho
                rho += step
            raise CurveRangeError(f"no bracket at x={x}", self.x0)

        half_is_low = 0.5 < self.rbar  # 0.5 is the lower branch point iff K > 1
        if self.region == "low":
            # F increasing on (-inf, min(0.5, rbar))
            if half_is_low:
                gv = g(0.5)
                if gv <= 0.0:
                    return past_half(gv) if gv < 0.0 else 0.5
                hi_pt = 0.5
            else:
                hi_pt = approach_isotherm(-1.0, True, abs(self.rbar) + 0.5)
            lo_pt = march(min(self.y0, 0.0) - 0.5, -1.0, False)
        elif self.region == "high":
            # F increasing on (max(0.5, rbar), inf)
            if half_is_low:
                lo_pt = approach_isotherm(+1.0, False, 0.5)
            else:
                gv = g(0.5)
                if gv >= 0.0:
                    return past_half(gv) if gv > 0.0 else 0.5
                lo_pt = 0.5
            hi_pt = march(max(self.y0, 1.0) + 0.5, +1.0, True)
        else:
            # F decreasing on the mid branch between 0.5 and the isotherm
            gv = g(0.5)
            if half_is_low:
                if gv <= 0.0:
                    return past_half(gv) if gv < 0.0 else 0.5
                lo_pt = 0.5
                hi_pt = approach_isotherm(-1.0, False, self.rbar - 0.5)
            else:
                if gv >= 0.0:
                    return past_half(gv) if gv > 0.0 else 0.5
                hi_pt = 0.5
                lo_pt = approach_isotherm(+1.0, True, 0.5 - self.rbar)
        rho = brentq(g, lo_pt, hi_pt, xtol=1e-15, rtol=1e-15)
        # Newton polish pushes |F(rho) - x - C| to ~1e-13
        for _ in range(3):
            err = g(rho)
            if abs(err) < 1e-13:
                break
            slope = _integral_slope(rho, om, k)
            if slope == 0.0:
                break
            rho -= err / slope
        return float(rho)

    def value_many(self, xs) -> np.ndarray:
        return np.array([self.value(float(x)) for x in np.atleast_1d(xs)])

    def slope_of(self, rho: float) -> float:
        """rho_x expressed through the density value."""
        if self.region == "constant":
            return 0.0
        if self.region == "affine":
            return self.omega_d
        return (self.k + 1.0) * self.omega_d * (rho - self.rbar) / (
            2.0 * (rho - 0.5)
        )

    def curvature_of(self, rho: float) -> float:
        """rho_xx expressed through the density value."""
        if self.region in ("constant", "affine"):
            return 0.0
        return (self.k * self.k - 1.0) * self.omega_d ** 2 * (rho - self.rbar) / (
            8.0 * (rho - 0.5) ** 3
        )

    def singular_position(self) -> float:
        """Position where the curve meets rho = 0.5 (monotone approach)."""
        if abs(self.y0 - 0.5) <= 1e-15:
            return self.x0
        if self.region == "affine":
            if self.omega_d == 0.0:
                return math.inf
            return self.x0 + (0.5 - self.y0) / self.omega_d
        if self.region in ("high", "constant"):
            raise ClassificationError(
                "curve is repelled from 0.5 (wrong branch for a singular point)"
            )
        return _first_integral(0.5, self.omega_d, self.k) - self.constant_c

    def hole_transformed(self) -> "CharacteristicCurve":
        """Particle-hole image: a curve of the (K Omega_D, 1/K) system."""
        if self.region == "affine":
            return CharacteristicCurve(
                self.omega_d, self.k, 1.0 - self.x0, 1.0 - self.y0, "affine"
            )
        new_k = 1.0 / self.k if self.k > 0 else math.inf
        region_map = {"low": "high", "high": "low", "mid": "mid",
                      "constant": "constant"}
        return CharacteristicCurve(
            self.k * self.omega_d, new_k, 1.0 - self.x0, 1.0 - self.y0,
            region_map[self.region],
        )

    def params(self) -> dict:
        return {
            "omega_d": self.omega_d,
            "k": self.k,
            "anchor": [self.x0, self.y0],
            "region": self.region,
            "branch": self.branch,
            "constant": self.constant_c,
        }


def characteristic_eval(curve: CharacteristicCurve, x: float) -> float:
    return curve.value(x)


def singular_point(curve: CharacteristicCurve) -> float:
    return curve.singular_position()


def domain_wall(
    curve_a: CharacteristicCurve,
    curve_b: CharacteristicCurve,
    x_hi: float = 1.0,
    n_scan: int = 1000,
) -> float:
    """Infimum root of rho_a(x) + rho_b(x) = 1 on [0, x_hi].

    Both K = 1 affine curves admit the exact linear solution; otherwise a
    1e3-point scan locates the first sign change, refined by bisection to
    1e-12.
    """
    if curve_a.region == "affine" and curve_b.region == "affine":
        om = curve_a.omega_d + curve_b.omega_d
        if om == 0.0:
            raise ClassificationError("flat curves never sum to 1")
        c = (curve_a.y0 - curve_a.omega_d * curve_a.x0) + (
            curve_b.y0 - curve_b.omega_d * curve_b.x0
        )
        x_d = (1.0 - c) / om
        if not 0.0 <= x_d <= x_hi:
            raise ClassificationError(
                f"no domain wall inside [0,{x_hi}]: closed form gives {x_d}"
            )
        return x_d

    try:
        x_end = min(x_hi, curve_a.singular_position())
    except ClassificationError:
        x_end = x_hi

    def g(x: float) -> float:
        return curve_a.value(x) + curve_b.value(x) - 1.0

    xs = np.linspace(0.0, x_end, n_scan + 1)
    prev = g(xs[0])
    if prev > 0.0:
        raise ClassificationError("curves already sum above 1 at x=0")
    for x in xs[1:]:
        cur = g(x)
        if cur >= 0.0:
            lo = x - (x_end / n_scan)
            hi = x
            for _ in range(80):
                mid = 0.5 * (lo + hi)
                if g(mid) >= 0.0:
                    hi = mid
                else:
                    lo = mid
                if hi - lo < 1e-12:
                    break
            return 0.5 * (lo + hi)
        prev = cur
    raise ClassificationError("no domain wall: rho_a + rho_b - 1 has no root")


# ---------------------------------------------------------------------------
# Classification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PhaseFeatures:
    """Derived quantities that decide the phase (in the symmetry-reduced
    frame with K >= 1 and, for K = 1, alpha >= beta)."""

    r_bar: float
    y_b: Optional[float] = None
    ybar_b: Optional[float] = None
    x_p: Optional[float] = None
    x_q: Optional[float] = None
    y_a: Optional[float] = None
    y_M: Optional[float] = None
    ybar_M: Optional[float] = None
    x_d: Optional[float] = None
    x_p_beyond_domain: bool = False
    y_a_defined: bool = False

    def as_dict(self) -> dict:
        return {
            "r_bar": self.r_bar,
            "y_b": self.y_b,
            "ybar_b": self.ybar_b,
            "x_p": self.x_p,
            "x_q": self.x_q,
            "y_a": self.y_a,
            "y_M": self.y_M,
            "ybar_M": self.ybar_M,
            "x_d": self.x_d,
            "x_p_beyond_domain": self.x_p_beyond_domain,
            "y_a_defined": self.y_a_defined,
        }


@dataclass(frozen=True)
class PhaseLabel:
    regime: str                # "special" (K = 1) or "general" (K > 1)
    index: int                 # 1..6 or 1..11
    applied_symmetry: bool = False
    on_boundary: bool = False

    def __post_init__(self) -> None:
        if self.regime not in ("special", "general"):
            raise ParameterError(f"unknown regime {self.regime!r}")
        hi = 6 if self.regime == "special" else 11
        if not 1 <= self.index <= hi:
            raise ParameterError(f"phase index {self.index} out of range")


def _special_index(alpha: float, beta: float, omega: float) -> tuple[int, bool]:
    """Equal-rates table, alpha >= beta assumed.  Weak comparisons make the
    lowest matching index win on boundaries."""
    t = _TIE
    s = alpha + beta + omega
    boundary = any(
        abs(r) < t
        for r in (
            alpha - beta - omega,
            s - 1.0,
            alpha - 0.5,
            beta - 0.5,
            beta - (0.5 - omega),
        )
    )
    if alpha <= beta + omega + t and s <= 1.0 + t:
        return 1, boundary
    if alpha <= 0.5 + t and s >= 1.0 - t:
        return 2, boundary
    if alpha >= 0.5 - t and 0.5 - omega - t <= beta <= 0.5 + t:
        return 3, boundary
    if alpha >= beta + omega - t and s <= 1.0 + t:
        return 4, boundary
    if beta <= 0.5 - omega + t and s >= 1.0 - t:
        return 5, boundary
    if alpha >= 0.5 - t and beta >= 0.5 - t:
        return 6, boundary
    raise ClassificationError(
        f"equal-rates predicates cover nothing at alpha={alpha}, beta={beta}"
    )


@dataclass(frozen=True)
class _GeneralScalars:
    """Per-parameter scalars feeding the unequal-rates decision tree."""

    r_bar: float
    ybar_b: float          # rho_b(0)
    ybar_M: float          # rho_M(0)
    x_p: float             # may be +inf
    y_a: Optional[float]   # rho_a(1) when x_p >= 1 and the curve meets 0.5


def _general_scalars(params: ModelParams) -> _GeneralScalars:
    om, k = params.omega_d, params.binding_ratio
    rbar = params.isotherm
    bbar = params.beta_bar
    if abs(bbar - rbar) <= 1e-14:
        ybar_b = bbar
    else:
        curve_b = CharacteristicCurve(om, k, 1.0, bbar)
        ybar_b = curve_b.value(0.0)
    curve_m = CharacteristicCurve(om, k, 1.0, 0.5, region="mid")
    ybar_M = curve_m.value(0.0)
    alpha = params.alpha
    if alpha >= rbar - 1e-14:
        x_p: float = math.inf
        y_a: Optional[float] = None
    else:
        if abs(alpha - 0.5) <= 1e-15:
            x_p = 0.0
        else:
            f05 = _first_integral(0.5, om, k)
            x_p = f05 - _first_integral(alpha, om, k)
        if x_p > 1.0 - _TIE:
            if x_p <= 1.0 + _TIE:
                y_a = 0.5
            else:
                region = "low" if alpha < 0.5 else "mid"
                y_a = CharacteristicCurve(om, k, 0.0, alpha, region).value(1.0)
        else:
            y_a = None
    return _GeneralScalars(rbar, ybar_b, ybar_M, x_p, y_a)


def _general_index(
    alpha: float, beta: float, sc: _GeneralScalars
) -> tuple[int, bool]:
    """Unequal-rates decision table (K > 1), evaluated as the section-wise
    decision tree; weak comparisons resolve boundaries to the lower index."""
    t = _TIE
    bbar = 1.0 - beta
    y_b = 1.0 - sc.ybar_b
    y_M = 1.0 - sc.ybar_M
    residuals = [bbar - sc.r_bar, bbar - 0.5, alpha - y_b, alpha - sc.ybar_b,
                 alpha - y_M, alpha - sc.ybar_M]
    if math.isfinite(sc.x_p):
        residuals.append(sc.x_p - 1.0)
    if sc.y_a is not None:
        residuals.append(sc.y_a - beta)
        residuals.append(sc.y_a - bbar)
    boundary = any(abs(r) < t for r in residuals)

    dw_or_one = None
    if bbar >= sc.r_bar - t:
        section = 1
        dw_or_one = 9
    elif bbar >= 0.5 - t:
        section = 2
        dw_or_one = 10
    else:
        section = 3

    if section in (1, 2):
        if alpha <= y_b + t:
            if sc.x_p >= 1.0 - t and sc.y_a is not None and sc.y_a <= beta + t:
                return 1, boundary
            return dw_or_one, boundary  # type: ignore[return-value]
        if alpha <= sc.ybar_b + t:
            return (3 if section == 1 else 5), boundary
        return (4 if section == 1 else 6), boundary
    # section 3: right density below one half
    if alpha <= y_M + t:
        if sc.x_p >= 1.0 - t:
            if sc.y_a is not None and sc.y_a <= bbar + t:
                return 1, boundary
            return 2, boundary
        return 11, boundary
    if alpha <= sc.ybar_M + t:
        return 7, boundary
    return 8, boundary


def classify(params: ModelParams) -> tuple[PhaseLabel, PhaseFeatures]:
    """Phase of the sharp-interface limit profile.

    Parameters with K < 1, or K = 1 with alpha < beta, are first mapped by
    the particle-hole symmetry; ``applied_symmetry`` records this and the
    features refer to the transformed frame.
    """
    k = params.binding_ratio
    applied = False
    work = params
    if k < 1.0 - _K_EQUAL or (abs(k - 1.0) <= _K_EQUAL and params.alpha < params.beta):
        work = params.hole_transformed()
        applied = True
    k = work.binding_ratio

    if abs(k - 1.0) <= _K_EQUAL:
        omega = work.omega_d
        idx, boundary = _special_index(work.alpha, work.beta, omega)
        label = PhaseLabel("special", idx, applied, boundary)
        feats = _special_features(work, idx)
        return label, feats

    sc = _general_scalars(work)
    idx, boundary = _general_index(work.alpha, work.beta, sc)
    label = PhaseLabel("general", idx, applied, boundary)
    feats = _general_features(work, sc, idx)
    return label, feats


def _special_features(params: ModelParams, idx: int) -> PhaseFeatures:
    om = params.omega_d
    alpha, beta = params.alpha, params.beta
    y_b = beta + om
    ybar_b = 1.0 - y_b
    x_p = (0.5 - alpha) / om if (om > 0 and alpha < 0.5) else math.inf
    x_q = 1.0 - (0.5 - beta) / om if (om > 0 and beta < 0.5) else None
    x_d = (om + beta - alpha) / (2.0 * om) if (om > 0 and idx == 1) else None
    y_a = alpha + om if (math.isfinite(x_p) and x_p >= 1.0) else None
    return PhaseFeatures(
        r_bar=0.5,
        y_b=y_b,
        ybar_b=ybar_b,
        x_p=x_p,
        x_q=x_q,
        y_a=y_a,
        x_d=x_d,
        x_p_beyond_domain=not (math.isfinite(x_p) and x_p <= 1.0),
        y_a_defined=y_a is not None,
    )


def _general_features(
    params: ModelParams, sc: _GeneralScalars, idx: int
) -> PhaseFeatures:
    x_d = None
    if idx in (9, 10, 11):
        om, k = params.omega_d, params.binding_ratio
        region_a = "low" if params.alpha < 0.5 else "mid"
        curve_a = CharacteristicCurve(om, k, 0.0, params.alpha, region_a)
        if idx == 11:
            curve_r = CharacteristicCurve(om, k, 1.0, 0.5, region="mid")
        else:
            curve_r = CharacteristicCurve(om, k, 1.0, params.beta_bar)
        x_d = domain_wall(curve_a, curve_r)
    return PhaseFeatures(
        r_bar=sc.r_bar,
        y_b=1.0 - sc.ybar_b,
        ybar_b=sc.ybar_b,
        x_p=sc.x_p,
        y_a=sc.y_a,
        y_M=1.0 - sc.ybar_M,
        ybar_M=sc.ybar_M,
        x_d=x_d,
        x_p_beyond_domain=not (math.isfinite(sc.x_p) and sc.x_p <= 1.0),
        y_a_defined=sc.y_a is not None,
    )


# ---------------------------------------------------------------------------
# Limit-profile assembly
# ---------------------------------------------------------------------------


def _affine_piece(x_lo, x_hi, inc_lo, inc_hi, intercept, slope) -> Piece:
    return Piece(x_lo, x_hi, inc_lo, inc_hi, "affine", c0=intercept, c1=slope)


def _const_piece(x_lo, x_hi, inc_lo, inc_hi, value) -> Piece:
    return Piece(x_lo, x_hi, inc_lo, inc_hi, "constant", c0=value)


def _point_piece(x, value) -> Piece:
    return Piece(x, x, True, True, "point", c0=value)


def _curve_piece(x_lo, x_hi, inc_lo, inc_hi, curve) -> Piece:
    return Piece(x_lo, x_hi, inc_lo, inc_hi, "characteristic-segment", curve=curve)


def _maybe_breakpoint(bps, position, tag, left, right) -> None:
    if abs(right - left) > _JUMP_MIN:
        bps.append(Breakpoint(position, tag, left, right))


def _special_profile(params: ModelParams, idx: int,
                     feats: PhaseFeatures) -> PiecewiseLimitProfile:
    om = params.omega_d
    alpha, beta, bbar = params.alpha, params.beta, params.beta_bar
    pieces: list[Piece] = []
    bps: list[Breakpoint] = []
    if idx == 1:
        x_d = (om + beta - alpha) / (2.0 * om)
        left_v = alpha + om * x_d
        right_v = bbar - om + om * x_d
        pieces.append(_affine_piece(0.0, x_d, True, True, alpha, om))
        pieces.append(_affine_piece(x_d, 1.0, False, True, bbar - om, om))
        _maybe_breakpoint(bps, x_d, "domain-wall", left_v, right_v)
    elif idx == 2:
        x_p = (0.5 - alpha) / om
        x_q = 1.0 - (0.5 - beta) / om
        if x_p > 1e-12:
            pieces.append(_affine_piece(0.0, x_p, True, False, alpha, om))
        plateau_lo = max(x_p, 0.0)
        pieces.append(_const_piece(plateau_lo, min(x_q, 1.0), True, True, 0.5))
        if x_q < 1.0 - 1e-12:
            pieces.append(_affine_piece(x_q, 1.0, False, True, bbar - om, om))
    elif idx == 3:
        x_q = 1.0 - (0.5 - beta) / om
        pieces.append(_point_piece(0.0, alpha))
        pieces.append(_const_piece(0.0, x_q, False, True, 0.5))
        if x_q < 1.0 - 1e-12:
            pieces.append(_affine_piece(x_q, 1.0, False, True, bbar - om, om))
        _maybe_breakpoint(bps, 0.0, "left-boundary-layer", alpha, 0.5)
    elif idx in (4, 5):
        pieces.append(_point_piece(0.0, alpha))
        pieces.append(_affine_piece(0.0, 1.0, False, True, bbar - om, om))
        _maybe_breakpoint(bps, 0.0, "left-boundary-layer", alpha, bbar - om)
    elif idx == 6:
        pieces.append(_point_piece(0.0, alpha))
        pieces.append(_const_piece(0.0, 1.0, False, False, 0.5))
        pieces.append(_point_piece(1.0, bbar))
        _maybe_breakpoint(bps, 0.0, "left-boundary-layer", alpha, 0.5)
        _maybe_breakpoint(bps, 1.0, "right-boundary-layer", 0.5, bbar)
    else:
        raise ClassificationError(f"no equal-rates phase {idx}")
    return PiecewiseLimitProfile(tuple(pieces), tuple(bps))


def _general_profile(params: ModelParams, idx: int,
                     feats: PhaseFeatures) -> PiecewiseLimitProfile:
    om, k = params.omega_d, params.binding_ratio
    alpha, bbar = params.alpha, params.beta_bar
    region_a = "low" if alpha < 0.5 else ("mid" if alpha < feats.r_bar else "high")
    curve_a = CharacteristicCurve(om, k, 0.0, alpha, region_a)
    curve_b = CharacteristicCurve(om, k, 1.0, bbar) if abs(bbar - feats.r_bar) > 1e-14 \
        else CharacteristicCurve(om, k, 1.0, bbar, "constant")
    curve_m = CharacteristicCurve(om, k, 1.0, 0.5, region="mid")
    pieces: list[Piece] = []
    bps: list[Breakpoint] = []
    if idx in (1, 2):
        y_a = curve_a.value(1.0)
        pieces.append(_curve_piece(0.0, 1.0, True, False, curve_a))
        pieces.append(_point_piece(1.0, bbar))
        _maybe_breakpoint(bps, 1.0, "right-boundary-layer", y_a, bbar)
    elif idx in (3, 4, 5, 6):
        ybar_b = curve_b.value(0.0)
        pieces.append(_point_piece(0.0, alpha))
        pieces.append(_curve_piece(0.0, 1.0, False, True, curve_b))
        _maybe_breakpoint(bps, 0.0, "left-boundary-layer", alpha, ybar_b)
    elif idx in (7, 8):
        ybar_m = curve_m.value(0.0)
        pieces.append(_point_piece(0.0, alpha))
        pieces.append(_curve_piece(0.0, 1.0, False, False, curve_m))
        pieces.append(_point_piece(1.0, bbar))
        _maybe_breakpoint(bps, 0.0, "left-boundary-layer", alpha, ybar_m)
        _maybe_breakpoint(bps, 1.0, "right-boundary-layer", 0.5, bbar)
    elif idx in (9, 10):
        x_d = feats.x_d if feats.x_d is not None else domain_wall(curve_a, curve_b)
        pieces.append(_curve_piece(0.0, x_d, True, True, curve_a))
        pieces.append(_curve_piece(x_d, 1.0, False, True, curve_b))
        _maybe_breakpoint(bps, x_d, "domain-wall",
                          curve_a.value(x_d), curve_b.value(x_d))
    elif idx == 11:
        x_d = feats.x_d if feats.x_d is not None else domain_wall(curve_a, curve_m)
        pieces.append(_curve_piece(0.0, x_d, True, True, curve_a))
        pieces.append(_curve_piece(x_d, 1.0, False, False, curve_m))
        pieces.append(_point_piece(1.0, bbar))
        _maybe_breakpoint(bps, x_d, "domain-wall",
                          curve_a.value(x_d), curve_m.value(x_d))
        _maybe_breakpoint(bps, 1.0, "right-boundary-layer", 0.5, bbar)
    else:
        raise ClassificationError(f"no unequal-rates phase {idx}")
    return PiecewiseLimitProfile(tuple(pieces), tuple(bps))


def limit_profile(params: ModelParams) -> PiecewiseLimitProfile:
    """Assemble the sharp-interface limit profile for the classified phase.

    When classification went through the particle-hole transform, the
    profile is assembled in the reduced frame and transformed back, so the
    result always refers to the caller's parameters.
    """
    label, feats = classify(params)
    work = params.hole_transformed() if label.applied_symmetry else params
    if label.regime == "special":
        prof = _special_profile(work, label.index, feats)
    else:
        prof = _general_profile(work, label.index, feats)
    if label.applied_symmetry:
        prof = prof.hole_transformed()
    return prof


# ---------------------------------------------------------------------------
# Phase-diagram sweep
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PhaseMap:
    """Raster phase map over the (alpha, beta) unit square."""

    alphas: np.ndarray
    betas: np.ndarray
    labels: np.ndarray          # shape (n_beta, n_alpha), int
    boundary: np.ndarray        # same shape, bool
    regime: str
    omega_a: float
    omega_d: float

    def label_set(self, exclude_boundary: bool = True) -> set[int]:
        """Distinct region labels.  Cells flagged as lying on a phase
        boundary (resolved to the lower index by convention) are excluded by
        default: a tie-break convention must not create phantom phases, e.g.
        the coexistence diagonal alpha = beta of the rate-free sweep."""
        if exclude_boundary and not self.boundary.all():
            vals = self.labels[~self.boundary]
        else:
            vals = self.labels
        return set(int(v) for v in np.unique(vals))

    def to_csv(self, path) -> None:
        import csv as _csv

        with open(path, "w", newline="") as fh:
            w = _csv.writer(fh)
            w.writerow(["alpha", "beta", "phase_index", "boundary_flag"])
            for j, b in enumerate(self.betas):
                for i, a in enumerate(self.alphas):
                    w.writerow([repr(float(a)), repr(float(b)),
                                int(self.labels[j, i]), int(self.boundary[j, i])])

    def boundary_segments(self) -> list[tuple[tuple[float, float], tuple[float, float]]]:
        """Plot-ready segments tracing label changes (midpoint rule on each
        2x2 block, joined through the block center at junctions)."""
        segs = []
        lab = self.labels
        a, b = self.alphas, self.betas
        nb, na = lab.shape
        for j in range(nb - 1):
            for i in range(na - 1):
                corners = lab[j, i], lab[j, i + 1], lab[j + 1, i], lab[j + 1, i + 1]
                mids = []
                if corners[0] != corners[1]:
                    mids.append(((a[i] + a[i + 1]) / 2.0, b[j]))
                if corners[2] != corners[3]:
                    mids.append(((a[i] + a[i + 1]) / 2.0, b[j + 1]))
                if corners[0] != corners[2]:
                    mids.append((a[i], (b[j] + b[j + 1]) / 2.0))
                if corners[1] != corners[3]:
                    mids.append((a[i + 1], (b[j] + b[j + 1]) / 2.0))
                if len(mids) == 2:
                    segs.append((mids[0], mids[1]))
                elif len(mids) > 2:
                    cx = (a[i] + a[i + 1]) / 2.0
                    cy = (b[j] + b[j + 1]) / 2.0
                    for m in mids:
                        segs.append((m, (cx, cy)))
        return segs

    def segments_to_csv(self, path) -> None:
        import csv as _csv

        with open(path, "w", newline="") as fh:
            w = _csv.writer(fh)
            w.writerow(["segment_id", "alpha", "beta"])
            for sid, (p, q) in enumerate(self.boundary_segments()):
                w.writerow([sid, repr(p[0]), repr(p[1])])
                w.writerow([sid, repr(q[0]), repr(q[1])])


def phase_sweep(
    omega_a: float,
    omega_d: float,
    grid_resolution: int = 200,
    epsilon: float = 0.01,
) -> PhaseMap:
    """Classify every cell of a grid over (alpha, beta) in (0,1)^2.

    Per-axis feature caching makes this run in well under a second at the
    default 200x200 resolution: for K != 1 the curve inversions depend on
    alpha or beta alone.
    """
    if grid_resolution < 50:
        raise ParameterError("grid_resolution must be >= 50")
    n = grid_resolution
    alphas = (np.arange(n) + 0.5) / n
    betas = (np.arange(n) + 0.5) / n
    labels = np.zeros((n, n), dtype=np.int32)
    boundary = np.zeros((n, n), dtype=bool)

    if omega_d == 0.0 and omega_a == 0.0:
        k = 1.0
    elif omega_d == 0.0 or omega_a == 0.0:
        raise ParameterError("only omega_a == omega_d == 0 is a valid zero-rate sweep")
    else:
        k = omega_a / omega_d

    if abs(k - 1.0) <= _K_EQUAL:
        omega = omega_d
        for j, b in enumerate(betas):
            for i, a in enumerate(alphas):
                aa, bb = (a, b) if a >= b else (b, a)
                idx, bd = _special_index(aa, bb, omega)
                labels[j, i] = idx
                boundary[j, i] = bd
        return PhaseMap(alphas, betas, labels, boundary, "special", omega_a, omega_d)

    swap = k < 1.0
    om_d = omega_a if swap else omega_d
    om_a = omega_d if swap else omega_a
    kk = om_a / om_d
    rbar = kk / (kk + 1.0)
    f05 = _first_integral(0.5, om_d, kk)
    curve_m = CharacteristicCurve(om_d, kk, 1.0, 0.5, region="mid")
    ybar_M = curve_m.value(0.0)

    # per-alpha: x_p and y_a;  per-beta: rho_b(0)
    xp_cache: dict[float, tuple[float, Optional[float]]] = {}
    yb_cache: dict[float, float] = {}

    def alpha_feats(a: float) -> tuple[float, Optional[float]]:
        got = xp_cache.get(a)
        if got is None:
            if a >= rbar - 1e-14:
                got = (math.inf, None)
            else:
                x_p = f05 - _first_integral(a, om_d, kk)
                if x_p > 1.0 - _TIE:
                    region = "low" if a < 0.5 else "mid"
                    y_a = 0.5 if x_p <= 1.0 + _TIE else \
                        CharacteristicCurve(om_d, kk, 0.0, a, region).value(1.0)
                    got = (x_p, y_a)
                else:
                    got = (x_p, None)
            xp_cache[a] = got
        return got

    def beta_feat(b: float) -> float:
        got = yb_cache.get(b)
        if got is None:
            bbar = 1.0 - b
            if abs(bbar - rbar) <= 1e-14:
                got = bbar
            else:
                got = CharacteristicCurve(om_d, kk, 1.0, bbar).value(0.0)
            yb_cache[b] = got
        return got

    for j, b in enumerate(betas):
        for i, a in enumerate(alphas):
            aa, bb = (b, a) if swap else (a, b)
            x_p, y_a = alpha_feats(aa)
            sc = _GeneralScalars(rbar, beta_feat(bb), ybar_M, x_p, y_a)
            idx, bd = _general_index(aa, bb, sc)
            labels[j, i] = idx
            boundary[j, i] = bd
    return PhaseMap(alphas, betas, labels, boundary, "general", omega_a, omega_d)
