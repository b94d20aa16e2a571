"""Shared domain types and the neighborhood calculus.

The model is a driven lattice gas on an open 1D track: particles hop to the
right with exclusion, enter/leave through boundary reservoirs of densities
``alpha`` and ``1 - beta``, and attach/detach in the bulk at rescaled rates
``Omega_A = omega_a`` and ``Omega_D = omega_d``.  ``epsilon = 1/(N+1)`` is the
lattice spacing; the sharp-interface limit profiles live on [0, 1] and may be
discontinuous, so closeness is measured with a band metric (local inf/sup
within a horizontal distance ``delta`` plus a vertical slack ``delta``) rather
than a sup norm.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

__all__ = [
    "ParameterError",
    "GridMismatchError",
    "ModelParams",
    "DensityProfile",
    "Piece",
    "Breakpoint",
    "PiecewiseLimitProfile",
    "Tolerance",
    "in_neighborhood",
    "particle_hole_transform",
    "sup_distance",
]

# Additive slack applied to the strict band inequalities so that exact ties
# at machine precision count as membership.
MEMBERSHIP_SLACK = 1e-12

_UNIFORM_RTOL = 1e-8


class ParameterError(ValueError):
    """Invalid model or solver parameter."""


class GridMismatchError(ValueError):
    """Two profiles were combined but their grids differ."""


@dataclass(frozen=True)
class ModelParams:
    """Scenario parameters: boundary densities, kinetic rates, lattice scale.

    ``alpha`` is the left reservoir density, ``beta`` parametrizes the right
    reservoir (right density is ``1 - beta``), ``omega_a``/``omega_d`` are the
    rescaled attachment/detachment rates, and ``epsilon`` is the lattice
    spacing 1/(N+1).
    """

    alpha: float
    beta: float
    omega_a: float
    omega_d: float
    epsilon: float = 0.01

    def __post_init__(self) -> None:
        if not (0.0 < self.alpha < 1.0):
            raise ParameterError(f"alpha must be in (0,1), got {self.alpha}")
        if not (0.0 < self.beta < 1.0):
            raise ParameterError(f"beta must be in (0,1), got {self.beta}")
        if self.omega_a < 0.0:
            raise ParameterError(f"omega_a must be >= 0, got {self.omega_a}")
        if self.omega_d < 0.0:
            raise ParameterError(f"omega_d must be >= 0, got {self.omega_d}")
        # omega_d == 0 is allowed only in the degenerate pure-hopping member
        # of the equal-rates family (omega_a == omega_d == 0).
        if self.omega_d == 0.0 and self.omega_a != 0.0:
            raise ParameterError("omega_d = 0 requires omega_a = 0")
        if not (0.0 < self.epsilon < 1.0):
            raise ParameterError(f"epsilon must be in (0,1), got {self.epsilon}")

    @property
    def beta_bar(self) -> float:
        """Right boundary density 1 - beta."""
        return 1.0 - self.beta

    @property
    def binding_ratio(self) -> float:
        """K = omega_a / omega_d (1 for the rateless degenerate member)."""
        if self.omega_d == 0.0:
            return 1.0
        return self.omega_a / self.omega_d

    @property
    def isotherm(self) -> float:
        """Langmuir isotherm density K/(K+1), the bulk kinetic fixed point."""
        k = self.binding_ratio
        return k / (k + 1.0)

    @property
    def n_sites(self) -> int:
        """Number of bulk lattice sites N = round(1/epsilon) - 1."""
        n = round(1.0 / self.epsilon) - 1
        if n < 1:
            raise ParameterError(f"epsilon={self.epsilon} gives N={n} < 1")
        return n

    def hole_transformed(self) -> "ModelParams":
        return ModelParams(
            alpha=self.beta,
            beta=self.alpha,
            omega_a=self.omega_d,
            omega_d=self.omega_a,
            epsilon=self.epsilon,
        )

    def with_epsilon(self, epsilon: float) -> "ModelParams":
        return ModelParams(self.alpha, self.beta, self.omega_a, self.omega_d, epsilon)


def uniform_grid(n_cells: int) -> np.ndarray:
    """n_cells + 1 equispaced nodes on [0, 1] with exact endpoints."""
    if n_cells < 1:
        raise ParameterError("n_cells must be >= 1")
    return np.linspace(0.0, 1.0, n_cells + 1)


@dataclass(frozen=True)
class DensityProfile:
    """A density function sampled on a uniform grid over [0, 1]."""

    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        grid = np.ascontiguousarray(np.asarray(self.grid, dtype=float))
        values = np.ascontiguousarray(np.asarray(self.values, dtype=float))
        if grid.ndim != 1 or values.ndim != 1 or grid.size != values.size:
            raise ParameterError("grid and values must be 1D arrays of equal length")
        if grid.size < 2:
            raise ParameterError("profile needs at least 2 nodes")
        if grid[0] != 0.0 or grid[-1] != 1.0:
            raise ParameterError("grid must start at 0 and end at 1")
        d = np.diff(grid)
        if np.any(d <= 0):
            raise ParameterError("grid must be strictly increasing")
        h = 1.0 / (grid.size - 1)
        if np.max(np.abs(d - h)) > _UNIFORM_RTOL * max(h, 1.0):
            raise ParameterError("grid must be uniform")
        if not np.all(np.isfinite(values)):
            raise ParameterError("profile values must be finite")
        if values.min() < -0.1 or values.max() > 1.1:
            raise ParameterError(
                "profile values outside [-0.1, 1.1] "
                f"(range [{values.min():.4g}, {values.max():.4g}])"
            )
        grid.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)

    @property
    def spacing(self) -> float:
        return 1.0 / (self.grid.size - 1)

    def interp(self, x: np.ndarray | float) -> np.ndarray | float:
        return np.interp(x, self.grid, self.values)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x", "rho"])
            for x, r in zip(self.grid, self.values):
                w.writerow([repr(float(x)), repr(float(r))])

    @staticmethod
    def from_csv(path) -> "DensityProfile":
        xs, rs = [], []
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            if header[:2] != ["x", "rho"]:
                raise ParameterError(f"unexpected CSV header {header!r}")
            for row in reader:
                xs.append(float(row[0]))
                rs.append(float(row[1]))
        return DensityProfile(np.array(xs), np.array(rs))


def sup_distance(a: DensityProfile, b: DensityProfile) -> float:
    """Max over the common grid of |a - b|; grids must be identical."""
    if a.grid.size != b.grid.size or np.max(np.abs(a.grid - b.grid)) > 0.0:
        raise GridMismatchError("profiles are on different grids")
    return float(np.max(np.abs(a.values - b.values)))


# ---------------------------------------------------------------------------
# Piecewise limit profiles
# ---------------------------------------------------------------------------

PIECE_KINDS = ("constant", "affine", "characteristic-segment", "point")
BREAKPOINT_TAGS = ("left-boundary-layer", "right-boundary-layer", "domain-wall")


@dataclass(frozen=True)
class Piece:
    """One smooth piece of a limit profile.

    ``constant``/``affine``/``point`` pieces evaluate to ``c0 + c1*x``;
    a ``characteristic-segment`` delegates to ``curve.value(x)`` where
    ``curve`` is any object exposing monotone ``value``/``params`` (the phase
    module's characteristic curves).  Every kind is monotone or constant on
    its interval, so interval extrema sit at the interval ends.
    """

    x_lo: float
    x_hi: float
    include_lo: bool
    include_hi: bool
    kind: str
    c0: float = 0.0
    c1: float = 0.0
    curve: object | None = None

    def __post_init__(self) -> None:
        if self.kind not in PIECE_KINDS:
            raise ParameterError(f"unknown piece kind {self.kind!r}")
        if self.kind == "point":
            if self.x_lo != self.x_hi:
                raise ParameterError("point piece must have x_lo == x_hi")
        elif not self.x_lo < self.x_hi:
            raise ParameterError("piece interval must have x_lo < x_hi")
        if self.kind == "characteristic-segment" and self.curve is None:
            raise ParameterError("characteristic-segment needs a curve")

    def value(self, x: float) -> float:
        if self.kind == "characteristic-segment":
            return float(self.curve.value(x))  # type: ignore[union-attr]
        return self.c0 + self.c1 * x

    def contains(self, x: float) -> bool:
        if self.kind == "point":
            return x == self.x_lo
        if x < self.x_lo or x > self.x_hi:
            return False
        if x == self.x_lo:
            return self.include_lo
        if x == self.x_hi:
            return self.include_hi
        return True

    def extrema_on(self, lo: float, hi: float) -> tuple[float, float] | None:
        """(min, max) of the continuous extension over [lo,hi] ∩ closure."""
        if self.kind == "point":
            if lo <= self.x_lo <= hi:
                v = self.value(self.x_lo)
                return v, v
            return None
        a = max(lo, self.x_lo)
        b = min(hi, self.x_hi)
        if a > b:
            return None
        va, vb = self.value(a), self.value(b)
        return (va, vb) if va <= vb else (vb, va)

    def params(self) -> dict:
        out: dict = {
            "kind": self.kind,
            "x_lo": self.x_lo,
            "x_hi": self.x_hi,
            "include_lo": self.include_lo,
            "include_hi": self.include_hi,
        }
        if self.kind == "characteristic-segment":
            out["curve"] = self.curve.params()  # type: ignore[union-attr]
        elif self.kind == "constant" or self.kind == "point":
            out["value"] = self.c0 + self.c1 * self.x_lo
        else:
            out["intercept"] = self.c0
            out["slope"] = self.c1
        return out


@dataclass(frozen=True)
class Breakpoint:
    position: float
    tag: str
    left_value: float
    right_value: float

    def __post_init__(self) -> None:
        if self.tag not in BREAKPOINT_TAGS:
            raise ParameterError(f"unknown breakpoint tag {self.tag!r}")

    @property
    def jump(self) -> float:
        return self.right_value - self.left_value


@dataclass(frozen=True)
class PiecewiseLimitProfile:
    """Sharp-interface limit profile: ordered smooth pieces with breakpoints.

    Pieces tile ``[x_min, x_max]`` (default [0,1]) without overlap; every
    discontinuity is a finite jump recorded in ``breakpoints``.
    """

    pieces: tuple[Piece, ...]
    breakpoints: tuple[Breakpoint, ...] = ()
    x_min: float = 0.0
    x_max: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "pieces", tuple(self.pieces))
        object.__setattr__(self, "breakpoints", tuple(self.breakpoints))
        if not self.pieces:
            raise ParameterError("profile needs at least one piece")
        intervals = [p for p in self.pieces if p.kind != "point"]
        pos = self.x_min
        for p in intervals:
            if abs(p.x_lo - pos) > 1e-12:
                raise ParameterError(
                    f"pieces do not tile [{self.x_min},{self.x_max}]: "
                    f"gap/overlap at {p.x_lo} (expected {pos})"
                )
            pos = p.x_hi
        if intervals and abs(pos - self.x_max) > 1e-12:
            raise ParameterError(f"pieces stop at {pos}, not {self.x_max}")
        for p in self.pieces:
            lo, hi = p.extrema_on(p.x_lo, p.x_hi)  # type: ignore[misc]
            if lo < -1e-9 or hi > 1.0 + 1e-9:
                raise ParameterError(
                    f"piece values [{lo:.4g},{hi:.4g}] leave [0,1]"
                )

    def evaluate(self, x: float) -> float:
        if not (self.x_min - 1e-12 <= x <= self.x_max + 1e-12):
            raise ParameterError(f"x={x} outside domain [{self.x_min},{self.x_max}]")
        x = min(max(x, self.x_min), self.x_max)
        for p in self.pieces:
            if p.kind == "point" and p.contains(x):
                return p.value(x)
        for p in self.pieces:
            if p.kind != "point" and p.contains(x):
                return p.value(x)
        # x coincides with a shared open endpoint: take the right piece limit
        for p in self.pieces:
            if p.kind != "point" and p.x_lo <= x <= p.x_hi:
                return p.value(x)
        raise ParameterError(f"no piece contains x={x}")

    def evaluate_many(self, xs: Iterable[float]) -> np.ndarray:
        return np.array([self.evaluate(float(x)) for x in xs])

    def band_extrema(self, lo: float, hi: float) -> tuple[float, float]:
        """inf/sup of the profile over [lo,hi] ∩ domain (piece-analytic)."""
        lo = max(lo, self.x_min)
        hi = min(hi, self.x_max)
        vmin, vmax = math.inf, -math.inf
        for p in self.pieces:
            ext = p.extrema_on(lo, hi)
            if ext is None:
                continue
            vmin = min(vmin, ext[0])
            vmax = max(vmax, ext[1])
        if vmin > vmax:
            raise ParameterError(f"empty band [{lo},{hi}]")
        return vmin, vmax

    def hole_transformed(self) -> "PiecewiseLimitProfile":
        """Map x -> 1-x, value -> 1-value (requires domain [0,1])."""
        if self.x_min != 0.0 or self.x_max != 1.0:
            raise ParameterError("hole transform needs domain [0,1]")
        new_pieces = []
        for p in reversed(self.pieces):
            lo, hi = 1.0 - p.x_hi, 1.0 - p.x_lo
            if p.kind == "characteristic-segment":
                new_pieces.append(
                    Piece(lo, hi, p.include_hi, p.include_lo,
                          "characteristic-segment",
                          curve=p.curve.hole_transformed())  # type: ignore[union-attr]
                )
            else:
                # v(x) = c0 + c1 x  ->  1 - v(1-x) = (1 - c0 - c1) + c1 x
                new_pieces.append(
                    Piece(lo, hi, p.include_hi, p.include_lo, p.kind,
                          c0=1.0 - p.c0 - p.c1, c1=p.c1)
                )
        tag_map = {
            "left-boundary-layer": "right-boundary-layer",
            "right-boundary-layer": "left-boundary-layer",
            "domain-wall": "domain-wall",
        }
        new_bps = tuple(
            Breakpoint(1.0 - b.position, tag_map[b.tag],
                       1.0 - b.right_value, 1.0 - b.left_value)
            for b in reversed(self.breakpoints)
        )
        return PiecewiseLimitProfile(tuple(new_pieces), new_bps)

    def to_json_dict(self) -> dict:
        return {
            "domain": [self.x_min, self.x_max],
            "pieces": [p.params() for p in self.pieces],
            "breakpoints": [
                {
                    "position": b.position,
                    "tag": b.tag,
                    "left_value": b.left_value,
                    "right_value": b.right_value,
                }
                for b in self.breakpoints
            ],
        }

    def to_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh, indent=2)


@dataclass(frozen=True)
class Tolerance:
    """Slack Δ for the band metric plus residual / root tolerances."""

    delta: float = 0.05
    eps_resid: float = 1e-10
    eps_newton: float = 1e-12

    def __post_init__(self) -> None:
        if self.delta <= 0 or self.eps_resid <= 0 or self.eps_newton <= 0:
            raise ParameterError("tolerances must be strictly positive")


def in_neighborhood(
    profile: DensityProfile,
    limit: PiecewiseLimitProfile,
    delta: float,
) -> bool:
    """Band membership: for every grid point x of ``profile``,

        inf_{|y-x|<=Δ} ρ̂(y) - Δ  <  ρ(x)  <  sup_{|y-x|<=Δ} ρ̂(y) + Δ,

    with inf/sup taken over the limit's domain and evaluated analytically per
    piece.  Strict inequalities carry a 1e-12 slack for machine-precision
    ties.
    """
    if delta <= 0:
        raise ParameterError(f"delta must be > 0, got {delta}")
    lo_dom, hi_dom = limit.x_min, limit.x_max
    for x, v in zip(profile.grid, profile.values):
        if x < lo_dom - 1e-12 or x > hi_dom + 1e-12:
            raise ParameterError(
                f"profile point x={x} outside limit domain [{lo_dom},{hi_dom}]"
            )
        band_lo, band_hi = limit.band_extrema(x - delta, x + delta)
        if not (band_lo - delta - MEMBERSHIP_SLACK < v < band_hi + delta + MEMBERSHIP_SLACK):
            return False
    return True


def particle_hole_transform(
    params: ModelParams, profile: DensityProfile
) -> tuple[ModelParams, DensityProfile]:
    """Exact particle-hole symmetry: (α,β,Ω_A,Ω_D) -> (β,α,Ω_D,Ω_A) and
    v'(x) = 1 - v(1-x) on the reversed (self-mapped) uniform grid."""
    new_params = params.hole_transformed()
    new_values = 1.0 - profile.values[::-1]
    return new_params, DensityProfile(profile.grid.copy(), new_values)
