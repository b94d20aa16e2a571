"""Numerical laboratory for a driven lattice gas with bulk attachment and
detachment: stochastic simulation, mean-field lattice ODE, continuum PDE,
and the sharp-interface phase diagram with rigorous two-sided envelopes."""

from .core import (
    DensityProfile,
    ModelParams,
    PiecewiseLimitProfile,
    Tolerance,
    in_neighborhood,
    particle_hole_transform,
    sup_distance,
)

__version__ = "0.1.0"

__all__ = [
    "DensityProfile",
    "ModelParams",
    "PiecewiseLimitProfile",
    "Tolerance",
    "in_neighborhood",
    "particle_hole_transform",
    "sup_distance",
    "__version__",
]
