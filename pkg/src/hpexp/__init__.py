"""Quadratic Hermite-Pade approximants to the exponential: exact polynomials,
the associated three-sheeted surface, trajectories, limit measures and
asymptotic formulas checked against the exact objects."""

from .exact import HPTriple, RationalPoly, residue_polynomials, solve_hp_system
from .curves import Geometry, build_geometry

__all__ = ["HPTriple", "RationalPoly", "residue_polynomials", "solve_hp_system",
           "Geometry", "build_geometry"]
__version__ = "0.1.0"
