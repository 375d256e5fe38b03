"""Teichmüller TQFT partition functions, knot invariants and their checks.

Modules: qdl (Faddeev's quantum dilogarithm), triangulation (shaped
triangulations and balancing), invariants (reduced state integrals),
volume (saddle points and scaling), mcg (cobordism multiplier lemmas) and
cli (command line front end).
"""
from .qdl import DEFAULT_SPEC, IntegralSpec, ModularParameter, phi
from .invariants import KnotId, chi_41, chi_52, j_61

__all__ = ["DEFAULT_SPEC", "IntegralSpec", "ModularParameter", "phi", "KnotId",
           "chi_41", "chi_52", "j_61"]
__version__ = "0.1.0"
