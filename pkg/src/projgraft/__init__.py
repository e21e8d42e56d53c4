"""Schottky groups, Stallings foldings, non-crossing multiarcs, a grafting
calculus on holed spheres and numeric branched covers of the sphere."""

from .moebius import MoebiusMap, SpherePoint, classify, fixed_points
from .schottky import GroupWord, SchottkyGroup, limit_set_approx, standard_fuchsian

__all__ = ["MoebiusMap", "SpherePoint", "classify", "fixed_points", "GroupWord", "SchottkyGroup",
           "limit_set_approx", "standard_fuchsian"]
__version__ = "0.1.0"
