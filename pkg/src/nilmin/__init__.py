"""Timelike minimal surfaces in the Lorentzian Heisenberg group.

The package builds surfaces from Lorentzian harmonic Gauss maps,
detects and classifies their singularities, and generates B-scroll
examples through the dual constant-mean-curvature surfaces in
Minkowski 3-space.
"""

__version__ = "1.0.0"

from .errors import NilminError
from .paracomplex import Jet2, Paracomplex

__all__ = ["NilminError", "Paracomplex", "Jet2", "__version__"]
