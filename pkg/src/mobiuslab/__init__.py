"""mobiuslab: conformal surface invariants, deformation families, and
similarity curve flows on desk-scale grids."""

__version__ = "0.1.0"

from .numgrid import ConformalChart, ScalarField, make_field
from .invariants import SurfacePatch, MetricalData, ConformalData, invariant_ladder

__all__ = [
    "__version__",
    "ConformalChart",
    "ScalarField",
    "make_field",
    "SurfacePatch",
    "MetricalData",
    "ConformalData",
    "invariant_ladder",
]
