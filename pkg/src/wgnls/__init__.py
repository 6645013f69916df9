"""Cubic NLS in a thin curved planar waveguide and its one-dimensional limit."""

from .errors import NumericalError, ValidationError, WaveguideError
from .geometry import CurveSpec, build_coefficients, builtin_curve, check_injectivity, reconstruct_curve
from .spectral import StripGrid
from .transverse import GAMMA, MU1, MU2, TransverseBasis

__version__ = "0.1.0"

__all__ = [
    "CurveSpec",
    "GAMMA",
    "MU1",
    "MU2",
    "NumericalError",
    "StripGrid",
    "TransverseBasis",
    "ValidationError",
    "WaveguideError",
    "build_coefficients",
    "builtin_curve",
    "check_injectivity",
    "reconstruct_curve",
]
