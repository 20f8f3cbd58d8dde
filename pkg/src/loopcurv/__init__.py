"""Symbols of the Levi-Civita connection and curvature on Sobolev loop groups.

Exact symbolic layer (``algebra``, ``trig``, ``fields``, ``symbols``,
``geometry``) plus a Fourier-truncation numeric harness (``spectral``).
"""

__version__ = "0.1.0"

from .algebra import LieAlgebraSpec, abelian, builtin, jacobi_residual, so3, su2
from .fields import LoopField, bracket_fields, laplacian_power_apply
from .geometry import (
    SobolevParam,
    connection_symbol,
    curvature_symbol,
    leading_order,
    torsion_check,
)
from .symbols import Grade, Symbol, SymbolTerm, compose, grade_extract, power_symbol, symbol_add
from .trig import ExpPoly, TrigPoly, trig_diff, trig_mul

__all__ = [
    "__version__",
    "LieAlgebraSpec",
    "abelian",
    "builtin",
    "jacobi_residual",
    "so3",
    "su2",
    "LoopField",
    "bracket_fields",
    "laplacian_power_apply",
    "SobolevParam",
    "connection_symbol",
    "curvature_symbol",
    "leading_order",
    "torsion_check",
    "Grade",
    "Symbol",
    "SymbolTerm",
    "compose",
    "grade_extract",
    "power_symbol",
    "symbol_add",
    "ExpPoly",
    "TrigPoly",
    "trig_diff",
    "trig_mul",
]
