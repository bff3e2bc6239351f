"""Fusion rules, Bratteli diagrams and real-multiplication anyon systems."""

from .anyon import BraidWord, FRData, FusionPathBasis
from .bratteli import BratteliDiagram, DimensionFunction, OrderedK0
from .fusion import FusionSystem, K0Class, RMAnyonSystem
from .qtorus import ClockShiftPair, TruncatedWeylSeries
from .quadratic import CFExpansion, QuadExpr, QuadraticIrrational, UnimodularMatrix

__version__ = "0.1.0"

__all__ = [
    "BraidWord",
    "BratteliDiagram",
    "CFExpansion",
    "ClockShiftPair",
    "DimensionFunction",
    "FRData",
    "FusionPathBasis",
    "FusionSystem",
    "K0Class",
    "OrderedK0",
    "QuadExpr",
    "QuadraticIrrational",
    "RMAnyonSystem",
    "TruncatedWeylSeries",
    "UnimodularMatrix",
]
