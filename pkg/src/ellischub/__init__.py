"""Exact local elliptic classes of Schubert varieties."""
from __future__ import annotations

from .exactseries import HalfMonomial, QSeries, mono
from .theta import Checker, FactoredExpr, delta, expr_equal, theta
from .rootdata import build_root_datum, weyl_element

__all__ = [
    "Checker", "FactoredExpr", "HalfMonomial", "QSeries", "build_root_datum",
    "delta", "expr_equal", "mono", "theta", "weyl_element",
]
__version__ = "0.1.0"
