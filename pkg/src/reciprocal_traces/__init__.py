"""Traces of reciprocal singular moduli and the Kudla-Millson lift of 1/j."""

from .numerics import PrecisionContext, QExpansion

__all__ = ["PrecisionContext", "QExpansion"]
