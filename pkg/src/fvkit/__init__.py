"""Feferman-Vaught style reasoning about finite products and reduced products.

The main entry points are re-exported here; see the submodules for details.
"""

from .logic import Signature
from .syntax import parse, parse_signature, render
from .structures import FiniteStructure, ProductModel, ReducedModel, product, quotient
from .evaluate import Evaluator, evaluate
from .fv import FVNormalForm, translate

__all__ = [
    "Evaluator", "FVNormalForm", "FiniteStructure", "ProductModel", "ReducedModel",
    "Signature", "evaluate", "parse", "parse_signature", "product", "quotient", "render",
    "translate",
]
