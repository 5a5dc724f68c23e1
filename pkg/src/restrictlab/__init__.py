"""Numerical experiments on random coordinate restrictions of linear operators."""

from .linalg import DenseOperator, InputError, SymmetricOperator
from .randomness import RngHandle, SubsetSample

__all__ = ["DenseOperator", "InputError", "RngHandle", "SubsetSample", "SymmetricOperator"]
__version__ = "0.1.0"
