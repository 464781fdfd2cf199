"""Unitary groups of finite-dimensional tracial algebras: paths, pre-determinants and the universal cover."""

from .algebra import Element, Hermitian, Projection, TracialAlgebra, Unitary
from .config import DEFAULT, Tolerances
from .cover import CoveringElement, lift_path
from .paths import SegmentPath
from .predet import pre_determinant, winding_oracle

__all__ = [
    "DEFAULT",
    "CoveringElement",
    "Element",
    "Hermitian",
    "Projection",
    "SegmentPath",
    "Tolerances",
    "TracialAlgebra",
    "Unitary",
    "lift_path",
    "pre_determinant",
    "winding_oracle",
]
