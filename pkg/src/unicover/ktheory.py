"""K_0 of a finite-dimensional algebra and its trace pairing.

``K_0(M_{n_1} + ... + M_{n_k}) = Z^k`` through block ranks; the pairing with
the center-valued trace sends a rank vector to ``(r_i / n_i)``. A class with
``0 <= r_i <= size_i`` is carried by the loop ``t -> exp(2 pi i t) p + 1 - p``
and every loop winds like one of these.

``K_1`` vanishes: the unitary group of a finite-dimensional algebra is
connected, so it is not modelled beyond :data:`K1_RANK`.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .algebra import CenterVector, Projection, TracialAlgebra
from .config import DEFAULT, Tolerances
from .errors import PreconditionError
from .paths import SegmentPath, projection_loop
from .predet import checked_winding

K1_RANK = 0


@dataclass(frozen=True)
class K0Class:
    algebra: TracialAlgebra
    ranks: tuple[int, ...]

    def __post_init__(self):
        ranks = tuple(int(r) for r in self.ranks)
        if len(ranks) != self.algebra.k:
            raise PreconditionError(f"a K0 class needs {self.algebra.k} ranks")
        object.__setattr__(self, "ranks", ranks)

    def __add__(self, other: "K0Class") -> "K0Class":
        self.algebra.check_same(other.algebra)
        return K0Class(self.algebra, tuple(a + b for a, b in zip(self.ranks, other.ranks)))

    def __neg__(self) -> "K0Class":
        return K0Class(self.algebra, tuple(-r for r in self.ranks))

    def __sub__(self, other: "K0Class") -> "K0Class":
        return self + (-other)


def k0_from_projection(p: Projection) -> K0Class:
    if not isinstance(p, Projection):
        p = Projection(p.algebra, p.blocks)
    return K0Class(p.algebra, p.ranks())


def trace_pairing(c: K0Class) -> CenterVector:
    return CenterVector(c.algebra, tuple(Fraction(r, n) for r, n in zip(c.ranks, c.algebra.units)))


def loop_to_k0(p: SegmentPath, tol: Tolerances = DEFAULT) -> K0Class:
    return K0Class(p.algebra, checked_winding(p, tol).winds)


def k0_to_loop(c: K0Class) -> SegmentPath:
    """Projection loop of the diagonal projection with ranks ``c.ranks``.

    Ranks must fit the blocks; amplify the algebra first for larger ones.
    """
    alg = c.algebra
    blocks = []
    for i, (r, size) in enumerate(zip(c.ranks, alg.blocks)):
        if not 0 <= r <= size:
            raise PreconditionError(f"rank {r} does not fit block {i} of size {size}; amplify first")
        d = np.zeros(size, dtype=complex)
        d[:r] = 1.0
        blocks.append(np.diag(d))
    return projection_loop(Projection(alg, blocks, check=False))
