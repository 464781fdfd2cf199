"""The covering group of ``U(A)`` in normal form.

By homotopy invariance of the pre-determinant and its completeness on
loops, a path class with fixed endpoints is determined by the pair
``(endpoint, pre-determinant)``. Those pairs multiply componentwise, so the
covering group becomes a subgroup of ``U(A) x Z(A)_sa`` cut out by
``det(u_i) = exp(2 pi i n_i w_i)`` in every block.

``w`` coordinates are kept as exact rationals (floats enter through their
exact binary value), so the group law and commutators are exact on ``w``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

import numpy as np

from .algebra import CenterVector, Projection, TracialAlgebra, Unitary, operator_norm
from .config import DEFAULT, Tolerances
from .errors import PreconditionError, UnicoverError
from .paths import SegmentPath
from .predet import WindingVector, lattice_round, pre_determinant

LoopClass = WindingVector


def _exact(c) -> Fraction:
    if isinstance(c, Rational):
        return Fraction(c)
    c = float(c)
    if not math.isfinite(c):
        raise PreconditionError(f"center coordinate {c} is not finite")
    return Fraction(c)


def exact_center(w: CenterVector) -> CenterVector:
    return CenterVector(w.algebra, tuple(_exact(c) for c in w.coords))


@dataclass(frozen=True, eq=False)
class CoveringElement:
    endpoint: Unitary
    w: CenterVector

    def __post_init__(self):
        self.endpoint.algebra.check_same(self.w.algebra)
        object.__setattr__(self, "w", exact_center(self.w))

    @property
    def algebra(self) -> TracialAlgebra:
        return self.endpoint.algebra

    def compatibility_defect(self) -> float:
        """``max_i |det(u_i) - exp(2 pi i n_i w_i)|``."""
        worst = 0.0
        for b, c, n in zip(self.endpoint.blocks, self.w.coords, self.algebra.units):
            # reduce n*w mod 1 exactly before going to floating point
            turns = (c * n) % 1
            worst = max(worst, abs(np.linalg.det(b) - np.exp(2j * np.pi * float(turns))))
        return float(worst)

    def check(self, tol: Tolerances = DEFAULT) -> "CoveringElement":
        defect = self.compatibility_defect()
        if defect > tol.compatibility:
            raise PreconditionError(f"endpoint and center component are incompatible (defect {defect:.3g})")
        return self

    def __matmul__(self, other: "CoveringElement") -> "CoveringElement":
        return cover_multiply(self, other)

    def __repr__(self) -> str:
        return f"CoveringElement(w={tuple(str(c) for c in self.w.coords)})"


def lift_path(p: SegmentPath, tol: Tolerances = DEFAULT) -> CoveringElement:
    """Class of a path based at 1 in the covering group."""
    if operator_norm(p.start - p.algebra.identity()) > tol.loop:
        raise PreconditionError("paths in the covering group start at 1")
    x = CoveringElement(p.endpoint, pre_determinant(p))
    defect = x.compatibility_defect()
    if defect > tol.compatibility:
        raise UnicoverError(f"lifted path fails the determinant identity (defect {defect:.3g})")
    return x


def cover_identity(alg: TracialAlgebra) -> CoveringElement:
    return CoveringElement(alg.identity(), CenterVector.zero(alg))


def cover_multiply(x: CoveringElement, y: CoveringElement) -> CoveringElement:
    x.algebra.check_same(y.algebra)
    u = Unitary(x.algebra, [a @ b for a, b in zip(x.endpoint.blocks, y.endpoint.blocks)], check=False)
    return CoveringElement(u, x.w + y.w)


def cover_inverse(x: CoveringElement) -> CoveringElement:
    return CoveringElement(x.endpoint.H, -x.w)


def cover_equal(x: CoveringElement, y: CoveringElement, tol: float = 1e-9) -> bool:
    """Exact on ``w``, within ``tol`` on endpoints."""
    x.algebra.check_same(y.algebra)
    return x.w.coords == y.w.coords and operator_norm(x.endpoint - y.endpoint) <= tol


def iota(c: LoopClass) -> CoveringElement:
    """Embed a loop class: ``(1, wind_i / n_i)``."""
    alg = c.algebra
    w = CenterVector(alg, tuple(Fraction(int(m), n) for m, n in zip(c.winds, alg.units)))
    return CoveringElement(alg.identity(), w)


def ev1(x: CoveringElement) -> Unitary:
    return x.endpoint


def gamma_retraction(x: CoveringElement, tol: Tolerances = DEFAULT) -> LoopClass:
    """Loop class with the same pre-determinant as ``x``.

    Raises :class:`~unicover.errors.NotInLattice` when some ``n_i w_i`` is off
    the integers: in finite dimensions the pre-determinant of loops only
    reaches the lattice ``(1/n_1) Z + ... + (1/n_k) Z``.
    """
    winds, residuals = lattice_round(x.w, tol)
    return LoopClass(x.algebra, winds, residuals)


def section_part(x: CoveringElement, tol: Tolerances = DEFAULT) -> CoveringElement:
    """``s(x) = iota(gamma(x))^{-1} x``, the factor in the kernel of gamma."""
    lattice = iota(gamma_retraction(x, tol))
    return CoveringElement(x.endpoint, x.w - lattice.w)


def commutator(x: CoveringElement, y: CoveringElement) -> CoveringElement:
    return cover_multiply(cover_multiply(x, y), cover_multiply(cover_inverse(x), cover_inverse(y)))


def commutator_center_component(x: CoveringElement, y: CoveringElement) -> CenterVector:
    return commutator(x, y).w


def projection_class(p: Projection) -> LoopClass:
    return LoopClass(p.algebra, p.ranks())


# -- dyadic ladder ------------------------------------------------------------

@dataclass(frozen=True)
class LadderStep:
    """Nearest-rank projection in ``M_{2^level}`` for a target trace."""

    target: Fraction
    level: int
    rank: int

    @property
    def size(self) -> int:
        return 2**self.level

    @property
    def trace(self) -> Fraction:
        return Fraction(self.rank, self.size)

    @property
    def error(self) -> Fraction:
        return abs(self.trace - self.target)

    def projection(self, max_level: int = 12) -> Projection:
        """Materialize the diagonal projection (dense; refused above ``max_level``)."""
        if self.level > max_level:
            raise PreconditionError(f"refusing to build a dense {self.size}x{self.size} projection")
        alg = TracialAlgebra((self.size,), (1.0,))
        diag = np.zeros(self.size, dtype=complex)
        diag[: self.rank] = 1.0
        return Projection(alg, [np.diag(diag)], check=False)


def as_fraction(target) -> Fraction:
    if isinstance(target, str):
        return Fraction(target.strip())
    return _exact(target)


def dyadic_splitting_demo(target, level: int) -> LadderStep:
    """Best projection of ``M_{2^level}`` for ``target``; error at most ``2^-(level+1)``."""
    t = as_fraction(target)
    if not 0 <= t <= 1:
        raise PreconditionError(f"target {t} outside [0, 1]")
    if not 1 <= level <= 20:
        raise PreconditionError("ladder level must lie in 1..20")
    size = 2**level
    rank = math.floor(t * size + Fraction(1, 2))
    return LadderStep(t, level, min(max(rank, 0), size))


def dyadic_ladder(target, max_level: int) -> list[LadderStep]:
    return [dyadic_splitting_demo(target, m) for m in range(1, max_level + 1)]
