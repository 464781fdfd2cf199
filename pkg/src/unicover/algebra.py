"""Finite-dimensional tracial von Neumann algebras.

An algebra here is a finite direct sum ``M_{n_1} + ... + M_{n_k}`` with a
faithful trace ``tau = sum_i lambda_i tr_{n_i}`` (``tr`` normalized per block).
Its center is ``C^k``, so the center-valued trace of ``x`` is the vector of
normalized block traces.

Amplification ``x -> x (+) 1`` multiplies every block size by ``m`` but keeps
the *unit* sizes ``n_i`` used for normalization, i.e. traces on an amplified
algebra are the unnormalized extension ``tr_m (x) tau``. This is what makes
the pre-determinant invariant under amplification.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from numbers import Rational
from typing import Iterable, Sequence

import numpy as np
import scipy.linalg

from .config import DEFAULT, Tolerances
from .errors import (
    AlgebraMismatch,
    BranchFailure,
    InvalidElement,
    PreconditionError,
    UnreachableTrace,
)

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class TracialAlgebra:
    blocks: tuple[int, ...]
    weights: tuple[float, ...]
    amplification: int = 1

    def __post_init__(self):
        blocks = tuple(int(n) for n in self.blocks)
        weights = tuple(float(w) for w in self.weights)
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "weights", weights)
        if not blocks:
            raise PreconditionError("an algebra needs at least one block")
        if len(weights) != len(blocks):
            raise PreconditionError("one trace weight per block is required")
        if any(n < 1 for n in blocks):
            raise PreconditionError(f"block sizes must be positive, got {blocks}")
        if any(not w > 0 for w in weights):
            raise PreconditionError(f"trace weights must be positive, got {weights}")
        if abs(math.fsum(weights) - 1.0) > 1e-12:
            raise PreconditionError(f"trace weights must sum to 1, got {math.fsum(weights)!r}")
        if self.amplification < 1 or any(n % self.amplification for n in blocks):
            raise PreconditionError("block sizes must be multiples of the amplification")

    @classmethod
    def of(cls, *blocks: int, weights: Sequence[float] | None = None) -> "TracialAlgebra":
        """Shorthand; equal weights unless given."""
        if weights is None:
            weights = [1.0 / len(blocks)] * len(blocks)
        return cls(tuple(blocks), tuple(weights))

    @property
    def k(self) -> int:
        return len(self.blocks)

    @property
    def units(self) -> tuple[int, ...]:
        """Sizes used to normalize block traces (block size before amplification)."""
        return tuple(n // self.amplification for n in self.blocks)

    def amplified(self, m: int) -> "TracialAlgebra":
        if m < 1:
            raise PreconditionError("amplification factor must be a positive integer")
        return TracialAlgebra(
            tuple(n * m for n in self.blocks), self.weights, self.amplification * m
        )

    def identity(self) -> "Unitary":
        return Unitary(self, [np.eye(n, dtype=complex) for n in self.blocks], check=False)

    def zero(self) -> "Element":
        return Element(self, [np.zeros((n, n), dtype=complex) for n in self.blocks])

    def check_same(self, other: "TracialAlgebra") -> None:
        if self != other:
            raise AlgebraMismatch(f"algebras differ: {self} vs {other}")


class Element:
    """An element of a :class:`TracialAlgebra`, stored block by block.

    Blocks are read-only complex arrays; arithmetic always builds new elements.
    """

    def __init__(self, algebra: TracialAlgebra, blocks: Iterable):
        arrays = []
        for i, b in enumerate(blocks):
            a = np.array(b, dtype=complex)
            a.setflags(write=False)
            arrays.append(a)
        if len(arrays) != algebra.k:
            raise InvalidElement(f"expected {algebra.k} blocks, got {len(arrays)}")
        for i, (a, n) in enumerate(zip(arrays, algebra.blocks)):
            if a.shape != (n, n):
                raise InvalidElement(f"block {i} has shape {a.shape}, expected {(n, n)}")
        self.algebra = algebra
        self.blocks = tuple(arrays)

    @classmethod
    def scalar(cls, algebra: TracialAlgebra, c: complex) -> "Element":
        return cls(algebra, [c * np.eye(n, dtype=complex) for n in algebra.blocks])

    @classmethod
    def diagonal(cls, algebra: TracialAlgebra, diagonals: Sequence[Sequence[complex]]) -> "Element":
        return cls(algebra, [np.diag(np.asarray(d, dtype=complex)) for d in diagonals])

    def _binary(self, other: "Element", op) -> "Element":
        self.algebra.check_same(other.algebra)
        return Element(self.algebra, [op(a, b) for a, b in zip(self.blocks, other.blocks)])

    def __matmul__(self, other: "Element") -> "Element":
        return self._binary(other, np.matmul)

    def __add__(self, other: "Element") -> "Element":
        return self._binary(other, np.add)

    def __sub__(self, other: "Element") -> "Element":
        return self._binary(other, np.subtract)

    def __neg__(self) -> "Element":
        return Element(self.algebra, [-a for a in self.blocks])

    def __mul__(self, c: complex) -> "Element":
        return Element(self.algebra, [c * a for a in self.blocks])

    __rmul__ = __mul__

    @property
    def H(self) -> "Element":
        return Element(self.algebra, [a.conj().T for a in self.blocks])

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.algebra.blocks}, norm={operator_norm(self):.3g})"


class Unitary(Element):
    def __init__(self, algebra, blocks, check: bool = True, tol: Tolerances = DEFAULT):
        super().__init__(algebra, blocks)
        if check:
            defect = unitarity_defect(self)
            if defect > tol.unitarity:
                raise InvalidElement(f"not unitary: ||u*u - 1|| = {defect:.3g}")

    @property
    def H(self) -> "Unitary":
        return Unitary(self.algebra, [a.conj().T for a in self.blocks], check=False)


class Hermitian(Element):
    def __init__(self, algebra, blocks, check: bool = True, tol: Tolerances = DEFAULT):
        super().__init__(algebra, blocks)
        if check:
            defect = max(_norm2(a - a.conj().T) for a in self.blocks)
            if defect > tol.hermiticity:
                raise InvalidElement(f"not Hermitian: ||a - a*|| = {defect:.3g}")

    @classmethod
    def symmetrize(cls, x: Element) -> "Hermitian":
        return cls(x.algebra, [(a + a.conj().T) / 2 for a in x.blocks], check=False)

    @cached_property
    def eigh(self) -> tuple[tuple[np.ndarray, np.ndarray], ...]:
        """Per-block eigendecomposition ``(w, V)`` with ``a = V diag(w) V*``."""
        out = []
        for a in self.blocks:
            try:
                out.append(np.linalg.eigh(a))
            except np.linalg.LinAlgError as exc:
                raise PreconditionError(f"eigendecomposition failed: {exc}") from exc
        return tuple(out)

    def spectrum_bound(self) -> float:
        return max((float(np.max(np.abs(w))) if w.size else 0.0) for w, _ in self.eigh)


class Projection(Hermitian):
    def __init__(self, algebra, blocks, check: bool = True, tol: Tolerances = DEFAULT):
        super().__init__(algebra, blocks, check=check, tol=tol)
        if check:
            for i, a in enumerate(self.blocks):
                if _norm2(a @ a - a) > tol.idempotency:
                    raise InvalidElement(f"block {i} is not idempotent")
                w = np.linalg.eigvalsh(a)
                if np.any(np.minimum(np.abs(w), np.abs(w - 1)) > tol.projection_spectrum):
                    raise InvalidElement(f"block {i} has eigenvalues off {{0, 1}}")

    def ranks(self) -> tuple[int, ...]:
        return tuple(int(round(np.trace(a).real)) for a in self.blocks)


@dataclass(frozen=True)
class CenterVector:
    """A self-adjoint central element: one real coefficient of the identity per block.

    Coordinates are ``Fraction`` when produced by exact lattice arithmetic and
    ``float`` otherwise; mixing the two promotes to ``float``.
    """

    algebra: TracialAlgebra
    coords: tuple

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(self.coords))
        if len(self.coords) != self.algebra.k:
            raise PreconditionError(
                f"center vector needs {self.algebra.k} coordinates, got {len(self.coords)}"
            )

    @classmethod
    def zero(cls, algebra: TracialAlgebra) -> "CenterVector":
        return cls(algebra, (Fraction(0),) * algebra.k)

    def _combine(self, other: "CenterVector", op) -> "CenterVector":
        self.algebra.check_same(other.algebra)
        return CenterVector(self.algebra, tuple(op(a, b) for a, b in zip(self.coords, other.coords)))

    def __add__(self, other):
        return self._combine(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._combine(other, lambda a, b: a - b)

    def __neg__(self):
        return CenterVector(self.algebra, tuple(-c for c in self.coords))

    @property
    def is_exact(self) -> bool:
        return all(isinstance(c, Rational) for c in self.coords)

    def as_floats(self) -> np.ndarray:
        return np.array([float(c) for c in self.coords])

    def scalar(self):
        """Apply the scalar trace weights: ``sum_i lambda_i * w_i``."""
        if self.is_exact and all(float(Fraction(w)) == w for w in self.algebra.weights):
            return sum((Fraction(w) * c for w, c in zip(self.algebra.weights, self.coords)), Fraction(0))
        return math.fsum(w * float(c) for w, c in zip(self.algebra.weights, self.coords))

    def max_abs_diff(self, other: "CenterVector") -> float:
        self.algebra.check_same(other.algebra)
        return float(np.max(np.abs(self.as_floats() - other.as_floats())))

    def as_element(self) -> Element:
        return Element(
            self.algebra, [complex(float(c)) * np.eye(n) for c, n in zip(self.coords, self.algebra.blocks)]
        )


def _norm2(a: np.ndarray) -> float:
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


# -- arithmetic ---------------------------------------------------------------

def multiply(x: Element, y: Element) -> Element:
    return x @ y


def adjoint(x: Element) -> Element:
    return x.H


def add(x: Element, y: Element) -> Element:
    return x + y


def subtract(x: Element, y: Element) -> Element:
    return x - y


def scale(x: Element, c: complex) -> Element:
    return x * c


def operator_norm(x: Element) -> float:
    """Largest singular value over all blocks."""
    return max(_norm2(a) for a in x.blocks)


def unitarity_defect(x: Element) -> float:
    return max(_norm2(a.conj().T @ a - np.eye(a.shape[0])) for a in x.blocks)


def block_traces(x: Element) -> np.ndarray:
    return np.array([np.trace(a) for a in x.blocks])


def scalar_trace(x: Element) -> complex:
    alg = x.algebra
    return complex(sum(w * t / n for w, t, n in zip(alg.weights, block_traces(x), alg.units)))


def center_trace(x: Element, tol: Tolerances = DEFAULT) -> CenterVector:
    """Center-valued trace, restricted to self-adjoint elements."""
    defect = max(_norm2(a - a.conj().T) for a in x.blocks)
    if defect > max(tol.hermiticity, 1e-12 * max(1.0, operator_norm(x))):
        raise InvalidElement(f"center trace is taken on Hermitian elements; ||x - x*|| = {defect:.3g}")
    alg = x.algebra
    return CenterVector(alg, tuple(float(t.real) / n for t, n in zip(block_traces(x), alg.units)))


# -- spectral operations --------------------------------------------------------

def exp_hermitian(a: Hermitian, s: float = 1.0) -> Unitary:
    """``exp(2 pi i s a)`` through the eigendecomposition of each block."""
    if not isinstance(a, Hermitian):
        a = Hermitian(a.algebra, a.blocks)
    blocks = []
    for w, v in a.eigh:
        blocks.append((v * np.exp(1j * TWO_PI * s * w)) @ v.conj().T)
    return Unitary(a.algebra, blocks, check=False)


def log_unitary(u: Element, tol: Tolerances = DEFAULT) -> Hermitian:
    """Principal logarithm divided by ``2 pi i``.

    The result ``a`` is Hermitian with spectrum in ``(-1/2, 1/2)`` and
    ``exp_hermitian(a) == u``. Eigenvalues closer than ``tol.branch_margin``
    (as an angle) to ``-1`` raise :class:`BranchFailure`.
    """
    blocks = []
    for i, b in enumerate(u.blocks):
        # complex Schur form of a normal matrix is diagonal
        t, z = scipy.linalg.schur(b, output="complex")
        theta = np.angle(np.diag(t))
        if theta.size and np.min(np.pi - np.abs(theta)) < tol.branch_margin:
            raise BranchFailure(
                f"block {i}: eigenvalue within {tol.branch_margin:g} rad of -1, principal log undefined"
            )
        a = (z * (theta / TWO_PI)) @ z.conj().T
        blocks.append((a + a.conj().T) / 2)
    return Hermitian(u.algebra, blocks, check=False)


def re_unitarize(x: Element) -> Unitary:
    """Closest unitary in every block (polar factor from the SVD)."""
    blocks = []
    for a in x.blocks:
        w, _, vh = np.linalg.svd(a)
        blocks.append(w @ vh)
    return Unitary(x.algebra, blocks, check=False)


# -- projections ----------------------------------------------------------------

def mvn_equivalent(p: Projection, q: Projection) -> bool:
    """Murray-von Neumann equivalence: equal rank in every block."""
    p.algebra.check_same(q.algebra)
    return p.ranks() == q.ranks()


def projection_with_trace(alg: TracialAlgebra, target: CenterVector | Sequence) -> Projection:
    """Diagonal projection whose center-valued trace is exactly ``target``.

    Coordinate ``i`` must be ``r / n_i`` for an integer rank ``0 <= r <= block size``.
    """
    coords = target.coords if isinstance(target, CenterVector) else tuple(target)
    if len(coords) != alg.k:
        raise PreconditionError(f"target needs {alg.k} coordinates")
    diagonals = []
    for i, (c, unit, size) in enumerate(zip(coords, alg.units, alg.blocks)):
        r = _lattice_rank(c, unit)
        if r is None or not 0 <= r <= size:
            raise UnreachableTrace(
                f"block {i}: trace {c} is not a multiple of 1/{unit} in [0, {size // unit}]"
            )
        diagonals.append([1.0] * r + [0.0] * (size - r))
    return Projection(alg, [np.diag(d).astype(complex) for d in diagonals], check=False)


def _lattice_rank(c, unit: int) -> int | None:
    if isinstance(c, Rational):
        r = Fraction(c) * unit
        return int(r) if r.denominator == 1 else None
    r = float(c) * unit
    nearest = round(r)
    return int(nearest) if abs(r - nearest) <= 1e-12 * max(1.0, abs(r)) else None


def amplify(x: Element, m: int, pad: str | None = None) -> Element:
    """Embed ``x`` in the top corner of the ``m``-fold amplification.

    The complement is filled with the identity for unitaries and with zero
    otherwise; ``pad="identity"`` or ``pad="zero"`` overrides the choice.
    """
    if pad is None:
        pad = "identity" if isinstance(x, Unitary) else "zero"
    if pad not in ("identity", "zero"):
        raise PreconditionError(f"unknown padding {pad!r}")
    target = x.algebra.amplified(m)
    blocks = []
    for a, n in zip(x.blocks, target.blocks):
        big = np.eye(n, dtype=complex) if pad == "identity" else np.zeros((n, n), dtype=complex)
        k = a.shape[0]
        big[:k, :k] = a
        blocks.append(big)
    if isinstance(x, Projection):
        return Projection(target, blocks, check=False)
    if isinstance(x, Hermitian):
        return Hermitian(target, blocks, check=False)
    if isinstance(x, Unitary) and pad == "identity":
        return Unitary(target, blocks, check=False)
    return Element(target, blocks)
