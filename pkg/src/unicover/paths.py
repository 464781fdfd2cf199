"""Paths of unitaries.

A :class:`SegmentPath` is the normal form every continuous path in ``U^0(A)``
is homotopic to: on the ``j``-th subinterval ``[(j-1)/k, j/k]`` of a uniform
partition it is ``knot_{j-1} * exp(2 pi i (k t - j + 1) a_j)`` for Hermitian
generators ``a_j``, where ``knot_j = knot_{j-1} * exp(2 pi i a_j)``.

A :class:`SampledPath` is a finite list of values at increasing times. The
two meet in :func:`from_samples`, which takes logarithms of consecutive
quotients; that is only faithful when consecutive samples are close, and
the functions producing samples here pick grids that guarantee it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .algebra import (
    TWO_PI,
    Element,
    Hermitian,
    Projection,
    TracialAlgebra,
    Unitary,
    amplify,
    exp_hermitian,
    log_unitary,
    operator_norm,
)
from .config import DEFAULT, Tolerances
from .errors import (
    EndpointMismatch,
    GapTooLarge,
    PreconditionError,
    RefinementExceeded,
)


@dataclass(frozen=True, eq=False)
class SegmentPath:
    start: Unitary
    generators: tuple[Hermitian, ...]

    def __post_init__(self):
        gens = tuple(
            g if isinstance(g, Hermitian) else Hermitian(g.algebra, g.blocks) for g in self.generators
        )
        object.__setattr__(self, "generators", gens)
        for g in gens:
            self.start.algebra.check_same(g.algebra)

    @property
    def algebra(self) -> TracialAlgebra:
        return self.start.algebra

    @property
    def segments(self) -> int:
        return len(self.generators)

    @cached_property
    def knots(self) -> tuple[Unitary, ...]:
        """Values at ``t = j/k`` for ``j = 0..k``."""
        out = [self.start]
        for g in self.generators:
            prev = out[-1]
            step = exp_hermitian(g)
            out.append(Unitary(prev.algebra, [a @ b for a, b in zip(prev.blocks, step.blocks)], check=False))
        return tuple(out)

    @property
    def endpoint(self) -> Unitary:
        return self.knots[-1]

    def is_loop(self, tol: Tolerances = DEFAULT) -> bool:
        return operator_norm(self.endpoint - self.start) <= tol.loop

    @cached_property
    def lipschitz(self) -> float:
        """Upper bound on the speed ``||xi'(t)||``: ``2 pi k max_j ||a_j||``."""
        if not self.generators:
            return 0.0
        return TWO_PI * self.segments * max(g.spectrum_bound() for g in self.generators)

    def __call__(self, t: float) -> Unitary:
        return evaluate(self, t)

    def __repr__(self) -> str:
        return f"SegmentPath(blocks={self.algebra.blocks}, segments={self.segments})"


@dataclass(frozen=True, eq=False)
class SampledPath:
    times: tuple[float, ...]
    values: tuple[Unitary, ...]

    def __post_init__(self):
        times = tuple(float(t) for t in self.times)
        values = tuple(self.values)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)
        if len(times) != len(values):
            raise PreconditionError("times and values differ in length")
        if len(times) < 2 or times[0] != 0.0 or times[-1] != 1.0:
            raise PreconditionError("sample times must run from 0 to 1")
        if any(b <= a for a, b in zip(times, times[1:])):
            raise PreconditionError("sample times must be strictly increasing")
        for v in values[1:]:
            values[0].algebra.check_same(v.algebra)

    @property
    def algebra(self) -> TracialAlgebra:
        return self.values[0].algebra


def constant_path(u: Unitary | TracialAlgebra) -> SegmentPath:
    if isinstance(u, TracialAlgebra):
        u = u.identity()
    return SegmentPath(u, ())


def exponential_path(a: Hermitian, start: Unitary | None = None) -> SegmentPath:
    """``t -> start * exp(2 pi i t a)``."""
    return SegmentPath(start if start is not None else a.algebra.identity(), (a,))


def projection_loop(p: Projection) -> SegmentPath:
    """``t -> exp(2 pi i t) p + (1 - p)``."""
    if not isinstance(p, Projection):
        p = Projection(p.algebra, p.blocks)
    return SegmentPath(p.algebra.identity(), (p,))


# -- evaluation --------------------------------------------------------------

def _check_time(t: float) -> None:
    if not 0.0 <= t <= 1.0:
        raise PreconditionError(f"time {t} outside [0, 1]")


def _locate(k: int, t: float) -> tuple[int, float]:
    j = min(int(math.floor(t * k)), k - 1)
    return j, t * k - j


def evaluate(p: SegmentPath, t: float) -> Unitary:
    _check_time(t)
    if p.segments == 0:
        return p.start
    j, s = _locate(p.segments, t)
    if s == 0.0:
        return p.knots[j]
    step = exp_hermitian(p.generators[j], s)
    knot = p.knots[j]
    return Unitary(p.algebra, [a @ b for a, b in zip(knot.blocks, step.blocks)], check=False)


def evaluate_blocks(p: SegmentPath, ts: Sequence[float]) -> list[np.ndarray]:
    """Values at many times at once: one ``(len(ts), n, n)`` array per block."""
    ts = np.asarray(ts, dtype=float)
    if ts.size and (ts.min() < 0.0 or ts.max() > 1.0):
        raise PreconditionError("times outside [0, 1]")
    out = [np.empty((ts.size, n, n), dtype=complex) for n in p.algebra.blocks]
    if p.segments == 0:
        for o, b in zip(out, p.start.blocks):
            o[:] = b
        return out
    k = p.segments
    js = np.minimum(np.floor(ts * k).astype(int), k - 1)
    ss = ts * k - js
    for j in np.unique(js):
        idx = np.nonzero(js == j)[0]
        knot = p.knots[j]
        for o, (w, v), kb in zip(out, p.generators[j].eigh, knot.blocks):
            phases = np.exp(1j * TWO_PI * np.outer(ss[idx], w))
            o[idx] = kb @ ((v[None, :, :] * phases[:, None, :]) @ v.conj().T)
            o[idx[ss[idx] == 0.0]] = kb
    return out


# -- sampling -------------------------------------------------------------------

def certified_grid(lipschitz: float, base: int = 1, tol: Tolerances = DEFAULT) -> int:
    """Smallest ``base * 2^r`` intervals whose step keeps the path in the log ball.

    With speed bound ``L`` and step ``h``, every point of a subinterval lies
    within ``L h`` of its left sample, so ``L h < 1 - gap_margin`` makes the
    exponential interpolant homotopic (rel endpoints) to the original piece.
    """
    n = max(1, base)
    bound = 1.0 - tol.gap_margin
    while lipschitz / n >= bound:
        n *= 2
        if n > tol.max_points:
            raise RefinementExceeded(f"more than {tol.max_points} sample points needed")
    return n


def sample(p: SegmentPath, intervals: int | None = None, tol: Tolerances = DEFAULT) -> SampledPath:
    """Samples on a uniform grid; by default the certified grid for ``p``."""
    if intervals is None:
        intervals = certified_grid(p.lipschitz, max(1, p.segments), tol)
    ts = np.linspace(0.0, 1.0, intervals + 1)
    blocks = evaluate_blocks(p, ts)
    values = tuple(Unitary(p.algebra, [b[i] for b in blocks], check=False) for i in range(ts.size))
    return SampledPath(tuple(ts), values)


def from_samples(s: SampledPath, tol: Tolerances = DEFAULT) -> SegmentPath:
    """Exponential-segment form of a finely sampled path.

    Non-uniform sample times are reparametrized onto the uniform partition,
    which changes neither endpoints nor homotopy class.
    """
    bound = 1.0 - tol.gap_margin
    gens = []
    for j in range(1, len(s.values)):
        prev, cur = s.values[j - 1], s.values[j]
        quotient = Unitary(s.algebra, [a.conj().T @ b for a, b in zip(prev.blocks, cur.blocks)], check=False)
        gap = operator_norm(quotient - s.algebra.identity())
        if not gap < bound:
            raise GapTooLarge(j, gap, bound)
        gens.append(log_unitary(quotient, tol))
    return SegmentPath(s.values[0], tuple(gens))


def pointwise_product(p: SegmentPath, q: SegmentPath, tol: Tolerances = DEFAULT) -> SampledPath:
    """Samples of ``t -> p(t) q(t)`` fine enough for :func:`from_samples`.

    The grid doubles from ``lcm`` of the segment counts until the combined
    speed bound certifies every gap.
    """
    p.algebra.check_same(q.algebra)
    base = math.lcm(max(1, p.segments), max(1, q.segments))
    if base > tol.max_points:
        base = max(p.segments, q.segments, 1)
    n = certified_grid(p.lipschitz + q.lipschitz, base, tol)
    ts = np.linspace(0.0, 1.0, n + 1)
    pb, qb = evaluate_blocks(p, ts), evaluate_blocks(q, ts)
    prods = [a @ b for a, b in zip(pb, qb)]
    values = tuple(Unitary(p.algebra, [b[i] for b in prods], check=False) for i in range(ts.size))
    return SampledPath(tuple(ts), values)


# -- path group operations --------------------------------------------------------

def _conjugate(u: Unitary, a: Hermitian) -> Hermitian:
    return Hermitian.symmetrize(Element(a.algebra, [x @ y @ x.conj().T for x, y in zip(u.blocks, a.blocks)]))


def pointwise_inverse(p: SegmentPath) -> SegmentPath:
    """``t -> p(t)^{-1}``.

    ``exp(-2 pi i s a_j) knot_{j-1}^* = knot_{j-1}^* exp(2 pi i s b_j)`` with
    ``b_j = -knot_{j-1} a_j knot_{j-1}^*``.
    """
    gens = []
    for knot, g in zip(p.knots, p.generators):
        b = _conjugate(knot, g)
        gens.append(Hermitian(b.algebra, [-x for x in b.blocks], check=False))
    return SegmentPath(p.start.H, tuple(gens))


def reverse(p: SegmentPath) -> SegmentPath:
    """``t -> p(1)^{-1} p(1 - t)``, which starts at 1."""
    gens = tuple(Hermitian(g.algebra, [-b for b in g.blocks], check=False) for g in reversed(p.generators))
    return SegmentPath(p.algebra.identity(), gens)


def concatenate(p: SegmentPath, q: SegmentPath, tol: Tolerances = DEFAULT) -> SegmentPath:
    p.algebra.check_same(q.algebra)
    if operator_norm(p.endpoint - q.start) > tol.loop:
        raise EndpointMismatch("the second path must start where the first one ends")
    return SegmentPath(p.start, p.generators + q.generators)


def translate(p: SegmentPath, u: Unitary) -> SegmentPath:
    """Left translation ``t -> u p(t)``; generators are unchanged."""
    p.algebra.check_same(u.algebra)
    start = Unitary(u.algebra, [a @ b for a, b in zip(u.blocks, p.start.blocks)], check=False)
    return SegmentPath(start, p.generators)


def rebase(p: SegmentPath) -> SegmentPath:
    """Translate so the path starts at 1."""
    return translate(p, p.start.H)


def amplify_path(p: SegmentPath, m: int) -> SegmentPath:
    """``p (+) 1``: start padded with the identity, generators with zero."""
    start = amplify(p.start, m, pad="identity")
    gens = tuple(amplify(g, m, pad="zero") for g in p.generators)
    return SegmentPath(Unitary(start.algebra, start.blocks, check=False), gens)


def as_unitary(x: Element, tol: Tolerances = DEFAULT) -> Unitary:
    if isinstance(x, Unitary):
        return x
    return Unitary(x.algebra, x.blocks, tol=tol)
