"""The pre-determinant of unitary paths and an independent winding oracle.

For a path in exponential-segment form the integrand
``tau(xi'(t) xi(t)^{-1}) / (2 pi i)`` is constant on segment ``j`` and equal
to ``k tau(a_j)`` (traciality removes the conjugation by the knot), so the
integral is exactly ``sum_j Tr(a_j)``. No quadrature is involved.

The oracle in :func:`winding_oracle` never looks at traces of generators: it
samples ``det`` of each block along the loop and accumulates principal
argument increments. For loops, ``n_i * pre_determinant(p)_i`` must equal
the winding of block ``i``; :func:`homotopy_equivalent` checks exactly that.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .algebra import (
    CenterVector,
    Element,
    TracialAlgebra,
    Unitary,
    center_trace,
    log_unitary,
    operator_norm,
)
from .config import DEFAULT, Tolerances
from .errors import (
    EndpointMismatch,
    NotALoop,
    NotInLattice,
    NotInvertible,
    PreconditionError,
    RefinementExceeded,
    UnicoverError,
)
from .paths import (
    SegmentPath,
    evaluate_blocks,
    from_samples,
    pointwise_inverse,
    pointwise_product,
    translate,
)


@dataclass(frozen=True)
class WindingVector:
    algebra: TracialAlgebra
    winds: tuple[int, ...]
    # distance of the accumulated turn count to the nearest integer, per block
    residuals: tuple[float, ...] = field(default=(), compare=False)

    def __add__(self, other: "WindingVector") -> "WindingVector":
        self.algebra.check_same(other.algebra)
        return WindingVector(self.algebra, tuple(a + b for a, b in zip(self.winds, other.winds)))

    def __neg__(self) -> "WindingVector":
        return WindingVector(self.algebra, tuple(-a for a in self.winds))

    @classmethod
    def zero(cls, algebra: TracialAlgebra) -> "WindingVector":
        return cls(algebra, (0,) * algebra.k)


def pre_determinant(p: SegmentPath) -> CenterVector:
    """Center-valued pre-determinant, summed exactly over segments."""
    alg = p.algebra
    total = np.zeros(alg.k)
    for g in p.generators:
        total += [np.trace(b).real for b in g.blocks]
    return CenterVector(alg, tuple(float(t) / n for t, n in zip(total, alg.units)))


def pre_determinant_scalar(p: SegmentPath) -> float:
    return float(pre_determinant(p).scalar())


def lattice_round(w: CenterVector, tol: Tolerances = DEFAULT) -> tuple[tuple[int, ...], tuple[float, ...]]:
    """Round ``n_i * w_i`` to integers, refusing residuals above the lattice tolerance."""
    ints, residuals = [], []
    for i, (c, n) in enumerate(zip(w.coords, w.algebra.units)):
        # exact coordinates are rounded exactly; the residual test is shared
        x = Fraction(c) * n if isinstance(c, (Fraction, int)) else float(c) * n
        r = round(x)
        res = float(abs(x - r))
        if res > tol.lattice_residual:
            raise NotInLattice(f"block {i}: {n} * {float(c):.12g} is {res:.3g} away from an integer")
        ints.append(int(r))
        residuals.append(res)
    return tuple(ints), tuple(residuals)


def short_path_formula(p: SegmentPath, probes: int = 64, tol: Tolerances = DEFAULT) -> CenterVector:
    """``Tr(log p(1)) / (2 pi i)`` for a path staying in the unit ball around 1.

    ``probes`` points per segment are checked for ``||p(t) - 1|| < 1``.
    """
    alg = p.algebra
    if operator_norm(p.start - alg.identity()) > tol.loop:
        raise PreconditionError("the short-path formula applies to paths starting at 1")
    dist = sup_distance(p, alg.identity(), probes * max(1, p.segments))
    if not dist < 1.0:
        raise PreconditionError(f"path leaves the unit ball around 1 (sup distance {dist:.6g})")
    return center_trace(log_unitary(p.endpoint, tol))


def sup_distance(p: SegmentPath, u: Element, intervals: int) -> float:
    """Largest ``||p(t) - u||`` over a uniform grid of ``intervals`` steps."""
    best = 0.0
    for chunk in _chunks(np.linspace(0.0, 1.0, intervals + 1)):
        for vals, ub in zip(evaluate_blocks(p, chunk), u.blocks):
            if vals.shape[1]:
                best = max(best, float(np.max(np.linalg.norm(vals - ub, ord=2, axis=(1, 2)))))
    return best


def _chunks(ts: np.ndarray, size: int = 4096):
    for i in range(0, ts.size, size):
        yield ts[i : i + size]


def _turns(p: SegmentPath, intervals: int) -> tuple[np.ndarray, float]:
    """Accumulated argument of det per block (in turns) and the largest step (radians)."""
    alg = p.algebra
    total = np.zeros(alg.k)
    largest = 0.0
    ts = np.linspace(0.0, 1.0, intervals + 1)
    prev = [np.linalg.det(b) for b in p.start.blocks]
    for chunk in _chunks(ts[1:]):
        for i, vals in enumerate(evaluate_blocks(p, chunk)):
            dets = np.linalg.det(vals) if vals.shape[1] else np.ones(chunk.size, dtype=complex)
            seq = np.concatenate(([prev[i]], dets))
            steps = np.angle(seq[1:] / seq[:-1])
            total[i] += steps.sum()
            largest = max(largest, float(np.max(np.abs(steps))))
            prev[i] = dets[-1]
    return total / (2 * np.pi), largest


def winding_oracle(p: SegmentPath, tol: Tolerances = DEFAULT, min_intervals: int = 8) -> WindingVector:
    """Integer winding of ``det`` in every block, by argument accumulation.

    The grid starts fine enough that the argument speed bound
    ``2 pi k n ||a_j||`` keeps each step below ``pi/2`` and doubles while any
    observed step still reaches ``pi/2``.
    """
    if not p.is_loop(tol):
        raise NotALoop("the winding oracle needs a loop")
    alg = p.algebra
    speed = p.lipschitz * max(alg.blocks)
    n = max(min_intervals, 1) * max(1, p.segments)
    while speed / n >= np.pi / 2:
        n *= 2
    while True:
        if n > tol.max_points:
            raise RefinementExceeded(f"winding oracle needs more than {tol.max_points} points")
        turns, largest = _turns(p, n)
        if largest < np.pi / 2:
            break
        n *= 2
    winds = np.rint(turns)
    residuals = np.abs(turns - winds)
    return WindingVector(alg, tuple(int(w) for w in winds), tuple(float(r) for r in residuals))


def lattice_winding(p: SegmentPath, tol: Tolerances = DEFAULT) -> WindingVector:
    """Winding predicted by the pre-determinant: ``round(n_i * Delta_i)``."""
    ints, residuals = lattice_round(pre_determinant(p), tol)
    return WindingVector(p.algebra, ints, residuals)


def checked_winding(p: SegmentPath, tol: Tolerances = DEFAULT) -> WindingVector:
    """Oracle winding, after confirming it agrees with the pre-determinant."""
    oracle = winding_oracle(p, tol)
    predicted = lattice_winding(p, tol)
    if oracle.winds != predicted.winds:
        raise UnicoverError(
            f"winding oracle {oracle.winds} disagrees with pre-determinant lattice {predicted.winds}"
        )
    return oracle


def homotopy_equivalent(p: SegmentPath, q: SegmentPath, tol: Tolerances = DEFAULT) -> bool:
    """Decide homotopy with fixed endpoints.

    Loops are compared through their winding vectors. Two non-closed paths
    with the same endpoints are homotopic iff the loop ``t -> p(t)^{-1} q(t)``
    winds trivially.
    """
    p.algebra.check_same(q.algebra)
    if p.is_loop(tol) and q.is_loop(tol):
        return checked_winding(p, tol).winds == checked_winding(q, tol).winds
    if operator_norm(p.start - q.start) > tol.loop or operator_norm(p.endpoint - q.endpoint) > tol.loop:
        if p.is_loop(tol) or q.is_loop(tol):
            raise NotALoop("only one of the two paths is a loop")
        raise EndpointMismatch("homotopy is decided only for paths with common endpoints")
    loop = from_samples(pointwise_product(pointwise_inverse(p), q, tol), tol)
    return all(w == 0 for w in checked_winding(loop, tol).winds)


def _singular_values(x: Element, tol: Tolerances = DEFAULT) -> list[np.ndarray]:
    svals = []
    for i, b in enumerate(x.blocks):
        s = np.linalg.svd(b, compute_uv=False)
        if s.size and s.min() <= tol.invertibility:
            raise NotInvertible(f"block {i} has smallest singular value {s.min():.3g}")
        svals.append(s)
    return svals


def fuglede_kadison(x: Element, tol: Tolerances = DEFAULT) -> float:
    """``exp(tau(log |x|))``."""
    alg = x.algebra
    svals = _singular_values(x, tol)
    exponent = math.fsum(
        w / n * math.fsum(np.log(s)) for w, n, s in zip(alg.weights, alg.units, svals)
    )
    return math.exp(exponent)


@dataclass(frozen=True)
class SmallBallVerdict:
    holds: bool
    precondition_met: bool
    sup_distance: float
    winding: WindingVector | None
    short_path_value: CenterVector | None

    @property
    def diagnostic(self) -> str:
        if not self.precondition_met:
            return f"vacuous: loop leaves the ball (sup distance {self.sup_distance:.6g})"
        return "winding is zero" if self.holds else "nonzero winding inside the ball"


def small_ball_loop_check(
    p: SegmentPath,
    u0: Unitary,
    center: Unitary | None = None,
    radius: float = 0.5,
    tol: Tolerances = DEFAULT,
) -> SmallBallVerdict:
    """A loop at ``u0`` inside a ball of radius 1/2 is null-homotopic.

    The sup distance to ``center`` (default ``u0``) is certified on a probe
    grid plus the speed-bound slack. When it is below ``radius`` the loop is
    left-translated to 1 and both the oracle and the short-path formula must
    report zero. Otherwise the statement holds vacuously.
    """
    p.algebra.check_same(u0.algebra)
    if operator_norm(p.start - u0) > tol.loop or not p.is_loop(tol):
        raise NotALoop("expected a loop based at u0")
    center = u0 if center is None else center
    intervals = max(256, min(tol.max_points, math.ceil(p.lipschitz / 1e-3)))
    dist = sup_distance(p, center, intervals) + p.lipschitz / (2 * intervals)
    if not dist < radius:
        return SmallBallVerdict(True, False, dist, None, None)
    base = translate(p, u0.H)
    winding = winding_oracle(base, tol)
    try:
        value = short_path_formula(base, tol=tol)
    except PreconditionError:
        value = None
    holds = all(w == 0 for w in winding.winds) and (
        value is None or float(np.max(np.abs(value.as_floats()))) <= 1e-9
    )
    return SmallBallVerdict(holds, True, dist, winding, value)
