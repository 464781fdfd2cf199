"""Random elements, used by the test suite and the ``generate`` CLI command."""
from __future__ import annotations

import numpy as np

from .algebra import Hermitian, Projection, TracialAlgebra, Unitary, log_unitary


def haar_matrix(n: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_unitary(alg: TracialAlgebra, rng: np.random.Generator) -> Unitary:
    return Unitary(alg, [haar_matrix(n, rng) for n in alg.blocks], check=False)


def random_hermitian(alg: TracialAlgebra, rng: np.random.Generator, radius: float = 1.0) -> Hermitian:
    """Hermitian with spectrum drawn uniformly from ``[-radius, radius]``."""
    blocks = []
    for n in alg.blocks:
        u = haar_matrix(n, rng)
        w = rng.uniform(-radius, radius, n)
        b = (u * w) @ u.conj().T
        blocks.append((b + b.conj().T) / 2)
    return Hermitian(alg, blocks, check=False)


def random_projection(alg: TracialAlgebra, rng: np.random.Generator) -> Projection:
    blocks = []
    for n in alg.blocks:
        r = int(rng.integers(0, n + 1))
        u = haar_matrix(n, rng)[:, :r]
        b = u @ u.conj().T
        blocks.append((b + b.conj().T) / 2)
    return Projection(alg, blocks)


def random_algebra(rng: np.random.Generator, max_blocks: int = 3, max_size: int = 5) -> TracialAlgebra:
    k = int(rng.integers(1, max_blocks + 1))
    sizes = tuple(int(n) for n in rng.integers(1, max_size + 1, k))
    w = rng.uniform(0.2, 1.0, k)
    w = w / w.sum()
    w[-1] = 1.0 - w[:-1].sum()
    return TracialAlgebra(sizes, tuple(w))


def random_path(alg: TracialAlgebra, rng: np.random.Generator, segments: int | None = None,
                radius: float = 1.0):
    """Path from 1 with ``segments`` random generators of spectral radius ``radius``."""
    from .paths import SegmentPath

    if segments is None:
        segments = int(rng.integers(1, 5))
    return SegmentPath(alg.identity(), tuple(random_hermitian(alg, rng, radius) for _ in range(segments)))


def random_loop(alg: TracialAlgebra, rng: np.random.Generator, segments: int | None = None,
                radius: float = 1.5):
    """Random path closed up by one principal-log segment back to 1.

    Generators with spectrum beyond 1/2 make the determinant wind, so the
    loops land in many different homotopy classes.
    """
    from .errors import BranchFailure
    from .paths import SegmentPath

    if segments is None:
        segments = int(rng.integers(1, 4))
    while True:
        p = random_path(alg, rng, segments, radius)
        try:
            closing = log_unitary(p.endpoint.H)
        except BranchFailure:
            continue
        return SegmentPath(alg.identity(), p.generators + (closing,))
