from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from unicover.algebra import CenterVector, Projection, Unitary, operator_norm
from unicover.cover import (
    CoveringElement,
    LoopClass,
    commutator,
    cover_equal,
    cover_identity,
    cover_inverse,
    cover_multiply,
    dyadic_ladder,
    dyadic_splitting_demo,
    ev1,
    gamma_retraction,
    iota,
    lift_path,
    projection_class,
    section_part,
)
from unicover.errors import NotInLattice, PreconditionError
from unicover.paths import SegmentPath, concatenate, projection_loop, translate
from unicover.predet import winding_oracle
from unicover.sampling import random_algebra, random_loop, random_path, random_projection

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def random_cover(alg, rng, radius=1.5):
    return lift_path(random_path(alg, rng, radius=radius))


class TestLift:
    def test_constant(self, m2m3):
        x = lift_path(SegmentPath(m2m3.identity(), ()))
        assert cover_equal(x, cover_identity(m2m3))

    def test_compatibility(self, rng):
        for _ in range(20):
            alg = random_algebra(rng)
            assert random_cover(alg, rng).compatibility_defect() < 1e-8

    def test_requires_base_one(self, m2):
        u = Unitary(m2, [np.diag([1j, 1])])
        with pytest.raises(PreconditionError):
            lift_path(SegmentPath(u, ()))

    def test_incompatible_element_rejected(self, m2):
        x = CoveringElement(m2.identity(), CenterVector(m2, (Fraction(1, 3),)))
        assert x.compatibility_defect() > 0.5
        with pytest.raises(PreconditionError):
            x.check()

    def test_floats_become_exact(self, m2):
        x = CoveringElement(m2.identity(), CenterVector(m2, (0.5,)))
        assert x.w.coords == (Fraction(1, 2),)

    @settings(max_examples=40, deadline=None)
    @given(seeds)
    def test_lift_is_multiplicative(self, seed):
        rng = np.random.default_rng(seed)
        alg = random_algebra(rng)
        p, q = random_path(alg, rng), random_path(alg, rng)
        pq = concatenate(p, translate(q, p.endpoint))
        lhs, rhs = lift_path(pq), cover_multiply(lift_path(p), lift_path(q))
        assert operator_norm(lhs.endpoint - rhs.endpoint) < 1e-10
        assert float(max(abs(a - b) for a, b in zip(lhs.w.coords, rhs.w.coords))) < 1e-10

    def test_loop_lift_is_iota_of_winding(self, rng):
        for _ in range(10):
            alg = random_algebra(rng)
            p = random_loop(alg, rng)
            x = lift_path(p)
            expected = iota(winding_oracle(p))
            assert np.allclose(x.w.as_floats(), expected.w.as_floats(), atol=1e-9)


class TestGroupLaw:
    @settings(max_examples=40, deadline=None)
    @given(seeds)
    def test_axioms(self, seed):
        rng = np.random.default_rng(seed)
        alg = random_algebra(rng)
        x, y, z = (random_cover(alg, rng) for _ in range(3))
        e = cover_identity(alg)
        assert cover_equal((x @ y) @ z, x @ (y @ z))
        assert cover_equal(x @ e, x) and cover_equal(e @ x, x)
        assert cover_equal(x @ cover_inverse(x), e)

    def test_w_is_additive_exactly(self, rng):
        alg = random_algebra(rng)
        x, y = random_cover(alg, rng), random_cover(alg, rng)
        assert (x @ y).w.coords == tuple(a + b for a, b in zip(x.w.coords, y.w.coords))


class TestExactSequence:
    def test_iota_values(self, m2m3):
        x = iota(LoopClass(m2m3, (1, -2)))
        assert x.w.coords == (Fraction(1, 2), Fraction(-2, 3))
        assert operator_norm(ev1(x) - m2m3.identity()) == 0

    def test_gamma_iota_box(self, m2m3):
        for a in range(-3, 4):
            for b in range(-3, 4):
                c = LoopClass(m2m3, (a, b))
                assert gamma_retraction(iota(c)) == c

    def test_iota_injective(self, m2m3):
        images = {iota(LoopClass(m2m3, (a, b))).w.coords for a in range(-3, 4) for b in range(-3, 4)}
        assert len(images) == 49

    def test_gamma_obstruction(self, m2):
        x = CoveringElement(Unitary(m2, [np.diag([np.exp(4j * np.pi / 3), 1])]), CenterVector(m2, (Fraction(1, 3),)))
        x.check()
        with pytest.raises(NotInLattice):
            gamma_retraction(x)

    def test_kernel_of_ev1_is_image_of_iota(self, rng):
        for _ in range(10):
            alg = random_algebra(rng)
            x = lift_path(random_loop(alg, rng))
            assert operator_norm(ev1(x) - alg.identity()) < 1e-9
            # w of a lifted loop is a float, so compare it to the lattice point numerically
            assert np.allclose(x.w.as_floats(), iota(gamma_retraction(x)).w.as_floats(), atol=1e-9)

    def test_decomposition(self, rng):
        for _ in range(10):
            alg = random_algebra(rng)
            x = lift_path(random_loop(alg, rng))
            s = section_part(x)
            assert all(abs(float(c)) < 1e-6 for c in s.w.coords)
            recon = cover_multiply(iota(gamma_retraction(x)), s)
            assert cover_equal(recon, x)


class TestCommutators:
    @settings(max_examples=40, deadline=None)
    @given(seeds)
    def test_center_component_vanishes(self, seed):
        rng = np.random.default_rng(seed)
        alg = random_algebra(rng)
        x, y = random_cover(alg, rng), random_cover(alg, rng)
        c = commutator(x, y)
        assert all(v == 0 for v in c.w.coords)

    def test_projection_class(self, m2m3):
        p = Projection(m2m3, [np.diag([1.0, 0.0]), np.diag([1.0, 1.0, 0.0])])
        assert projection_class(p).winds == (1, 2)
        assert winding_oracle(projection_loop(p)).winds == (1, 2)

    def test_random_projection_class_matches_winding(self, rng):
        for _ in range(10):
            alg = random_algebra(rng)
            p = random_projection(alg, rng)
            assert projection_class(p).winds == winding_oracle(projection_loop(p)).winds


class TestDyadic:
    def test_third_level_four(self):
        step = dyadic_splitting_demo(Fraction(1, 3), 4)
        assert (step.size, step.rank, step.trace, step.error) == (16, 5, Fraction(5, 16), Fraction(1, 48))

    @pytest.mark.parametrize("target", [Fraction(1, 3), Fraction(7, 10), "0.7", 0.0, 1.0])
    def test_error_bound(self, target):
        for step in dyadic_ladder(target, 16):
            assert step.error <= Fraction(1, 2 ** (step.level + 1))

    def test_materialized_projection(self):
        step = dyadic_splitting_demo(Fraction(1, 3), 3)
        p = step.projection()
        assert p.ranks() == (3,)
        with pytest.raises(PreconditionError):
            dyadic_splitting_demo(Fraction(1, 3), 13).projection()

    def test_bad_inputs(self):
        with pytest.raises(PreconditionError):
            dyadic_splitting_demo(Fraction(3, 2), 3)
        with pytest.raises(PreconditionError):
            dyadic_splitting_demo(Fraction(1, 2), 0)
