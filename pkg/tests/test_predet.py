import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import quadrature_predet, unwrap_winding
from unicover.algebra import CenterVector, Element, Hermitian, Projection, Unitary
from unicover.errors import EndpointMismatch, NotALoop, NotInLattice, NotInvertible, PreconditionError
from unicover.paths import SegmentPath, concatenate, constant_path, projection_loop, translate
from unicover.predet import (
    checked_winding,
    fuglede_kadison,
    homotopy_equivalent,
    lattice_round,
    lattice_winding,
    pre_determinant,
    pre_determinant_scalar,
    short_path_formula,
    small_ball_loop_check,
    winding_oracle,
)
from unicover.sampling import random_algebra, random_hermitian, random_loop, random_path, random_unitary

seeds = st.integers(min_value=0, max_value=2**32 - 1)


class TestPreDeterminant:
    def test_constant_path_is_zero(self, m2m3):
        assert list(pre_determinant(constant_path(m2m3)).as_floats()) == [0.0, 0.0]

    def test_diag_two_zero(self, m2):
        p = SegmentPath(m2.identity(), (Hermitian(m2, [np.diag([2.0, 0.0])]),))
        assert list(pre_determinant(p).as_floats()) == [1.0]

    def test_projection_loop_values(self, m2m3):
        p = Projection(m2m3, [np.diag([1.0, 0.0]), np.diag([1.0, 1.0, 0.0])])
        assert pre_determinant(projection_loop(p)).as_floats() == pytest.approx([0.5, 2 / 3], abs=1e-15)
        assert pre_determinant_scalar(projection_loop(p)) == pytest.approx(0.25 + 1 / 3)

    def test_matches_quadrature(self, rng):
        for _ in range(4):
            alg = random_algebra(rng, max_blocks=2, max_size=3)
            p = SegmentPath(random_unitary(alg, rng), random_path(alg, rng, segments=2, radius=0.8).generators)
            oracle = quadrature_predet(p, n=60)
            assert np.allclose(pre_determinant(p).as_floats(), oracle, atol=1e-6)

    def test_independent_of_start(self, rng):
        alg = random_algebra(rng)
        p = random_path(alg, rng)
        q = translate(p, random_unitary(alg, rng))
        assert pre_determinant(q).max_abs_diff(pre_determinant(p)) == 0

    @settings(max_examples=40, deadline=None)
    @given(seeds)
    def test_additive_under_concatenation(self, seed):
        rng = np.random.default_rng(seed)
        alg = random_algebra(rng)
        p = random_path(alg, rng)
        q = translate(random_path(alg, rng), p.endpoint)
        total = pre_determinant(concatenate(p, q))
        parts = pre_determinant(p) + pre_determinant(q)
        assert total.max_abs_diff(parts) <= 1e-10


class TestLatticeRound:
    def test_exact_fractions(self, m2m3):
        ints, res = lattice_round(CenterVector(m2m3, (Fraction(1, 2), Fraction(-2, 3))))
        assert ints == (1, -2) and res == (0.0, 0.0)

    def test_rejects_third_in_m2(self, m2):
        with pytest.raises(NotInLattice):
            lattice_round(CenterVector(m2, (Fraction(1, 3),)))

    def test_float_tolerance(self, m2):
        assert lattice_round(CenterVector(m2, (0.5 + 1e-9,)))[0] == (1,)
        with pytest.raises(NotInLattice):
            lattice_round(CenterVector(m2, (0.5 + 1e-5,)))


class TestWinding:
    def test_diag_two_winds_twice(self, m2):
        p = SegmentPath(m2.identity(), (Hermitian(m2, [np.diag([2.0, 0.0])]),))
        assert winding_oracle(p).winds == (2,)

    def test_not_a_loop(self, m2):
        p = SegmentPath(m2.identity(), (Hermitian(m2, [np.diag([0.3, 0.0])]),))
        with pytest.raises(NotALoop):
            winding_oracle(p)

    def test_against_unwrap_and_lattice(self, rng):
        for _ in range(8):
            alg = random_algebra(rng, max_size=4)
            p = random_loop(alg, rng)
            w = winding_oracle(p)
            # a 10x finer grid than the oracle would ever need for these radii
            fine = max(400, int(10 * p.lipschitz * max(alg.blocks)))
            ref, res = unwrap_winding(p, fine)
            assert w.winds == ref
            assert max(res) < 1e-6
            assert lattice_winding(p).winds == w.winds

    def test_checked_winding(self, rng):
        alg = random_algebra(rng)
        p = random_loop(alg, rng)
        assert checked_winding(p).winds == winding_oracle(p).winds

    @settings(max_examples=30, deadline=None)
    @given(seeds)
    def test_conjugation_invariance(self, seed):
        rng = np.random.default_rng(seed)
        alg = random_algebra(rng)
        p = random_loop(alg, rng)
        u = random_unitary(alg, rng)
        gens = tuple(Hermitian.symmetrize(u @ g @ u.H) for g in p.generators)
        assert winding_oracle(SegmentPath(alg.identity(), gens)).winds == winding_oracle(p).winds


class TestHomotopy:
    def test_loops(self, m2):
        a = SegmentPath(m2.identity(), (Hermitian(m2, [np.diag([1.0, 0.0])]),))
        b = SegmentPath(m2.identity(), (Hermitian(m2, [np.diag([0.0, 1.0])]),))
        c = SegmentPath(m2.identity(), (Hermitian(m2, [np.diag([2.0, -1.0])]),))
        assert homotopy_equivalent(a, b)
        assert homotopy_equivalent(a, c)
        assert not homotopy_equivalent(a, constant_path(m2))

    def test_paths_with_common_endpoints(self, m2):
        quarter = Hermitian(m2, [np.diag([0.25, 0.0])])
        p = SegmentPath(m2.identity(), (quarter,))
        around = Hermitian(m2, [np.diag([-0.75, 0.0])])
        q = SegmentPath(m2.identity(), (around,))
        assert homotopy_equivalent(p, p)
        assert not homotopy_equivalent(p, q)
        split = SegmentPath(m2.identity(), (Hermitian(m2, [np.diag([0.125, 0.0])]),) * 2)
        assert homotopy_equivalent(p, split)

    def test_endpoint_mismatch(self, m2):
        p = SegmentPath(m2.identity(), (Hermitian(m2, [np.diag([0.25, 0.0])]),))
        q = SegmentPath(m2.identity(), (Hermitian(m2, [np.diag([0.3, 0.0])]),))
        with pytest.raises(EndpointMismatch):
            homotopy_equivalent(p, q)
        with pytest.raises(NotALoop):
            homotopy_equivalent(p, constant_path(m2))


class TestShortPath:
    def test_agrees_with_predet(self, rng):
        for _ in range(20):
            alg = random_algebra(rng)
            p = random_path(alg, rng, segments=1, radius=0.1)
            assert short_path_formula(p).max_abs_diff(pre_determinant(p)) < 1e-9

    def test_rejects_long_path(self, m2):
        p = SegmentPath(m2.identity(), (Hermitian(m2, [np.diag([0.5, 0.0])]),))
        with pytest.raises(PreconditionError):
            short_path_formula(p)


class TestFugledeKadison:
    def test_unitary(self, rng):
        alg = random_algebra(rng)
        assert fuglede_kadison(random_unitary(alg, rng)) == pytest.approx(1.0, abs=1e-12)

    def test_diag_one_four(self, m2):
        # exp(0.5 (log 1 + log 4)) = 2
        assert fuglede_kadison(Element.diagonal(m2, [[1, 4]])) == pytest.approx(2.0, rel=1e-14)

    def test_weighted_blocks(self, m2m3):
        x = Element.diagonal(m2m3, [[2, 2], [3, 3, 3]])
        assert fuglede_kadison(x) == pytest.approx(math.sqrt(2) * math.sqrt(3), rel=1e-13)

    def test_multiplicative(self, rng):
        alg = random_algebra(rng)
        x = Element(alg, [rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)) for n in alg.blocks])
        y = Element(alg, [rng.standard_normal((n, n)) for n in alg.blocks])
        assert fuglede_kadison(x @ y) == pytest.approx(fuglede_kadison(x) * fuglede_kadison(y), rel=1e-9)

    def test_singular(self, m2):
        with pytest.raises(NotInvertible):
            fuglede_kadison(Element.diagonal(m2, [[1, 0]]))


class TestSmallBall:
    def test_inside_ball(self, rng):
        alg = random_algebra(rng)
        u0 = random_unitary(alg, rng)
        a = random_hermitian(alg, rng, 0.02)
        p = SegmentPath(u0, (a, Hermitian(alg, [-b for b in a.blocks])))
        verdict = small_ball_loop_check(p, u0)
        assert verdict.precondition_met and verdict.holds
        assert verdict.winding.winds == (0,) * alg.k

    def test_outside_ball_is_vacuous(self, m2):
        p = projection_loop(Projection(m2, [np.diag([1.0, 0.0])]))
        verdict = small_ball_loop_check(p, m2.identity())
        assert verdict.holds and not verdict.precondition_met
        assert verdict.sup_distance >= 1.9
        assert "vacuous" in verdict.diagnostic

    def test_requires_loop_at_base(self, m2):
        p = projection_loop(Projection(m2, [np.diag([1.0, 0.0])]))
        with pytest.raises(NotALoop):
            small_ball_loop_check(p, Unitary(m2, [np.diag([1j, 1])]))
