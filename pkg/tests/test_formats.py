import json
from fractions import Fraction

import numpy as np
import pytest

from unicover.config import DEFAULT, load_config
from unicover.cover import lift_path
from unicover.errors import ParseError
from unicover.formats import (
    covering_to_json,
    fmt_coordinate,
    fmt_real,
    parse_algebra,
    parse_covering,
    parse_path,
    parse_ses,
    path_to_json,
    read_json,
)
from unicover.paths import SampledPath, evaluate
from unicover.predet import pre_determinant
from unicover.sampling import random_algebra, random_loop, random_path

M2 = {"blocks": [2], "weights": [1]}


def where_of(fn, *args):
    with pytest.raises(ParseError) as info:
        fn(*args)
    return info.value.where


class TestAlgebra:
    def test_rational_weights(self):
        alg = parse_algebra({"blocks": [2, 3], "weights": ["1/3", "2/3"]})
        assert alg.weights == pytest.approx((1 / 3, 2 / 3))

    def test_default_weights(self):
        assert parse_algebra({"blocks": [1, 1, 1, 1]}).weights == (0.25,) * 4

    @pytest.mark.parametrize(
        "obj,where",
        [
            ({"blocks": [2, 0]}, "$.blocks[1]"),
            ({"blocks": [2], "weights": ["a"]}, "$.weights[0]"),
            ({"blocks": [2, 2], "weights": [1]}, "$.weights"),
            ({"weights": [1]}, "$"),
        ],
    )
    def test_positioned_errors(self, obj, where):
        assert where_of(parse_algebra, obj) == where


class TestPaths:
    def test_round_trip(self, rng):
        alg = random_algebra(rng)
        p = random_loop(alg, rng)
        q = parse_path(json.loads(json.dumps(path_to_json(p))))
        assert pre_determinant(q).max_abs_diff(pre_determinant(p)) < 1e-12
        for t in (0.3, 0.9):
            assert np.allclose(evaluate(q, t).blocks[0], evaluate(p, t).blocks[0], atol=1e-12)

    def test_samples(self):
        one = {"blocks": [[[1, 0], [0, 1]]]}
        s = parse_path({"algebra": M2, "type": "samples", "times": [0, "1/2", 1], "values": [one] * 3})
        assert isinstance(s, SampledPath) and s.times == (0.0, 0.5, 1.0)

    def test_complex_entries(self):
        p = parse_path({"algebra": M2, "generators": [{"blocks": [[[0, [0, -1]], [[0, 1], 0]]]}]})
        assert p.generators[0].blocks[0][0, 1] == -1j

    @pytest.mark.parametrize(
        "gens,where",
        [
            ([{"blocks": [[[1, 0], [0, "x"]]]}], "$.generators[0].blocks[0][1][1]"),
            ([{"blocks": [[[1, 0]]]}], "$.generators[0].blocks[0]"),
            ([{"blocks": [[[0, 1], [0, 0]]]}], "$.generators[0]"),
            ([{"blocks": []}], "$.generators[0].blocks"),
        ],
    )
    def test_positioned_errors(self, gens, where):
        assert where_of(parse_path, {"algebra": M2, "generators": gens}) == where

    def test_bad_type(self):
        assert where_of(parse_path, {"algebra": M2, "type": "spline"}) == "$.type"

    def test_non_monotone_samples(self):
        one = {"blocks": [[[1, 0], [0, 1]]]}
        obj = {"algebra": M2, "type": "samples", "times": [0, 1, 1], "values": [one] * 3}
        assert where_of(parse_path, obj) == "$"


class TestCovering:
    def test_round_trip_exact(self, rng):
        alg = random_algebra(rng)
        x = lift_path(random_path(alg, rng))
        y = parse_covering(json.loads(json.dumps(covering_to_json(x))))
        assert y.w.coords == x.w.coords

    def test_rational_w(self):
        obj = {"algebra": M2, "endpoint": {"blocks": [[[1, 0], [0, 1]]]}, "w": ["1/2"]}
        assert parse_covering(obj).w.coords == (Fraction(1, 2),)

    def test_w_length(self):
        obj = {"algebra": M2, "endpoint": {"blocks": [[[1, 0], [0, 1]]]}, "w": [0, 0]}
        assert where_of(parse_covering, obj) == "$.w"


class TestGroups:
    def test_on_generators_permutation(self):
        obj = {"K": {"cyclic": 3}, "S": {"symmetric": 3}, "U": {"cyclic": 2},
               "alpha": {"on_generators": [[1, 2, 0]]}, "beta": {"on_generators": [1, 0]}}
        ses, gamma, named = parse_ses(obj)
        assert gamma is None and named["S"].order == 6

    def test_bad_hom(self):
        obj = {"K": {"cyclic": 2}, "S": {"cyclic": 6}, "U": {"cyclic": 3},
               "alpha": [0, 1], "beta": [0, 1, 2, 0, 1, 2]}
        assert where_of(parse_ses, obj) == "$.alpha"

    def test_image_out_of_range(self):
        obj = {"K": {"cyclic": 2}, "S": {"cyclic": 6}, "U": {"cyclic": 3},
               "alpha": [0, 9], "beta": [0, 1, 2, 0, 1, 2]}
        assert where_of(parse_ses, obj) == "$.alpha[1]"


def test_malformed_json_reports_line(tmp_path):
    f = tmp_path / "x.json"
    f.write_text('{"blocks": [2],\n "weights": [1,]}')
    with pytest.raises(ParseError) as info:
        read_json(f)
    assert info.value.where.startswith("line 2 column")


def test_formatting():
    assert fmt_real(-0.0) == "0"
    assert fmt_real(2 / 3) == "0.666666666667"
    assert fmt_coordinate(Fraction(-2, 3)) == "-2/3"
    assert fmt_coordinate(Fraction(1, 3 * 2**30)) != "1/3221225472"


def test_load_config(tmp_path):
    assert load_config(None) == DEFAULT
    f = tmp_path / "c.json"
    f.write_text('{"gap_margin": 0.1}')
    assert load_config(f).gap_margin == 0.1
    f.write_text('{"bogus": 1}')
    with pytest.raises(ValueError):
        load_config(f)
