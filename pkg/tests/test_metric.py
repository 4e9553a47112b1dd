from __future__ import annotations

import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from urysohn_forge.errors import ForgeError, KatetovError, MalformedMetricError
from urysohn_forge.metric import (
    FinMetric,
    as_rat,
    disjoint_sum,
    expanded_value_set,
    extend_by_katetov,
    free_amalgam,
    fresh_id,
    katetov_check,
    truncate_metric,
    validate_metric,
)
from urysohn_forge.suites import random_metric


def tri(ab, ac, bc):
    return FinMetric.from_pairs("abc", {("a", "b"): ab, ("a", "c"): ac, ("b", "c"): bc})


class TestRationals:
    def test_accepted_forms(self):
        assert as_rat("3/6") == Fraction(1, 2)
        assert as_rat([4, 2]) == 2
        assert as_rat(Fraction(1, 3)) == Fraction(1, 3)

    @pytest.mark.parametrize("bad", [0.5, True, "x", [1, 0], None])
    def test_rejected(self, bad):
        with pytest.raises(ForgeError):
            as_rat(bad)

    def test_fresh_id(self):
        assert fresh_id("p", {"q"}) == "p"
        assert fresh_id("p", {"p", "p.1"}) == "p.2"


class TestValidate:
    def test_two_points(self):
        assert validate_metric(FinMetric.from_pairs("ab", {("a", "b"): 1})) is None

    def test_triangle_witness(self):
        v = validate_metric(tri(1, 1, 3))
        assert v.axiom == "triangle"
        assert v.witness == ("b", "a", "c")

    def test_path_metric(self):
        assert validate_metric(tri(1, 2, 1)) is None

    def test_zero_distance_is_positivity(self):
        assert validate_metric(tri(0, 1, 1)).axiom == "positivity"

    def test_asymmetric(self):
        M = FinMetric("ab", [[0, 1], [2, 0]])
        assert validate_metric(M).axiom == "symmetry"

    def test_shape_errors(self):
        with pytest.raises(MalformedMetricError):
            FinMetric("ab", [[0, 1]])
        with pytest.raises(MalformedMetricError):
            FinMetric("aa", [[0, 1], [1, 0]])

    def test_json_round_trip(self):
        M = FinMetric.from_pairs("ab", {("a", "b"): Fraction(3, 2)})
        data = M.to_json()
        assert data == {"points": ["a", "b"], "dist": [[3, 2]]}
        assert FinMetric.from_json(data) == M


class TestKatetov:
    M = FinMetric.from_pairs("ab", {("a", "b"): 2})

    def test_admissible(self):
        assert katetov_check(self.M, {"a": 1, "b": 1})

    def test_inadmissible(self):
        assert not katetov_check(self.M, {"a": 1, "b": 4})

    def test_single_point(self):
        assert katetov_check(FinMetric.single("a"), {"a": 5})

    def test_extension_completes_by_shortest_path(self):
        M = tri(1, 2, 1)
        S, y = extend_by_katetov(M, {"a": 1})
        assert y not in M
        assert [S.d(y, p) for p in "abc"] == [1, 2, 3]
        assert validate_metric(S) is None

    def test_extension_rejected(self):
        with pytest.raises(KatetovError):
            extend_by_katetov(self.M, {"a": 1, "b": 4})


class TestExpandedValues:
    def test_pair(self):
        M = FinMetric.from_pairs("ab", {("a", "b"): 1})
        assert expanded_value_set(M, "ab") == [0, 1]

    def test_single(self):
        assert expanded_value_set(tri(1, 1, 1), "a") == [0]

    def test_no_new_sums(self):
        assert expanded_value_set(tri(2, 3, 3), "abc") == [0, 2, 3]

    def test_sums_appear(self):
        M = FinMetric.from_pairs("abc", {("a", "b"): 1, ("a", "c"): 3, ("b", "c"): 3})
        assert expanded_value_set(M, "abc") == [0, 1, 2, 3]


class TestTruncate:
    def test_examples(self):
        # A = {a,b,c} with Ex = {0,2,3}; x at 1 and 5 from a
        pts = ["a", "b", "c", "x", "y"]
        D = {
            ("a", "b"): 2, ("a", "c"): 3, ("b", "c"): 3,
            ("a", "x"): 1, ("b", "x"): 2, ("c", "x"): 3,
            ("a", "y"): 5, ("b", "y"): 5, ("c", "y"): 5, ("x", "y"): 5,
        }
        M = FinMetric.from_pairs(pts, D)
        assert validate_metric(M) is None
        T = truncate_metric(M, "abc")
        assert T.d("a", "x") == 2
        assert T.d("a", "y") == 3
        assert T.d("x", "x") == 0
        assert T.restrict("abc") == M.restrict("abc")

    def test_one_point_subset_rejected(self):
        with pytest.raises(ForgeError):
            truncate_metric(tri(1, 1, 1), "a")


class TestAmalgam:
    def test_one_point_base(self):
        X = FinMetric.from_pairs(["b", "x"], {("b", "x"): 1})
        Y = FinMetric.from_pairs(["b", "y"], {("b", "y"): 2})
        am = free_amalgam(X, Y, FinMetric.single("b"))
        assert am.space.d("x", "y") == 3
        assert am.embed_y == {"b": "b", "y": "y"}

    def test_glue_everything(self):
        B = tri(1, 2, 1)
        assert free_amalgam(B, B, B).space == B

    def test_two_point_base(self):
        X = FinMetric.from_pairs(["b1", "b2", "x"], {("b1", "b2"): 2, ("b1", "x"): 1, ("b2", "x"): 1})
        Y = FinMetric.from_pairs(["b1", "b2", "y"], {("b1", "b2"): 2, ("b1", "y"): 1, ("b2", "y"): 1})
        am = free_amalgam(X, Y, X.restrict(["b1", "b2"]))
        assert am.space.d("x", "y") == 2

    def test_clashing_ids_renamed(self):
        X = FinMetric.from_pairs(["b", "p"], {("b", "p"): 1})
        Y = FinMetric.from_pairs(["b", "p"], {("b", "p"): 1})
        am = free_amalgam(X, Y, FinMetric.single("b"))
        assert am.embed_y["p"] == "p.1"
        assert am.space.d("p", "p.1") == 2


class TestDisjointSum:
    def test_cross_is_max_diameter(self):
        X = FinMetric.from_pairs("ab", {("a", "b"): 2})
        Y = FinMetric.from_pairs("cd", {("c", "d"): 3})
        assert disjoint_sum(X, Y).space.d("a", "c") == 3

    def test_singletons_floor(self):
        S = disjoint_sum(FinMetric.single("a"), FinMetric.single("b")).space
        assert S.d("a", "b") == 1

    def test_two_copies_swap(self):
        X = tri(1, 2, 1)
        am = disjoint_sum(X, X)
        S = am.space
        swap = {x: am.embed_y[x] for x in X.points}
        swap.update({v: k for k, v in swap.items()})
        assert S.is_isometric_map(swap)


metric_params = st.tuples(st.integers(1, 6), st.integers(0, 10_000), st.integers(1, 3))


@settings(max_examples=60, deadline=None)
@given(metric_params)
def test_constructions_stay_metric(params):
    n, seed, steps = params
    rng = random.Random(seed)
    M = random_metric(rng, n, 5, steps=steps)
    assert validate_metric(M) is None
    A = M.points[: max(2, n // 2)]
    if len(M) > 1:
        T = truncate_metric(M, A)
        assert validate_metric(T) is None
        assert T.values() <= set(expanded_value_set(M, A))
    N = random_metric(rng, n, 5, prefix="q")
    assert validate_metric(disjoint_sum(M, N).space) is None


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_truncation_respects_isometries(seed):
    rng = random.Random(seed)
    M = random_metric(rng, 4, 3)
    T = truncate_metric(M, M.points[:2] if M.diam(M.points[:2]) else M.points)
    for p in itertools.permutations(range(4)):
        if all(M.di(p[i], p[j]) == M.di(i, j) for i in range(4) for j in range(4)):
            assert all(T.di(p[i], p[j]) == T.di(i, j) for i in range(4) for j in range(4))
