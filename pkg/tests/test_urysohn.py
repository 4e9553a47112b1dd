from __future__ import annotations

import itertools
import random

import pytest

from urysohn_forge.errors import ForgeError, KatetovError, NotAPartialIsometryError, SaturationError
from urysohn_forge.metric import FinMetric, validate_metric
from urysohn_forge.urysohn import (
    DistanceSet,
    SaturationLevel,
    add_realizing_point,
    check_saturation,
    extend_partial_isometry,
    saturate,
)


@pytest.fixture(scope="module")
def level3() -> SaturationLevel:
    return saturate(DistanceSet.integers(2), 3, 2000, seed=0)


class TestDistanceSet:
    def test_parse(self):
        assert DistanceSet.parse("1..3") == DistanceSet.integers(3)
        assert DistanceSet.parse("1,2").bounded_integer
        assert not DistanceSet.parse("1,3/2").bounded_integer

    def test_invalid(self):
        with pytest.raises(ForgeError):
            DistanceSet.of([0, 1])
        with pytest.raises(ForgeError):
            DistanceSet.parse("2..4")

    def test_json(self):
        for d in (DistanceSet.integers(2), DistanceSet.parse("1,5/2")):
            assert DistanceSet.from_json(d.to_json()) == d


class TestAddRealizingPoint:
    def test_capped_completion(self):
        M = FinMetric.from_pairs("ab", {("a", "b"): 2})
        S, y = add_realizing_point(M, {"a": 1}, DistanceSet.integers(2))
        assert (S.d(y, "a"), S.d(y, "b")) == (1, 2)

    def test_full_prescription(self):
        M = FinMetric.from_pairs("ab", {("a", "b"): 1})
        S, y = add_realizing_point(M, {"a": 2, "b": 1}, DistanceSet.integers(2))
        assert (S.d(y, "a"), S.d(y, "b")) == (2, 1)

    def test_inadmissible(self):
        M = FinMetric.from_pairs("ab", {("a", "b"): 3})
        with pytest.raises(KatetovError):
            add_realizing_point(M, {"a": 1, "b": 1}, DistanceSet.integers(3))

    def test_random_completion_stays_metric(self):
        rng = random.Random(4)
        S = FinMetric.single("p")
        for _ in range(12):
            S, _ = add_realizing_point(S, {S.points[0]: rng.randint(1, 3)}, DistanceSet.integers(3), rng=rng)
        assert validate_metric(S) is None
        assert S.values() <= {0, 1, 2, 3}


class TestCheckSaturation:
    def test_single_point(self):
        missing = check_saturation(FinMetric.single("p"), DistanceSet.integers(2), 1)
        assert sorted(missing) == [(("p",), (1,)), (("p",), (2,))]

    def test_all_ones_lacks_distance_two(self):
        M = FinMetric.from_pairs("abcd", {pair: 1 for pair in itertools.combinations("abcd", 2)})
        missing = check_saturation(M, DistanceSet.integers(2), 1)
        assert sorted(missing) == [((p,), (2,)) for p in "abcd"]


class TestSaturate:
    def test_single_distance(self):
        S = saturate(DistanceSet.integers(1), 3)
        assert len(S.space) >= 4
        assert S.space.values() == {1}

    def test_level_one(self):
        S = saturate(DistanceSet.integers(2), 1)
        assert check_saturation(S.space, S.dset, 1) == []

    def test_level_two_realizes_all_pair_types(self):
        S = saturate(DistanceSet.integers(2), 2)
        assert check_saturation(S.space, S.dset, 2) == []
        # unordered pair types: distance d and the multiset of prescribed values
        types = {
            (d, tuple(sorted(r)))
            for d in (1, 2)
            for r in itertools.product((1, 2), repeat=2)
            if abs(r[0] - r[1]) <= d <= r[0] + r[1]
        }
        assert len(types) == 6

    def test_level_three(self, level3):
        assert check_saturation(level3.space, level3.dset, 3) == []
        assert len(level3.space) == 85  # frozen for seed 0

    def test_deterministic(self):
        a = saturate(DistanceSet.integers(2), 2, seed=7)
        b = saturate(DistanceSet.integers(2), 2, seed=7)
        assert a.space == b.space

    def test_cap(self):
        with pytest.raises(SaturationError) as info:
            saturate(DistanceSet.integers(2), 3, size_cap=10)
        assert info.value.missing > 0

    def test_json_round_trip(self, level3):
        assert SaturationLevel.from_json(level3.to_json()) == level3


class TestExtendPartialIsometry:
    def test_targets_in_domain(self, level3):
        p = {x: x for x in level3.space.points[:3]}
        assert extend_partial_isometry(level3, p, level3.space.points[:3]) == p

    def test_pair_to_pair(self, level3):
        M = level3.space
        pts = M.points
        src = next((a, b) for a, b in itertools.combinations(pts, 2) if M.d(a, b) == 2)
        dst = next((a, b) for a, b in itertools.combinations(pts[::-1], 2) if M.d(a, b) == 2 and (a, b) != src)
        p = dict(zip(src, dst))
        target = next(t for t in pts if t not in src)
        q = extend_partial_isometry(level3, p, [target])
        assert len(q) == 3 and M.is_isometric_map(q)

    def test_not_isometric(self, level3):
        M = level3.space
        pts = M.points
        a, b = next((a, b) for a, b in itertools.combinations(pts, 2) if M.d(a, b) == 1)
        c, d = next((a, b) for a, b in itertools.combinations(pts, 2) if M.d(a, b) == 2)
        with pytest.raises(NotAPartialIsometryError):
            extend_partial_isometry(level3, {a: c, b: d}, [])

    def test_domain_too_large(self, level3):
        pts = level3.space.points
        p = {x: x for x in pts[:4]}
        with pytest.raises(SaturationError):
            extend_partial_isometry(level3, p, [pts[10]])
