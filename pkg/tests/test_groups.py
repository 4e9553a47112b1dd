from __future__ import annotations

import pytest

from urysohn_forge.errors import GroupError
from urysohn_forge.groups import (
    FiniteGroup,
    FreeAbelianGroup,
    FreeGroup,
    ball,
    group_from_json,
    group_inv,
    group_op,
    small_groups,
)


def test_free_cancellation():
    F = FreeGroup(2)
    assert group_op(F, F.parse_word("a"), F.parse_word("a^-1")) == ()


def test_free_abelian_addition():
    assert group_op(FreeAbelianGroup(2), (1, 2), (3, -1)) == (4, 1)


def test_cyclic_arithmetic():
    C4 = FiniteGroup.cyclic(4)
    assert C4.elements[group_op(C4, C4.element("3"), C4.element("2"))] == "1"
    assert C4.elements[group_inv(C4, C4.element("1"))] == "3"


def test_balls():
    F1 = FreeGroup(1)
    assert sorted(ball(F1, 2)) == sorted([(), (1,), (-1,), (1, 1), (-1, -1)])
    assert len(ball(FiniteGroup.cyclic(2), 1)) == 2
    assert sorted(ball(FreeAbelianGroup(2), 1)) == [(-1, 0), (0, -1), (0, 0), (0, 1), (1, 0)]
    assert len(ball(FreeGroup(2), 3)) == 53


def test_word_syntax():
    F = FreeGroup(2)
    assert F.parse_word("a^2 b^-1") == (1, 1, -2)
    assert F.parse_word("aB") == (1, -2)
    assert F.parse_word("1") == ()
    assert F.format_word((1, 1, -2)) == "a^2 b^-1"
    assert F.format_word(()) == "1"
    with pytest.raises(GroupError):
        F.parse_word("c")


def test_small_groups():
    orders = [len(G) for G in small_groups(6)]
    assert orders == sorted(orders)
    assert orders.count(4) == 2 and orders.count(6) == 2


def test_subgroup_remembers_parent():
    S3 = small_groups(6)[-1]
    H = S3.subgroup([S3.elements[S3.generators[0]]])
    assert H.parent == S3 and len(H) == 2
    assert all(S3.op(H.to_parent(x), H.to_parent(y)) == H.to_parent(H.op(x, y)) for x in range(2) for y in range(2))


def test_json_round_trip():
    S3 = small_groups(6)[-1]
    for G in (FreeGroup(2), FreeAbelianGroup(3), FiniteGroup.cyclic(5), S3, S3.subgroup([S3.gen_names[0]])):
        assert group_from_json(G.to_json()) == G


def test_bad_table_rejected():
    with pytest.raises(GroupError):
        FiniteGroup(["e", "x"], [[0, 1], [1, 1]], ["x"])
