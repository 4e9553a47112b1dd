from __future__ import annotations

import json
from pathlib import Path

import pytest

from urysohn_forge.actions import AgreementConstraint, FiniteAction, validate_action
from urysohn_forge.errors import ForgeError, NotAPartialIsometryError
from urysohn_forge.groups import FreeAbelianGroup
from urysohn_forge.io import dumps
from urysohn_forge.metric import FinMetric
from urysohn_forge.search import (
    Exhausted,
    SearchBudget,
    Witness,
    approximate_action,
    default_candidates,
    solecki_extend,
    verify_witness,
)

GOLDEN = Path(__file__).parent / "golden"

FLIP = FinMetric.from_pairs(["x", "y"], {("x", "y"): 1})
PATH = FinMetric.from_pairs(["a", "b", "c"], {("a", "b"): 1, ("b", "c"): 1, ("a", "c"): 2})


def test_flip_extends_on_the_pair_itself():
    # swapping x and y is already a full isometry extending x -> y
    w = solecki_extend(FLIP, [{"x": "y"}])
    assert isinstance(w, Witness)
    assert len(w.space) == 2 and w.fulls == ({"x": "y", "y": "x"},)
    assert verify_witness(FLIP, [{"x": "y"}], w)


def test_identity_needs_nothing():
    w = solecki_extend(PATH, [{p: p for p in PATH.points}])
    assert w.space == PATH and w.fulls[0] == {p: p for p in PATH.points}


def test_path_needs_four_cycle():
    p = {"a": "b", "b": "c"}
    w = solecki_extend(PATH, [p])
    assert len(w.space) == 4 and verify_witness(PATH, [p], w)
    assert w.space.values() == {1, 2}
    small = solecki_extend(PATH, [p], SearchBudget(max_points=3))
    assert isinstance(small, Exhausted) and small.complete


def test_several_partials():
    ps = [{"a": "b", "b": "c"}, {"a": "c"}]
    w = solecki_extend(PATH, ps)
    assert verify_witness(PATH, ps, w)


def test_node_budget_reports():
    res = solecki_extend(PATH, [{"a": "b", "b": "c"}], SearchBudget(max_points=12, max_nodes=1))
    assert isinstance(res, Exhausted) and not res.complete
    assert res.to_json()["exhausted"] is True


def test_invalid_partial():
    with pytest.raises(NotAPartialIsometryError):
        solecki_extend(PATH, [{"a": "a", "b": "c"}])


def test_budget_validation():
    with pytest.raises(ForgeError):
        SearchBudget(max_points=0)
    with pytest.raises(ForgeError):
        SearchBudget(candidate_distances=[0, 1])


def test_default_candidates():
    assert default_candidates(FinMetric.single("a")) == (1,)
    assert default_candidates(PATH) == (1, 2, 3, 4)


def test_deterministic_output():
    p = [{"a": "b", "b": "c"}]
    assert dumps(solecki_extend(PATH, p).to_json()) == dumps(solecki_extend(PATH, p).to_json())


def test_rank_one_matches_solecki():
    c = AgreementConstraint(("x",), {"a": {"x": "y"}})
    act, _ = approximate_action(FreeAbelianGroup(1), FLIP, c)
    w = solecki_extend(FLIP, [{"x": "y"}])
    assert act.space == w.space


def test_fixed_points_give_a():
    c = AgreementConstraint(("x", "y"), {"a": {"x": "x", "y": "y"}, "b": {"x": "x", "y": "y"}})
    A = FinMetric.from_pairs(["x", "y"], {("x", "y"): 2})
    act, _ = approximate_action(FreeAbelianGroup(2), A, c)
    assert act.space == A and act.gen_maps == ((0, 1), (0, 1))


def test_golden_commuting_pair():
    data = json.loads((GOLDEN / "approx_z2_flip.json").read_text())
    A = FinMetric.from_json(data["space"])
    c = AgreementConstraint.from_json(data["constraint"])
    act, nodes = approximate_action(FreeAbelianGroup(2), A, c)
    assert act.to_json() == data["action"] and nodes == data["nodes"]
    assert validate_action(act) is None and c.satisfied_by(act)


def test_inconsistent_constraint():
    c = AgreementConstraint(("x", "y"), {"a": {"x": "y", "y": "x"}, "b": {"x": "y", "y": "y"}})
    with pytest.raises(ForgeError):
        approximate_action(FreeAbelianGroup(2), FLIP, c)


def test_commuting_superspace():
    # a rotation of the path plus a fixed point requirement elsewhere
    c = AgreementConstraint(("a", "b"), {"a": {"a": "b", "b": "c"}, "b": {"b": "b"}})
    res = approximate_action(FreeAbelianGroup(2), PATH, c)
    act, _ = res
    assert isinstance(act, FiniteAction) and validate_action(act) is None
    assert c.satisfied_by(act)
