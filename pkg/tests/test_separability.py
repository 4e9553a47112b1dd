from __future__ import annotations

import itertools
import json
import random
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from urysohn_forge.errors import ForgeError, PreconditionError
from urysohn_forge.groups import FreeGroup
from urysohn_forge.separability import (
    FiniteQuotient,
    Lattice,
    StallingsGraph,
    benois_product_member,
    free_separating_quotient,
    hnf,
    image_mod,
    lattice_member,
    lattice_separating_quotient,
    separates,
    stallings_graph,
    subgroup_member,
    verify_lattice_quotient,
)
from urysohn_forge.suites import brute_product_member, random_subgroup, random_word, short_elements

F = FreeGroup(2)
GOLDEN = Path(__file__).parent / "golden"


def w(text):
    return F.parse_word(text)


def graph(*gens):
    return stallings_graph(2, [w(g) for g in gens])


class TestLattice:
    L = Lattice(2, ((2, 0), (0, 2)))

    def test_membership(self):
        assert lattice_member(self.L, (2, 4))
        assert not lattice_member(self.L, (1, 3))
        assert lattice_member(self.L, (0, 0))

    def test_dimension_mismatch(self):
        with pytest.raises(ForgeError):
            lattice_member(self.L, (1, 2, 3))

    def test_brute_force_agreement(self):
        coeffs = range(-5, 6)
        span = {(2 * i, 2 * j) for i in coeffs for j in coeffs}
        for v in itertools.product(range(-6, 7), repeat=2):
            assert lattice_member(self.L, v) == (v in span)

    def test_separating_moduli(self):
        assert lattice_separating_quotient(self.L, (1, 3)) == 2
        assert lattice_separating_quotient(Lattice(2, ((3, 0), (0, 1))), (1, 0)) == 3
        assert lattice_separating_quotient(Lattice(1, ()), (5,)) == 2

    def test_precondition(self):
        with pytest.raises(PreconditionError):
            lattice_separating_quotient(self.L, (2, 2))

    def test_image(self):
        assert image_mod(Lattice(2, ((3, 0), (0, 1))), 2) == {(0, 0), (1, 0), (0, 1), (1, 1)}
        assert verify_lattice_quotient(self.L, (1, 3), 2)

    def test_json(self):
        assert Lattice.from_json(self.L.to_json()) == self.L


@settings(max_examples=80, deadline=None)
@given(st.lists(st.tuples(st.integers(-6, 6), st.integers(-6, 6), st.integers(-6, 6)), max_size=4), st.randoms())
def test_hnf_canonical(rows, rnd):
    shuffled = list(rows)
    rnd.shuffle(shuffled)
    combined = list(rows) + [tuple(a + b for a, b in zip(rows[0], rows[-1]))] if rows else []
    H = hnf(rows, 3)
    assert hnf(shuffled, 3) == H
    assert hnf(H, 3) == H
    assert hnf(combined, 3) == H
    L = Lattice(3, tuple(rows))
    for r in rows:
        assert lattice_member(L, r)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.integers(-4, 4), st.integers(-4, 4)), max_size=3), st.tuples(st.integers(-5, 5), st.integers(-5, 5)))
def test_lattice_member_by_search(rows, v):
    L = Lattice(2, tuple(rows))
    reach = {(0, 0)}
    for c in itertools.product(range(-6, 7), repeat=len(rows)):
        reach.add(tuple(sum(k * r[i] for k, r in zip(c, rows)) for i in range(2)))
    if v in reach:
        assert lattice_member(L, v)
    if lattice_member(L, v) is False and rows:
        m = lattice_separating_quotient(L, v)
        assert verify_lattice_quotient(L, v, m)


class TestStallings:
    def test_a_squared_b(self):
        G = graph("a^2", "b")
        assert subgroup_member(G, w("a^2"))
        assert not subgroup_member(G, w("a"))
        assert subgroup_member(G, ())
        assert G.n_vertices == 2 and G.is_folded()

    def test_cyclic(self):
        G = graph("a")
        assert all(subgroup_member(G, (1,) * n) for n in range(6))
        assert not subgroup_member(G, w("b"))

    def test_whole_group(self):
        G = graph("a", "b")
        rng = random.Random(1)
        assert all(subgroup_member(G, random_word(rng, 2, 0, 10)) for _ in range(50))

    def test_folding_is_confluent(self):
        rng = random.Random(5)
        for _ in range(100):
            gens = random_subgroup(rng) + [random_word(rng, 2, 1, 4)]
            base = stallings_graph(2, gens).canonical()
            for seed in range(3):
                assert stallings_graph(2, gens, random.Random(seed)).canonical() == base

    def test_basis_generates(self):
        G = graph("a b a^-1", "a^2 b a^-2", "a")
        H = stallings_graph(2, G.basis())
        assert H.canonical() == G.canonical()

    def test_dot(self):
        text = graph("a^2", "b").to_dot()
        assert text.startswith("digraph") and 'label="b"' in text

    def test_json(self):
        G = graph("a^2", "b a b^-1")
        assert StallingsGraph.from_json(G.to_json()).canonical() == G.canonical()


def test_membership_matches_enumeration():
    rng = random.Random(11)
    for i in range(100):
        gens = random_subgroup(rng)
        elems = short_elements(gens, 6)
        G = stallings_graph(2, gens)
        for _ in range(5):
            u = random_word(rng, 2, 0, 6)
            if u in elems:
                assert subgroup_member(G, u)
        for u in list(elems)[:20]:
            assert subgroup_member(G, u)


class TestProducts:
    def test_examples(self):
        assert benois_product_member([graph("a"), graph("b")], w("ab"))
        assert not benois_product_member([graph("a"), graph("b")], w("ba"))

    def test_empty_product(self):
        assert benois_product_member([], ())
        assert not benois_product_member([], w("a"))

    def test_one_factor_is_membership(self):
        rng = random.Random(2)
        for _ in range(100):
            G = stallings_graph(2, random_subgroup(rng))
            u = random_word(rng, 2, 0, 6)
            assert benois_product_member([G], u) == subgroup_member(G, u)

    def test_cancellation_needed(self):
        # a b a^-1 b^-1 a = (a b a^-1) (b^-1 a) with the second factor in <b^-1 a>
        assert benois_product_member([graph("a b a^-1"), graph("b^-1 a")], w("a b a^-1 b^-1 a"))

    def test_brute_force(self):
        rng = random.Random(3)
        for _ in range(60):
            Hs = [random_subgroup(rng) for _ in range(rng.randint(1, 3))]
            u = random_word(rng, 2, 0, 5)
            graphs = [stallings_graph(2, g) for g in Hs]
            assert benois_product_member(graphs, u) == brute_product_member(Hs, u)


class TestQuotients:
    def test_z2_example(self):
        q = free_separating_quotient([graph("a^2"), graph("b")], w("a"))
        assert q.degree == 2 and q.images == ((1, 0), (0, 1))

    def test_golden_ba(self):
        data = json.loads((GOLDEN / "separate_a_b_ba.json").read_text())
        q = free_separating_quotient([graph("a"), graph("b")], w("ba"))
        assert q.to_json() == data["quotient"] and q.degree <= 4
        assert separates([[w("a")], [w("b")]], w("ba"), q)

    def test_member_rejected(self):
        with pytest.raises(PreconditionError):
            free_separating_quotient([graph("a"), graph("b")], w("ab"))

    def test_exhaustion_is_a_value(self):
        # a^6 lies outside <a^7> but no S_2 image sees it
        res = free_separating_quotient([graph("a^7")], w("a^6"), max_degree=2)
        assert res.to_json()["exhausted"] is True

    def test_separates_checks_image(self):
        q = FiniteQuotient(2, ((1, 0), (1, 0)))
        assert not separates([[w("a")], [w("b")]], w("ba"), q)
