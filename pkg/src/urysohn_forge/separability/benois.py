"""Membership in products ``H_1 H_2 ... H_k`` of finitely generated subgroups of ``F_n``.

The Stallings graphs are chained by epsilon moves from each base to the next.
Saturation adds an epsilon move ``p -> q`` whenever some path ``p -> q`` spells
``x`` epsilon* ``x^-1``; afterwards a reduced word lies in the product exactly
when the automaton accepts it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from ..groups import FreeGroup
from .stallings import StallingsGraph


@dataclass
class ProductAutomaton:
    n_states: int
    start: int
    accept: int
    delta: list[dict[int, set[int]]]  # delta[p][label] = targets
    eps: list[set[int]]  # epsilon successors (not closed)
    saturated: bool = False

    def closure(self, states) -> set[int]:
        out = set(states)
        stack = list(out)
        while stack:
            p = stack.pop()
            for q in self.eps[p]:
                if q not in out:
                    out.add(q)
                    stack.append(q)
        return out

    def saturate(self) -> "ProductAutomaton":
        """Run the cancellation rule to a fixpoint (finitely many epsilon moves exist)."""
        changed = True
        while changed:
            changed = False
            for p in range(self.n_states):
                for x, targets in self.delta[p].items():
                    mids = self.closure(targets)
                    for m in mids:
                        for q in self.delta[m].get(-x, ()):
                            if q != p and q not in self.eps[p]:
                                self.eps[p].add(q)
                                changed = True
        self.saturated = True
        return self

    def accepts(self, word: Sequence[int]) -> bool:
        cur = self.closure({self.start})
        for x in word:
            nxt = set()
            for p in cur:
                nxt |= self.delta[p].get(x, set())
            if not nxt:
                return False
            cur = self.closure(nxt)
        return self.accept in cur


def product_automaton(graphs: Sequence[StallingsGraph]) -> ProductAutomaton:
    offsets = []
    total = 0
    for G in graphs:
        offsets.append(total)
        total += G.n_vertices
    delta: list[dict[int, set[int]]] = [dict() for _ in range(total)]
    eps: list[set[int]] = [set() for _ in range(total)]
    for G, off in zip(graphs, offsets):
        for v in range(G.n_vertices):
            for x, w in G.out[v].items():
                delta[off + v].setdefault(x, set()).add(off + w)
    for i in range(len(graphs) - 1):
        eps[offsets[i] + graphs[i].base].add(offsets[i + 1] + graphs[i + 1].base)
    start = offsets[0] + graphs[0].base
    accept = offsets[-1] + graphs[-1].base
    return ProductAutomaton(total, start, accept, delta, eps)


def benois_product_member(graphs: Sequence[StallingsGraph], word: Sequence[int]) -> bool:
    """True iff ``word`` lies in ``H_1 ... H_k`` (the empty product is the trivial group)."""
    if not graphs:
        return not FreeGroup.reduce(word)
    rank = graphs[0].rank
    if any(G.rank != rank for G in graphs):
        raise ValueError("all subgroups must live in the same free group")
    word = FreeGroup(rank).check(FreeGroup.reduce(word))
    return product_automaton(graphs).saturate().accepts(word)
