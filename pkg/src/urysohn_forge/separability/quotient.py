"""Finite quotients of free groups separating a word from a product of subgroups."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from ..errors import PreconditionError
from ..groups import LETTERS
from .benois import benois_product_member
from .stallings import StallingsGraph

Perm = tuple[int, ...]


def _compose(p: Perm, q: Perm) -> Perm:
    return tuple(p[i] for i in q)


def _inverse(p: Perm) -> Perm:
    out = [0] * len(p)
    for i, j in enumerate(p):
        out[j] = i
    return tuple(out)


def evaluate(word: Sequence[int], images: Sequence[Perm]) -> Perm:
    """Image of a word under ``x_i -> images[i-1]``, with ``phi(uv) = phi(u) phi(v)``."""
    d = len(images[0])
    out = tuple(range(d))
    for x in word:
        p = images[abs(x) - 1]
        out = _compose(out, p if x > 0 else _inverse(p))
    return out


def generated(gens: Sequence[Perm], d: int) -> set[Perm]:
    ident = tuple(range(d))
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for u in frontier:
            for g in gens:
                w = _compose(u, g)
                if w not in seen:
                    seen.add(w)
                    nxt.append(w)
        frontier = nxt
    return seen


def product_set(subgroups: Sequence[set[Perm]], d: int) -> set[Perm]:
    out = {tuple(range(d))}
    for H in subgroups:
        out = {_compose(u, h) for u in out for h in H}
    return out


@dataclass(frozen=True)
class FiniteQuotient:
    degree: int
    images: tuple[Perm, ...]  # image of each free generator in S_degree

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "images": {LETTERS[i]: list(p) for i, p in enumerate(self.images)},
        }


@dataclass(frozen=True)
class QuotientExhausted:
    max_degree: int
    candidates: int

    def to_json(self) -> dict:
        return {"exhausted": True, "max_degree": self.max_degree, "candidates": self.candidates}


def separates(subgroup_gens: Sequence[Sequence[Sequence[int]]], word: Sequence[int], q: FiniteQuotient) -> bool:
    """Check in the image that ``phi(word)`` is outside ``phi(H_1) ... phi(H_k)``."""
    d = q.degree
    images = [generated([evaluate(g, q.images) for g in gens], d) for gens in subgroup_gens]
    return evaluate(word, q.images) not in product_set(images, d)


def free_separating_quotient(graphs: Sequence[StallingsGraph], word: Sequence[int], max_degree: int = 5):
    """First homomorphism to some ``S_d`` (d ascending, images in lexicographic order)
    whose image keeps ``word`` outside the image of the product.

    Returns a :class:`FiniteQuotient`, or :class:`QuotientExhausted` when no
    ``d <= max_degree`` works.
    """
    if benois_product_member(graphs, word):
        raise PreconditionError("word lies in the product; no quotient can separate it")
    rank = graphs[0].rank if graphs else max((abs(x) for x in word), default=1)
    bases = [G.basis() for G in graphs]
    tried = 0
    for d in range(2, max_degree + 1):
        perms = list(itertools.permutations(range(d)))
        for images in itertools.product(perms, repeat=rank):
            tried += 1
            q = FiniteQuotient(d, tuple(images))
            if separates(bases, word, q):
                return q
    return QuotientExhausted(max_degree, tried)
