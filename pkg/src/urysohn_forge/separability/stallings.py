"""Stallings graphs of finitely generated subgroups of free groups.

Edge labels are nonzero ints: ``+i`` for the i-th generator, ``-i`` for its
inverse. Every edge ``u -x-> v`` is stored together with ``v -(-x)-> u``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Sequence

from ..groups import FreeGroup


@dataclass(frozen=True)
class StallingsGraph:
    rank: int
    n_vertices: int
    base: int
    out: tuple[dict[int, int], ...]  # out[v][label] = w

    def edges(self) -> list[tuple[int, int, int]]:
        """Positively labelled edges ``(u, label, v)``."""
        return sorted((u, x, v) for u in range(self.n_vertices) for x, v in self.out[u].items() if x > 0)

    def canonical(self) -> tuple:
        return (self.rank, self.n_vertices, tuple(self.edges()))

    def is_folded(self) -> bool:
        # out[v] is a dict, so outgoing labels are distinct; incoming is its mirror
        return all(self.out[w].get(-x) == v for v in range(self.n_vertices) for x, w in self.out[v].items())

    def read(self, word: Sequence[int], start: int | None = None) -> int | None:
        v = self.base if start is None else start
        for x in word:
            v = self.out[v].get(x)
            if v is None:
                return None
        return v

    def basis(self) -> list[tuple[int, ...]]:
        """A free basis: one loop per edge outside a breadth-first spanning tree."""
        F = FreeGroup(self.rank)
        path: dict[int, tuple[int, ...]] = {self.base: ()}
        tree = set()
        queue = [self.base]
        for v in queue:
            for x in sorted(self.out[v], key=lambda t: (abs(t), -t)):
                w = self.out[v][x]
                if w not in path:
                    path[w] = path[v] + (x,)
                    tree.add((v, x))
                    tree.add((w, -x))
                    queue.append(w)
        out = []
        for u, x, v in self.edges():
            if (u, x) in tree:
                continue
            out.append(F.reduce(path[u] + (x,) + F.inv(path[v])))
        return out

    def to_json(self) -> dict:
        return {
            "rank": self.rank,
            "vertices": self.n_vertices,
            "base": self.base,
            "edges": [list(e) for e in self.edges()],
        }

    @classmethod
    def from_json(cls, data) -> "StallingsGraph":
        n = int(data["vertices"])
        out: list[dict[int, int]] = [{} for _ in range(n)]
        for u, x, v in data["edges"]:
            out[u][x] = v
            out[v][-x] = u
        return cls(int(data["rank"]), n, int(data.get("base", 0)), tuple(out))

    def to_dot(self) -> str:
        F = FreeGroup(self.rank)
        lines = ["digraph stallings {", f"  {self.base} [shape=doublecircle];"]
        for u, x, v in self.edges():
            lines.append(f'  {u} -> {v} [label="{F.gen_names[x - 1]}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def _fold(edges: set[tuple[int, int, int]], n: int, rng: random.Random | None) -> tuple[list[int], set]:
    parent = list(range(n))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    while True:
        merged = False
        order = sorted(edges)
        if rng is not None:
            rng.shuffle(order)
        seen: dict[tuple[int, int], int] = {}
        for u, x, v in order:
            u, v = find(u), find(v)
            for a, lab, b in ((u, x, v), (v, -x, u)):
                c = seen.get((a, lab))
                if c is None:
                    seen[(a, lab)] = b
                elif c != b:
                    lo, hi = min(c, b), max(c, b)
                    parent[hi] = lo
                    merged = True
                    break
            if merged:
                break
        edges = {(find(u), x, find(v)) for u, x, v in edges}
        if not merged:
            return parent, edges


def stallings_graph(rank: int, words: Iterable[Sequence[int]], rng: random.Random | None = None) -> StallingsGraph:
    """Fold the wedge of loops spelling ``words`` and prune it to the core at the base.

    ``rng`` randomizes the fold order; the result does not depend on it.
    """
    F = FreeGroup(rank)
    edges: set[tuple[int, int, int]] = set()
    n = 1
    for w in words:
        w = F.check(F.reduce(w))
        if not w:
            continue
        prev = 0
        for i, x in enumerate(w):
            nxt = 0 if i == len(w) - 1 else n
            if nxt:
                n += 1
            if x > 0:
                edges.add((prev, x, nxt))
            else:
                edges.add((nxt, -x, prev))
            prev = nxt
    parent, edges = _fold(edges, n, rng)
    verts = {parent_root(parent, v) for v in range(n)}
    # prune hanging trees, keeping the base
    alive = set(verts)
    while True:
        deg = {v: 0 for v in alive}
        for u, x, v in edges:
            if u in alive and v in alive:
                deg[u] += 1
                deg[v] += 1
        dead = {v for v, d in deg.items() if d <= 1 and v != 0}
        if not dead:
            break
        alive -= dead
    edges = {(u, x, v) for u, x, v in edges if u in alive and v in alive}
    # canonical numbering: breadth first from the base, labels in order a, a^-1, b, ...
    adj: dict[int, list[tuple[int, int]]] = {v: [] for v in alive}
    for u, x, v in edges:
        adj[u].append((x, v))
        adj[v].append((-x, u))
    number = {0: 0}
    queue = [0]
    for v in queue:
        for x, w in sorted(adj[v], key=lambda t: (abs(t[0]), -t[0])):
            if w not in number:
                number[w] = len(number)
                queue.append(w)
    out: list[dict[int, int]] = [{} for _ in range(len(number))]
    for u, x, v in edges:
        out[number[u]][x] = number[v]
        out[number[v]][-x] = number[u]
    return StallingsGraph(rank, len(number), 0, tuple(out))


def parent_root(parent: list[int], v: int) -> int:
    while parent[v] != v:
        v = parent[v]
    return v


def subgroup_member(G: StallingsGraph, word: Sequence[int]) -> bool:
    """``word`` (reduced) lies in the subgroup iff it reads a loop at the base."""
    return G.read(FreeGroup(G.rank).reduce(word)) == G.base
