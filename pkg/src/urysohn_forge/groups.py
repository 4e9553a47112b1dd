"""Finitely generated groups: finite multiplication tables, free abelian Z^n, free F_n.

Words are plain hashable values in normal form:

* finite groups: an element index (``int``)
* ``Z^n``: a tuple of ``n`` integers
* ``F_n``: a reduced tuple of nonzero ints, ``+i`` for the i-th generator and
  ``-i`` for its inverse (generators are numbered from 1)
"""

from __future__ import annotations

import itertools
import re
import string
from typing import Hashable, Iterable, Sequence

from .errors import GroupError

Word = Hashable

LETTERS = string.ascii_lowercase


class GroupSpec:
    """Common interface; subclasses supply the arithmetic."""

    variant = "abstract"
    gen_names: tuple[str, ...] = ()

    @property
    def identity(self) -> Word:
        raise NotImplementedError

    @property
    def generators(self) -> tuple[Word, ...]:
        raise NotImplementedError

    def op(self, u: Word, v: Word) -> Word:
        raise NotImplementedError

    def inv(self, u: Word) -> Word:
        raise NotImplementedError

    def check(self, u: Word) -> Word:
        return u

    def power(self, u: Word, k: int) -> Word:
        base = u if k >= 0 else self.inv(u)
        out = self.identity
        for _ in range(abs(k)):
            out = self.op(out, base)
        return out

    def gen(self, name: str) -> Word:
        try:
            return self.generators[self.gen_names.index(name)]
        except ValueError:
            raise GroupError(f"unknown generator {name!r}") from None

    def ball(self, r: int) -> list[Word]:
        """Elements of word length <= r, in breadth-first order (generators, then inverses)."""
        if r < 0:
            raise GroupError("radius must be nonnegative")
        steps = list(self.generators) + [self.inv(g) for g in self.generators]
        seen = {self.identity}
        out = [self.identity]
        layer = [self.identity]
        for _ in range(r):
            nxt = []
            for u in layer:
                for s in steps:
                    w = self.op(u, s)
                    if w not in seen:
                        seen.add(w)
                        out.append(w)
                        nxt.append(w)
            layer = nxt
        return out

    def parse_word(self, text) -> Word:
        raise NotImplementedError

    def format_word(self, u: Word) -> str:
        return str(u)

    def word_to_json(self, u: Word):
        return u

    def word_from_json(self, data) -> Word:
        return self.parse_word(data)

    @property
    def is_finite(self) -> bool:
        return False


class FiniteGroup(GroupSpec):
    """A finite group given by its multiplication table ``table[x][y] = x*y``."""

    variant = "finite"

    def __init__(
        self,
        elements: Sequence[str],
        table: Sequence[Sequence[int]],
        generators: Sequence[str],
        *,
        parent: "FiniteGroup | None" = None,
        embedding: Sequence[int] | None = None,
    ):
        self.elements = tuple(str(e) for e in elements)
        n = len(self.elements)
        if n == 0:
            raise GroupError("a group has at least one element")
        if len(set(self.elements)) != n:
            raise GroupError("element names must be distinct")
        if len(table) != n or any(len(row) != n for row in table):
            raise GroupError("multiplication table has the wrong shape")
        self.table = tuple(tuple(int(x) for x in row) for row in table)
        if any(not 0 <= x < n for row in self.table for x in row):
            raise GroupError("table entry out of range")
        self._index = {e: i for i, e in enumerate(self.elements)}
        self._check_axioms()
        self.gen_names = tuple(str(g) for g in generators)
        self._gens = tuple(self.element(g) for g in self.gen_names)
        if len(self.closure(self._gens)) != n:
            raise GroupError("generators do not generate the group")
        self.parent = parent
        self.embedding = tuple(embedding) if embedding is not None else None

    def _check_axioms(self) -> None:
        n, t = len(self.elements), self.table
        ids = [e for e in range(n) if all(t[e][x] == x and t[x][e] == x for x in range(n))]
        if not ids:
            raise GroupError("table has no identity")
        self._identity = ids[0]
        inverses = []
        for x in range(n):
            inv = [y for y in range(n) if t[x][y] == self._identity]
            if not inv or t[inv[0]][x] != self._identity:
                raise GroupError(f"element {self.elements[x]} has no inverse")
            inverses.append(inv[0])
        self._inverses = tuple(inverses)
        for x, y, z in itertools.product(range(n), repeat=3):
            if t[t[x][y]][z] != t[x][t[y][z]]:
                raise GroupError("table is not associative")

    # constructors

    @classmethod
    def cyclic(cls, m: int) -> "FiniteGroup":
        if m < 1:
            raise GroupError("order must be positive")
        table = [[(i + j) % m for j in range(m)] for i in range(m)]
        return cls([str(i) for i in range(m)], table, ["1"] if m > 1 else ["0"])

    @classmethod
    def trivial(cls) -> "FiniteGroup":
        return cls.cyclic(1)

    @classmethod
    def from_permutations(cls, perms: Sequence[Sequence[int]], names: Sequence[str] | None = None) -> "FiniteGroup":
        """The permutation group generated by ``perms``; elements named by shortest words."""
        perms = [tuple(p) for p in perms]
        if not perms:
            raise GroupError("need at least one generating permutation")
        deg = len(perms[0])
        if any(sorted(p) != list(range(deg)) for p in perms):
            raise GroupError("generators must be permutations of the same degree")
        names = list(names) if names is not None else list(LETTERS[: len(perms)])
        ident = tuple(range(deg))
        found = {ident: "1"}
        order = [ident]
        frontier = [ident]
        gen_named = list(zip(names, perms))
        while frontier:
            nxt = []
            for h in frontier:
                for nm, p in gen_named:
                    g = tuple(p[h[i]] for i in range(deg))  # p after h
                    if g not in found:
                        found[g] = nm if found[h] == "1" else found[h] + nm
                        order.append(g)
                        nxt.append(g)
            frontier = nxt
        idx = {g: i for i, g in enumerate(order)}
        table = [[idx[tuple(x[y[i]] for i in range(deg))] for y in order] for x in order]
        gens_unique = []
        for nm, p in gen_named:
            if found[p] not in gens_unique:
                gens_unique.append(found[p])
        return cls([found[g] for g in order], table, gens_unique)

    @classmethod
    def direct_product(cls, G: "FiniteGroup", H: "FiniteGroup") -> "FiniteGroup":
        pairs = list(itertools.product(range(len(G)), range(len(H))))
        idx = {p: i for i, p in enumerate(pairs)}
        names = [f"({G.elements[a]},{H.elements[b]})" for a, b in pairs]
        table = [[idx[(G.op(a, c), H.op(b, d))] for (c, d) in pairs] for (a, b) in pairs]
        gens = [names[idx[(g, H.identity)]] for g in G.generators] + [
            names[idx[(G.identity, h)]] for h in H.generators
        ]
        return cls(names, table, list(dict.fromkeys(gens)))

    def subgroup(self, generators: Sequence[str]) -> "FiniteGroup":
        """The subgroup generated by the named elements, remembering its inclusion."""
        gens = [self.element(g) for g in generators]
        members = sorted(self.closure(gens))
        pos = {x: i for i, x in enumerate(members)}
        table = [[pos[self.op(x, y)] for y in members] for x in members]
        gen_names = [self.elements[g] for g in gens] or [self.elements[self.identity]]
        return FiniteGroup(
            [self.elements[x] for x in members], table, gen_names, parent=self, embedding=members
        )

    # arithmetic

    def __len__(self) -> int:
        return len(self.elements)

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def is_finite(self) -> bool:
        return True

    @property
    def identity(self) -> int:
        return self._identity

    @property
    def generators(self) -> tuple[int, ...]:
        return self._gens

    def element(self, name) -> int:
        if isinstance(name, int) and not isinstance(name, bool):
            if 0 <= name < len(self.elements):
                return name
            raise GroupError(f"element index {name} out of range")
        try:
            return self._index[str(name)]
        except KeyError:
            raise GroupError(f"unknown element {name!r}") from None

    def op(self, u: int, v: int) -> int:
        return self.table[self.check(u)][self.check(v)]

    def inv(self, u: int) -> int:
        return self._inverses[self.check(u)]

    def check(self, u) -> int:
        if not isinstance(u, int) or isinstance(u, bool) or not 0 <= u < len(self.elements):
            raise GroupError(f"{u!r} is not an element of this finite group")
        return u

    def closure(self, gens: Iterable[int]) -> set[int]:
        gens = list(gens)
        seen = {self.identity}
        frontier = [self.identity]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = self.table[g][x]
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return seen

    def to_parent(self, u: int) -> int:
        return self.embedding[u] if self.embedding is not None else u

    def parse_word(self, text) -> int:
        return self.element(text)

    def format_word(self, u: int) -> str:
        return self.elements[u]

    def word_to_json(self, u: int) -> str:
        return self.elements[u]

    def to_json(self) -> dict:
        out = {
            "variant": "finite",
            "elements": list(self.elements),
            "table": [list(r) for r in self.table],
            "generators": list(self.gen_names),
        }
        if self.parent is not None:
            out = {
                "variant": "subgroup",
                "parent": self.parent.to_json(),
                "generators": list(self.gen_names),
            }
        return out

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FiniteGroup)
            and self.elements == other.elements
            and self.table == other.table
            and self.gen_names == other.gen_names
        )

    def __hash__(self) -> int:
        return hash((self.elements, self.table, self.gen_names))

    def __repr__(self) -> str:
        return f"FiniteGroup(order={len(self)}, generators={self.gen_names})"


class FreeAbelianGroup(GroupSpec):
    variant = "free_abelian"

    def __init__(self, rank: int):
        if rank < 0:
            raise GroupError("rank must be nonnegative")
        self.rank = rank
        self.gen_names = tuple(LETTERS[i] for i in range(rank))

    @property
    def identity(self) -> tuple[int, ...]:
        return (0,) * self.rank

    @property
    def generators(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(int(i == j) for j in range(self.rank)) for i in range(self.rank))

    def check(self, u) -> tuple[int, ...]:
        if not isinstance(u, tuple) or len(u) != self.rank or not all(
            isinstance(x, int) and not isinstance(x, bool) for x in u
        ):
            raise GroupError(f"{u!r} is not a vector of length {self.rank}")
        return u

    def op(self, u, v):
        u, v = self.check(u), self.check(v)
        return tuple(a + b for a, b in zip(u, v))

    def inv(self, u):
        return tuple(-a for a in self.check(u))

    def parse_word(self, text) -> tuple[int, ...]:
        if isinstance(text, (list, tuple)):
            return self.check(tuple(int(x) for x in text))
        parts = [p for p in re.split(r"[\s,()]+", str(text)) if p]
        return self.check(tuple(int(p) for p in parts))

    def format_word(self, u) -> str:
        return "(" + ",".join(str(x) for x in u) + ")"

    def word_to_json(self, u):
        return list(u)

    def to_json(self) -> dict:
        return {"variant": "free_abelian", "rank": self.rank}

    def __eq__(self, other) -> bool:
        return isinstance(other, FreeAbelianGroup) and other.rank == self.rank

    def __hash__(self) -> int:
        return hash(("free_abelian", self.rank))

    def __repr__(self) -> str:
        return f"FreeAbelianGroup({self.rank})"


_TOKEN = re.compile(r"([A-Za-z])(?:\^(-?\d+))?")


class FreeGroup(GroupSpec):
    variant = "free"

    def __init__(self, rank: int):
        if not 0 <= rank <= len(LETTERS):
            raise GroupError(f"rank must be between 0 and {len(LETTERS)}")
        self.rank = rank
        self.gen_names = tuple(LETTERS[i] for i in range(rank))

    @property
    def identity(self) -> tuple[int, ...]:
        return ()

    @property
    def generators(self) -> tuple[tuple[int, ...], ...]:
        return tuple((i,) for i in range(1, self.rank + 1))

    @staticmethod
    def reduce(letters: Iterable[int]) -> tuple[int, ...]:
        out: list[int] = []
        for x in letters:
            if out and out[-1] == -x:
                out.pop()
            else:
                out.append(x)
        return tuple(out)

    def check(self, u) -> tuple[int, ...]:
        if not isinstance(u, tuple) or not all(
            isinstance(x, int) and x != 0 and abs(x) <= self.rank for x in u
        ):
            raise GroupError(f"{u!r} is not a word over {self.rank} generators")
        if any(u[i] == -u[i + 1] for i in range(len(u) - 1)):
            raise GroupError(f"{u!r} is not reduced")
        return u

    def op(self, u, v):
        return self.reduce(self.check(u) + self.check(v))

    def inv(self, u):
        return tuple(-x for x in reversed(self.check(u)))

    def parse_word(self, text) -> tuple[int, ...]:
        """Parse ``"a^2 b^-1"``, ``"aab"`` or ``"aB"`` (uppercase is the inverse); ``"1"`` is empty."""
        if isinstance(text, (list, tuple)):
            return self.check(self.reduce(int(x) for x in text))
        s = str(text).replace(" ", "").replace("*", "")
        if s in ("", "1", "e"):
            return ()
        letters: list[int] = []
        pos = 0
        while pos < len(s):
            m = _TOKEN.match(s, pos)
            if not m:
                raise GroupError(f"cannot parse word {text!r} at position {pos}")
            ch, exp = m.group(1), int(m.group(2)) if m.group(2) else 1
            i = LETTERS.index(ch.lower()) + 1
            if i > self.rank:
                raise GroupError(f"generator {ch!r} out of range for rank {self.rank}")
            if ch.isupper():
                exp = -exp
            letters.extend([i if exp > 0 else -i] * abs(exp))
            pos = m.end()
        return self.reduce(letters)

    def format_word(self, u) -> str:
        if not u:
            return "1"
        parts = []
        for x, grp in itertools.groupby(u):
            k = len(list(grp))
            name = LETTERS[abs(x) - 1]
            e = k if x > 0 else -k
            parts.append(name if e == 1 else f"{name}^{e}")
        return " ".join(parts)

    def word_to_json(self, u) -> str:
        return self.format_word(u)

    def to_json(self) -> dict:
        return {"variant": "free", "rank": self.rank}

    def __eq__(self, other) -> bool:
        return isinstance(other, FreeGroup) and other.rank == self.rank

    def __hash__(self) -> int:
        return hash(("free", self.rank))

    def __repr__(self) -> str:
        return f"FreeGroup({self.rank})"


def group_op(G: GroupSpec, u: Word, v: Word) -> Word:
    return G.op(u, v)


def group_inv(G: GroupSpec, u: Word) -> Word:
    return G.inv(u)


def ball(G: GroupSpec, r: int) -> list[Word]:
    return G.ball(r)


def group_from_json(data) -> GroupSpec:
    try:
        variant = data["variant"]
    except (KeyError, TypeError) as exc:
        raise GroupError("group JSON needs a 'variant'") from exc
    if variant == "free":
        return FreeGroup(int(data["rank"]))
    if variant == "free_abelian":
        return FreeAbelianGroup(int(data["rank"]))
    if variant == "cyclic":
        return FiniteGroup.cyclic(int(data["order"]))
    if variant == "permutation":
        return FiniteGroup.from_permutations(data["generators"], data.get("names"))
    if variant == "finite":
        return FiniteGroup(data["elements"], data["table"], data["generators"])
    if variant == "subgroup":
        parent = group_from_json(data["parent"])
        if not isinstance(parent, FiniteGroup):
            raise GroupError("subgroups are supported for finite parents only")
        return parent.subgroup(data["generators"])
    raise GroupError(f"unknown group variant {variant!r}")


def small_groups(max_order: int = 6) -> list[FiniteGroup]:
    """One representative of every group of order <= 6 (up to isomorphism)."""
    out = [FiniteGroup.cyclic(m) for m in range(1, min(max_order, 6) + 1)]
    if max_order >= 4:
        out.append(FiniteGroup.from_permutations([(1, 0, 3, 2), (2, 3, 0, 1)]))  # Klein four
    if max_order >= 6:
        out.append(FiniteGroup.from_permutations([(1, 0, 2), (0, 2, 1)]))  # S3
    if max_order > 6:
        raise GroupError("small_groups only knows orders up to 6")
    return sorted(out, key=len)
