"""Subgroups of Z^n: Hermite normal form, membership, separating moduli."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

from ..errors import ForgeError, PreconditionError

Vector = tuple[int, ...]


def hnf(vectors: Sequence[Sequence[int]], n: int) -> list[Vector]:
    """Row-style Hermite normal form of the row span (zero rows dropped).

    Pivots are positive and strictly increase in column; entries above a pivot
    lie in ``[0, pivot)``. The result depends only on the subgroup.
    """
    A = [list(v) for v in vectors if any(v)]
    if any(len(v) != n for v in A):
        raise ForgeError(f"vectors must have length {n}")
    r = 0
    for col in range(n):
        while True:
            nz = [i for i in range(r, len(A)) if A[i][col] != 0]
            if not nz:
                break
            piv = min(nz, key=lambda i: abs(A[i][col]))
            A[r], A[piv] = A[piv], A[r]
            clean = True
            for i in range(r + 1, len(A)):
                if A[i][col]:
                    q = A[i][col] // A[r][col]
                    A[i] = [a - q * b for a, b in zip(A[i], A[r])]
                    clean = clean and A[i][col] == 0
            if clean:
                break
        if r < len(A) and A[r][col] != 0:
            if A[r][col] < 0:
                A[r] = [-a for a in A[r]]
            p = A[r][col]
            for i in range(r):
                q = A[i][col] // p
                if q:
                    A[i] = [a - q * b for a, b in zip(A[i], A[r])]
            r += 1
    return [tuple(row) for row in A[:r]]


@dataclass(frozen=True)
class Lattice:
    rank: int
    basis: tuple[Vector, ...]
    _hnf: tuple[Vector, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        basis = tuple(tuple(int(x) for x in v) for v in self.basis)
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "_hnf", tuple(hnf(basis, self.rank)))

    @property
    def hnf(self) -> tuple[Vector, ...]:
        return self._hnf

    def to_json(self) -> dict:
        return {"rank": self.rank, "basis": [list(v) for v in self.basis]}

    @classmethod
    def from_json(cls, data) -> "Lattice":
        basis = [tuple(v) for v in data["basis"]]
        rank = int(data.get("rank", len(basis[0]) if basis else 0))
        return cls(rank, tuple(basis))


def lattice_hnf(L: Lattice) -> list[Vector]:
    return list(L.hnf)


def lattice_member(L: Lattice, v: Sequence[int]) -> bool:
    """Exact membership by back-substitution against the Hermite form."""
    if len(v) != L.rank:
        raise ForgeError(f"vector has length {len(v)}, lattice lives in Z^{L.rank}")
    v = list(v)
    for row in L.hnf:
        col = next(i for i, x in enumerate(row) if x)
        if any(v[:col]):
            return False
        q, rem = divmod(v[col], row[col])
        if rem:
            return False
        v = [a - q * b for a, b in zip(v, row)]
    return not any(v)


def lattice_separating_quotient(L: Lattice, v: Sequence[int]) -> int:
    """Least ``m >= 2`` with ``v`` outside ``L + mZ^n``."""
    if lattice_member(L, v):
        raise PreconditionError("vector lies in the lattice; nothing to separate")
    n = L.rank
    for m in itertools.count(2):
        widened = Lattice(n, L.basis + tuple(tuple(m * (i == j) for j in range(n)) for i in range(n)))
        if not lattice_member(widened, v):
            return m
    raise AssertionError("unreachable")


def image_mod(L: Lattice, m: int) -> set[Vector]:
    """The image of ``L`` in ``(Z/m)^n``, by closure under adding generators."""
    gens = [tuple(x % m for x in b) for b in L.basis]
    zero = (0,) * L.rank
    seen = {zero}
    frontier = [zero]
    while frontier:
        nxt = []
        for u in frontier:
            for g in gens:
                w = tuple((a + b) % m for a, b in zip(u, g))
                if w not in seen:
                    seen.add(w)
                    nxt.append(w)
        frontier = nxt
    return seen


def verify_lattice_quotient(L: Lattice, v: Sequence[int], m: int) -> bool:
    return m >= 2 and tuple(x % m for x in v) not in image_mod(L, m)
