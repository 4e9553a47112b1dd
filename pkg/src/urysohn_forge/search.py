"""Bounded exhaustive search for finite superspaces carrying full isometries.

Given a finite metric space ``A`` and partial isometries of ``A``, look for a
finite ``B`` containing ``A`` and bijective isometries of ``B`` extending each
of them. The search fixes ``|B|`` (smallest first), backtracks over the
permutations, and only then fills in the unknown distances, one orbit of
point pairs at a time, against the triangle inequality.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .actions import AgreementConstraint, FiniteAction, validate_action
from .errors import ForgeError, NotAPartialIsometryError
from .groups import FreeAbelianGroup
from .metric import FinMetric, as_rat, expanded_value_set, fresh_id, validate_metric


@dataclass
class SearchBudget:
    max_points: int = 12
    candidate_distances: tuple[Fraction, ...] | None = None  # None: derive from A
    max_nodes: int = 2_000_000

    def __post_init__(self):
        if self.max_points < 1 or self.max_nodes < 1:
            raise ForgeError("budget bounds must be positive")
        if self.candidate_distances is not None:
            vals = tuple(sorted({as_rat(v) for v in self.candidate_distances}))
            if not vals:
                raise ForgeError("candidate distance set is empty")
            if vals[0] <= 0:
                raise ForgeError("candidate distances must be positive")
            self.candidate_distances = vals


@dataclass(frozen=True)
class Exhausted:
    """No witness found. ``complete`` means every size up to ``max_points`` was fully explored."""

    reason: str
    nodes: int
    sizes_tried: tuple[int, ...]
    complete: bool

    def to_json(self) -> dict:
        return {
            "exhausted": True,
            "reason": self.reason,
            "nodes": self.nodes,
            "sizes_tried": list(self.sizes_tried),
            "complete": self.complete,
        }


@dataclass(frozen=True)
class Witness:
    space: FinMetric
    fulls: tuple[dict[str, str], ...]
    nodes: int

    def to_json(self) -> dict:
        return {"B": self.space.to_json(), "fulls": [dict(f) for f in self.fulls], "nodes": self.nodes}


def default_candidates(A: FinMetric) -> tuple[Fraction, ...]:
    """``Ex(A)`` together with pairwise sums of its members, up to ``2 diam(A)``."""
    if len(A) < 2:
        return (Fraction(1),)
    ex = expanded_value_set(A, A.points)
    top = 2 * ex[-1]
    vals = {s + t for s in ex for t in ex if 0 < s + t <= top}
    return tuple(sorted(vals))


class _OutOfNodes(Exception):
    pass


class _Engine:
    def __init__(self, A: FinMetric, partials: list[dict[int, int]], cands, max_nodes, commuting):
        self.A = A
        self.partials = partials
        self.cands = cands
        self.max_nodes = max_nodes
        self.commuting = commuting
        self.nodes = 0

    def tick(self):
        self.nodes += 1
        if self.nodes > self.max_nodes:
            raise _OutOfNodes

    def run(self, N: int):
        """First witness with exactly ``N`` points, or None."""
        nA = len(self.A)
        k = len(self.partials)
        g = [[None] * N for _ in range(k)]
        used = [[False] * N for _ in range(k)]
        for i, p in enumerate(self.partials):
            for x, y in p.items():
                g[i][x] = y
                used[i][y] = True
        order = [(x, i) for x in range(N) for i in range(k) if g[i][x] is None]
        touched_value = [False] * N
        for p in self.partials:
            for y in p.values():
                touched_value[y] = True
        Arows = self.A.matrix

        def consistent(i, x, y) -> bool:
            """Checks involving the tentative assignment ``g_i(x) = y`` (already stored)."""
            gi = g[i]
            if x < nA and y < nA:
                for z in range(nA):
                    w = gi[z]
                    if w is not None and w < nA and Arows[x][z] != Arows[y][w]:
                        return False
            if self.commuting:
                for j in range(k):
                    if j == i:
                        continue
                    gj = g[j]
                    a = gj[x]
                    if a is not None and gi[a] is not None and gj[y] is not None and gi[a] != gj[y]:
                        return False
                    for z in range(N):
                        if gj[z] == x:
                            c = gi[z]
                            if c is not None and gj[c] is not None and gj[c] != y:
                                return False
            return True

        def rec(pos: int):
            if pos == len(order):
                return self.fill(N, g)
            self.tick()
            x, i = order[pos]
            # untouched new points above x are interchangeable: try only the lowest
            lowest_fresh = None
            for y in range(N):
                if used[i][y]:
                    continue
                if y >= nA and y > x and not touched_value[y]:
                    if lowest_fresh is not None:
                        continue
                    lowest_fresh = y
                g[i][x] = y
                if not consistent(i, x, y):
                    g[i][x] = None
                    continue
                used[i][y] = True
                was = touched_value[y]
                touched_value[y] = True
                found = rec(pos + 1)
                if found is not None:
                    return found
                touched_value[y] = was
                used[i][y] = False
                g[i][x] = None
            return None

        return rec(0)

    def fill(self, N: int, g):
        """Assign distances to pair orbits; returns (matrix, perms) or None."""
        self.tick()
        nA = len(self.A)
        perms = [tuple(gi) for gi in g]
        parent = {}

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        pairs = list(itertools.combinations(range(N), 2))
        for pr in pairs:
            parent[pr] = pr
        for p in perms:
            for x, y in pairs:
                a, b = p[x], p[y]
                q = (a, b) if a < b else (b, a)
                ra, rb = find((x, y)), find(q)
                if ra != rb:
                    parent[max(ra, rb)] = min(ra, rb)
        orbits: dict[tuple[int, int], list[tuple[int, int]]] = {}
        for pr in pairs:
            orbits.setdefault(find(pr), []).append(pr)
        D = [[None] * N for _ in range(N)]
        for i in range(N):
            D[i][i] = Fraction(0)
        free = []
        for root in sorted(orbits):
            members = orbits[root]
            fixed = {self.A.di(x, y) for x, y in members if x < nA and y < nA}
            if len(fixed) > 1:
                return None
            if fixed:
                (val,) = fixed
                for x, y in members:
                    D[x][y] = D[y][x] = val
            else:
                free.append(members)
        # the fixed part must already satisfy the triangle inequality
        for members in orbits.values():
            for x, y in members:
                if D[x][y] is not None and not self._triangles_ok(D, x, y, N):
                    return None

        def assign(t: int):
            if t == len(free):
                return [row[:] for row in D]
            self.tick()
            members = free[t]
            for c in self.cands:
                for x, y in members:
                    D[x][y] = D[y][x] = c
                if all(self._triangles_ok(D, x, y, N) for x, y in members):
                    out = assign(t + 1)
                    if out is not None:
                        return out
                for x, y in members:
                    D[x][y] = D[y][x] = None
            return None

        mat = assign(0)
        if mat is None:
            return None
        return mat, perms

    @staticmethod
    def _triangles_ok(D, x, y, N) -> bool:
        dxy = D[x][y]
        Dx, Dy = D[x], D[y]
        for z in range(N):
            dxz, dyz = Dx[z], Dy[z]
            if dxz is None or dyz is None:
                continue
            if dxy > dxz + dyz or dxz > dxy + dyz or dyz > dxy + dxz:
                return False
        return True


def _index_partials(A: FinMetric, partials: Iterable[Mapping[str, str]]) -> list[dict[int, int]]:
    out = []
    for p in partials:
        for x, y in p.items():
            if x not in A or y not in A:
                raise NotAPartialIsometryError(f"{x!r} -> {y!r} is not a map within A")
        if not A.is_isometric_map(p):
            raise NotAPartialIsometryError("partial map is not an isometry of A")
        out.append({A.index(x): A.index(y) for x, y in p.items()})
    return out


def _search(A: FinMetric, idx_partials, budget: SearchBudget, commuting: bool):
    cands = budget.candidate_distances or default_candidates(A)
    engine = _Engine(A, idx_partials, cands, budget.max_nodes, commuting)
    tried = []
    for N in range(max(len(A), 1), budget.max_points + 1):
        tried.append(N)
        try:
            found = engine.run(N)
        except _OutOfNodes:
            return Exhausted("max_nodes", engine.nodes, tuple(tried), False), None
        if found is not None:
            return found, engine.nodes
    return Exhausted("max_points", engine.nodes, tuple(tried), True), None


def _new_ids(A: FinMetric, N: int) -> list[str]:
    taken = set(A.points)
    ids = list(A.points)
    for j in range(N - len(A)):
        nid = fresh_id(f"n{j}", taken)
        taken.add(nid)
        ids.append(nid)
    return ids


def solecki_extend(A: FinMetric, partials: Sequence[Mapping[str, str]], budget: SearchBudget | None = None):
    """Smallest ``B`` (within budget) with full isometries extending every partial isometry.

    Returns a :class:`Witness` or an :class:`Exhausted` report.
    """
    budget = budget or SearchBudget()
    if validate_metric(A) is not None:
        raise ForgeError("A is not a metric space")
    idx = _index_partials(A, partials)
    found, nodes = _search(A, idx, budget, commuting=False)
    if isinstance(found, Exhausted):
        return found
    mat, perms = found
    ids = _new_ids(A, len(mat))
    B = FinMetric(ids, mat)
    fulls = tuple({ids[i]: ids[p[i]] for i in range(len(ids))} for p in perms)
    return Witness(B, fulls, nodes)


def approximate_action(
    group: FreeAbelianGroup,
    A: FinMetric,
    constraint: AgreementConstraint,
    budget: SearchBudget | None = None,
):
    """A commuting tuple of isometries of some ``B`` containing ``A`` meeting ``constraint``.

    Returns ``(FiniteAction, nodes)`` on success or an :class:`Exhausted` report.
    """
    budget = budget or SearchBudget()
    if not isinstance(group, FreeAbelianGroup):
        raise ForgeError("approximate_action is implemented for free abelian groups")
    partials = [dict(constraint.required.get(name, {})) for name in group.gen_names]
    idx = _index_partials(A, partials)
    for (i, p), (j, q) in itertools.combinations(enumerate(idx), 2):
        for x in set(p) & set(q):
            a, b = p[x], q[x]
            if a in q and b in p and q[a] != p[b]:
                raise ForgeError(
                    f"required images of generators {group.gen_names[i]} and "
                    f"{group.gen_names[j]} do not commute at {A.points[x]!r}"
                )
    found, nodes = _search(A, idx, budget, commuting=True)
    if isinstance(found, Exhausted):
        return found
    mat, perms = found
    ids = _new_ids(A, len(mat))
    act = FiniteAction(group, FinMetric(ids, mat), tuple(perms))
    if validate_action(act) is not None:
        raise AssertionError("search produced an invalid action")
    return act, nodes


def verify_witness(A: FinMetric, partials: Sequence[Mapping[str, str]], w: Witness) -> bool:
    """Independent re-check of a search result."""
    B = w.space
    if validate_metric(B) is not None:
        return False
    if B.restrict(A.points) != A:
        return False
    for p, f in zip(partials, w.fulls):
        if sorted(f) != sorted(B.points) or sorted(f.values()) != sorted(B.points):
            return False
        if not B.is_isometric_map(f):
            return False
        if any(f[x] != y for x, y in p.items()):
            return False
    return len(w.fulls) == len(partials)
