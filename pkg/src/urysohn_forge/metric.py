"""Finite metric spaces with exact rational distances.

Every distance is a :class:`fractions.Fraction`; there is no floating point
anywhere in the package. Points carry opaque string ids that constructions
keep stable, minting fresh ids only for genuinely new points.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import (
    ForgeError,
    KatetovError,
    MalformedMetricError,
    MetricAxiomError,
    UnknownPointError,
)

Rat = Fraction


def as_rat(value) -> Fraction:
    """Coerce ints, Fractions, ``"p/q"`` strings and ``[p, q]`` pairs to a Fraction."""
    if isinstance(value, bool):
        raise ForgeError(f"not a rational number: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ForgeError(f"not a rational number: {value!r}") from exc
    if isinstance(value, (list, tuple)) and len(value) == 2:
        num, den = value
        if isinstance(num, int) and isinstance(den, int) and not isinstance(num, bool) and den != 0:
            return Fraction(num, den)
    raise ForgeError(f"not an exact rational: {value!r}")


def rat_to_json(q: Fraction) -> list[int]:
    return [q.numerator, q.denominator]


def fresh_id(base: str, taken) -> str:
    """Return ``base`` if unused, else ``base.1``, ``base.2``, ..."""
    if base not in taken:
        return base
    k = 1
    while f"{base}.{k}" in taken:
        k += 1
    return f"{base}.{k}"


class FinMetric:
    """A finite metric space: an ordered tuple of point ids and a distance matrix.

    The constructor only checks the *shape* of the data. Use
    :func:`validate_metric` to check the metric axioms.
    """

    __slots__ = ("points", "_index", "_rows")

    def __init__(self, points: Sequence[str], rows: Sequence[Sequence]):
        points = tuple(str(p) for p in points)
        if len(set(points)) != len(points):
            raise MalformedMetricError(f"duplicate point ids in {points}")
        if len(rows) != len(points) or any(len(row) != len(points) for row in rows):
            raise MalformedMetricError(
                f"distance matrix shape does not match {len(points)} points"
            )
        self.points = points
        self._index = {p: i for i, p in enumerate(points)}
        self._rows = tuple(tuple(as_rat(v) for v in row) for row in rows)

    # construction helpers

    @classmethod
    def from_pairs(cls, points: Sequence[str], dist: Mapping[tuple[str, str], object]) -> "FinMetric":
        """Build from a mapping of unordered pairs; missing pairs are an error."""
        points = [str(p) for p in points]
        n = len(points)
        rows = [[Fraction(0)] * n for _ in range(n)]
        for i, j in itertools.combinations(range(n), 2):
            key = (points[i], points[j])
            if key in dist:
                v = dist[key]
            elif key[::-1] in dist:
                v = dist[key[::-1]]
            else:
                raise MalformedMetricError(f"no distance given for pair {key}")
            rows[i][j] = rows[j][i] = as_rat(v)
        return cls(points, rows)

    @classmethod
    def from_upper(cls, points: Sequence[str], upper: Sequence) -> "FinMetric":
        """Build from the row-major strict upper triangle (the JSON form)."""
        n = len(points)
        if len(upper) != n * (n - 1) // 2:
            raise MalformedMetricError(
                f"expected {n * (n - 1) // 2} upper-triangle entries, got {len(upper)}"
            )
        rows = [[Fraction(0)] * n for _ in range(n)]
        it = iter(upper)
        for i, j in itertools.combinations(range(n), 2):
            rows[i][j] = rows[j][i] = as_rat(next(it))
        return cls(points, rows)

    @classmethod
    def single(cls, point: str = "p0") -> "FinMetric":
        return cls([point], [[0]])

    # access

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __contains__(self, point) -> bool:
        return point in self._index

    def index(self, point: str) -> int:
        try:
            return self._index[point]
        except KeyError:
            raise UnknownPointError(f"unknown point id {point!r}") from None

    def d(self, x: str, y: str) -> Fraction:
        return self._rows[self.index(x)][self.index(y)]

    def di(self, i: int, j: int) -> Fraction:
        return self._rows[i][j]

    @property
    def matrix(self) -> tuple[tuple[Fraction, ...], ...]:
        return self._rows

    def diam(self, subset: Iterable[str] | None = None) -> Fraction:
        idx = range(len(self)) if subset is None else [self.index(p) for p in subset]
        idx = list(idx)
        return max((self._rows[i][j] for i in idx for j in idx), default=Fraction(0))

    def values(self, subset: Iterable[str] | None = None) -> set[Fraction]:
        """Positive distances occurring between points of ``subset``."""
        idx = list(range(len(self))) if subset is None else [self.index(p) for p in subset]
        return {self._rows[i][j] for i, j in itertools.combinations(idx, 2)}

    def restrict(self, subset: Iterable[str]) -> "FinMetric":
        subset = list(subset)
        idx = [self.index(p) for p in subset]
        return FinMetric(subset, [[self._rows[i][j] for j in idx] for i in idx])

    def relabel(self, mapping: Mapping[str, str]) -> "FinMetric":
        return FinMetric([mapping.get(p, p) for p in self.points], self._rows)

    def is_isometric_map(self, mapping: Mapping[str, str], target: "FinMetric | None" = None) -> bool:
        """True iff ``mapping`` (into ``target``, default self) is injective and distance-preserving."""
        target = self if target is None else target
        if len(set(mapping.values())) != len(mapping):
            return False
        items = list(mapping.items())
        for (x, fx), (y, fy) in itertools.combinations(items, 2):
            if self.d(x, y) != target.d(fx, fy):
                return False
        return True

    # comparison / serialization

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FinMetric)
            and self.points == other.points
            and self._rows == other._rows
        )

    def __hash__(self) -> int:
        return hash((self.points, self._rows))

    def __repr__(self) -> str:
        return f"FinMetric({len(self)} points)"

    def to_json(self) -> dict:
        n = len(self)
        return {
            "points": list(self.points),
            "dist": [rat_to_json(self._rows[i][j]) for i, j in itertools.combinations(range(n), 2)],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "FinMetric":
        try:
            points = data["points"]
            upper = data["dist"]
        except (KeyError, TypeError) as exc:
            raise MalformedMetricError("space JSON needs 'points' and 'dist'") from exc
        return cls.from_upper(points, upper)


@dataclass(frozen=True)
class MetricViolation:
    axiom: str  # "zero-diagonal" | "symmetry" | "positivity" | "triangle"
    witness: tuple[str, ...]

    def to_json(self) -> dict:
        return {"axiom": self.axiom, "witness": list(self.witness)}


def validate_metric(M: FinMetric) -> MetricViolation | None:
    """Return ``None`` when ``M`` is a metric, else the first violation in point order.

    A triangle witness ``(x, y, z)`` means ``d(x, z) > d(x, y) + d(y, z)``.
    """
    rows, pts, n = M.matrix, M.points, len(M)
    for i in range(n):
        if rows[i][i] != 0:
            return MetricViolation("zero-diagonal", (pts[i],))
    for i, j in itertools.combinations(range(n), 2):
        if rows[i][j] != rows[j][i]:
            return MetricViolation("symmetry", (pts[i], pts[j]))
    for i, j in itertools.combinations(range(n), 2):
        if rows[i][j] <= 0:
            return MetricViolation("positivity", (pts[i], pts[j]))
    for i in range(n):
        ri = rows[i]
        for j in range(n):
            dij = ri[j]
            rj = rows[j]
            for k in range(n):
                if ri[k] > dij + rj[k]:
                    return MetricViolation("triangle", (pts[i], pts[j], pts[k]))
    return None


def require_metric(M: FinMetric, what: str = "space") -> FinMetric:
    v = validate_metric(M)
    if v is not None:
        raise MetricAxiomError(f"{what} is not a metric: {v.axiom} at {v.witness}", v)
    return M


def _check_katetov_args(M: FinMetric, r: Mapping[str, object]) -> dict[str, Fraction]:
    out = {}
    for a, v in r.items():
        if a not in M:
            raise UnknownPointError(f"distance prescribed to unknown point {a!r}")
        q = as_rat(v)
        if q <= 0:
            raise KatetovError(f"prescribed distance to {a!r} must be positive, got {q}")
        out[a] = q
    return out


def katetov_check(M: FinMetric, r: Mapping[str, object]) -> bool:
    """True iff ``r`` (defined on a subset of ``M``) is an admissible one-point extension."""
    r = _check_katetov_args(M, r)
    for (a, ra), (b, rb) in itertools.combinations(r.items(), 2):
        dab = M.d(a, b)
        if abs(ra - rb) > dab or dab > ra + rb:
            return False
    return True


def extend_by_katetov(M: FinMetric, r: Mapping[str, object], new_id: str | None = None) -> tuple[FinMetric, str]:
    """Adjoin one point realizing ``r``; other distances are shortest paths through ``dom(r)``.

    Returns the new space and the id of the new point.
    """
    r = _check_katetov_args(M, r)
    if not r:
        raise KatetovError("cannot complete a one-point extension over the empty set")
    if not katetov_check(M, r):
        raise KatetovError("prescribed distances violate the triangle inequality")
    new_id = fresh_id(new_id or f"p{len(M)}", M._index)
    row = []
    for z in M.points:
        if z in r:
            row.append(r[z])
        else:
            row.append(min(ra + M.d(a, z) for a, ra in r.items()))
    return append_point(M, new_id, row), new_id


def append_point(M: FinMetric, new_id: str, row: Sequence[Fraction]) -> FinMetric:
    rows = [list(old) + [row[i]] for i, old in enumerate(M.matrix)]
    rows.append(list(row) + [Fraction(0)])
    return FinMetric(list(M.points) + [new_id], rows)


def expanded_value_set(M: FinMetric, A: Sequence[str]) -> list[Fraction]:
    """All sums of distances occurring in ``A`` that do not exceed ``diam(A)``, with 0."""
    A = list(A)
    if not A:
        raise ForgeError("expanded value set of an empty subset is undefined")
    diam = M.diam(A)
    steps = sorted(M.values(A))
    reached = {Fraction(0)}
    frontier = [Fraction(0)]
    while frontier:
        nxt = []
        for s in frontier:
            for v in steps:
                t = s + v
                if t > diam:
                    break
                if t not in reached:
                    reached.add(t)
                    nxt.append(t)
        frontier = nxt
    return sorted(reached)


def truncate_metric(M: FinMetric, A: Sequence[str]) -> FinMetric:
    """Round every distance up into ``Ex(A)``, saturating at ``diam(A)``.

    The result depends only on the original distance, so any isometry of ``M``
    is an isometry of the result; it agrees with ``M`` on ``A``.
    """
    A = list(A)
    ex = expanded_value_set(M, A)
    diam = ex[-1]
    if diam == 0 and len(M) > 1:
        raise ForgeError("truncation over a one-point subset collapses every distance to 0")

    def up(t: Fraction) -> Fraction:
        if t > diam:
            return diam
        return next(s for s in ex if s >= t)

    cache: dict[Fraction, Fraction] = {}
    rows = []
    for row in M.matrix:
        out = []
        for t in row:
            if t not in cache:
                cache[t] = up(t)
            out.append(cache[t])
        rows.append(out)
    return FinMetric(M.points, rows)


@dataclass(frozen=True)
class Amalgam:
    """A glued space plus the embeddings of the two factors (id -> id)."""

    space: FinMetric
    embed_x: dict[str, str]
    embed_y: dict[str, str]


def _merge_ids(first: Sequence[str], second: Sequence[str]) -> dict[str, str]:
    taken = set(first)
    out = {}
    for p in second:
        q = fresh_id(p, taken)
        taken.add(q)
        out[p] = q
    return out


def free_amalgam(
    X: FinMetric,
    Y: FinMetric,
    B: FinMetric,
    b_into_x: Mapping[str, str] | None = None,
    b_into_y: Mapping[str, str] | None = None,
) -> Amalgam:
    """Glue ``X`` and ``Y`` along ``B``; cross distances are shortest paths through ``B``.

    The embeddings default to the identity on ids. Result points are ``X``'s
    points (ids kept) followed by ``Y \\ B`` (ids kept unless they clash).
    """
    if len(B) == 0:
        raise ForgeError("free amalgamation over an empty subspace; use disjoint_sum")
    bx = dict(b_into_x) if b_into_x is not None else {b: b for b in B.points}
    by = dict(b_into_y) if b_into_y is not None else {b: b for b in B.points}
    for name, emb, host in (("X", bx, X), ("Y", by, Y)):
        if set(emb) != set(B.points):
            raise ForgeError(f"embedding of B into {name} must be defined on every point of B")
        for b, img in emb.items():
            if img not in host:
                raise UnknownPointError(f"B point {b!r} maps to unknown {name} point {img!r}")
        if not B.is_isometric_map(emb, host):
            raise ForgeError(f"embedding of B into {name} is not isometric")

    y_to_b = {v: k for k, v in by.items()}
    y_rest = [y for y in Y.points if y not in y_to_b]
    rename = _merge_ids(X.points, y_rest)

    points = list(X.points) + [rename[y] for y in y_rest]
    embed_x = {x: x for x in X.points}
    embed_y = {y: (bx[y_to_b[y]] if y in y_to_b else rename[y]) for y in Y.points}

    n, nx = len(points), len(X)
    rows = [[Fraction(0)] * n for _ in range(n)]
    for i in range(nx):
        for j in range(nx):
            rows[i][j] = X.di(i, j)
    inv_y = {v: k for k, v in embed_y.items()}
    for i in range(n):
        for j in range(nx, n):
            if i >= nx:
                rows[i][j] = Y.d(inv_y[points[i]], inv_y[points[j]])
            else:
                x, y = points[i], inv_y[points[j]]
                rows[i][j] = min(X.d(x, bx[b]) + Y.d(by[b], y) for b in B.points)
            rows[j][i] = rows[i][j]
    return Amalgam(FinMetric(points, rows), embed_x, embed_y)


def sum_distance(X: FinMetric, Y: FinMetric) -> Fraction:
    """Cross distance used by :func:`disjoint_sum`: the larger diameter, or 1 when both are single points."""
    c = max(X.diam(), Y.diam())
    return c if c > 0 else Fraction(1)


def disjoint_sum(X: FinMetric, Y: FinMetric) -> Amalgam:
    """Put ``X`` and ``Y`` side by side at a constant cross distance."""
    if len(X) == 0 or len(Y) == 0:
        raise ForgeError("disjoint_sum needs two nonempty spaces")
    c = sum_distance(X, Y)
    rename = _merge_ids(X.points, Y.points)
    points = list(X.points) + [rename[y] for y in Y.points]
    nx, n = len(X), len(X) + len(Y)
    rows = [[c] * n for _ in range(n)]
    for i in range(nx):
        for j in range(nx):
            rows[i][j] = X.di(i, j)
    for i in range(len(Y)):
        for j in range(len(Y)):
            rows[nx + i][nx + j] = Y.di(i, j)
    return Amalgam(FinMetric(points, rows), {x: x for x in X.points}, rename)
