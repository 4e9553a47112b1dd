"""Finite approximations of the bounded Urysohn spaces with distances {1, ..., n}.

A space is *k-saturated* when every admissible one-point extension over every
subset of at most ``k`` points is already realized by some point of the space.
Saturated spaces support back-and-forth extension of small partial isometries.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .errors import ForgeError, KatetovError, NotAPartialIsometryError, SaturationError
from .metric import FinMetric, append_point, as_rat, fresh_id, katetov_check, rat_to_json


@dataclass(frozen=True)
class DistanceSet:
    """A finite set of positive distances; ``n`` is set when it is exactly {1, ..., n}."""

    values: tuple[Fraction, ...]
    n: int | None = None

    def __post_init__(self):
        if not self.values:
            raise ForgeError("distance set must be nonempty")
        if any(v <= 0 for v in self.values):
            raise ForgeError("distances must be positive")
        if self.n is not None and self.values != tuple(Fraction(i) for i in range(1, self.n + 1)):
            raise ForgeError("bounded integer distance set must be exactly 1..n")

    @classmethod
    def integers(cls, n: int) -> "DistanceSet":
        if n < 1:
            raise ForgeError("n must be at least 1")
        return cls(tuple(Fraction(i) for i in range(1, n + 1)), n)

    @classmethod
    def of(cls, values: Iterable) -> "DistanceSet":
        vals = tuple(sorted({as_rat(v) for v in values}))
        n = len(vals)
        if vals == tuple(Fraction(i) for i in range(1, n + 1)):
            return cls(vals, n)
        return cls(vals)

    @classmethod
    def parse(cls, text: str) -> "DistanceSet":
        """Parse ``"1..n"`` or a comma-separated list such as ``"1,3/2,2"``."""
        text = text.strip()
        if ".." in text:
            lo, hi = text.split("..", 1)
            if lo.strip() != "1":
                raise ForgeError("integer ranges must start at 1")
            return cls.integers(int(hi))
        return cls.of(part for part in text.split(",") if part.strip())

    @property
    def bounded_integer(self) -> bool:
        return self.n is not None

    @property
    def maximum(self) -> Fraction:
        return self.values[-1]

    def __contains__(self, q) -> bool:
        return q in self.values

    def to_json(self) -> dict:
        if self.n is not None:
            return {"n": self.n}
        return {"values": [rat_to_json(v) for v in self.values]}

    @classmethod
    def from_json(cls, data) -> "DistanceSet":
        if isinstance(data, str):
            return cls.parse(data)
        if "n" in data:
            return cls.integers(int(data["n"]))
        return cls.of(data["values"])


class _MaskIndex:
    """Per point, per distance value: bitmask of the points at that distance."""

    def __init__(self, M: FinMetric):
        self.points = M.points
        self.masks: list[dict[Fraction, int]] = []
        for i, row in enumerate(M.matrix):
            m: dict[Fraction, int] = {}
            for j, v in enumerate(row):
                if j != i:
                    m[v] = m.get(v, 0) | (1 << j)
            self.masks.append(m)
        self.full = (1 << len(M)) - 1


def _scaled(M: FinMetric, values: Sequence[Fraction]) -> tuple[list[list[int]], list[int], int]:
    """Integer copies of the matrix and values, all multiplied by a common denominator."""
    scale = math.lcm(1, *(v.denominator for v in values), *(v.denominator for v in M.values()))
    rows = [[int(v * scale) for v in row] for row in M.matrix]
    return rows, [int(v * scale) for v in values], scale


def _missing(M: FinMetric, values: Sequence[Fraction], k: int) -> list[tuple[tuple[int, ...], tuple[Fraction, ...]]]:
    """Unrealized ``(A, r)`` over subsets of size 1..k, in subset-then-r order."""
    rows, vals, scale = _scaled(M, values)
    N = len(rows)
    # masks[a][s]: points at (scaled) distance s from a
    masks = []
    for i, row in enumerate(rows):
        m = dict.fromkeys(vals, 0)
        for j, v in enumerate(row):
            if j != i and v in m:
                m[v] |= 1 << j
        masks.append(m)
    full = (1 << N) - 1
    out = []

    def rec(A, i, r, mask):
        if i == len(A):
            if not mask:
                out.append((A, tuple(Fraction(s, scale) for s in r)))
            return
        a = A[i]
        ma = masks[a]
        prev = [(rows[A[j]][a], r[j]) for j in range(i)]
        for s in vals:
            for dab, t in prev:
                if s - t > dab or t - s > dab or dab > s + t:
                    break
            else:
                r.append(s)
                rec(A, i + 1, r, mask & ma[s])
                r.pop()

    for size in range(1, k + 1):
        for A in itertools.combinations(range(N), size):
            rec(A, 0, [], full)
    return out


def check_saturation(S: FinMetric, dset: DistanceSet, k: int) -> list[tuple[tuple[str, ...], tuple[Fraction, ...]]]:
    """Every unrealized extension type ``(A, r)`` over subsets of size <= k; empty iff saturated."""
    return [
        (tuple(S.points[i] for i in A), r)
        for A, r in _missing(S, dset.values, k)
    ]


@dataclass(frozen=True)
class SaturationLevel:
    space: FinMetric
    k: int
    dset: DistanceSet

    @cached_property
    def _index(self) -> _MaskIndex:
        return _MaskIndex(self.space)

    def to_json(self) -> dict:
        return {"space": self.space.to_json(), "k": self.k, "dset": self.dset.to_json()}

    @classmethod
    def from_json(cls, data) -> "SaturationLevel":
        return cls(FinMetric.from_json(data["space"]), int(data["k"]), DistanceSet.from_json(data["dset"]))


def _require_integer_dset(dset: DistanceSet) -> int:
    if not dset.bounded_integer:
        raise ForgeError("this operation needs a distance set of the form {1..n}")
    return dset.n


def add_realizing_point(
    M: FinMetric,
    r: Mapping[str, object],
    dset: DistanceSet,
    new_id: str | None = None,
    rng: random.Random | None = None,
) -> tuple[FinMetric, str]:
    """Adjoin a point ``y`` with ``d(y, a) = r[a]``.

    Distances to the remaining points are the shortest path through ``dom(r)``
    capped at ``n``. With ``rng`` they are instead drawn uniformly from the
    interval the triangle inequality leaves open, point by point.
    """
    n = _require_integer_dset(dset)
    r = {a: as_rat(v) for a, v in r.items()}
    if any(v not in dset for v in r.values()):
        raise KatetovError("prescribed distances must lie in the distance set")
    if any(v not in dset for v in M.values()):
        raise ForgeError("space has distances outside the distance set")
    if not katetov_check(M, r):
        raise KatetovError("prescribed distances violate the triangle inequality")
    cap = Fraction(n)
    row: list[Fraction] = []
    if rng is None:
        for z in M.points:
            if z in r:
                row.append(r[z])
            else:
                row.append(min([cap] + [ra + M.d(a, z) for a, ra in r.items()]))
    else:
        fixed = {M.index(a): v for a, v in r.items()}
        row = [Fraction(v) for v in _random_completion(M.matrix, fixed, n, rng)]
    new_id = fresh_id(new_id or f"p{len(M)}", set(M.points))
    return append_point(M, new_id, row), new_id


def saturate(dset: DistanceSet, k: int, size_cap: int = 2000, seed: int = 0) -> SaturationLevel:
    """Grow a k-saturated space over ``{1..n}`` from a single point.

    Each sweep lists the extension types still missing and realizes them in
    order (subset, then r), skipping those an earlier addition already
    realized. Sweeps repeat until none is missing. New points use the random
    completion of :func:`add_realizing_point` with a PRNG seeded by ``seed``.
    Capped shortest-path completion would leave each new point with at most
    ``k`` neighbours at distance 1, which can never saturate {1, 2} at k = 3.
    """
    n = _require_integer_dset(dset)
    if k < 1:
        raise ForgeError("k must be at least 1")
    if size_cap < 1:
        raise ForgeError("size_cap must be positive")
    rng = random.Random(seed)
    values = dset.values
    # integer working copy; FinMetric is rebuilt once at the end
    dist: list[list[int]] = [[0]]
    masks: list[list[int]] = [[0] * (n + 1)]

    def add(row: list[int]) -> None:
        N = len(dist)
        bit = 1 << N
        own = [0] * (n + 1)
        for i, v in enumerate(row):
            dist[i].append(v)
            masks[i][v] |= bit
            own[v] |= 1 << i
        dist.append(row + [0])
        masks.append(own)

    def realized(A, r) -> bool:
        mask = (1 << len(dist)) - 1
        for a, s in zip(A, r):
            mask &= masks[a][s]
        return mask != 0

    while True:
        space = _int_space(dist)
        missing = _missing(space, values, k)
        if not missing:
            return SaturationLevel(space, k, dset)
        for A, r in missing:
            r = [int(s) for s in r]
            if realized(A, r):
                continue
            if len(dist) >= size_cap:
                left = sum(1 for B, q in _missing(_int_space(dist), values, k))
                raise SaturationError(
                    f"size cap {size_cap} reached with {left} extension types still missing",
                    missing=left,
                )
            add(_random_completion(dist, dict(zip(A, r)), n, rng))


def _random_completion(rows, fixed: Mapping[int, int], n: int, rng: random.Random) -> list[int]:
    """Distances from a new point: ``fixed`` where given, else uniform in the feasible interval."""
    row: list[int] = []
    for z in range(len(rows)):
        if z in fixed:
            row.append(int(fixed[z]))
            continue
        lo, hi = 1, n
        for w in itertools.chain(range(z), (a for a in fixed if a > z)):
            t = row[w] if w < z else fixed[w]
            lo = max(lo, abs(t - rows[w][z]))
            hi = min(hi, t + rows[w][z])
        row.append(rng.randint(int(lo), int(hi)))
    return row


def _int_space(dist: list[list[int]]) -> FinMetric:
    return FinMetric([f"p{i}" for i in range(len(dist))], dist)


def _check_partial(M: FinMetric, p: Mapping[str, str]) -> None:
    for x, y in p.items():
        if x not in M or y not in M:
            raise NotAPartialIsometryError(f"{x!r} -> {y!r} leaves the space")
    if not M.is_isometric_map(p):
        raise NotAPartialIsometryError("map is not injective and distance-preserving")


def extend_partial_isometry(S: SaturationLevel, p: Mapping[str, str], targets: Iterable[str]) -> dict[str, str]:
    """Extend ``p`` one target at a time, choosing the least realizing image.

    Each step realizes the extension type of the target over the current
    image, so the current domain may have at most ``S.k`` points.
    """
    M = S.space
    _check_partial(M, p)
    idx = S._index
    out = dict(p)
    for t in targets:
        if t not in M:
            raise NotAPartialIsometryError(f"target {t!r} is not a point of the space")
        if t in out:
            continue
        if len(out) > S.k:
            raise SaturationError(
                f"domain of size {len(out)} exceeds saturation level k={S.k}"
            )
        mask = idx.full
        for x, fx in out.items():
            mask &= idx.masks[M.index(fx)].get(M.d(t, x), 0)
        if not mask:
            raise SaturationError(f"no point realizes the type of {t!r} over the current image")
        out[t] = M.points[(mask & -mask).bit_length() - 1]
    return out
