"""Isometric group actions on finite metric spaces and constructions on them.

An action stores, for each generator of its group, the permutation of point
indices it induces (``perm[i]`` is the image of point ``i``). Elements act by
composing generator permutations; ``(p * q)`` acts as ``p`` after ``q``.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Mapping, Sequence

from .errors import ActionError, ForgeError, MetricAxiomError
from .groups import FiniteGroup, FreeAbelianGroup, FreeGroup, GroupSpec, group_from_json
from .metric import (
    FinMetric,
    as_rat,
    disjoint_sum,
    extend_by_katetov,
    free_amalgam,
    fresh_id,
    validate_metric,
)

Perm = tuple[int, ...]


def compose(p: Perm, q: Perm) -> Perm:
    """``p`` after ``q``."""
    return tuple(p[i] for i in q)


def inverse(p: Perm) -> Perm:
    out = [0] * len(p)
    for i, j in enumerate(p):
        out[j] = i
    return tuple(out)


def identity_perm(n: int) -> Perm:
    return tuple(range(n))


def _is_perm(p: Sequence[int], n: int) -> bool:
    return len(p) == n and sorted(p) == list(range(n))


@dataclass(frozen=True)
class FiniteAction:
    group: GroupSpec
    space: FinMetric
    gen_maps: tuple[Perm, ...]

    def __post_init__(self):
        if len(self.gen_maps) != len(self.group.generators):
            raise ActionError(
                f"{len(self.gen_maps)} generator maps for {len(self.group.generators)} generators"
            )
        if any(len(p) != len(self.space) for p in self.gen_maps):
            raise ActionError("generator map length does not match the space")

    @classmethod
    def from_maps(cls, group: GroupSpec, space: FinMetric, maps: Mapping[str, object]) -> "FiniteAction":
        """Build from ``{generator name: {point: image}}`` or ``{name: [image ids or indices]}``.

        Points missing from a dict map are fixed.
        """
        perms = []
        for name in group.gen_names:
            if name not in maps:
                raise ActionError(f"no map given for generator {name!r}")
            m = maps[name]
            if isinstance(m, Mapping):
                perm = [space.index(m.get(p, p)) for p in space.points]
            else:
                perm = [x if isinstance(x, int) else space.index(x) for x in m]
            perms.append(tuple(perm))
        return cls(group, space, tuple(perms))

    @classmethod
    def trivial(cls, group: GroupSpec, space: FinMetric) -> "FiniteAction":
        ident = identity_perm(len(space))
        return cls(group, space, tuple(ident for _ in group.generators))

    def gen_perm(self, name: str) -> Perm:
        return self.gen_maps[self.group.gen_names.index(name)]

    @cached_property
    def _finite_perms(self) -> dict[int, Perm]:
        G = self.group
        assert isinstance(G, FiniteGroup)
        perms = {G.identity: identity_perm(len(self.space))}
        frontier = [G.identity]
        while frontier:
            nxt = []
            for g in frontier:
                for s, ps in zip(G.generators, self.gen_maps):
                    h = G.op(s, g)
                    if h not in perms:
                        perms[h] = compose(ps, perms[g])
                        nxt.append(h)
            frontier = nxt
        return perms

    def element_perm(self, g) -> Perm:
        G = self.group
        n = len(self.space)
        if isinstance(G, FiniteGroup):
            return self._finite_perms[G.check(g)]
        if isinstance(G, FreeAbelianGroup):
            out = identity_perm(n)
            for p, k in zip(self.gen_maps, G.check(g)):
                step = p if k >= 0 else inverse(p)
                for _ in range(abs(k)):
                    out = compose(step, out)
            return out
        if isinstance(G, FreeGroup):
            out = identity_perm(n)
            for x in reversed(G.check(g)):
                p = self.gen_maps[abs(x) - 1]
                out = compose(p if x > 0 else inverse(p), out)
            return out
        raise ActionError(f"unsupported group {G!r}")

    def act(self, g, point: str) -> str:
        return self.space.points[self.element_perm(g)[self.space.index(point)]]

    def orbits(self) -> list[list[int]]:
        n = len(self.space)
        seen = [False] * n
        out = []
        for i in range(n):
            if seen[i]:
                continue
            orbit = [i]
            seen[i] = True
            for x in orbit:
                for p in self.gen_maps:
                    for y in (p[x], inverse(p)[x]):
                        if not seen[y]:
                            seen[y] = True
                            orbit.append(y)
            out.append(sorted(orbit))
        return out

    def restrict(self, subset: Sequence[str]) -> "FiniteAction":
        """Restrict to an invariant subset (checked)."""
        sub = self.space.restrict(subset)
        perms = []
        for p in self.gen_maps:
            images = [self.space.points[p[self.space.index(x)]] for x in sub.points]
            if any(y not in sub for y in images):
                raise ActionError("subset is not invariant")
            perms.append(tuple(sub.index(y) for y in images))
        return FiniteAction(self.group, sub, tuple(perms))

    def to_json(self) -> dict:
        return {
            "group": self.group.to_json(),
            "space": self.space.to_json(),
            "gen_maps": {name: list(p) for name, p in zip(self.group.gen_names, self.gen_maps)},
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "FiniteAction":
        try:
            group = group_from_json(data["group"])
            space = FinMetric.from_json(data["space"])
            maps = data["gen_maps"]
        except (KeyError, TypeError) as exc:
            raise ActionError("action JSON needs 'group', 'space' and 'gen_maps'") from exc
        return cls.from_maps(group, space, maps)


@dataclass(frozen=True)
class ActionViolation:
    kind: str  # "bijection" | "isometry" | "commutation" | "relation"
    witness: tuple

    def to_json(self) -> dict:
        return {"kind": self.kind, "witness": list(self.witness)}


def validate_action(act: FiniteAction) -> ActionViolation | None:
    """``None`` iff every generator is an isometric bijection and the group's relations hold."""
    M, G = act.space, act.group
    pts, n = M.points, len(M)
    for name, p in zip(G.gen_names, act.gen_maps):
        if not _is_perm(p, n):
            return ActionViolation("bijection", (name,))
    for name, p in zip(G.gen_names, act.gen_maps):
        for i, j in itertools.combinations(range(n), 2):
            if M.di(p[i], p[j]) != M.di(i, j):
                return ActionViolation("isometry", (name, pts[i], pts[j]))
    if isinstance(G, FreeAbelianGroup):
        for (a, p), (b, q) in itertools.combinations(zip(G.gen_names, act.gen_maps), 2):
            for i in range(n):
                if p[q[i]] != q[p[i]]:
                    return ActionViolation("commutation", (a, b, pts[i]))
    elif isinstance(G, FiniteGroup):
        perms = act._finite_perms
        for g in range(len(G)):
            for s, name in zip(G.generators, G.gen_names):
                lhs = perms[G.op(s, g)]
                rhs = compose(act.gen_perm(name), perms[g])
                if lhs != rhs:
                    bad = next(i for i in range(n) if lhs[i] != rhs[i])
                    return ActionViolation("relation", (name, G.elements[g], pts[bad]))
    return None


def require_action(act: FiniteAction, what: str = "action") -> FiniteAction:
    v = validate_action(act)
    if v is not None:
        raise ActionError(f"{what} is invalid: {v.kind} at {v.witness}")
    return act


@dataclass(frozen=True)
class AgreementConstraint:
    """Required generator images on a finite set of anchor points."""

    anchors: tuple[str, ...]
    required: Mapping[str, Mapping[str, str]]  # generator name -> {anchor: image}

    def satisfied_by(self, act: FiniteAction, embedding: Mapping[str, str] | None = None) -> bool:
        """True iff ``act`` meets the constraint after transporting it along ``embedding``."""
        e = embedding or {}
        for name, images in self.required.items():
            perm = act.gen_perm(name)
            for a, b in images.items():
                ea, eb = e.get(a, a), e.get(b, b)
                if act.space.points[perm[act.space.index(ea)]] != eb:
                    return False
        return True

    @classmethod
    def of_action(cls, act: FiniteAction, anchors: Sequence[str] | None = None) -> "AgreementConstraint":
        anchors = tuple(anchors if anchors is not None else act.space.points)
        req = {
            name: {a: act.space.points[p[act.space.index(a)]] for a in anchors}
            for name, p in zip(act.group.gen_names, act.gen_maps)
        }
        return cls(anchors, req)

    def to_json(self) -> dict:
        return {"anchors": list(self.anchors), "required": {k: dict(v) for k, v in self.required.items()}}

    @classmethod
    def from_json(cls, data) -> "AgreementConstraint":
        return cls(tuple(data["anchors"]), {k: dict(v) for k, v in data["required"].items()})


def _require_finite(act: FiniteAction) -> FiniteGroup:
    if not isinstance(act.group, FiniteGroup):
        raise ActionError("this construction needs a finite group")
    return act.group


def uspenskii_extend(act: FiniteAction, ext: FinMetric) -> FiniteAction:
    """Extend a finite group's action on ``A`` to ``A`` plus a free orbit.

    ``ext`` is a metric on ``A`` plus one new point ``*``, which becomes the
    group identity in the orbit. Then ``d(a, h) = d(h^-1 a, *)`` and
    ``d(g, h) = min over a of d(a, g) + d(a, h)``.
    """
    G = _require_finite(act)
    A = act.space
    extra = [p for p in ext.points if p not in A]
    if len(extra) != 1 or len(ext) != len(A) + 1:
        raise ActionError("extension must add exactly one point to the acted-on space")
    star = extra[0]
    if ext.restrict(A.points) != A:
        raise ActionError("extension does not agree with the space on A")
    v = validate_metric(ext)
    if v is not None:
        raise MetricAxiomError(f"extension is not a metric: {v.axiom} at {v.witness}", v)
    require_action(act, "input action")
    if len(A) == 0 and len(G) > 1:
        raise ActionError("cannot spread a point over a free orbit with nothing to measure against")

    nA, nG = len(A), len(G)
    # orbit points: identity first, then the other elements in table order
    elems = [G.identity] + [g for g in range(nG) if g != G.identity]
    taken = set(A.points) | {star}
    ids = []
    for g in elems:
        if g == G.identity:
            ids.append(star)
        else:
            nid = fresh_id(f"{star}.{G.elements[g]}", taken)
            taken.add(nid)
            ids.append(nid)
    to_star = [ext.d(a, star) for a in A.points]
    perms = act._finite_perms

    # d(a, h) = d(h^-1 a, *)
    cross = [[to_star[perms[G.inv(h)][i]] for h in elems] for i in range(nA)]
    n = nA + nG
    rows = [[Fraction(0)] * n for _ in range(n)]
    for i in range(nA):
        for j in range(nA):
            rows[i][j] = A.di(i, j)
        for k in range(nG):
            rows[i][nA + k] = rows[nA + k][i] = cross[i][k]
    for k, l in itertools.combinations(range(nG), 2):
        if nA == 0:
            raise ActionError("unreachable: empty A with nontrivial group")
        val = min(cross[i][k] + cross[i][l] for i in range(nA))
        rows[nA + k][nA + l] = rows[nA + l][nA + k] = val
    C = FinMetric(list(A.points) + ids, rows)

    pos = {g: nA + k for k, g in enumerate(elems)}
    new_maps = []
    for s, p in zip(G.generators, act.gen_maps):
        new_maps.append(tuple(list(p) + [pos[G.op(s, g)] for g in elems]))
    return FiniteAction(G, C, tuple(new_maps))


def invariant_closure(act: FiniteAction, new_points: Sequence[tuple[str | None, Mapping[str, object]]]) -> FiniteAction:
    """Absorb one-point extensions one after another, closing under the action each time.

    Each extension is ``(id, r)`` with ``r`` an admissible distance prescription
    over points of the current space; unspecified distances are shortest paths
    through ``dom(r)``.
    """
    _require_finite(act)
    cur = act
    for i, (pid, r) in enumerate(new_points):
        try:
            ext, _ = extend_by_katetov(cur.space, r, pid)
        except ForgeError as exc:
            raise ActionError(f"extension {i} is inadmissible: {exc}") from exc
        cur = uspenskii_extend(cur, ext)
    return cur


def _check_same_group(a: FiniteAction, b: FiniteAction) -> None:
    if a.group != b.group:
        raise ActionError("actions are of different groups")


def action_sum(pi: FiniteAction, sigma: FiniteAction) -> tuple[FiniteAction, dict[str, str], dict[str, str]]:
    """Act blockwise on the disjoint sum of the two spaces."""
    _check_same_group(pi, sigma)
    am = disjoint_sum(pi.space, sigma.space)
    nx = len(pi.space)
    maps = tuple(tuple(p) + tuple(nx + j for j in q) for p, q in zip(pi.gen_maps, sigma.gen_maps))
    return FiniteAction(pi.group, am.space, maps), am.embed_x, am.embed_y


@dataclass(frozen=True)
class AmalgamatedAction:
    action: FiniteAction
    embed_x: dict[str, str]
    embed_y: dict[str, str]


def amalgamate_over_invariant(sigma: FiniteAction, tau: FiniteAction, pi: FiniteAction) -> AmalgamatedAction:
    """Freely amalgamate two actions that agree on a common invariant subspace ``B``.

    ``tau`` acts on ``X`` and ``pi`` on ``Y``; both contain ``B`` (same ids)
    and restrict to ``sigma`` there.
    """
    _check_same_group(sigma, tau)
    _check_same_group(sigma, pi)
    B, X, Y = sigma.space, tau.space, pi.space
    for name, host in (("X", X), ("Y", Y)):
        if any(b not in host for b in B.points):
            raise ActionError(f"B is not contained in {name}")
        if host.restrict(B.points) != B:
            raise ActionError(f"metric on B disagrees with {name}")
    for name, act in (("tau", tau), ("pi", pi)):
        for g, p in zip(act.group.gen_names, act.gen_maps):
            for b in B.points:
                img = act.space.points[p[act.space.index(b)]]
                if img not in B:
                    raise ActionError(f"B is not invariant under {name}")
                if img != B.points[sigma.gen_perm(g)[B.index(b)]]:
                    raise ActionError(f"{name} disagrees with sigma on B")

    am = free_amalgam(X, Y, B)
    Z = am.space
    maps = []
    for g, pt, pp in zip(sigma.group.gen_names, tau.gen_maps, pi.gen_maps):
        img = {}
        for x in X.points:
            img[am.embed_x[x]] = am.embed_x[X.points[pt[X.index(x)]]]
        for y in Y.points:
            img[am.embed_y[y]] = am.embed_y[Y.points[pp[Y.index(y)]]]
        maps.append(tuple(Z.index(img[z]) for z in Z.points))
    rho = FiniteAction(sigma.group, Z, tuple(maps))
    return AmalgamatedAction(rho, am.embed_x, am.embed_y)


@dataclass(frozen=True)
class Globalized:
    action: FiniteAction
    iota: dict[str, str]
    window: int | None = None  # period used when the group is Z


def _quotient_ids(n_y: int, ids_y: Sequence[str], elem_names: Sequence[str], taken: set[str]) -> list[str]:
    out = []
    for k, gname in enumerate(elem_names):
        for y in ids_y:
            if k == 0:
                out.append(y)
            else:
                nid = fresh_id(f"{y}.{gname}", taken)
                taken.add(nid)
                out.append(nid)
    return out


def globalize_subgroup_action(
    pi: FiniteAction,
    sigma: FiniteAction,
    cap=None,
    *,
    subgroup_index: int | None = None,
) -> Globalized:
    """Extend ``pi`` (group on X) and ``sigma`` (subgroup on Y, X inside Y) to one action.

    The space is ``Y x G`` modulo zero distance, with ``G`` translating the
    second coordinate. Pairs in the same ``Lambda``-coset, or with both points
    in ``X``, are measured directly; other pairs go through ``X``, or are at
    distance ``cap`` when ``X`` is empty.

    For ``G = Z`` acting through ``pi`` and ``sigma`` an action of
    ``subgroup_index * Z``, the action factors through a finite cyclic window,
    whose size is reported in the result.
    """
    if isinstance(pi.group, FreeAbelianGroup):
        return _globalize_cyclic(pi, sigma, cap, subgroup_index)
    G = _require_finite(pi)
    L = sigma.group
    if not isinstance(L, FiniteGroup):
        raise ActionError("subgroup action must be of a finite group")
    if L == G:
        lam_to_g = list(range(len(G)))
    elif L.parent == G:
        lam_to_g = list(L.embedding)
    else:
        raise ActionError("sigma's group is not a subgroup of pi's group")
    X, Y = pi.space, sigma.space
    if any(x not in Y for x in X.points) or Y.restrict(X.points) != X:
        raise ActionError("X must be an isometric subspace of Y (same ids)")
    require_action(pi, "pi")
    require_action(sigma, "sigma")
    sig_perm = {lam_to_g[l]: sigma.element_perm(l) for l in range(len(L))}
    pi_perm = {g: pi.element_perm(g) for g in range(len(G))}
    x_in_y = [Y.index(x) for x in X.points]
    for h, p in sig_perm.items():
        for i, x in enumerate(X.points):
            if Y.points[p[x_in_y[i]]] != X.points[pi_perm[h][i]]:
                raise ActionError(f"sigma and pi disagree on {x!r} under {G.elements[h]}")
    if not X.points:
        if cap is None:
            raise ActionError("a cap is required when X is empty")
    cap = as_rat(cap) if cap is not None else None

    nY = len(Y)
    elems = [G.identity] + [g for g in range(len(G)) if g != G.identity]
    in_x = {Y.index(x): i for i, x in enumerate(X.points)}
    # pi(g) on X expressed on Y indices
    pi_on_y = {g: {x_in_y[i]: x_in_y[p[i]] for i in range(len(X))} for g, p in pi_perm.items()}
    pts = [(y, g) for g in elems for y in range(nY)]

    def dist(a, b):
        (y1, g1), (y2, g2) = a, b
        h = G.op(G.inv(g2), g1)
        if y1 in in_x and y2 in in_x:
            return Y.di(pi_on_y[h][y1], y2)
        if h in sig_perm:
            return Y.di(sig_perm[h][y1], y2)
        if not X.points:
            return cap
        i1, i2 = G.inv(g1), G.inv(g2)
        return min(Y.di(y1, pi_on_y[i1][x]) + Y.di(pi_on_y[i2][x], y2) for x in x_in_y)

    N = len(pts)
    D = [[Fraction(0)] * N for _ in range(N)]
    for i, j in itertools.combinations(range(N), 2):
        D[i][j] = D[j][i] = dist(pts[i], pts[j])

    rep = list(range(N))
    for j in range(N):
        for i in range(j):
            if D[i][j] == 0:
                rep[j] = rep[i]
                break
    classes = sorted(set(rep))
    cls_pos = {c: k for k, c in enumerate(classes)}
    taken: set[str] = set(Y.points)
    all_ids = _quotient_ids(nY, Y.points, [G.elements[g] for g in elems], taken)
    Z = FinMetric([all_ids[c] for c in classes], [[D[a][b] for b in classes] for a in classes])
    v = validate_metric(Z)
    if v is not None:
        raise MetricAxiomError(
            f"cap {cap} too small for a metric: {v.axiom} at {v.witness}", v
        )

    index_of = {p: k for k, p in enumerate(pts)}
    maps = []
    for s in G.generators:
        img = [None] * len(classes)
        for k, (y, g) in enumerate(pts):
            target = cls_pos[rep[index_of[(y, G.op(s, g))]]]
            here = cls_pos[rep[k]]
            if img[here] is None:
                img[here] = target
            elif img[here] != target:
                raise AssertionError("translation does not factor through the quotient")
        maps.append(tuple(img))
    tau = FiniteAction(G, Z, tuple(maps))
    iota = {Y.points[y]: Z.points[cls_pos[rep[index_of[(y, G.identity)]]]] for y in range(nY)}
    _verify_globalized(pi, sigma, tau, iota, lam_to_g)
    return Globalized(tau, iota)


def _verify_globalized(pi, sigma, tau, iota, lam_to_g) -> None:
    Y, Z = sigma.space, tau.space
    for a, b in itertools.combinations(Y.points, 2):
        if Y.d(a, b) != Z.d(iota[a], iota[b]):
            raise AssertionError("iota is not isometric")
    G = pi.group
    for g in range(len(G)):
        for x in pi.space.points:
            if tau.act(g, iota[x]) != iota[pi.act(g, x)]:
                raise AssertionError("tau does not extend pi")
    for l, g in enumerate(lam_to_g):
        for y in Y.points:
            if tau.act(g, iota[y]) != iota[sigma.act(l, y)]:
                raise AssertionError("tau restricted to the subgroup does not extend sigma")


def _perm_order(p: Perm) -> int:
    q, k = p, 1
    ident = identity_perm(len(p))
    while q != ident:
        q = compose(p, q)
        k += 1
    return k


def _globalize_cyclic(pi: FiniteAction, sigma: FiniteAction, cap, m: int | None) -> Globalized:
    if pi.group != FreeAbelianGroup(1) or sigma.group != FreeAbelianGroup(1):
        raise ActionError("only Z (rank 1) is supported among infinite groups")
    if m is None or m < 1:
        raise ActionError("subgroup_index m >= 1 is required: sigma acts as the subgroup mZ")
    window = m * _perm_order(sigma.gen_maps[0])
    Gf = FiniteGroup.cyclic(window)
    Lf = Gf.subgroup([str(m % window)])
    pi_f = FiniteAction(Gf, pi.space, (pi.gen_maps[0],) if window > 1 else (identity_perm(len(pi.space)),))
    sig_map = sigma.gen_maps[0] if len(Lf) > 1 else identity_perm(len(sigma.space))
    sigma_f = FiniteAction(Lf, sigma.space, (sig_map,))
    g = pi.gen_maps[0]
    if window == 1 and g != identity_perm(len(g)):
        raise ActionError("pi is not trivial although the window is 1")
    res = globalize_subgroup_action(pi_f, sigma_f, cap)
    tau = FiniteAction(pi.group, res.action.space, (res.action.gen_maps[0],))
    return Globalized(tau, res.iota, window)


@dataclass(frozen=True)
class RootExtension:
    space: FinMetric
    h: FiniteAction  # Z acting through the root
    embedding: dict[str, str]
    m: int


def nth_root_extension(act: FiniteAction, m: int, n=None) -> RootExtension:
    """Stack ``m`` copies of ``B``; ``h`` climbs one level and applies ``g`` on wrap-around.

    Levels sit at constant distance ``min(n, max(diam B, 1))`` from each other,
    so ``h**m`` restricted to level 0 is ``g``.
    """
    if m < 1:
        raise ActionError("m must be at least 1")
    if act.group != FreeAbelianGroup(1):
        raise ActionError("root extension needs a Z-action (one generator)")
    require_action(act)
    B, g = act.space, act.gen_maps[0]
    nb = len(B)
    c = max(B.diam(), Fraction(1))
    if n is not None:
        c = min(as_rat(n), c)
    taken = set(B.points)
    ids = list(B.points)
    for lvl in range(1, m):
        for b in B.points:
            nid = fresh_id(f"{b}.{lvl}", taken)
            taken.add(nid)
            ids.append(nid)
    N = nb * m
    rows = [[c] * N for _ in range(N)]
    for lvl in range(m):
        for i in range(nb):
            for j in range(nb):
                rows[lvl * nb + i][lvl * nb + j] = B.di(i, j)
    C = FinMetric(ids, rows)
    h = []
    for lvl in range(m):
        for i in range(nb):
            h.append((lvl + 1) * nb + i if lvl < m - 1 else g[i])
    hact = FiniteAction(act.group, C, (tuple(h),))
    v = validate_metric(C)
    if v is not None:
        raise MetricAxiomError(f"level distance {c} too small: {v.axiom} at {v.witness}", v)
    return RootExtension(C, hact, {b: b for b in B.points}, m)


def _profiles(act: FiniteAction) -> list[tuple]:
    M = act.space
    orbit_size = {}
    for orb in act.orbits():
        for i in orb:
            orbit_size[i] = len(orb)
    return [(orbit_size[i], tuple(sorted(M.matrix[i]))) for i in range(len(M))]


def conjugacy_search(act1: FiniteAction, act2: FiniteAction) -> dict[str, str] | None:
    """An equivariant isometric bijection ``k`` (``k s1 = s2 k``), or ``None`` if none exists.

    Exhaustive backtracking; candidates are tried in point order and forced
    images propagate along generator orbits.
    """
    _check_same_group(act1, act2)
    M1, M2 = act1.space, act2.space
    n = len(M1)
    if n != len(M2):
        return None
    if Counter(M1.matrix[i][j] for i in range(n) for j in range(n)) != Counter(
        M2.matrix[i][j] for i in range(n) for j in range(n)
    ):
        return None
    prof1, prof2 = _profiles(act1), _profiles(act2)
    if Counter(prof1) != Counter(prof2):
        return None
    steps1 = list(act1.gen_maps) + [inverse(p) for p in act1.gen_maps]
    steps2 = list(act2.gen_maps) + [inverse(p) for p in act2.gen_maps]
    k: list[int | None] = [None] * n
    used = [False] * n
    assigned: list[int] = []

    def assign(x: int, y: int, log: list[int]) -> bool:
        queue = [(x, y)]
        while queue:
            u, v = queue.pop()
            if k[u] is not None:
                if k[u] != v:
                    return False
                continue
            if used[v] or prof1[u] != prof2[v]:
                return False
            for w in assigned:
                if M1.matrix[u][w] != M2.matrix[v][k[w]]:
                    return False
            k[u] = v
            used[v] = True
            assigned.append(u)
            log.append(u)
            for p, q in zip(steps1, steps2):
                queue.append((p[u], q[v]))
        return True

    def undo(log: list[int]) -> None:
        for u in reversed(log):
            used[k[u]] = False
            k[u] = None
            assigned.pop()

    def search() -> bool:
        try:
            x = k.index(None)
        except ValueError:
            return True
        for y in range(n):
            if used[y] or prof1[x] != prof2[y]:
                continue
            log: list[int] = []
            if assign(x, y, log) and search():
                return True
            undo(log)
        return False

    if not search():
        return None
    return {M1.points[i]: M2.points[k[i]] for i in range(n)}


def is_conjugacy(act1: FiniteAction, act2: FiniteAction, k: Mapping[str, str]) -> bool:
    """Independent check that ``k`` is an equivariant isometric bijection."""
    M1, M2 = act1.space, act2.space
    if sorted(k) != sorted(M1.points) or sorted(k.values()) != sorted(M2.points):
        return False
    if not M1.is_isometric_map(k, M2):
        return False
    for p, q in zip(act1.gen_maps, act2.gen_maps):
        for x in M1.points:
            if k[M1.points[p[M1.index(x)]]] != M2.points[q[M2.index(k[x])]]:
                return False
    return True
