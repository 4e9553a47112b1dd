"""``forge``: one verb per library operation, JSON in and out.

Exit codes: 0 success, 2 domain error (JSON error object on stdout),
3 search budget exhausted, 64 usage error or unknown verb, 65 malformed JSON.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from typing import Callable, Sequence

from . import actions as A
from . import metric as M
from . import search as S
from . import separability as P
from . import urysohn as U
from .errors import ForgeError, MalformedMetricError
from .groups import FreeGroup, group_from_json
from .io import dumps, read_json, space_to_dot

EXIT_OK, EXIT_DOMAIN, EXIT_EXHAUSTED, EXIT_USAGE, EXIT_MALFORMED = 0, 2, 3, 64, 65


class UsageError(Exception):
    pass


class Malformed(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


class Outcome:
    def __init__(self, data, code: int = EXIT_OK, text: str | None = None):
        self.data, self.code, self.text = data, code, text


# input helpers


def _load(path: str):
    try:
        return read_json(path)
    except json.JSONDecodeError as exc:
        raise Malformed(f"{path}: {exc}") from exc
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc


def _parse(loader: Callable, path: str):
    data = _load(path)
    try:
        return loader(data)
    except (KeyError, TypeError, IndexError, AttributeError, MalformedMetricError) as exc:
        raise Malformed(f"{path}: {exc}") from exc


def _space(path: str) -> M.FinMetric:
    return _parse(M.FinMetric.from_json, path)


def _action(path: str) -> A.FiniteAction:
    return _parse(A.FiniteAction.from_json, path)


def _rmap(path: str) -> dict:
    return _parse(lambda d: {str(k): M.as_rat(v) for k, v in d.items()}, path)


def _ids(text: str | None) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()] if text else []


def _vector(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.replace("(", "").replace(")", "").split(",") if t.strip())
    except ValueError as exc:
        raise UsageError(f"bad integer vector {text!r}") from exc


def _words(F: FreeGroup, text: str | None) -> list[tuple[int, ...]]:
    return [F.parse_word(t) for t in (text or "").split(",") if t.strip()]


def _subgroups(F: FreeGroup, text: str) -> list[list[tuple[int, ...]]]:
    """``"a^2,b;ab"`` -> two subgroups, generators separated by commas."""
    return [_words(F, part) for part in text.split(";")]


def _budget(args) -> S.SearchBudget:
    return S.SearchBudget(max_points=args.max_points, max_nodes=args.max_nodes)


def _lattice(path: str) -> P.Lattice:
    return _parse(P.Lattice.from_json, path)


# verbs


def cmd_validate(args) -> Outcome:
    space = _space(args.space)
    v = M.validate_metric(space)
    if v is not None:
        raise M.MetricAxiomError(f"{v.axiom} fails at {list(v.witness)}", v)
    return Outcome({"ok": True, "points": len(space)})


def cmd_katetov(args) -> Outcome:
    space, new_id = M.extend_by_katetov(_space(args.space), _rmap(args.r), args.id)
    return Outcome({"space": space.to_json(), "new": new_id})


def cmd_exvalues(args) -> Outcome:
    space = _space(args.space)
    vals = M.expanded_value_set(space, _ids(args.subset) or space.points)
    return Outcome({"values": [M.rat_to_json(v) for v in vals]})


def cmd_truncate(args) -> Outcome:
    space = _space(args.space)
    return Outcome(M.truncate_metric(space, _ids(args.subset) or space.points).to_json())


def _amalgam_json(am: M.Amalgam) -> dict:
    return {"space": am.space.to_json(), "embed_x": am.embed_x, "embed_y": am.embed_y}


def cmd_amalgam(args) -> Outcome:
    return Outcome(_amalgam_json(M.free_amalgam(_space(args.x), _space(args.y), _space(args.b))))


def cmd_sum(args) -> Outcome:
    return Outcome(_amalgam_json(M.disjoint_sum(_space(args.x), _space(args.y))))


def cmd_saturate(args) -> Outcome:
    level = U.saturate(U.DistanceSet.parse(args.dset), args.k, args.cap, seed=args.seed)
    return Outcome(level.to_json())


def cmd_check_sat(args) -> Outcome:
    missing = U.check_saturation(_space(args.space), U.DistanceSet.parse(args.dset), args.k)
    return Outcome(
        {
            "ok": not missing,
            "missing_count": len(missing),
            "missing": [{"subset": list(ids), "r": [M.rat_to_json(v) for v in r]} for ids, r in missing[:100]],
        }
    )


def cmd_extend_iso(args) -> Outcome:
    level = _parse(U.SaturationLevel.from_json, args.level)
    p = _parse(lambda d: {str(k): str(v) for k, v in d.items()}, args.partial)
    return Outcome({"map": U.extend_partial_isometry(level, p, _ids(args.targets))})


def cmd_uspenskii(args) -> Outcome:
    return Outcome(A.uspenskii_extend(_action(args.action), _space(args.ext)).to_json())


def cmd_closure(args) -> Outcome:
    exts = _parse(lambda d: [(e[0], {str(k): M.as_rat(v) for k, v in e[1].items()}) for e in d], args.points)
    return Outcome(A.invariant_closure(_action(args.action), exts).to_json())


def cmd_action_sum(args) -> Outcome:
    act, ex, ey = A.action_sum(_action(args.pi), _action(args.sigma))
    return Outcome({"action": act.to_json(), "embed_x": ex, "embed_y": ey})


def cmd_amalgamate(args) -> Outcome:
    res = A.amalgamate_over_invariant(_action(args.sigma), _action(args.tau), _action(args.pi))
    return Outcome({"action": res.action.to_json(), "embed_x": res.embed_x, "embed_y": res.embed_y})


def cmd_globalize(args) -> Outcome:
    res = A.globalize_subgroup_action(_action(args.pi), _action(args.sigma), args.cap, subgroup_index=args.index)
    out = {"action": res.action.to_json(), "iota": res.iota}
    if res.window is not None:
        out["window"] = res.window
    return Outcome(out)


def cmd_root(args) -> Outcome:
    res = A.nth_root_extension(_action(args.action), args.m, args.n)
    return Outcome({"action": res.h.to_json(), "embedding": res.embedding, "m": res.m})


def cmd_conjugate(args) -> Outcome:
    k = A.conjugacy_search(_action(args.action), _action(args.other))
    return Outcome({"conjugate": k is not None, "map": k})


def _search_outcome(res, ok: Callable) -> Outcome:
    if isinstance(res, S.Exhausted):
        return Outcome(res.to_json(), EXIT_EXHAUSTED)
    return Outcome(ok(res))


def cmd_solecki(args) -> Outcome:
    partials = _parse(lambda d: [d] if isinstance(d, dict) else list(d), args.partial)
    res = S.solecki_extend(_space(args.space), partials, _budget(args))
    return _search_outcome(res, lambda w: w.to_json())


def cmd_approx_action(args) -> Outcome:
    group = _parse(group_from_json, args.group)
    constraint = _parse(A.AgreementConstraint.from_json, args.constraint)
    res = S.approximate_action(group, _space(args.space), constraint, _budget(args))
    return _search_outcome(res, lambda r: {"action": r[0].to_json(), "nodes": r[1]})


def cmd_hnf(args) -> Outcome:
    return Outcome({"hnf": [list(v) for v in P.lattice_hnf(_lattice(args.lattice))]})


def cmd_lattice_member(args) -> Outcome:
    return Outcome({"member": P.lattice_member(_lattice(args.lattice), _vector(args.vector))})


def cmd_separate_lattice(args) -> Outcome:
    L, v = _lattice(args.lattice), _vector(args.vector)
    m = P.lattice_separating_quotient(L, v)
    return Outcome({"m": m, "verified": P.verify_lattice_quotient(L, v, m)})


def cmd_stallings(args) -> Outcome:
    F = FreeGroup(args.rank)
    rng = random.Random(args.seed) if args.shuffle else None
    G = P.stallings_graph(args.rank, _words(F, args.gens), rng)
    out = {"graph": G.to_json(), "basis": [F.format_word(w) for w in G.basis()]}
    if args.member is not None:
        out["member"] = P.subgroup_member(G, F.parse_word(args.member))
    return Outcome(out)


def cmd_product_member(args) -> Outcome:
    F = FreeGroup(args.rank)
    graphs = [P.stallings_graph(args.rank, gens) for gens in _subgroups(F, args.subgroups)]
    return Outcome({"member": P.benois_product_member(graphs, F.parse_word(args.word))})


def cmd_separate(args) -> Outcome:
    F = FreeGroup(args.rank)
    graphs = [P.stallings_graph(args.rank, gens) for gens in _subgroups(F, args.subgroups)]
    res = P.free_separating_quotient(graphs, F.parse_word(args.word), args.max_degree)
    if isinstance(res, P.QuotientExhausted):
        return Outcome(res.to_json(), EXIT_EXHAUSTED)
    return Outcome(res.to_json())


def cmd_suite(args) -> Outcome:
    from .suites import run_suite

    try:
        results = run_suite(args.name)
    except KeyError:
        raise UsageError(f"unknown suite {args.name!r}") from None
    ok = all(r.passed for r in results)
    return Outcome({"ok": ok, "results": [r.to_json() for r in results]}, EXIT_OK if ok else 1)


def cmd_export_dot(args) -> Outcome:
    if args.space:
        return Outcome(None, text=space_to_dot(_space(args.space)))
    if args.graph:
        return Outcome(None, text=_parse(P.StallingsGraph.from_json, args.graph).to_dot())
    if args.gens is not None:
        F = FreeGroup(args.rank)
        return Outcome(None, text=P.stallings_graph(args.rank, _words(F, args.gens)).to_dot())
    raise UsageError("export-dot needs --space, --graph or --gens")


def _build() -> tuple[_Parser, dict[str, Callable]]:
    parser = _Parser(prog="forge", description="Finite rational metric spaces, isometric actions, separability.")
    sub = parser.add_subparsers(dest="verb", parser_class=_Parser)
    table: dict[str, Callable] = {}

    def verb(name: str, fn: Callable, help: str):
        p = sub.add_parser(name, help=help)
        p.add_argument("--out", help="write the result here instead of stdout")
        p.add_argument("--seed", type=int, default=0)
        table[name] = fn
        return p

    p = verb("validate", cmd_validate, "check the metric axioms")
    p.add_argument("--space", required=True)
    p = verb("katetov", cmd_katetov, "one-point extension from a distance prescription")
    p.add_argument("--space", required=True)
    p.add_argument("--r", required=True, help="JSON object {point: distance}")
    p.add_argument("--id")
    for name, fn in (("exvalues", cmd_exvalues), ("truncate", cmd_truncate)):
        p = verb(name, fn, "expanded value set" if name == "exvalues" else "truncated metric")
        p.add_argument("--space", required=True)
        p.add_argument("--subset", help="comma separated ids (default: all)")
    p = verb("amalgam", cmd_amalgam, "free amalgam over a common subspace")
    for f in ("--x", "--y", "--b"):
        p.add_argument(f, required=True)
    p = verb("sum", cmd_sum, "disjoint sum")
    for f in ("--x", "--y"):
        p.add_argument(f, required=True)
    p = verb("saturate", cmd_saturate, "build a k-saturated space")
    p.add_argument("--dset", default="1..2")
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--cap", type=int, default=2000)
    p = verb("check-sat", cmd_check_sat, "list missing extension types")
    p.add_argument("--space", required=True)
    p.add_argument("--dset", default="1..2")
    p.add_argument("--k", type=int, default=3)
    p = verb("extend-iso", cmd_extend_iso, "extend a partial isometry of a saturated space")
    p.add_argument("--level", required=True)
    p.add_argument("--partial", required=True)
    p.add_argument("--targets", required=True)
    p = verb("uspenskii", cmd_uspenskii, "extend an action by a free orbit")
    p.add_argument("--action", required=True)
    p.add_argument("--ext", required=True)
    p = verb("closure", cmd_closure, "absorb one-point extensions invariantly")
    p.add_argument("--action", required=True)
    p.add_argument("--points", required=True, help="JSON list of [id, {point: distance}]")
    p = verb("action-sum", cmd_action_sum, "blockwise action on a disjoint sum")
    p.add_argument("--pi", required=True)
    p.add_argument("--sigma", required=True)
    p = verb("amalgamate", cmd_amalgamate, "amalgamate two actions over an invariant subspace")
    for f in ("--sigma", "--tau", "--pi"):
        p.add_argument(f, required=True)
    p = verb("globalize", cmd_globalize, "extend a subgroup action to the whole group")
    p.add_argument("--pi", required=True)
    p.add_argument("--sigma", required=True)
    p.add_argument("--cap")
    p.add_argument("--index", type=int, help="m when sigma is an action of mZ")
    p = verb("root", cmd_root, "m-th root of a Z-action")
    p.add_argument("--action", required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", help="cap on the level distance")
    p = verb("conjugate", cmd_conjugate, "equivariant isometry between two actions")
    p.add_argument("--action", required=True)
    p.add_argument("--other", required=True)
    for name, fn in (("solecki", cmd_solecki), ("approx-action", cmd_approx_action)):
        p = verb(name, fn, "extend partial isometries to full ones" if name == "solecki" else "commuting witness")
        p.add_argument("--space", required=True)
        p.add_argument("--max-points", type=int, default=12)
        p.add_argument("--max-nodes", type=int, default=2_000_000)
        if name == "solecki":
            p.add_argument("--partial", required=True)
        else:
            p.add_argument("--group", required=True)
            p.add_argument("--constraint", required=True)
    p = verb("hnf", cmd_hnf, "Hermite normal form")
    p.add_argument("--lattice", required=True)
    for name, fn in (("lattice-member", cmd_lattice_member), ("separate-lattice", cmd_separate_lattice)):
        p = verb(name, fn, "lattice membership" if name == "lattice-member" else "separating modulus")
        p.add_argument("--lattice", required=True)
        p.add_argument("--vector", required=True)
    p = verb("stallings", cmd_stallings, "folded subgroup graph")
    p.add_argument("--gens", required=True)
    p.add_argument("--rank", type=int, default=2)
    p.add_argument("--member")
    p.add_argument("--shuffle", action="store_true", help="fold in a seeded random order")
    for name, fn in (("product-member", cmd_product_member), ("separate", cmd_separate)):
        p = verb(name, fn, "product membership" if name == "product-member" else "separating finite quotient")
        p.add_argument("--subgroups", required=True, help='e.g. "a;b" or "a^2,b;ab"')
        p.add_argument("--word", required=True)
        p.add_argument("--rank", type=int, default=2)
        if name == "separate":
            p.add_argument("--max-degree", type=int, default=5)
    p = verb("suite", cmd_suite, "run a property suite (module name, C1..C10, or all)")
    p.add_argument("--name", required=True)
    p = verb("export-dot", cmd_export_dot, "DOT for a space or a subgroup graph")
    p.add_argument("--space")
    p.add_argument("--graph")
    p.add_argument("--gens")
    p.add_argument("--rank", type=int, default=2)
    return parser, table


VERBS = tuple(_build()[1])


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, table = _build()
    if argv and not argv[0].startswith("-") and argv[0] not in table:
        print(dumps({"error": "UnknownVerb", "message": f"unknown verb {argv[0]!r}"}))
        return EXIT_USAGE
    try:
        args = parser.parse_args(argv)
        if args.verb is None:
            parser.print_help(sys.stderr)
            return EXIT_USAGE
        res = table[args.verb](args)
    except UsageError as exc:
        print(dumps({"error": "Usage", "message": str(exc)}))
        return EXIT_USAGE
    except Malformed as exc:
        print(dumps({"error": "MalformedJSON", "message": str(exc)}))
        return EXIT_MALFORMED
    except ForgeError as exc:
        print(dumps(exc.to_json()))
        return EXIT_DOMAIN
    _emit(res.text if res.text is not None else dumps(res.data) + "\n", getattr(args, "out", None))
    return res.code


if __name__ == "__main__":
    sys.exit(main())
