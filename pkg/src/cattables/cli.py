"""Command-line entry point: ``cattables COMMAND ...``.

Exit status is 0 on success, 1 when an input is ill-formed in substance
(illegal values, broken naturality, sort clashes, caps exceeded) and 2 when
something cannot be read or resolved.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Any, Sequence

from .errors import CatTablesError, ResolutionError
from .io import (KINDS, Workspace, dumps, kind_of, load_ref, read_json, relation_to_json, table_to_csv,
                 table_to_json)
from .laws import run_laws
from .queries import join_opspan, limit_diagram, natural_join_opspan, union_same_signature
from .relations import Relation, image_of_table, include_relation
from .signatures import Signature
from .tables import Table, sigma_table, substitute_table, validate_table, validate_table_morphism
from .tuples import DEFAULT_CAP, SignedDomain, tuple_set


def _load(ref: str, *kinds: str, check: bool = True) -> tuple[Any, str]:
    kind, obj, name = load_ref(ref, check)
    if kinds and kind not in kinds:
        raise ResolutionError(f"{ref} holds {kind}, expected {' or '.join(kinds)}")
    return obj, name


def _fresh(T: Table) -> Table:
    rows = {f"r{n}": T.rows[k] for n, k in enumerate(T.keys, start=1)}
    return Table(T.domain, list(rows), rows, check=False)


def _emit_table(T: Table, args) -> None:
    if args.fresh_keys:
        T = _fresh(T)
    _write(table_to_csv(T) if args.format == "csv" else dumps(table_to_json(T)), args.out)


def _emit_relation(R: Relation, args) -> None:
    if args.format == "csv":
        _write(table_to_csv(include_relation(R)), args.out)
    else:
        _write(dumps(relation_to_json(R)), args.out)


def _write(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as e:
        raise ResolutionError(f"cannot write {out}: {e.strerror}") from None


# commands ---------------------------------------------------------------------------------

def cmd_validate(args) -> int:
    bad = False
    for ref in args.paths:
        path = Path(ref)
        if path.is_file() and kind_of(read_json(path)) == "manifest":
            ws = Workspace.load(path)
            items = [(kind, name, lambda kind=kind, name=name: ws.get(kind, name, check=False))
                     for kind in KINDS for name in ws.names(kind)]
        else:
            items = [("object", ref, lambda ref=ref: load_ref(ref, check=False)[1])]
        for kind, name, build in items:
            try:
                obj = build()
                if isinstance(obj, tuple):  # diagram (nodes, edges, domain)
                    obj = [m for _, _, m in obj[1]] + list(obj[0].values())
                problem = _problem(obj)
            except ResolutionError:
                raise
            except CatTablesError as e:
                problem = f"{type(e).__name__}: {e}"
            if problem:
                bad = True
                print(f"invalid {kind} {name}: {problem}")
            else:
                print(f"ok {kind} {name}")
    return 1 if bad else 0


def _problem(obj) -> str:
    if isinstance(obj, list):
        return next((p for p in map(_problem, obj) if p), "")
    if isinstance(obj, Table):
        v = validate_table(obj)
        if not v:
            key, attr = v.witness
            return f"key {key} attribute {attr}: {v.detail}"
        return ""
    if isinstance(obj, Relation):
        for t in obj.members:
            if not obj.domain.is_legal(t):
                return f"member {t.key()} is not a legal tuple"
        return ""
    if hasattr(obj, "key_map"):
        v = validate_table_morphism(obj)
        return "" if v else f"{v.detail} (witness {v.witness})"
    return ""


def cmd_enumerate(args) -> int:
    obj, _ = _load(args.ref, "signatures", "tables", "relations")
    if isinstance(obj, Signature):
        if args.domain is None:
            raise ResolutionError("enumerating a signature needs --domain")
        dom, _ = _load(args.domain, "domains")
        D = SignedDomain(obj, dom)
    else:
        D = obj.domain
    ts = tuple_set(D, args.max_tuples).list()
    _emit_relation(Relation(D, ts, check=False), args)
    return 0


def cmd_join(args) -> int:
    T1, n1 = _load(args.left, "tables")
    T2, n2 = _load(args.right, "tables")
    if n1 == n2:
        n1, n2 = n1 + "1", n2 + "2"
    m1, m2 = natural_join_opspan(T1, T2, args.max_tuples)
    J, p1, p2 = join_opspan(m1, m2, (n1, n2, "~shared"), args.qualified, args.max_tuples)
    for a in J.signature.arity:
        sources = [f"{n1}.{i}" for i in T1.signature.arity if p1.arity_map(i) == a]
        sources += [f"{n2}.{i}" for i in T2.signature.arity if p2.arity_map(i) == a]
        note = "identified" if len(sources) > 1 else "kept"
        print(f"{a} <- {' = '.join(sources)} ({note})", file=sys.stderr)
    _emit_table(J, args)
    return 0


def cmd_union(args) -> int:
    T1, _ = _load(args.left, "tables")
    T2, _ = _load(args.right, "tables")
    _emit_table(union_same_signature(T1, T2)[0], args)
    return 0


def cmd_substitute(args) -> int:
    T, _ = _load(args.table, "tables")
    m, _ = _load(args.morphism, "morphisms")
    _emit_table(substitute_table(m, T, args.max_tuples)[0], args)
    return 0


def cmd_sigma(args) -> int:
    T, _ = _load(args.table, "tables")
    m, _ = _load(args.morphism, "morphisms")
    _emit_table(sigma_table(m, T), args)
    return 0


def cmd_image(args) -> int:
    T, _ = _load(args.table, "tables")
    _emit_relation(image_of_table(T), args)
    return 0


def cmd_include(args) -> int:
    R, _ = _load(args.relation, "relations")
    _emit_table(include_relation(R), args)
    return 0


def cmd_limit(args) -> int:
    (nodes, edges, dom), _ = _load(args.diagram, "diagrams")
    res = limit_diagram(nodes, edges, dom, args.qualified, args.max_tuples)
    _emit_table(res.table, args)
    return 0


def cmd_check_laws(args) -> int:
    failed = False
    for r in run_laws(args.seed, args.scale):
        if r.verdict:
            print(f"PASS {r.name} ({r.instances} instances)")
        else:
            failed = True
            print(f"FAIL {r.name} (instance {r.instances}): {r.verdict.detail}")
            print(f"  counterexample: {r.verdict.witness!r}")
    return 1 if failed else 0


# parser -----------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the result here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--max-tuples", type=int, default=DEFAULT_CAP,
                        help="cap on any enumeration (default 10^6)")
    common.add_argument("--fresh-keys", action="store_true", help="renumber result keys r1, r2, ...")
    common.add_argument("--qualified", action="store_true", help="name glued attributes table.attr")

    p = argparse.ArgumentParser(prog="cattables", description="Tables over typed signatures.")
    sub = p.add_subparsers(dest="command", required=True)
    c = sub.add_parser("validate", help="check workspaces and objects")
    c.add_argument("paths", nargs="+")
    c.set_defaults(run=cmd_validate)
    c = sub.add_parser("enumerate", parents=[common], help="list the legal tuples of a header")
    c.add_argument("ref")
    c.add_argument("--domain")
    c.set_defaults(run=cmd_enumerate)
    for name, fn in (("join", cmd_join), ("union", cmd_union)):
        c = sub.add_parser(name, parents=[common])
        c.add_argument("left")
        c.add_argument("right")
        c.set_defaults(run=fn)
    for name, fn in (("substitute", cmd_substitute), ("sigma", cmd_sigma)):
        c = sub.add_parser(name, parents=[common])
        c.add_argument("table")
        c.add_argument("--morphism", required=True)
        c.set_defaults(run=fn)
    c = sub.add_parser("image", parents=[common])
    c.add_argument("table")
    c.set_defaults(run=cmd_image)
    c = sub.add_parser("include", parents=[common])
    c.add_argument("relation")
    c.set_defaults(run=cmd_include)
    c = sub.add_parser("limit", parents=[common])
    c.add_argument("diagram")
    c.set_defaults(run=cmd_limit)
    c = sub.add_parser("check-laws", help="run the law suite on seeded random instances and fixtures")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--scale", type=int, default=10, help="random instances per law")
    c.set_defaults(run=cmd_check_laws)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.run(args)
    except ResolutionError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except CatTablesError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
