"""Joins, finite limits and unions of tables over one type domain.

A limit is built by gluing the signatures (colimit of headers), pulling
every table back to the glued header, and keeping the key combinations
whose glued rows agree and which respect the diagram's key maps.
"""
from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .errors import BoundaryMismatch, CatTablesError, DomainMismatch, SortClash, TooLarge, Verdict
from .sets import FinFunction, FinSet, coproduct_set, pair, pullback_set
from .signatures import Signature, colimit_signatures, typed_functions
from .tables import (Table, TableMorphism, compose_table_morphisms, fiber_homs, fiber_table_morphism,
                     substitute_table)
from .tuples import (DEFAULT_CAP, SignedDomain, Tuple, fiber_signed_morphism, identity_signed_morphism,
                     tuple_set)
from .typedomains import TypeDomain

Edge = tuple  # (source node, target node, TableMorphism)


def _require_fiber(m: TableMorphism, A: TypeDomain) -> None:
    if m.source.domain.domain != A or m.target.domain.domain != A:
        raise DomainMismatch("all tables must share one type domain")
    if (m.dom_mor.sort_map != FinFunction.identity(A.sorts)
            or m.dom_mor.value_map != FinFunction.identity(A.values)):
        raise DomainMismatch("morphisms must have identity sort and value maps")


def join_opspan(m1: TableMorphism, m2: TableMorphism, labels: tuple[str, str, str] = ("1", "2", "3"),
                qualified: bool = False, cap: int = DEFAULT_CAP) -> tuple[Table, TableMorphism, TableMorphism]:
    """Join of T₁ → T ← T₂: pushout header, pullback keys ⟨k₁,k₂⟩ and the
    glued row. ``labels`` name T₁, T₂, T when naming header classes."""
    if m1.target != m2.target:
        raise BoundaryMismatch("the two morphisms must share their target table")
    A = m1.target.domain.domain
    _require_fiber(m1, A)
    _require_fiber(m2, A)
    T1, T2, T = m1.source, m2.source, m1.target
    l1, l2, l0 = labels
    sig, legs = colimit_signatures({l1: T1.signature, l2: T2.signature, l0: T.signature},
                                   [(l0, l1, m1.dom_mor.sig_mor), (l0, l2, m2.dom_mor.sig_mor)],
                                   qualified=qualified)
    size = sum(1 for a in T1.keys for b in T2.keys if m1.key_map(a) == m2.key_map(b))
    if size > cap:
        raise TooLarge(size, cap, "join key set")
    P, p1, p2 = pullback_set(m1.key_map, m2.key_map)
    i1, i2 = legs[l1], legs[l2]
    rows = {}
    for p in P:
        r1, r2 = T1.rows[p1(p)], T2.rows[p2(p)]
        glued = {i1(a): v for a, v in r1.items()}
        for a, v in r2.items():
            if glued.setdefault(i2(a), v) != v:
                raise CatTablesError(f"rows disagree on {i2(a)} for key {p}")
        rows[p] = Tuple(glued)
    # glued rows are legal because every value comes from a legal row;
    # the tests validate the table and both projections independently
    J = Table(SignedDomain(sig, A), P, rows, check=False)
    proj1 = TableMorphism(J, T1, fiber_signed_morphism(T1.domain, J.domain, i1), p1, check=False)
    proj2 = TableMorphism(J, T2, fiber_signed_morphism(T2.domain, J.domain, i2), p2, check=False)
    return J, proj1, proj2


def shared_signature(T1: Table, T2: Table) -> Signature:
    s1, s2 = T1.signature, T2.signature
    shared = {}
    for a in s1.arity:
        if a in s2.arity:
            if s1.sort_of(a) != s2.sort_of(a):
                raise SortClash(f"attribute {a} has sort {s1.sort_of(a)} on the left "
                                f"and {s2.sort_of(a)} on the right")
            shared[a] = s1.sort_of(a)
    return Signature.of(shared, s1.sorts)


def universal_table(D: SignedDomain, cap: int = DEFAULT_CAP) -> Table:
    """Every legal tuple of D, keyed by its own text form."""
    ts = tuple_set(D, cap).list()
    return Table(D, FinSet(t.key() for t in ts), {t.key(): t for t in ts}, check=False)


def natural_join_opspan(T1: Table, T2: Table, cap: int = DEFAULT_CAP) -> tuple[TableMorphism, TableMorphism]:
    """T₁ → U ← T₂ where U is the universal table on the shared header and
    each key goes to its row restricted to the shared attributes."""
    if T1.domain.domain != T2.domain.domain:
        raise DomainMismatch("natural join needs a common type domain")
    sig = shared_signature(T1, T2)
    U = universal_table(SignedDomain(sig, T1.domain.domain), cap)
    inc = FinFunction.identity(sig.arity)
    legs = []
    for T in (T1, T2):
        h = FinFunction(sig.arity, T.signature.arity, inc.as_dict())
        legs.append(fiber_table_morphism(T, U, h, {k: t.along(h).key() for k, t in T.rows.items()}))
    return legs[0], legs[1]


def natural_join(T1: Table, T2: Table, labels: tuple[str, str] = ("1", "2"), qualified: bool = False,
                 cap: int = DEFAULT_CAP) -> Table:
    m1, m2 = natural_join_opspan(T1, T2, cap)
    return join_opspan(m1, m2, (labels[0], labels[1], "~shared"), qualified, cap)[0]


def union_same_signature(T1: Table, T2: Table) -> tuple[Table, TableMorphism, TableMorphism]:
    """Keys ``0:k`` and ``1:k`` with rows copied from the operands."""
    if T1.domain != T2.domain:
        raise DomainMismatch("union needs identical signed domains")
    K, (j1, j2) = coproduct_set([T1.keys, T2.keys])
    rows = {j1(k): t for k, t in T1.rows.items()}
    rows.update({j2(k): t for k, t in T2.rows.items()})
    U = Table(T1.domain, K, rows, check=False)
    ident = identity_signed_morphism(T1.domain)
    return U, TableMorphism(T1, U, ident, j1), TableMorphism(T2, U, ident, j2)


@dataclass
class LimitResult:
    table: Table
    cone: dict[str, TableMorphism]
    central: Signature
    substituted: dict[str, Table] = field(default_factory=dict)


def limit_diagram(nodes: Mapping[str, Table], edges: Sequence[Edge], domain: TypeDomain | None = None,
                  qualified: bool = False, cap: int = DEFAULT_CAP) -> LimitResult:
    """Limit of a finite diagram of tables over one type domain."""
    if domain is None:
        if not nodes:
            raise BoundaryMismatch("an empty diagram needs an explicit type domain")
        domain = next(iter(nodes.values())).domain.domain
    A = domain
    for n, T in nodes.items():
        if T.domain.domain != A:
            raise DomainMismatch(f"table {n} is over a different type domain")
    for a, b, m in edges:
        if m.source != nodes[a] or m.target != nodes[b]:
            raise BoundaryMismatch(f"edge {a}→{b} does not match its endpoints")
        _require_fiber(m, A)

    central, legs = colimit_signatures({n: T.signature for n, T in nodes.items()},
                                       [(b, a, m.dom_mor.sig_mor) for a, b, m in edges],
                                       sorts=A.sorts, qualified=qualified)
    Dc = SignedDomain(central, A)
    order = sorted(nodes)
    substituted, groups = {}, {}
    for n in order:
        sub, back = substitute_table(fiber_signed_morphism(nodes[n].domain, Dc, legs[n]), nodes[n], cap)
        substituted[n] = sub
        g = defaultdict(list)
        for key, u in sub.rows.items():
            g[u.key()].append(back.key_map(key))
        groups[n] = g

    if order:
        common = set(groups[order[0]])
        for n in order[1:]:
            common &= set(groups[n])
        row_of = {}
        for n in order:
            for key, u in substituted[n].rows.items():
                row_of.setdefault(u.key(), u)
    else:
        empty = Tuple()
        common, row_of = {empty.key()}, {empty.key(): empty}

    rows, picks = {}, {}
    size = 0
    for c in sorted(common):
        lists = [groups[n][c] for n in order]
        count = 1
        for lst in lists:
            count *= len(lst)
        size += count
        if size > cap:
            raise TooLarge(size, cap, "limit key candidates")
        for combo in itertools.product(*lists):
            chosen = dict(zip(order, combo))
            if all(m.key_map(chosen[a]) == chosen[b] for a, b, m in edges):
                key = pair(*combo)
                if key in rows:
                    raise CatTablesError(f"limit key {key} arises twice")
                rows[key] = row_of[c]
                picks[key] = chosen
    L = Table(Dc, FinSet(rows), rows, check=False)
    cone = {n: fiber_table_morphism(L, nodes[n], legs[n], {key: picks[key][n] for key in L.keys})
            for n in order}
    return LimitResult(L, cone, central, substituted)


# universal properties ---------------------------------------------------------------------

@dataclass(frozen=True)
class UniversalBound:
    max_keys: int = 3
    max_rows: int = 256
    max_cocones: int = 64
    extra_attribute: bool = True


def _cone_commutes(nodes, edges, legs) -> Verdict:
    for a, b, m in edges:
        if compose_table_morphisms(legs[a], m) != legs[b]:
            return Verdict.reject((a, b), f"cone leg to {b} differs from the leg to {a} followed by the edge")
    return Verdict.accept()


def _signature_cocones(nodes, edges, apex: Signature, limit: int):
    """Families of sort-preserving maps I_n → apex commuting with the header
    maps of the edges (edge a→b has header map I_b → I_a), at most
    ``limit`` of them, found by backtracking node by node."""
    order = sorted(nodes)
    options = {n: list(typed_functions(nodes[n].signature, apex)) for n in order}
    found = []

    def consistent(h):
        return all(h[b](i) == h[a](m.arity_map(i)) for a, b, m in edges
                   if a in h and b in h for i in nodes[b].signature.arity)

    def extend(pos, h):
        if len(found) >= limit:
            return
        if pos == len(order):
            found.append(dict(h))
            return
        n = order[pos]
        for choice in options[n]:
            h[n] = choice
            if consistent(h):
                extend(pos + 1, h)
            del h[n]

    extend(0, {})
    return found


def _extended(sig: Signature) -> Signature:
    if not sig.sorts:
        return sig
    attrs = sig.attributes()
    name = "extra"
    while name in attrs:
        name += "'"
    attrs[name] = sig.sorts.elements[0]
    return Signature.of(attrs, sig.sorts)


def check_limit_cone(nodes: Mapping[str, Table], edges: Sequence[Edge], apex: Table,
                     legs: Mapping[str, TableMorphism], bound: UniversalBound = UniversalBound()) -> Verdict:
    """Every competing cone with at most ``bound.max_keys`` keys factors
    through (apex, legs) in exactly one way.

    Competitor headers are the apex header and, optionally, the apex header
    with one extra attribute. Competitor rows range over every tuple of the
    competitor header that admits legs.
    """
    try:
        v = _cone_commutes(nodes, edges, legs)
        if not v:
            return v
        A = apex.domain.domain
        L = apex
        order = sorted(nodes)
        gamma = {n: legs[n].arity_map for n in order}
        by_row = defaultdict(list)
        for key, t in L.rows.items():
            by_row[t.key()].append(key)
        headers = [L.signature] + ([_extended(L.signature)] if bound.extra_attribute else [])
        for header in headers:
            D = SignedDomain(header, A)
            ts = tuple_set(D, bound.max_rows)
            if len(ts) > bound.max_rows:
                continue
            candidates = ts.list()
            for h_legs in _signature_cocones(nodes, edges, header, bound.max_cocones):
                # arity maps L → header compatible with the competitor's legs
                allowed = {i: [] for i in L.signature.arity}
                for i in L.signature.arity:
                    for j in header.arity:
                        if header.sort_of(j) != L.signature.sort_of(i):
                            continue
                        if all(h_legs[n](p) == j for n in order for p in nodes[n].signature.arity
                               if gamma[n](p) == i):
                            allowed[i].append(j)
                mediating_h = list(typed_functions(L.signature, header, allowed))
                # options: a row plus a choice of leg key at every node
                options = []
                for r in candidates:
                    per_node = []
                    for n in order:
                        want = r.along(h_legs[n])
                        per_node.append([k for k in nodes[n].keys if nodes[n].rows[k] == want])
                    for combo in itertools.product(*per_node):
                        chosen = dict(zip(order, combo))
                        if all(m.key_map(chosen[a]) == chosen[b] for a, b, m in edges):
                            options.append((r, chosen))
                count = {}
                for hi, h in enumerate(mediating_h):
                    for oi, (r, chosen) in enumerate(options):
                        want = r.along(h).key()
                        count[hi, oi] = sum(1 for key in by_row.get(want, ())
                                            if all(legs[n].key_map(key) == chosen[n] for n in order))
                for size in range(bound.max_keys + 1):
                    for combo in itertools.combinations_with_replacement(range(len(options)), size):
                        total = 0
                        for hi in range(len(mediating_h)):
                            prod = 1
                            for oi in combo:
                                prod *= count[hi, oi]
                            total += prod
                        if total != 1:
                            witness = [options[oi] for oi in combo]
                            return Verdict.reject((header, witness),
                                                  f"competing cone has {total} mediators")
    except CatTablesError as e:
        return Verdict.reject(None, f"construction failed: {e}")
    return Verdict.accept()


def check_coproduct_cocone(tables: Sequence[Table], apex: Table, injections: Sequence[TableMorphism],
                           bound: UniversalBound = UniversalBound()) -> Verdict:
    """Coproduct property in the fiber over one signed domain: every
    competing cocone into a table with at most ``bound.max_keys`` keys
    factors through the injections in exactly one way."""
    try:
        D = apex.domain
        for T, j in zip(tables, injections):
            if T.domain != D or j.source != T or j.target != apex:
                return Verdict.reject(T, "injection does not match its operand")
            if j.arity_map != FinFunction.identity(D.signature.arity):
                return Verdict.reject(T, "injection is not over the identity header map")
        pool = {t for T in tables for t in T.rows.values()}
        ts = tuple_set(D, bound.max_rows)
        if len(ts) <= bound.max_rows:
            extra = next((t for t in ts if t not in pool), None)
            if extra is not None:
                pool.add(extra)
        pool = sorted(pool, key=Tuple.key)
        for size in range(bound.max_keys + 1):
            for combo in itertools.combinations_with_replacement(pool, size):
                qrows = {f"q{c}": t for c, t in enumerate(combo)}
                by_row = defaultdict(list)
                for q, t in qrows.items():
                    by_row[t].append(q)
                per_table = []
                for T in tables:
                    keys = T.keys.elements
                    per_table.append([dict(zip(keys, ys)) for ys in
                                      itertools.product(*(by_row.get(T.rows[k], []) for k in keys))])
                for legs in itertools.product(*per_table):
                    total = 1
                    for u in apex.keys:
                        fits = [q for q in by_row.get(apex.rows[u], [])
                                if all(legs[n][x] == q for n, j in enumerate(injections)
                                       for x in j.key_map.fiber(u))]
                        total *= len(fits)
                    if total != 1:
                        return Verdict.reject((qrows, legs), f"competing cocone has {total} mediators")
    except CatTablesError as e:
        return Verdict.reject(None, f"construction failed: {e}")
    return Verdict.accept()


def check_terminal(apex: Table, competitors: Sequence[Table]) -> Verdict:
    for C in competitors:
        n = len(fiber_homs(C, apex))
        if n != 1:
            return Verdict.reject(C, f"{n} morphisms into the candidate terminal table")
    return Verdict.accept()


def check_initial(apex: Table, competitors: Sequence[Table]) -> Verdict:
    """Exactly one row-preserving key map out of ``apex`` into each
    competitor over the same signed domain."""
    keys = apex.keys.elements
    for C in competitors:
        if C.domain != apex.domain:
            continue
        ok = [k for k in itertools.product(C.keys.elements, repeat=len(keys))
              if all(C.rows[q] == apex.rows[u] for u, q in zip(keys, k))]
        if len(ok) != 1:
            return Verdict.reject(C, f"{len(ok)} morphisms out of the candidate initial table")
    return Verdict.accept()


def check_universal(kind: str, nodes, edges, apex: Table, legs, bound: UniversalBound = UniversalBound(),
                    competitors: Sequence[Table] = ()) -> Verdict:
    """Dispatch on ``kind``: "limit" takes a cone dict, "coproduct" a list of
    injections; an empty diagram checks terminal or initial objects against
    ``competitors``."""
    if kind == "limit":
        if not nodes:
            v = check_terminal(apex, competitors)
            if not v:
                return v
            if apex.signature.arity or len(apex.keys) != 1:
                return Verdict.reject(apex, "terminal table must have one key and an empty header")
        return check_limit_cone(nodes, edges, apex, legs, bound)
    if kind == "coproduct":
        if not nodes:
            if apex.keys:
                return Verdict.reject(apex, "initial table must be empty")
            return check_initial(apex, competitors)
        return check_coproduct_cocone(list(nodes), apex, list(legs), bound)
    raise ValueError(f"unknown kind {kind}")
