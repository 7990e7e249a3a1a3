"""Seeded law suite shared by the command line and the acceptance tests."""
from __future__ import annotations

import random
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterator

from .errors import CatTablesError, Verdict
from .io import Workspace
from .queries import (check_universal, join_opspan, limit_diagram, natural_join_opspan,
                      union_same_signature)
from .random_instances import (random_composable_pair, random_diagram, random_domain, random_function,
                               random_header_map, random_infomorphism, random_signature, random_signed_morphism,
                               random_span, random_table, random_table_morphism_from)
from .relations import Relation, check_galois, check_reflection
from .sets import FinSet
from .signatures import check_signature_adjunction
from .tables import (TableBound, check_fiber_factorizations, check_grothendieck_composition,
                     check_table_fiber_adjunction, compose_table_morphisms, validate_table,
                     validate_table_morphism)
from .tuples import (SignedDomain, check_continuity, check_factorizations, check_levo_dextro_iso,
                     check_tuple_functoriality, tuple_set)
from .typedomains import identity_infomorphism

FIXTURES = Path(__file__).parent / "fixtures"


@dataclass
class LawResult:
    name: str
    verdict: Verdict
    instances: int


def _run(name: str, cases: Iterator[Callable[[], Verdict]]) -> LawResult:
    n = 0
    for case in cases:
        n += 1
        try:
            v = case()
        except CatTablesError as e:
            v = Verdict.reject(None, f"{type(e).__name__}: {e}")
        if not v:
            return LawResult(name, v, n)
    return LawResult(name, Verdict.accept(), n)


def signature_adjunction_cases(rng: random.Random, count: int):
    for _ in range(count):
        X1 = FinSet(f"x{j}" for j in range(rng.randint(0, 3)))
        X2 = FinSet(f"z{j}" for j in range(rng.randint(0, 3) if X1 else 0))
        f = random_function(rng, X2, X1)
        sig2 = random_signature(rng, X2, rng.randint(0, 4), "b")
        sig1 = random_signature(rng, X1, rng.randint(0, 4), "a")
        yield lambda f=f, sig2=sig2, sig1=sig1: check_signature_adjunction(f, sig2, sig1)


def functoriality_cases(rng: random.Random, count: int):
    for _ in range(count):
        m1, m2 = random_composable_pair(rng, max_tuples=1000)
        yield lambda m1=m1, m2=m2: check_tuple_functoriality(m1, m2)


def factorization_cases(rng: random.Random, count: int):
    for _ in range(count):
        m = random_signed_morphism(rng, max_tuples=64)
        T = random_table(rng, m.target, rng.randint(0, 4))
        yield lambda m=m, T=T: (check_factorizations(m) and check_fiber_factorizations(m, T))


def levo_dextro_cases(rng: random.Random, count: int):
    for _ in range(count):
        im = random_infomorphism(rng)
        yield lambda im=im: check_levo_dextro_iso(im)


def table_adjunction_cases(rng: random.Random, count: int, bound: TableBound = TableBound()):
    for _ in range(count):
        im = random_infomorphism(rng, max_sorts=2, max_values=3)
        seed = rng.randrange(2 ** 32)
        yield lambda im=im, seed=seed: check_table_fiber_adjunction(im, bound, seed)


def composition_cases(rng: random.Random, count: int):
    for _ in range(count):
        m1, m2 = random_composable_pair(rng, max_tuples=64, max_attrs=2)
        T3 = random_table(rng, m2.target, rng.randint(0, 3))
        first = random_table_morphism_from(rng, T3, m2, 1)
        second = random_table_morphism_from(rng, first.target, m1, 1)
        yield lambda a=first, b=second: check_grothendieck_composition(a, b)


def reflection_cases(rng: random.Random, count: int):
    for _ in range(count):
        A = random_domain(rng, rng.randint(1, 2), rng.randint(1, 3), sort_prefix="x", value_prefix="y")
        sig = random_signature(rng, A.sorts, rng.randint(0, 2))
        D = SignedDomain(sig, A)
        ts = tuple_set(D).list()
        if len(ts) > 12:
            continue
        tables = [random_table(rng, D, rng.randint(0, 4)) for _ in range(3)]
        relations = [Relation(D, [t for t in ts if rng.random() < 0.5]) for _ in range(3)]
        yield lambda tables=tables, relations=relations: check_reflection(tables, relations)


def continuity_cases(rng: random.Random, count: int):
    for _ in range(count):
        A = random_domain(rng, rng.randint(1, 3), rng.randint(1, 3), sort_prefix="x", value_prefix="y")
        left, right = random_span(rng, A)
        yield lambda A=A, left=left, right=right: check_continuity(A, left, right, cap=1000)


def galois_cases(rng: random.Random, count: int):
    drawn = 0
    while drawn < count:
        A = random_domain(rng, rng.randint(1, 2), rng.randint(1, 3), sort_prefix="x", value_prefix="y")
        h = random_header_map(rng, A)
        if len(tuple_set(SignedDomain(h.target, A))) > 12 or len(tuple_set(SignedDomain(h.source, A))) > 12:
            continue
        drawn += 1
        yield lambda h=h, A=A: check_galois(h, A)


def universal_cases(rng: random.Random, count: int):
    for _ in range(count):
        A = random_domain(rng, rng.randint(1, 2), rng.randint(1, 2), sort_prefix="x", value_prefix="y")
        nodes, edges = random_diagram(rng, A)
        yield lambda nodes=nodes, edges=edges: _limit_verdict(nodes, edges)
        if len(nodes) == 3 and edges[0][1] == edges[1][1]:
            yield lambda e=edges: _join_verdict(e[0][2], e[1][2])
        T = nodes["a"]
        other = random_table(rng, T.domain, rng.randint(0, 2), "u")
        yield lambda T=T, other=other: _union_verdict(T, other)


def _limit_verdict(nodes, edges) -> Verdict:
    res = limit_diagram(nodes, edges)
    return check_universal("limit", nodes, edges, res.table, res.cone)


def _join_verdict(m1, m2) -> Verdict:
    J, p1, p2 = join_opspan(m1, m2, ("a", "b", "c"))
    nodes = {"a": m1.source, "b": m2.source, "c": m1.target}
    edges = [("a", "c", m1), ("b", "c", m2)]
    cone = {"a": p1, "b": p2, "c": compose_table_morphisms(p1, m1)}
    return check_universal("limit", nodes, edges, J, cone)


def _union_verdict(T1, T2) -> Verdict:
    U, j1, j2 = union_same_signature(T1, T2)
    return check_universal("coproduct", [T1, T2], [], U, [j1, j2])


def fixture_cases(manifest: Path = FIXTURES / "manifest.json"):
    ws = Workspace.load(manifest)
    for name in ws.names("tables"):
        yield lambda name=name: validate_table(ws.get("tables", name, check=False))
    for name in ws.names("table_morphisms"):
        yield lambda name=name: validate_table_morphism(ws.get("table_morphisms", name, check=False))
    T1, T2 = ws.get("tables", "employees"), ws.get("tables", "departments")
    m1, m2 = natural_join_opspan(T1, T2)
    yield lambda: _join_verdict(m1, m2)
    yield lambda: check_table_fiber_adjunction(
        identity_infomorphism(T1.domain.domain), TableBound(max_keys=2, max_arity=1),
        tables1=[T1, T2], tables2=[T1, T2])


def run_laws(seed: int = 0, scale: int = 10) -> list[LawResult]:
    """Every law on ``scale`` random instances drawn from ``seed``, plus the
    bundled fixtures."""
    rng = random.Random(seed)
    suite = [
        ("signature adjunction", signature_adjunction_cases(rng, 2 * scale)),
        ("tuple functoriality", functoriality_cases(rng, scale)),
        ("factorizations", factorization_cases(rng, scale)),
        ("levo/dextro isomorphism", levo_dextro_cases(rng, scale)),
        ("table fiber adjunction", table_adjunction_cases(rng, max(1, scale // 2))),
        ("composition through fibers", composition_cases(rng, scale)),
        ("reflection", reflection_cases(rng, scale)),
        ("continuity", continuity_cases(rng, scale)),
        ("galois connections", galois_cases(rng, scale)),
        ("universal properties", universal_cases(rng, scale)),
        ("bundled fixtures", fixture_cases()),
    ]
    return [_run(name, cases) for name, cases in suite]
