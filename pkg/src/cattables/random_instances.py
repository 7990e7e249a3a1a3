"""Seeded generators of small random instances for the law checkers."""
from __future__ import annotations

import random
from collections import defaultdict

from .sets import FinFunction, FinSet
from .signatures import Signature, SignatureMorphism, fiber_morphism
from .tables import Table, TableMorphism, fiber_table_morphism
from .tuples import SignedDomain, SignedDomainMorphism, _apply, tuple_set
from .typedomains import Infomorphism, TypeDomain


def random_function(rng: random.Random, a: FinSet, b: FinSet) -> FinFunction:
    return FinFunction(a, b, {x: rng.choice(b.elements) for x in a})


def random_domain(rng: random.Random, n_sorts: int, n_values: int, density: float = 0.5,
                  sort_prefix: str = "s", value_prefix: str = "v") -> TypeDomain:
    sorts = [f"{sort_prefix}{j}" for j in range(n_sorts)]
    values = [f"{value_prefix}{j}" for j in range(n_values)]
    pairs = frozenset((x, y) for x in sorts for y in values if rng.random() < density)
    return TypeDomain(FinSet(sorts), FinSet(values), pairs)


def random_signature(rng: random.Random, sorts: FinSet, n_attrs: int, prefix: str = "a") -> Signature:
    if not sorts:
        n_attrs = 0
    return Signature.of({f"{prefix}{j}": rng.choice(sorts.elements) for j in range(n_attrs)}, sorts)


def random_infomorphism(rng: random.Random, max_sorts: int = 3, max_values: int = 5,
                        allow_empty: bool = True, target: TypeDomain | None = None,
                        sort_prefix: str = "z", value_prefix: str = "w") -> Infomorphism:
    """A random A₂ → A₁ (A₁ drawn unless given as ``target``). A₂ is built
    from A₁ so the biconditional holds: values of A₁ with the same profile
    along f may share an image."""
    lo = 0 if allow_empty else 1
    A1 = target if target is not None else random_domain(
        rng, rng.randint(lo, max_sorts), rng.randint(lo, max_values), sort_prefix="x", value_prefix="y")
    X2 = FinSet(f"{sort_prefix}{j}" for j in range(rng.randint(lo, max_sorts) if A1.sorts else 0))
    f = random_function(rng, X2, A1.sorts)
    classes = defaultdict(list)
    for y in A1.values:
        classes[tuple(A1.satisfies(y, f(x)) for x in X2)].append(y)
    g_map, pairs, n = {}, set(), 0
    for profile, ys in sorted(classes.items()):
        tokens = [f"{value_prefix}{n + j}" for j in range(rng.randint(1, max(1, len(ys))))]
        n += len(tokens)
        for w in tokens:
            pairs.update((x, w) for x, sat in zip(X2, profile) if sat)
        for y in ys:
            g_map[y] = rng.choice(tokens)
    extra = [f"{value_prefix}{n + j}" for j in range(rng.randint(0, 2))]
    for w in extra:
        pairs.update((x, w) for x in X2 if rng.random() < 0.5)
    Y2 = FinSet(extra + [f"{value_prefix}{j}" for j in range(n)])
    A2 = TypeDomain(X2, Y2, frozenset(pairs))
    return Infomorphism(A2, A1, f, FinFunction(A1.values, Y2, g_map))


def random_signature_morphism_into(rng: random.Random, sig1: Signature, f: FinFunction,
                                   n_attrs: int, prefix: str = "b") -> SignatureMorphism:
    """A random ⟨h, f⟩ into ``sig1`` whose source is a fresh signature over
    f's source."""
    usable = [i for i in sig1.arity if f.fiber(sig1.sort_of(i))]
    if not usable:
        n_attrs = 0
    h, typing = {}, {}
    for j in range(n_attrs):
        i1 = rng.choice(usable)
        h[f"{prefix}{j}"] = i1
        typing[f"{prefix}{j}"] = rng.choice(f.fiber(sig1.sort_of(i1)))
    sig2 = Signature.of(typing, f.source)
    return SignatureMorphism(sig2, sig1, FinFunction(sig2.arity, sig1.arity, h), f)


def random_signed_morphism(rng: random.Random, max_tuples: int = 64, max_attrs: int = 3,
                           tries: int = 100) -> SignedDomainMorphism:
    for _ in range(tries):
        im = random_infomorphism(rng)
        sig1 = random_signature(rng, im.target.sorts, rng.randint(0, max_attrs), "a")
        sm = random_signature_morphism_into(rng, sig1, im.sort_map, rng.randint(0, max_attrs))
        m = SignedDomainMorphism(sm, im)
        if len(tuple_set(m.target)) <= max_tuples and len(tuple_set(m.source)) <= max_tuples:
            return m
    raise RuntimeError("could not draw a small enough signed-domain morphism")


def random_composable_pair(rng: random.Random, max_tuples: int = 1000, max_attrs: int = 3,
                           tries: int = 100) -> tuple[SignedDomainMorphism, SignedDomainMorphism]:
    """(m1: D₃→D₂, m2: D₂→D₁) with every tuple set within ``max_tuples``."""
    for _ in range(tries):
        m2 = random_signed_morphism(rng, max_tuples, max_attrs)
        D2 = m2.source
        im = random_infomorphism(rng, target=D2.domain, sort_prefix="u", value_prefix="q")
        sm = random_signature_morphism_into(rng, D2.signature, im.sort_map, rng.randint(0, max_attrs), "c")
        m1 = SignedDomainMorphism(sm, im)
        if len(tuple_set(m1.source)) <= max_tuples:
            return m1, m2
    raise RuntimeError("could not draw a small enough composable pair")


def random_fiber_signed_morphism(rng: random.Random, D1: SignedDomain, n_attrs: int,
                                 prefix: str = "b") -> SignedDomainMorphism:
    """⟨h, id, id⟩ into D1 from a fresh signature over the same domain."""
    A = D1.domain
    ident = FinFunction.identity(A.sorts)
    sm = random_signature_morphism_into(rng, D1.signature, ident, n_attrs, prefix)
    return SignedDomainMorphism(sm, Infomorphism(A, A, ident, FinFunction.identity(A.values)))


def random_table(rng: random.Random, D: SignedDomain, n_keys: int, prefix: str = "k") -> Table:
    ts = tuple_set(D).list()
    if not ts:
        return Table(D, (), {})
    return Table.from_rows(D, {f"{prefix}{j}": rng.choice(ts) for j in range(n_keys)})


def random_table_morphism_from(rng: random.Random, T1: Table, m: SignedDomainMorphism,
                               extra_rows: int = 2, prefix: str = "m") -> TableMorphism:
    """A morphism T1 → T2 over ``m`` where T2 holds the mapped rows (some
    keys merged) plus a few unrelated rows."""
    rows, k = {}, {}
    by_row = {}
    n = 0
    for x in T1.keys:
        r = _apply(m, T1.rows[x])
        if r in by_row and rng.random() < 0.5:
            k[x] = by_row[r]
            continue
        key = f"{prefix}{n}"
        n += 1
        rows[key] = r
        by_row.setdefault(r, key)
        k[x] = key
    ts = tuple_set(m.source).list() if len(tuple_set(m.source)) <= 10 ** 4 else []
    for _ in range(extra_rows if ts else 0):
        rows[f"{prefix}{n}"] = rng.choice(ts)
        n += 1
    T2 = Table.from_rows(m.source, rows)
    return TableMorphism(T1, T2, m, k)


def random_fiber_table_morphism(rng: random.Random, T1: Table, n_attrs: int, prefix: str = "m",
                                attr_prefix: str = "b") -> TableMorphism:
    m = random_fiber_signed_morphism(rng, T1.domain, n_attrs, attr_prefix)
    return random_table_morphism_from(rng, T1, m, rng.randint(0, 2), prefix)


def random_join_pair(rng: random.Random, A: TypeDomain, max_attrs: int = 5, max_rows: int = 50,
                     names=("p", "q", "r", "s", "t", "u", "w")) -> tuple[Table, Table]:
    """Two tables over A whose headers overlap on a random set of names."""
    sorts = A.sorts.elements
    pool = list(names)
    typing = {n: rng.choice(sorts) for n in pool}
    tables = []
    for _ in range(2):
        chosen = rng.sample(pool, rng.randint(0, min(max_attrs, len(pool))))
        sig = Signature.of({n: typing[n] for n in chosen}, A.sorts)
        tables.append(random_table(rng, SignedDomain(sig, A), rng.randint(0, max_rows),
                                   prefix=f"r{len(tables)}_"))
    return tables[0], tables[1]


def random_diagram(rng: random.Random, A: TypeDomain, max_keys: int = 3, max_attrs: int = 2):
    """A small diagram of tables over A: single, discrete pair, opspan or
    span. Returns (nodes, edges)."""
    kind = rng.choice(["single", "discrete", "opspan", "span"])
    base = SignedDomain(random_signature(rng, A.sorts, rng.randint(0, max_attrs), "a"), A)
    T0 = random_table(rng, base, rng.randint(0, max_keys), "k")
    if kind == "single":
        return {"a": T0}, []
    if kind == "discrete":
        other = SignedDomain(random_signature(rng, A.sorts, rng.randint(0, max_attrs), "c"), A)
        return {"a": T0, "b": random_table(rng, other, rng.randint(0, max_keys), "j")}, []
    if kind == "opspan":
        # T1 → T ← T2 with T built from T1's image and T2 pulled back over it
        m1 = random_fiber_table_morphism(rng, T0, rng.randint(0, max_attrs), "m", "b")
        T = m1.target
        h2 = rng.randint(0, max_attrs)
        D2sig = {f"c{j}": rng.choice(A.sorts.elements) for j in range(h2)}
        D2sig.update({a: T.signature.sort_of(a) for a in T.signature.arity})
        D2 = SignedDomain(Signature.of(D2sig, A.sorts), A)
        ts = tuple_set(D2).list()
        rows, k = {}, {}
        for j in range(rng.randint(0, max_keys) if ts else 0):
            target_key = rng.choice(T.keys.elements) if T.keys else None
            cands = [t for t in ts if target_key is not None
                     and all(t[a] == T.rows[target_key][a] for a in T.signature.arity)]
            if cands:
                rows[f"n{j}"] = rng.choice(cands)
                k[f"n{j}"] = target_key
        T2 = Table.from_rows(D2, rows)
        m2 = fiber_table_morphism(T2, T, {a: a for a in T.signature.arity}, k)
        return {"a": T0, "b": T2, "c": T}, [("a", "c", m1), ("b", "c", m2)]
    # span: T1 ← T0 → T2
    m1 = random_fiber_table_morphism(rng, T0, rng.randint(0, max_attrs), "m", "b")
    m2 = random_fiber_table_morphism(rng, T0, rng.randint(0, max_attrs), "n", "c")
    return {"a": T0, "b": m1.target, "c": m2.target}, [("a", "b", m1), ("a", "c", m2)]


def random_span(rng: random.Random, A: TypeDomain, max_attrs: int = 3) -> tuple[SignatureMorphism, SignatureMorphism]:
    """Header maps I → I₁ and I → I₂ over A's sorts; images are chosen per
    sort so the typing always commutes."""
    apex = random_signature(rng, A.sorts, rng.randint(0, max_attrs), "a")
    legs = []
    for side in ("b", "c"):
        h = {a: f"{side}_{apex.sort_of(a)}_{rng.randint(0, 1)}" for a in apex.arity}
        typing = {b: apex.sort_of(a) for a, b in h.items()}
        for j in range(rng.randint(0, 2) if A.sorts else 0):
            typing[f"{side}{j}"] = rng.choice(A.sorts.elements)
        target = Signature.of(typing, A.sorts)
        legs.append(fiber_morphism(apex, target, FinFunction(apex.arity, target.arity, h)))
    return legs[0], legs[1]


def random_header_map(rng: random.Random, A: TypeDomain, max_attrs: int = 3) -> SignatureMorphism:
    """A fiber header map I₂ → I₁ over A's sorts."""
    sig1 = random_signature(rng, A.sorts, rng.randint(0, max_attrs), "a")
    return random_signature_morphism_into(rng, sig1, FinFunction.identity(A.sorts), rng.randint(0, max_attrs))
