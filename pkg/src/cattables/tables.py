"""Tables, table morphisms and the passages between fibers of tables.

A table morphism T₁ → T₂ carries a key function K₁ → K₂ forward and a
signed-domain morphism D₂ → D₁ backward; naturality says the row of k(x)
is the image of the row of x under the tuple map.
"""
from __future__ import annotations

import itertools
import random
from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

from .errors import BoundaryMismatch, CatTablesError, IllegalTuple, NotNatural, TooLarge, Verdict
from .sets import FinFunction, FinSet, compose, pair
from .signatures import (Signature, SignatureMorphism, fiber_morphism, substitute_along,
                         substitute_morphism, sum_along, sum_morphism, transpose_to_substitution,
                         transpose_to_sum, typed_functions, unit)
from .tuples import (DEFAULT_CAP, SignedDomain, SignedDomainMorphism, Tuple, _apply, bridge_levo,
                     bridge_signature, compose_signed_morphisms, fiber_signed_morphism,
                     identity_signed_morphism, preimage, preimage_size, small_signatures, sum_part,
                     tuple_set, value_translation)
from .typedomains import Infomorphism, inverse_image_domain


def _table_verdict(domain: SignedDomain, keys: FinSet, rows: Mapping[str, Tuple]) -> Verdict:
    sig, A = domain.signature, domain.domain
    for k in keys:
        t = rows[k]
        for i in sig.arity:
            if i not in t:
                return Verdict.reject((k, i), f"row {k} has no value for attribute {i}")
            if not A.satisfies(t[i], sig.sort_of(i)):
                return Verdict.reject((k, i), f"row {k}: value {t[i]} of attribute {i} "
                                              f"is not of sort {sig.sort_of(i)}")
        for i in t:
            if i not in sig.arity:
                return Verdict.reject((k, i), f"row {k} has unknown attribute {i}")
    return Verdict.accept()


class Table:
    """Keys K with a row (legal tuple) for each key; rows may repeat."""

    __slots__ = ("domain", "keys", "rows")

    def __init__(self, domain: SignedDomain, keys: FinSet | Iterable[str],
                 rows: Mapping[str, Mapping[str, str]], check: bool = True):
        keys = keys if isinstance(keys, FinSet) else FinSet(keys)
        if set(rows) != set(keys):
            raise BoundaryMismatch("rows must be given for exactly the keys")
        self.domain = domain
        self.keys = keys
        self.rows = {k: r if isinstance(r, Tuple) else Tuple(r) for k in keys for r in (rows[k],)}
        if check:
            v = _table_verdict(domain, keys, self.rows)
            if not v:
                raise IllegalTuple(v.detail)

    @classmethod
    def from_rows(cls, domain: SignedDomain, rows: Mapping[str, Mapping[str, str]]) -> "Table":
        return cls(domain, FinSet(rows), rows)

    @property
    def signature(self) -> Signature:
        return self.domain.signature

    def row(self, k: str) -> Tuple:
        return self.rows[k]

    def row_counts(self) -> Counter:
        return Counter(t.key() for t in self.rows.values())

    def __len__(self) -> int:
        return len(self.keys)

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, Table) and self.domain == other.domain and self.keys == other.keys
                and self.rows == other.rows)

    __hash__ = None

    def __repr__(self) -> str:
        return f"Table({self.signature}, {len(self.keys)} keys)"


def validate_table(T: Table) -> Verdict:
    return _table_verdict(T.domain, T.keys, T.rows)


def is_isomorphic(T1: Table, T2: Table) -> bool:
    """Same signed domain and a key bijection preserving rows."""
    return T1.domain == T2.domain and T1.row_counts() == T2.row_counts()


def _naturality(source: Table, target: Table, dom_mor: SignedDomainMorphism, k: FinFunction) -> Verdict:
    for x in source.keys:
        expected = _apply(dom_mor, source.rows[x])
        if target.rows[k(x)] != expected:
            return Verdict.reject(x, f"key {x} goes to {k(x)} whose row {target.rows[k(x)]} "
                                     f"differs from the mapped row {expected}")
    return Verdict.accept()


class TableMorphism:
    __slots__ = ("source", "target", "dom_mor", "key_map")

    def __init__(self, source: Table, target: Table, dom_mor: SignedDomainMorphism,
                 key_map: FinFunction | Mapping[str, str], check: bool = True):
        if dom_mor.source != target.domain or dom_mor.target != source.domain:
            raise BoundaryMismatch("domain morphism must run from the target's domain to the source's")
        if not isinstance(key_map, FinFunction):
            key_map = FinFunction(source.keys, target.keys, key_map)
        if key_map.source != source.keys or key_map.target != target.keys:
            raise BoundaryMismatch("key map must run from source keys to target keys")
        self.source = source
        self.target = target
        self.dom_mor = dom_mor
        self.key_map = key_map
        if check:
            v = _naturality(source, target, dom_mor, key_map)
            if not v:
                raise NotNatural(v.detail)

    @property
    def arity_map(self) -> FinFunction:
        return self.dom_mor.arity_map

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, TableMorphism) and self.source == other.source
                and self.target == other.target and self.dom_mor == other.dom_mor
                and self.key_map == other.key_map)

    __hash__ = None

    def __repr__(self) -> str:
        return f"TableMorphism(k={self.key_map!r}, h={self.arity_map!r})"


def validate_table_morphism(m: TableMorphism) -> Verdict:
    return _naturality(m.source, m.target, m.dom_mor, m.key_map)


def fiber_table_morphism(source: Table, target: Table, h: FinFunction | Mapping[str, str] | SignatureMorphism,
                         k: FinFunction | Mapping[str, str]) -> TableMorphism:
    """A morphism over one type domain; ``h`` maps target attributes to
    source attributes."""
    return TableMorphism(source, target, fiber_signed_morphism(target.domain, source.domain, h), k)


def identity_table_morphism(T: Table) -> TableMorphism:
    return TableMorphism(T, T, identity_signed_morphism(T.domain), FinFunction.identity(T.keys))


def compose_table_morphisms(m1: TableMorphism, m2: TableMorphism) -> TableMorphism:
    """First m1: T₁→T₂, then m2: T₂→T₃."""
    if m1.target != m2.source:
        raise BoundaryMismatch("table morphisms are not composable")
    return TableMorphism(m1.source, m2.target, compose_signed_morphisms(m2.dom_mor, m1.dom_mor),
                         compose(m1.key_map, m2.key_map))


def sigma_table(m: SignedDomainMorphism, T: Table) -> Table:
    """Push T (over m's target) to m's source: same keys, rows mapped."""
    if T.domain != m.target:
        raise BoundaryMismatch("table is not over the target of the morphism")
    return Table(m.source, T.keys, {k: _apply(m, t) for k, t in T.rows.items()}, check=False)


def sigma_leg(m: SignedDomainMorphism, T: Table) -> TableMorphism:
    """The canonical morphism T → Σ_m(T) with identity keys."""
    return TableMorphism(T, sigma_table(m, T), m, FinFunction.identity(T.keys))


def substitute_table(m: SignedDomainMorphism, T: Table, cap: int = DEFAULT_CAP) -> tuple[Table, TableMorphism]:
    """Pull T (over m's source) back to m's target.

    Keys are the pairs ⟨k, u⟩ where u is a target tuple whose image under
    the tuple map is the row of k; the row of ⟨k, u⟩ is u. The returned
    morphism m*(T) → T projects each pair to k.
    """
    if T.domain != m.source:
        raise BoundaryMismatch("table is not over the source of the morphism")
    total = sum(preimage_size(m, t) for t in T.rows.values())
    if total > cap:
        raise TooLarge(total, cap, "substituted key set")
    rows, proj = {}, {}
    for k in T.keys:
        for u in preimage(m, T.rows[k]):
            key = pair(k, u.key())
            rows[key] = u
            proj[key] = k
    sub = Table(m.target, FinSet(rows), rows, check=False)
    if len(sub.keys) != len(rows):
        raise CatTablesError("substituted keys collide")
    return sub, TableMorphism(sub, T, m, FinFunction(sub.keys, T.keys, proj), check=False)


def transpose_table(m: SignedDomainMorphism, T1: Table, T2: Table, leg: FinFunction,
                    cap: int = DEFAULT_CAP) -> FinFunction:
    """Adjoint transpose of a key function across pushing forward and
    pulling back along m (T1 over m's target, T2 over m's source).

    A leg K₁ → K₂ (a morphism Σ_m(T1) → T2) becomes x ↦ ⟨k(x), t₁(x)⟩ into
    the keys of m*(T2); a leg into those keys becomes its first projection.
    """
    sub, counit_leg = substitute_table(m, T2, cap)
    if leg.source != T1.keys:
        raise BoundaryMismatch("leg must start at the keys of T1")
    if leg.target == T2.keys:
        v = _naturality(T1, T2, m, leg)
        if not v:
            raise NotNatural(v.detail)
        return FinFunction(T1.keys, sub.keys, {x: pair(leg(x), T1.rows[x].key()) for x in T1.keys})
    if leg.target == sub.keys:
        v = _naturality(T1, sub, identity_signed_morphism(T1.domain), leg)
        if not v:
            raise NotNatural(v.detail)
        return compose(leg, counit_leg.key_map)
    raise BoundaryMismatch("leg lands neither in T2 nor in its substitution")


def levo_morphism(im: Infomorphism, sig1: Signature) -> SignedDomainMorphism:
    """⟨counit, f, g⟩ from ⟨f*(sig1), A₂⟩ to ⟨sig1, A₁⟩; its tuple map is the
    levo bridge."""
    pulled, eps = substitute_along(im.sort_map, sig1)
    return SignedDomainMorphism(SignatureMorphism(pulled, sig1, eps.arity_map, im.sort_map), im)


def dextro_morphism(im: Infomorphism, sig2: Signature) -> SignedDomainMorphism:
    """⟨id, f, g⟩ from ⟨sig2, A₂⟩ to ⟨Σ_f(sig2), A₁⟩; its tuple map is the
    dextro bridge."""
    summed = sum_along(im.sort_map, sig2)
    return SignedDomainMorphism(SignatureMorphism(sig2, summed, FinFunction.identity(sig2.arity), im.sort_map), im)


def acute_tbl(im: Infomorphism, T: Table) -> Table:
    """Move a table over A₁ to A₂: pull its signature back along f and send
    every row through the levo bridge."""
    if T.domain.domain != im.target:
        raise BoundaryMismatch("table is not over the target type domain")
    sig1 = T.signature
    pulled, _ = substitute_along(im.sort_map, sig1)
    return Table(SignedDomain(pulled, im.source), T.keys,
                 {k: bridge_levo(im, sig1, t) for k, t in T.rows.items()}, check=False)


def grave_tbl(im: Infomorphism, T: Table, cap: int = DEFAULT_CAP) -> Table:
    """Move a table over A₂ to A₁: retype its signature along f and pair
    every key with each A₁-tuple that the value map sends onto its row."""
    if T.domain.domain != im.source:
        raise BoundaryMismatch("table is not over the source type domain")
    return substitute_table(dextro_morphism(im, T.signature), T, cap)[0]


def grave_tbl_sign(sm: SignatureMorphism, T: Table) -> Table:
    """Restrict the rows of T along h, classified by f⁻¹(A₁)."""
    if T.signature != sm.target:
        raise BoundaryMismatch("table is not over the target signature")
    A1 = T.domain.domain
    D2 = SignedDomain(sm.source, inverse_image_domain(sm.sort_map, A1))
    return Table(D2, T.keys, {k: bridge_signature(sm, A1, t) for k, t in T.rows.items()}, check=False)


# fiber hom-sets, functor actions, unit and counit ------------------------------------------

FiberArrow = tuple  # (arity map I_target → I_source, key map K_source → K_target)


def fiber_homs(S: Table, T: Table) -> list[FiberArrow]:
    """All fiber morphisms S → T over one type domain, by exhaustive search
    over sort-preserving arity maps and per-key row matches."""
    if S.domain.domain != T.domain.domain:
        raise BoundaryMismatch("fiber morphisms need a common type domain")
    by_row = defaultdict(list)
    for y in T.keys:
        by_row[T.rows[y].key()].append(y)
    out = []
    xs = S.keys.elements
    for h in typed_functions(T.signature, S.signature):
        cands = [by_row.get(S.rows[x].along(h).key(), []) for x in xs]
        for ys in itertools.product(*cands):
            out.append((h, FinFunction(S.keys, T.keys, dict(zip(xs, ys)))))
    return out


def _fiber(source: Table, target: Table, arrow: FiberArrow) -> TableMorphism:
    return fiber_table_morphism(source, target, arrow[0], arrow[1])


def acute_on_morphism(im: Infomorphism, m: TableMorphism, acute: Callable = acute_tbl) -> TableMorphism:
    """Action of acute_tbl on a fiber morphism over A₁."""
    src, tgt = acute(im, m.source), acute(im, m.target)
    return fiber_table_morphism(src, tgt, substitute_morphism(im.sort_map, m.dom_mor.sig_mor), m.key_map.as_dict())


def grave_on_morphism(im: Infomorphism, m: TableMorphism, grave: Callable = grave_tbl) -> TableMorphism:
    """Action of grave_tbl on a fiber morphism over A₂."""
    src, tgt = grave(im, m.source), grave(im, m.target)
    h = sum_morphism(im.sort_map, m.dom_mor.sig_mor)
    k = {}
    for key, u in src.rows.items():
        k[key] = pair(m.key_map(_first_key(src, key)), u.along(h).key())
    return fiber_table_morphism(src, tgt, h, k)


def _first_key(sub: Table, key: str) -> str:
    # keys of substituted tables are ⟨k,u⟩ with u the row
    suffix = "," + sub.rows[key].key() + "⟩"
    return key[1:len(key) - len(suffix)]


def adjunction_unit(im: Infomorphism, T1: Table, acute: Callable = acute_tbl,
                    grave: Callable = grave_tbl) -> TableMorphism:
    """T1 → grave(acute(T1)) over A₁."""
    target = grave(im, acute(im, T1))
    pulled, eps = substitute_along(im.sort_map, T1.signature)
    k = {x: pair(x, T1.rows[x].along(eps).key()) for x in T1.keys}
    return fiber_table_morphism(T1, target, eps, k)


def adjunction_counit(im: Infomorphism, T2: Table, acute: Callable = acute_tbl,
                      grave: Callable = grave_tbl) -> TableMorphism:
    """acute(grave(T2)) → T2 over A₂."""
    middle = grave(im, T2)
    source = acute(im, middle)
    eta = unit(im.sort_map, T2.signature)
    k = {key: _first_key(middle, key) for key in source.keys}
    return fiber_table_morphism(source, T2, eta, k)


@dataclass(frozen=True)
class TableBound:
    max_keys: int = 4
    max_tuples: int = 64
    max_arity: int = 2
    tables_per_signature: int = 2


def sample_tables(D: SignedDomain, rng: random.Random, bound: TableBound) -> list[Table]:
    """The empty table plus a few random tables over D within the bound."""
    out = [Table(D, (), {})]
    ts = tuple_set(D).list() if len(tuple_set(D)) <= bound.max_tuples else []
    if not ts:
        return out
    for _ in range(bound.tables_per_signature):
        n = rng.randint(1, bound.max_keys)
        out.append(Table.from_rows(D, {f"k{j}": rng.choice(ts) for j in range(n)}))
    return out


def table_family(sorts: FinSet, dom, rng: random.Random, bound: TableBound) -> list[Table]:
    out = []
    for sig in small_signatures(sorts, bound.max_arity):
        D = SignedDomain(sig, dom)
        if len(tuple_set(D)) <= bound.max_tuples:
            out.extend(sample_tables(D, rng, bound))
    return out


def check_table_fiber_adjunction(im: Infomorphism, bound: TableBound = TableBound(), seed: int = 0,
                                 tables1: Sequence[Table] | None = None,
                                 tables2: Sequence[Table] | None = None,
                                 acute: Callable = acute_tbl, grave: Callable = grave_tbl) -> Verdict:
    """Check that acute and grave form an adjunction between the table
    fibers over A₁ and A₂: transposition is a bijection of hom-sets and the
    triangle identities hold."""
    rng = random.Random(seed)
    f = im.sort_map
    if tables1 is None:
        tables1 = table_family(f.target, im.target, rng, bound)
    if tables2 is None:
        tables2 = table_family(f.source, im.source, rng, bound)
    try:
        for T1 in tables1:
            left = acute(im, T1)
            if left.keys != T1.keys:
                return Verdict.reject(T1, "acute does not keep the keys of its input")
            for T2 in tables2:
                right = grave(im, T2)
                lhs = fiber_homs(left, T2)
                rhs = set(fiber_homs(T1, right))
                to_sum, to_sub = {}, {}
                seen = set()
                for h_hat, k in lhs:
                    if h_hat not in to_sum:
                        to_sum[h_hat] = transpose_to_sum(
                            f, T1.signature, fiber_morphism(T2.signature, left.signature, h_hat)).arity_map
                    h = to_sum[h_hat]
                    kk = {x: pair(k(x), T1.rows[x].along(h).key()) for x in T1.keys}
                    arrow = (h, FinFunction(T1.keys, right.keys, kk))
                    if arrow not in rhs:
                        return Verdict.reject((T1, T2, k), "transpose of a morphism is not a morphism")
                    seen.add(arrow)
                if len(seen) != len(lhs) or seen != rhs:
                    return Verdict.reject((T1, T2), f"hom-sets of sizes {len(lhs)} and {len(rhs)} "
                                                    "are not matched by transposition")
                back = set()
                for h, kk in rhs:
                    if h not in to_sub:
                        to_sub[h] = transpose_to_substitution(
                            f, T2.signature, fiber_morphism(right.signature, T1.signature, h)).arity_map
                    k = {x: _first_key(right, kk(x)) for x in T1.keys}
                    back.add((to_sub[h], FinFunction(left.keys, T2.keys, k)))
                if back != set(lhs):
                    return Verdict.reject((T1, T2), "transposing back does not recover the hom-set")
        for T1 in tables1:
            eta = adjunction_unit(im, T1, acute, grave)
            back = compose_table_morphisms(acute_on_morphism(im, eta, acute),
                                           adjunction_counit(im, acute(im, T1), acute, grave))
            if back != identity_table_morphism(acute(im, T1)):
                return Verdict.reject(T1, "counit after acute(unit) is not the identity")
        for T2 in tables2:
            right = grave(im, T2)
            back = compose_table_morphisms(adjunction_unit(im, right, acute, grave),
                                           grave_on_morphism(im, adjunction_counit(im, T2, acute, grave), grave))
            if back != identity_table_morphism(right):
                return Verdict.reject(T2, "grave(counit) after unit is not the identity")
    except CatTablesError as e:
        return Verdict.reject(None, f"construction failed: {e}")
    return Verdict.accept()


# composition laws --------------------------------------------------------------------------

def check_grothendieck_composition(m1: TableMorphism, m2: TableMorphism, cap: int = DEFAULT_CAP) -> Verdict:
    """Compose T₁ → T₂ → T₃ through fiber transposes on both sides of the
    push/pull adjunction and compare with componentwise composition."""
    whole = compose_table_morphisms(m1, m2)
    d1, d2, d = m1.dom_mor, m2.dom_mor, whole.dom_mor
    T1, T2, T3 = m1.source, m2.source, m2.target
    pushed = sigma_table(d2, sigma_table(d1, T1))
    if pushed != sigma_table(d, T1):
        return Verdict.reject(T1, "pushing forward in two steps differs from one step")
    via_sum = compose(TableMorphism(pushed, sigma_table(d2, T2), identity_signed_morphism(pushed.domain),
                                    m1.key_map).key_map, m2.key_map)
    if via_sum != whole.key_map:
        return Verdict.reject(None, "sum-side composite differs from the componentwise composite")

    k1 = transpose_table(d1, T1, T2, m1.key_map, cap)
    k2 = transpose_table(d2, T2, T3, m2.key_map, cap)
    inner, inner_leg = substitute_table(d2, T3, cap)
    outer, outer_leg = substitute_table(d1, inner, cap)
    direct, _ = substitute_table(d, T3, cap)
    mid, mid_leg = substitute_table(d1, T2, cap)
    expected = transpose_table(d, T1, T3, whole.key_map, cap)
    for x in T1.keys:
        first = k1(x)
        k_mid, u = mid_leg.key_map(first), mid.rows[first]
        nested = pair(k2(k_mid), u.key())
        if nested not in outer.keys:
            return Verdict.reject(x, "pulled-back leg leaves the nested substitution")
        flat = pair(inner_leg.key_map(outer_leg.key_map(nested)), outer.rows[nested].key())
        if flat != expected(x) or flat not in direct.keys:
            return Verdict.reject(x, "substitution-side composite differs from the transpose of the composite")
    return Verdict.accept()


def check_fiber_factorizations(m: SignedDomainMorphism, T: Table) -> Verdict:
    """Pushing T forward along ⟨h,f,g⟩ equals each of the three composites
    of shorter passages, row by row."""
    im = m.info_mor
    sig2, sig1 = m.sig_mor.source, m.sig_mor.target
    direct = sigma_table(m, T)
    h = sum_part(m)
    h_hat = transpose_to_substitution(m.sort_map, sig2, h)
    pulled, _ = substitute_along(m.sort_map, sig1)
    A1, A2 = im.target, im.source
    routes = {
        "signature": sigma_table(value_translation(sig2, im), grave_tbl_sign(m.sig_mor, T)),
        "levo": sigma_table(fiber_signed_morphism(SignedDomain(sig2, A2), SignedDomain(pulled, A2), h_hat),
                            acute_tbl(im, T)),
        "dextro": sigma_table(dextro_morphism(im, sig2),
                              sigma_table(fiber_signed_morphism(SignedDomain(h.source, A1),
                                                                SignedDomain(sig1, A1), h), T)),
    }
    for name, got in routes.items():
        if got != direct:
            bad = next((k for k in T.keys if got.rows.get(k) != direct.rows[k]), None)
            return Verdict.reject(bad, f"{name} route differs from the direct push")
    return Verdict.accept()
