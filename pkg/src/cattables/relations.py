"""Relations (duplicate-free tuple sets), quantification along arity maps,
and the reflection of tables onto relations."""
from __future__ import annotations

from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import BoundaryMismatch, CatTablesError, IllegalTuple, Verdict
from .sets import FinFunction, FinSet, image_factorize
from .signatures import SignatureMorphism, fiber_morphism, typed_functions
from .tables import (Table, TableMorphism, compose_table_morphisms, fiber_homs, fiber_table_morphism)
from .tuples import DEFAULT_CAP, SignedDomain, Tuple, fiber_signed_morphism, preimage, tuple_set
from .typedomains import TypeDomain


class Relation:
    __slots__ = ("domain", "members")

    def __init__(self, domain: SignedDomain, members: Iterable, check: bool = True):
        self.domain = domain
        self.members = frozenset(m if isinstance(m, Tuple) else Tuple(m) for m in members)
        if check:
            for t in self.members:
                if not domain.is_legal(t):
                    raise IllegalTuple(f"member {dict(t)} is not legal for {domain.signature}")

    def __iter__(self) -> Iterator[Tuple]:
        return iter(sorted(self.members, key=Tuple.key))

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, t: object) -> bool:
        return t in self.members

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Relation) and self.domain == other.domain and self.members == other.members

    def __hash__(self) -> int:
        return hash(self.members)

    def __repr__(self) -> str:
        return f"Relation({[t.as_dict() for t in self]})"

    def issubset(self, other: "Relation") -> bool:
        return self.domain == other.domain and self.members <= other.members


def full_relation(D: SignedDomain, cap: int = DEFAULT_CAP) -> Relation:
    return Relation(D, tuple_set(D, cap), check=False)


def _restriction(h: SignatureMorphism, A: TypeDomain):
    return fiber_signed_morphism(SignedDomain(h.source, A), SignedDomain(h.target, A), h)


def exists_along(h: SignatureMorphism, R: Relation) -> Relation:
    """Direct image of R under t ↦ h·t (h runs from the new header to R's)."""
    if h.target != R.domain.signature:
        raise BoundaryMismatch("h must land in the relation's signature")
    return Relation(SignedDomain(h.source, R.domain.domain), (t.along(h) for t in R.members), check=False)


def inverse_along(h: SignatureMorphism, R: Relation) -> Relation:
    """Every tuple t over h's target with h·t in R."""
    if h.source != R.domain.signature:
        raise BoundaryMismatch("h must start at the relation's signature")
    m = _restriction(h, R.domain.domain)
    return Relation(m.target, (u for v in R.members for u in preimage(m, v)), check=False)


def forall_along(h: SignatureMorphism, S: Relation, cap: int = DEFAULT_CAP) -> Relation:
    """Right adjoint of inverse_along: the tuples v over h's source all of
    whose preimages lie in S."""
    if h.target != S.domain.signature:
        raise BoundaryMismatch("h must land in the relation's signature")
    m = _restriction(h, S.domain.domain)
    return Relation(m.source, (v for v in tuple_set(m.source, cap)
                               if all(u in S.members for u in preimage(m, v))), check=False)


def image_of_table(T: Table) -> Relation:
    return Relation(T.domain, T.rows.values(), check=False)


def include_relation(R: Relation) -> Table:
    return Table(R.domain, FinSet(t.key() for t in R.members), {t.key(): t for t in R.members}, check=False)


def reflection_unit(T: Table) -> TableMorphism:
    """T → include(image(T)), sending each key to its row."""
    target = include_relation(image_of_table(T))
    rows_fn = FinFunction(T.keys, FinSet(t.key() for t in T.rows.values()), {k: t.key() for k, t in T.rows.items()})
    _, e, _ = image_factorize(rows_fn)
    return fiber_table_morphism(T, target, FinFunction.identity(T.signature.arity), e.as_dict())


def relation_homs(R1: Relation, R2: Relation) -> list[FinFunction]:
    """Arity maps h: I₂ → I₁ with ∃_h(R1) ⊆ R2 (at most one morphism per h)."""
    out = []
    for h in typed_functions(R2.domain.signature, R1.domain.signature):
        sm = fiber_morphism(R2.domain.signature, R1.domain.signature, h)
        if exists_along(sm, R1).members <= R2.members:
            out.append(h)
    return out


def check_reflection(tables: Sequence[Table], relations: Sequence[Relation], unit=reflection_unit) -> Verdict:
    """Image is left adjoint to inclusion, with inclusion fully faithful."""
    try:
        for R in relations:
            if image_of_table(include_relation(R)) != R:
                return Verdict.reject(R, "image of the included relation differs from it")
            eta = unit(include_relation(R))
            if eta.key_map != FinFunction.identity(eta.source.keys) or eta.target != eta.source:
                return Verdict.reject(R, "unit at an included relation is not the identity")
        for T in tables:
            eta = unit(T)
            if not eta.key_map.is_surjective():
                return Verdict.reject(T, "unit key map is not surjective")
            if eta.arity_map != FinFunction.identity(T.signature.arity):
                return Verdict.reject(T, "unit does not fix the signature")
            if image_of_table(eta.target) != image_of_table(T):
                return Verdict.reject(T, "image of the unit is not the identity on the image")
            for R in relations:
                if R.domain.domain != T.domain.domain:
                    continue
                inc = include_relation(R)
                table_side = set(fiber_homs(T, inc))
                factored = set()
                for h in relation_homs(image_of_table(eta.target), R):
                    inc_h = fiber_table_morphism(eta.target, inc, h,
                                                 {k: t.along(h).key() for k, t in eta.target.rows.items()})
                    whole = compose_table_morphisms(eta, inc_h)
                    factored.add((whole.arity_map, whole.key_map))
                if factored != table_side:
                    return Verdict.reject((T, R), f"{len(table_side)} table morphisms but "
                                                  f"{len(factored)} factor through the unit")
    except CatTablesError as e:
        return Verdict.reject(None, f"construction failed: {e}")
    return Verdict.accept()


def _subset_masks(n: int) -> np.ndarray:
    return np.arange(1 << n, dtype=np.int64)


def _relation_of(ts: Sequence[Tuple], D: SignedDomain, mask: int) -> Relation:
    return Relation(D, (t for b, t in enumerate(ts) if mask >> b & 1), check=False)


def _mask_of(R: Relation, index: dict) -> int:
    m = 0
    for t in R.members:
        m |= 1 << index[t]
    return m


def check_galois(h: SignatureMorphism, A: TypeDomain, max_tuples: int = 12) -> Verdict:
    """∃_h ⊣ h⁻¹ ⊣ ∀_h on every pair of subsets of the two tuple sets."""
    D, D2 = SignedDomain(h.target, A), SignedDomain(h.source, A)
    big, small = tuple_set(D, max_tuples).list(), tuple_set(D2, max_tuples).list()
    ib, is_ = {t: k for k, t in enumerate(big)}, {t: k for k, t in enumerate(small)}
    subsets_b, subsets_s = _subset_masks(len(big)), _subset_masks(len(small))
    ex = np.array([_mask_of(exists_along(h, _relation_of(big, D, s)), is_) for s in range(1 << len(big))])
    inv = np.array([_mask_of(inverse_along(h, _relation_of(small, D2, r)), ib) for r in range(1 << len(small))])
    fa = np.array([_mask_of(forall_along(h, _relation_of(big, D, s)), is_) for s in range(1 << len(big))])
    for r in range(1 << len(small)):
        left = (ex & ~r) == 0
        right = (subsets_b & ~inv[r]) == 0
        if not np.array_equal(left, right):
            s = int(np.flatnonzero(left != right)[0])
            return Verdict.reject((s, r), "∃ is not left adjoint to the inverse image")
    for s in range(1 << len(big)):
        left = (inv & ~s) == 0
        right = (subsets_s & ~fa[s]) == 0
        if not np.array_equal(left, right):
            r = int(np.flatnonzero(left != right)[0])
            return Verdict.reject((s, r), "∀ is not right adjoint to the inverse image")
    return Verdict.accept()
