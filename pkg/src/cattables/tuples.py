"""Signed domains, legal tuples, the tuple passage and the tuple bridges.

A morphism of signed domains ⟨h, f, g⟩: D₂ → D₁ acts on tuples in the
opposite direction, sending a D₁-tuple t to i₂ ↦ g(t(h(i₂))).
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from math import prod
from typing import Iterable, Iterator, Mapping

from .errors import BoundaryMismatch, IllegalTuple, TooLarge, Verdict
from .sets import FinFunction, FinSet, pullback_set
from .signatures import (Signature, SignatureMorphism, colimit_signatures, compose_signature_morphisms,
                         counit, fiber_morphism, identity_signature_morphism, substitute_along,
                         sum_along, transpose_to_substitution, unit)
from .typedomains import (Infomorphism, TypeDomain, classify_tuple, compose_infomorphisms,
                          identity_infomorphism, inverse_image_domain)

DEFAULT_CAP = 10 ** 6


class Tuple(Mapping):
    """An immutable attribute → value assignment."""

    __slots__ = ("_d", "_key", "_hash")

    def __init__(self, assignment: Mapping[str, str] | Iterable[tuple[str, str]] = ()):
        d = dict(assignment)
        self._d = {k: d[k] for k in sorted(d)}
        self._key = None
        self._hash = None

    def __getitem__(self, attribute: str) -> str:
        return self._d[attribute]

    def __iter__(self):
        return iter(self._d)

    def __len__(self) -> int:
        return len(self._d)

    def items(self):
        return self._d.items()

    def values(self):
        return self._d.values()

    def key(self) -> str:
        """Canonical text form, also used as a key or element name."""
        if self._key is None:
            self._key = json.dumps(self._d, ensure_ascii=False, separators=(",", ":"))
        return self._key

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(tuple(self._d.items()))
        return self._hash

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Tuple):
            return self._d == other._d
        if isinstance(other, Mapping):
            return self._d == dict(other)
        return NotImplemented

    def __lt__(self, other: "Tuple") -> bool:
        return tuple(self._d.items()) < tuple(other._d.items())

    def __repr__(self) -> str:
        return f"Tuple({self._d})"

    def as_dict(self) -> dict[str, str]:
        return dict(self._d)

    def along(self, h: FinFunction | SignatureMorphism) -> "Tuple":
        """Precompose with an arity map: i ↦ t(h(i))."""
        amap = h.arity_map if isinstance(h, SignatureMorphism) else h
        return Tuple({i: self._d[amap(i)] for i in amap.source})

    def translate(self, g: FinFunction) -> "Tuple":
        return Tuple({i: g(v) for i, v in self._d.items()})


@dataclass(frozen=True)
class SignedDomain:
    signature: Signature
    domain: TypeDomain

    def __post_init__(self):
        if self.signature.sorts != self.domain.sorts:
            raise BoundaryMismatch("signature and type domain are over different sorts")

    def is_legal(self, t: Mapping[str, str]) -> bool:
        return classify_tuple(self.domain, self.signature, t)

    def require_legal(self, t: Mapping[str, str], what: str = "tuple") -> None:
        if not self.is_legal(t):
            raise IllegalTuple(f"{what} {dict(t)} is not legal for {self.signature}")

    def tuples(self, cap: int = DEFAULT_CAP) -> "TupleSet":
        return TupleSet(self, cap)


class TupleSet:
    """Intensional handle on the legal tuples of a signed domain."""

    def __init__(self, D: SignedDomain, cap: int = DEFAULT_CAP):
        self.D = D
        self.cap = cap
        sig = D.signature
        self._attrs = sig.arity.elements
        self._choices = [D.domain.extent(sig.sort_of(i)).elements for i in self._attrs]
        self.size = prod(len(c) for c in self._choices)

    def __contains__(self, t: object) -> bool:
        return isinstance(t, Mapping) and self.D.is_legal(t)

    def __len__(self) -> int:
        return self.size

    def __iter__(self) -> Iterator[Tuple]:
        if self.size > self.cap:
            raise TooLarge(self.size, self.cap)
        for values in itertools.product(*self._choices):
            yield Tuple(zip(self._attrs, values))

    def list(self) -> list[Tuple]:
        return list(self)


def tuple_set(D: SignedDomain, cap: int = DEFAULT_CAP) -> TupleSet:
    return TupleSet(D, cap)


class SignedDomainMorphism:
    """⟨h, f, g⟩ from ⟨I₂,s₂,A₂⟩ to ⟨I₁,s₁,A₁⟩."""

    __slots__ = ("sig_mor", "info_mor")

    def __init__(self, sig_mor: SignatureMorphism, info_mor: Infomorphism):
        if sig_mor.sort_map != info_mor.sort_map:
            raise BoundaryMismatch("signature and infomorphism components disagree on the sort map")
        self.sig_mor = sig_mor
        self.info_mor = info_mor

    @property
    def source(self) -> SignedDomain:
        return SignedDomain(self.sig_mor.source, self.info_mor.source)

    @property
    def target(self) -> SignedDomain:
        return SignedDomain(self.sig_mor.target, self.info_mor.target)

    @property
    def arity_map(self) -> FinFunction:
        return self.sig_mor.arity_map

    @property
    def sort_map(self) -> FinFunction:
        return self.sig_mor.sort_map

    @property
    def value_map(self) -> FinFunction:
        return self.info_mor.value_map

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, SignedDomainMorphism) and self.sig_mor == other.sig_mor
                and self.info_mor == other.info_mor)

    def __hash__(self) -> int:
        return hash((self.sig_mor, self.info_mor))

    def __repr__(self) -> str:
        return f"SignedDomainMorphism(h={self.arity_map!r}, f={self.sort_map!r}, g={self.value_map!r})"


def fiber_signed_morphism(source: SignedDomain, target: SignedDomain,
                          h: FinFunction | Mapping[str, str] | SignatureMorphism) -> SignedDomainMorphism:
    """⟨h, id, id⟩ between two signed domains over one type domain."""
    if source.domain != target.domain:
        raise BoundaryMismatch("fiber morphisms need a common type domain")
    sm = h if isinstance(h, SignatureMorphism) else fiber_morphism(source.signature, target.signature, h)
    return SignedDomainMorphism(sm, identity_infomorphism(source.domain))


def identity_signed_morphism(D: SignedDomain) -> SignedDomainMorphism:
    return SignedDomainMorphism(identity_signature_morphism(D.signature), identity_infomorphism(D.domain))


def compose_signed_morphisms(m1: SignedDomainMorphism, m2: SignedDomainMorphism) -> SignedDomainMorphism:
    """First m1: D₃→D₂, then m2: D₂→D₁."""
    return SignedDomainMorphism(compose_signature_morphisms(m1.sig_mor, m2.sig_mor),
                                compose_infomorphisms(m1.info_mor, m2.info_mor))


def _apply(m: SignedDomainMorphism, t: Mapping[str, str]) -> Tuple:
    h, g = m.arity_map, m.value_map
    return Tuple({i2: g(t[h(i2)]) for i2 in h.source})


def tuple_map(m: SignedDomainMorphism, t: Mapping[str, str]) -> Tuple:
    """Send a tuple of m's target to a tuple of m's source."""
    m.target.require_legal(t)
    return _apply(m, t)


def preimage(m: SignedDomainMorphism, v: Mapping[str, str]) -> Iterator[Tuple]:
    """Every tuple u of m's target with tuple_map(m, u) = v, in enumeration
    order, found attribute by attribute instead of by scanning."""
    h, g = m.arity_map, m.value_map
    D1 = m.target
    sig1, A1 = D1.signature, D1.domain
    attrs = sig1.arity.elements
    wanted: dict[str, set[str]] = {}
    for i2 in h.source:
        wanted.setdefault(h(i2), set()).add(v[i2])
    choices = []
    for i1 in attrs:
        ext = A1.extent(sig1.sort_of(i1)).elements
        need = wanted.get(i1)
        if need is None:
            choices.append(ext)
        elif len(need) > 1:
            return
        else:
            (target_value,) = need
            choices.append([y for y in ext if g(y) == target_value])
    for values in itertools.product(*choices):
        yield Tuple(zip(attrs, values))


def preimage_size(m: SignedDomainMorphism, v: Mapping[str, str]) -> int:
    h, g = m.arity_map, m.value_map
    sig1, A1 = m.target.signature, m.target.domain
    wanted: dict[str, set[str]] = {}
    for i2 in h.source:
        wanted.setdefault(h(i2), set()).add(v[i2])
    total = 1
    for i1 in sig1.arity:
        ext = A1.extent(sig1.sort_of(i1))
        need = wanted.get(i1)
        if need is None:
            total *= len(ext)
        elif len(need) > 1:
            return 0
        else:
            (tv,) = need
            total *= sum(1 for y in ext if g(y) == tv)
    return total


def bridge_signature(sm: SignatureMorphism, A1: TypeDomain, t: Mapping[str, str]) -> Tuple:
    """h·t, from tup(I₁,s₁,A₁) into tup(I₂,s₂,f⁻¹(A₁))."""
    SignedDomain(sm.target, A1).require_legal(t)
    return Tuple({i2: t[sm(i2)] for i2 in sm.source.arity})


def value_translation(sig2: Signature, im: Infomorphism) -> SignedDomainMorphism:
    """⟨id, id, g⟩ from ⟨I₂,s₂,A₂⟩ to ⟨I₂,s₂,f⁻¹(A₁)⟩."""
    pulled = inverse_image_domain(im.sort_map, im.target)
    ident = FinFunction.identity(sig2.sorts)
    return SignedDomainMorphism(identity_signature_morphism(sig2),
                                Infomorphism(im.source, pulled, ident, im.value_map))


def bridge_levo(im: Infomorphism, sig1: Signature, t: Mapping[str, str]) -> Tuple:
    """⟨i₁,x₂⟩ ↦ g(t(i₁)), from tup_{A₁}(sig1) into tup_{A₂}(f*(sig1))."""
    SignedDomain(sig1, im.target).require_legal(t)
    pulled, eps = substitute_along(im.sort_map, sig1)
    g = im.value_map
    return Tuple({p: g(t[eps(p)]) for p in pulled.arity})


def bridge_dextro(im: Infomorphism, sig2: Signature, t: Mapping[str, str]) -> Tuple:
    """t·g, from tup_{A₁}(Σ_f(sig2)) into tup_{A₂}(sig2)."""
    SignedDomain(sum_along(im.sort_map, sig2), im.target).require_legal(t)
    g = im.value_map
    return Tuple({i: g(t[i]) for i in sig2.arity})


def sum_part(m: SignedDomainMorphism) -> SignatureMorphism:
    """h as a fiber morphism Σ_f(I₂,s₂) → (I₁,s₁) over X₁."""
    sig2 = m.sig_mor.source
    return fiber_morphism(sum_along(m.sort_map, sig2), m.sig_mor.target, m.arity_map)


def check_factorizations(m: SignedDomainMorphism, cap: int = DEFAULT_CAP) -> Verdict:
    """Compare the tuple function of m with its three factorizations on
    every tuple of m's target."""
    im = m.info_mor
    sig2, sig1 = m.sig_mor.source, m.sig_mor.target
    A2, A1 = im.source, im.target
    translate = value_translation(sig2, im)
    h = sum_part(m)
    h_hat = transpose_to_substitution(m.sort_map, sig2, h)
    pulled, _ = substitute_along(m.sort_map, sig1)
    restrict_hat = fiber_signed_morphism(SignedDomain(sig2, A2), SignedDomain(pulled, A2), h_hat)
    restrict_h = fiber_signed_morphism(SignedDomain(h.source, A1), SignedDomain(sig1, A1), h)
    for t in tuple_set(m.target, cap):
        direct = tuple_map(m, t)
        routes = {
            "signature": tuple_map(translate, bridge_signature(m.sig_mor, A1, t)),
            "levo": tuple_map(restrict_hat, bridge_levo(im, sig1, t)),
            "dextro": bridge_dextro(im, sig2, tuple_map(restrict_h, t)),
        }
        for name, got in routes.items():
            if got != direct:
                return Verdict.reject(t, f"{name} route gives {got}, direct map gives {direct}")
    return Verdict.accept()


def small_signatures(sorts: FinSet, max_arity: int) -> Iterator[Signature]:
    """One signature per multiset of sorts of size ≤ max_arity, with
    attributes a0, a1, ..."""
    for n in range(max_arity + 1):
        for typing in itertools.combinations_with_replacement(sorts.elements, n):
            yield Signature.of({f"a{k}": x for k, x in enumerate(typing)}, sorts)


def check_levo_dextro_iso(im: Infomorphism, max_arity: int = 3, cap: int = DEFAULT_CAP) -> Verdict:
    f = im.sort_map
    A1 = im.target
    for sig1 in small_signatures(f.target, max_arity):
        pulled, _ = substitute_along(f, sig1)
        eps = counit(f, sig1)
        for t in tuple_set(SignedDomain(sig1, A1), cap):
            lhs = bridge_levo(im, sig1, t)
            rhs = bridge_dextro(im, pulled, t.along(eps))
            if lhs != rhs:
                return Verdict.reject((sig1, t), f"levo gives {lhs}, counit then dextro gives {rhs}")
    for sig2 in small_signatures(f.source, max_arity):
        summed = sum_along(f, sig2)
        eta = unit(f, sig2)
        for t in tuple_set(SignedDomain(summed, A1), cap):
            lhs = bridge_dextro(im, sig2, t)
            rhs = bridge_levo(im, summed, t).along(eta)
            if lhs != rhs:
                return Verdict.reject((sig2, t), f"dextro gives {lhs}, levo then unit gives {rhs}")
    return Verdict.accept()


def tuple_function(m: SignedDomainMorphism, cap: int = DEFAULT_CAP) -> FinFunction:
    """tup(m) as a function between the serialized tuple sets."""
    src = tuple_set(m.target, cap).list()
    dst = FinSet(t.key() for t in tuple_set(m.source, cap))
    return FinFunction(FinSet(t.key() for t in src), dst, {t.key(): _apply(m, t).key() for t in src})


def check_continuity(A: TypeDomain, left: SignatureMorphism, right: SignatureMorphism,
                     cap: int = DEFAULT_CAP) -> Verdict:
    """For a span I₁ ← I → I₂ over one sort set, the tuples of the pushout
    signature correspond bijectively to matching pairs of tuples."""
    apex = left.source
    if right.source != apex:
        raise BoundaryMismatch("span legs must share their source")
    push, legs = colimit_signatures({"0": apex, "1": left.target, "2": right.target},
                                    [("0", "1", left), ("0", "2", right)])
    Dp = SignedDomain(push, A)
    D1, D2, D0 = SignedDomain(left.target, A), SignedDomain(right.target, A), SignedDomain(apex, A)
    r1 = tuple_function(fiber_signed_morphism(D0, D1, left), cap)
    r2 = tuple_function(fiber_signed_morphism(D0, D2, right), cap)
    P, p1, p2 = pullback_set(r1, r2)
    index = {(p1(p), p2(p)): p for p in P}
    hit = set()
    for u in tuple_set(Dp, cap):
        image = (u.along(legs["1"]).key(), u.along(legs["2"]).key())
        if image not in index:
            return Verdict.reject(u, "pushout tuple does not land in the pullback")
        if image in hit:
            return Verdict.reject(u, "two pushout tuples share a pullback pair")
        hit.add(image)
    if len(hit) != len(P):
        missing = sorted(set(index) - hit)[0]
        return Verdict.reject(missing, "pullback pair without a pushout tuple")
    return Verdict.accept()


def check_tuple_functoriality(m1: SignedDomainMorphism, m2: SignedDomainMorphism,
                              cap: int = DEFAULT_CAP) -> Verdict:
    """For m1: D₃→D₂ and m2: D₂→D₁, the tuple map of the composite is the
    tuple map of m2 followed by that of m1, and identities act trivially."""
    whole = compose_signed_morphisms(m1, m2)
    ident = identity_signed_morphism(m2.target)
    for t in tuple_set(m2.target, cap):
        if tuple_map(ident, t) != t:
            return Verdict.reject(t, "identity moves a tuple")
        if tuple_map(whole, t) != tuple_map(m1, tuple_map(m2, t)):
            return Verdict.reject(t, "composite acts differently from the two steps")
    return Verdict.accept()
