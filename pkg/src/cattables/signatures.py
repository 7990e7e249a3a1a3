"""Signatures (typed headers), their morphisms, and the adjunction between
retyping along a sort map and pulling a header back along it."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import BoundaryMismatch, IllTyped, NotNatural, Verdict
from .sets import FinFunction, FinSet, compose, pair, pullback_set, quotient_classes


@dataclass(frozen=True)
class Signature:
    """Attribute names ``arity`` typed by ``typing: arity → sorts``."""

    arity: FinSet
    sorts: FinSet
    typing: FinFunction

    def __post_init__(self):
        if self.typing.source != self.arity or self.typing.target != self.sorts:
            raise BoundaryMismatch("typing must run from the arity into the sorts")

    @classmethod
    def of(cls, attributes: Mapping[str, str], sorts: Iterable[str] | None = None) -> "Signature":
        sort_set = FinSet(attributes.values() if sorts is None else sorts)
        arity = FinSet(attributes)
        return cls(arity, sort_set, FinFunction(arity, sort_set, dict(attributes)))

    def sort_of(self, attribute: str) -> str:
        return self.typing(attribute)

    def attributes(self) -> dict[str, str]:
        return self.typing.as_dict()

    def __repr__(self) -> str:
        body = ", ".join(f"{i}:{x}" for i, x in self.typing.items())
        return f"Signature({{{body}}} over {list(self.sorts)})"


def _naturality(source: Signature, target: Signature, h: FinFunction, f: FinFunction) -> Verdict:
    for i in source.arity:
        if target.sort_of(h(i)) != f(source.sort_of(i)):
            return Verdict.reject(i, f"attribute {i} is sent to {h(i)} of sort "
                                     f"{target.sort_of(h(i))}, expected {f(source.sort_of(i))}")
    return Verdict.accept()


class SignatureMorphism:
    """⟨h, f⟩ from ⟨I₂,s₂,X₂⟩ to ⟨I₁,s₁,X₁⟩ with s₁(h(i)) = f(s₂(i))."""

    __slots__ = ("source", "target", "arity_map", "sort_map")

    def __init__(self, source: Signature, target: Signature, arity_map: FinFunction,
                 sort_map: FinFunction, check: bool = True):
        if arity_map.source != source.arity or arity_map.target != target.arity:
            raise BoundaryMismatch("arity map must run between the two arities")
        if sort_map.source != source.sorts or sort_map.target != target.sorts:
            raise BoundaryMismatch("sort map must run between the two sort sets")
        self.source = source
        self.target = target
        self.arity_map = arity_map
        self.sort_map = sort_map
        if check:
            v = _naturality(source, target, arity_map, sort_map)
            if not v:
                raise NotNatural(v.detail)

    def __call__(self, attribute: str) -> str:
        return self.arity_map(attribute)

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, SignatureMorphism) and self.source == other.source
                and self.target == other.target and self.arity_map == other.arity_map
                and self.sort_map == other.sort_map)

    def __hash__(self) -> int:
        return hash((self.arity_map, self.sort_map))

    def __repr__(self) -> str:
        return f"SignatureMorphism({self.arity_map!r}, {self.sort_map!r})"


def validate_signature_morphism(m: SignatureMorphism) -> Verdict:
    return _naturality(m.source, m.target, m.arity_map, m.sort_map)


def fiber_morphism(source: Signature, target: Signature, h: FinFunction | Mapping[str, str]) -> SignatureMorphism:
    """A morphism over a fixed sort set (identity sort map)."""
    if source.sorts != target.sorts:
        raise BoundaryMismatch("fiber morphisms need a common sort set")
    if not isinstance(h, FinFunction):
        h = FinFunction(source.arity, target.arity, h)
    return SignatureMorphism(source, target, h, FinFunction.identity(source.sorts))


def identity_signature_morphism(sig: Signature) -> SignatureMorphism:
    return fiber_morphism(sig, sig, FinFunction.identity(sig.arity))


def compose_signature_morphisms(m1: SignatureMorphism, m2: SignatureMorphism) -> SignatureMorphism:
    """First m1, then m2."""
    if m1.target != m2.source:
        raise BoundaryMismatch("signature morphisms are not composable")
    return SignatureMorphism(m1.source, m2.target, compose(m1.arity_map, m2.arity_map),
                             compose(m1.sort_map, m2.sort_map))


def sum_along(f: FinFunction, sig: Signature) -> Signature:
    """Retype ``sig`` (over f's source) along f: same attributes, typing s·f."""
    if sig.sorts != f.source:
        raise BoundaryMismatch("signature sorts differ from the source of the sort map")
    return Signature(sig.arity, f.target, compose(sig.typing, f))


def sum_morphism(f: FinFunction, m: SignatureMorphism) -> SignatureMorphism:
    """Action of retyping on a fiber morphism over f's source."""
    return fiber_morphism(sum_along(f, m.source), sum_along(f, m.target), m.arity_map)


def substitute_along(f: FinFunction, sig: Signature) -> tuple[Signature, SignatureMorphism]:
    """Pull ``sig`` (over f's target) back along f.

    Attributes are the pairs ⟨i₁,x₂⟩ with s₁(i₁) = f(x₂), typed by x₂.
    Also returns the counit: the first projection, seen as a fiber
    morphism from the retyped pullback to ``sig``.
    """
    if sig.sorts != f.target:
        raise BoundaryMismatch("signature sorts differ from the target of the sort map")
    P, first, second = pullback_set(sig.typing, f)
    pulled = Signature(P, f.source, second)
    counit_mor = fiber_morphism(sum_along(f, pulled), sig, first)
    return pulled, counit_mor


def counit(f: FinFunction, sig1: Signature) -> SignatureMorphism:
    return substitute_along(f, sig1)[1]


def unit(f: FinFunction, sig2: Signature) -> SignatureMorphism:
    """i₂ ↦ ⟨i₂, s₂(i₂)⟩, from ``sig2`` into the pullback of its retyping."""
    pulled, _ = substitute_along(f, sum_along(f, sig2))
    return fiber_morphism(sig2, pulled, {i: pair(i, sig2.sort_of(i)) for i in sig2.arity})


def substitute_morphism(f: FinFunction, m: SignatureMorphism) -> SignatureMorphism:
    """Action of pulling back on a fiber morphism over f's target."""
    src, eps = substitute_along(f, m.source)
    tgt, _ = substitute_along(f, m.target)
    return fiber_morphism(src, tgt, {p: pair(m(eps(p)), src.sort_of(p)) for p in src.arity})


def transpose_to_substitution(f: FinFunction, sig2: Signature, h: SignatureMorphism) -> SignatureMorphism:
    """From h: Σ_f(sig2) → sig1 over X₁ to ĥ: sig2 → f*(sig1) over X₂."""
    if h.source != sum_along(f, sig2):
        raise BoundaryMismatch("h must start at the retyped signature")
    v = validate_signature_morphism(h)
    if not v:
        raise NotNatural(v.detail)
    pulled, _ = substitute_along(f, h.target)
    return fiber_morphism(sig2, pulled, {i: pair(h(i), sig2.sort_of(i)) for i in sig2.arity})


def transpose_to_sum(f: FinFunction, sig1: Signature, h_hat: SignatureMorphism) -> SignatureMorphism:
    """From ĥ: sig2 → f*(sig1) over X₂ to h = ĥ then counit, over X₁."""
    pulled, eps = substitute_along(f, sig1)
    if h_hat.target != pulled:
        raise BoundaryMismatch("ĥ must land in the pulled-back signature")
    v = validate_signature_morphism(h_hat)
    if not v:
        raise NotNatural(v.detail)
    sig2 = h_hat.source
    return fiber_morphism(sum_along(f, sig2), sig1, compose(h_hat.arity_map, eps.arity_map))


def transpose_signature(f: FinFunction, m: SignatureMorphism, other: Signature) -> SignatureMorphism:
    """Adjoint transpose of ``m``. ``other`` is the signature the transpose
    needs but ``m`` does not carry: sig2 when m starts at Σ_f(sig2), sig1
    when m lands in f*(sig1)."""
    if other.sorts == f.source and m.source == sum_along(f, other) and m.target.sorts == f.target:
        return transpose_to_substitution(f, other, m)
    if other.sorts == f.target and m.target == substitute_along(f, other)[0]:
        return transpose_to_sum(f, other, m)
    raise BoundaryMismatch("morphism is on neither side of the adjunction for this sort map")


def typed_functions(source: Signature, target: Signature,
                    allowed: Mapping[str, Iterable[str]] | None = None) -> Iterator[FinFunction]:
    """Every sort-preserving arity map between two signatures over the same
    sorts, optionally restricted per attribute."""
    by_sort: dict[str, list[str]] = {}
    for j in target.arity:
        by_sort.setdefault(target.sort_of(j), []).append(j)
    choices = []
    for i in source.arity:
        cands = by_sort.get(source.sort_of(i), [])
        if allowed is not None:
            keep = set(allowed[i])
            cands = [c for c in cands if c in keep]
        choices.append(cands)
    for values in itertools.product(*choices):
        yield FinFunction(source.arity, target.arity, dict(zip(source.arity.elements, values)))


def colimit_signatures(nodes: Mapping[str, Signature],
                       edges: Sequence[tuple[str, str, SignatureMorphism]],
                       sorts: FinSet | None = None,
                       qualified: bool = False) -> tuple[Signature, dict[str, SignatureMorphism]]:
    """Colimit of a diagram of signatures with identity sort maps.

    ``edges`` holds (source node, target node, morphism). Attributes of the
    coproduct are identified along every edge; each class is named by the
    attribute name of its least member ``(node, attr)``, falling back to
    ``node.attr`` where plain names would collide (or always, when
    ``qualified``).
    """
    if sorts is None:
        if not nodes:
            raise BoundaryMismatch("an empty diagram needs an explicit sort set")
        sorts = next(iter(nodes.values())).sorts
    for n, sig in nodes.items():
        if sig.sorts != sorts:
            raise BoundaryMismatch(f"node {n} is over a different sort set")
    for a, b, m in edges:
        if m.source != nodes[a] or m.target != nodes[b]:
            raise BoundaryMismatch(f"edge {a}→{b} does not match its endpoints")
        if m.sort_map != FinFunction.identity(sorts):
            raise BoundaryMismatch(f"edge {a}→{b} has a non-identity sort map")

    members = [(n, i) for n in sorted(nodes) for i in nodes[n].arity]
    code = {mi: f"{k}" for k, mi in enumerate(members)}
    back = {v: k for k, v in code.items()}
    rep_code = quotient_classes(code.values(),
                                ((code[(a, i)], code[(b, m(i))]) for a, b, m in edges for i in m.source.arity))
    classes: dict[tuple[str, str], list[tuple[str, str]]] = {}
    for mi in members:
        classes.setdefault(back[rep_code[code[mi]]], []).append(mi)
    least = {r: min(ms) for r, ms in classes.items()}

    def qual(mi):
        return f"{mi[0]}.{mi[1]}"

    names = {r: qual(least[r]) if qualified else least[r][1] for r in classes}
    if not qualified and len(set(names.values())) != len(names):
        counts: dict[str, int] = {}
        for v in names.values():
            counts[v] = counts.get(v, 0) + 1
        names = {r: qual(least[r]) if counts[v] > 1 else v for r, v in names.items()}
        if len(set(names.values())) != len(names):
            names = {r: qual(least[r]) for r in classes}

    typing = {}
    for r, ms in classes.items():
        found = {nodes[n].sort_of(i) for n, i in ms}
        if len(found) != 1:
            raise IllTyped(f"attributes {sorted(ms)} are identified but carry sorts {sorted(found)}")
        typing[names[r]] = found.pop()
    arity = FinSet(typing)
    apex = Signature(arity, sorts, FinFunction(arity, sorts, typing))
    legs = {}
    for n, sig in nodes.items():
        legs[n] = fiber_morphism(sig, apex, {i: names[back[rep_code[code[(n, i)]]]] for i in sig.arity})
    return apex, legs


def check_signature_adjunction(f: FinFunction, sig2: Signature, sig1: Signature) -> Verdict:
    """Transposition between Σ_f(sig2) → sig1 and sig2 → f*(sig1) is a
    bijection with inverse round-trips, and both triangle identities hold."""
    summed = sum_along(f, sig2)
    pulled, _ = substitute_along(f, sig1)
    left = [fiber_morphism(summed, sig1, h) for h in typed_functions(summed, sig1)]
    right = {fiber_morphism(sig2, pulled, h) for h in typed_functions(sig2, pulled)}
    images = set()
    for h in left:
        h_hat = transpose_signature(f, h, sig2)
        if h_hat not in right:
            return Verdict.reject(h, "transpose is not a morphism into the pullback")
        if transpose_signature(f, h_hat, sig1) != h:
            return Verdict.reject(h, "transposing twice does not return the morphism")
        images.add(h_hat)
    if images != right or len(images) != len(left):
        return Verdict.reject((len(left), len(right)), "transposition is not a bijection")
    for h_hat in right:
        if transpose_signature(f, transpose_signature(f, h_hat, sig1), sig2) != h_hat:
            return Verdict.reject(h_hat, "transposing twice does not return the morphism")
    first = compose_signature_morphisms(sum_morphism(f, unit(f, sig2)), counit(f, summed))
    if first != identity_signature_morphism(summed):
        return Verdict.reject(sig2, "counit after the retyped unit is not the identity")
    second = compose_signature_morphisms(unit(f, pulled), substitute_morphism(f, counit(f, sig1)))
    if second != identity_signature_morphism(pulled):
        return Verdict.reject(sig1, "pulled-back counit after the unit is not the identity")
    return Verdict.accept()
